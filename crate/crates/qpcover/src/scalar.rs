//! Exact scalar fields used by the algebra, module and series code.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A field with exact arithmetic.
///
/// Everything in the crate that does linear algebra is generic over this trait. Rational
/// types are the default; the prime fields [`Zp`] back the finite-field counting oracle.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Image of a rational number, or `None` when its denominator is not invertible.
    fn from_rational(r: &BigRational) -> Option<Self>;

    /// Rational value, when the field has characteristic zero.
    fn to_rational(&self) -> Option<BigRational>;

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(r.clone())
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

macro_rules! machine_ratio {
    ($($t:ty),*) => {$(
        impl Scalar for Ratio<$t> {
            fn from_i64(v: i64) -> Self {
                Ratio::from_integer(<$t>::from(v))
            }

            fn from_rational(r: &BigRational) -> Option<Self> {
                let n = <$t>::try_from(r.numer().clone()).ok()?;
                let d = <$t>::try_from(r.denom().clone()).ok()?;
                Some(Ratio::new(n, d))
            }

            fn to_rational(&self) -> Option<BigRational> {
                Some(BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom())))
            }
        }
    )*};
}

machine_ratio!(i64, i128);

/// The prime field `Z/PZ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Zp<const P: u64>(u64);

impl<const P: u64> Zp<P> {
    pub fn new(v: i64) -> Self {
        Zp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Zp::<P>(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> Display for Zp<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Zp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Zp((self.0 + o.0) % P)
    }
}

impl<'a, const P: u64> AddAssign<&'a Zp<P>> for Zp<P> {
    fn add_assign(&mut self, o: &'a Self) {
        *self = *self + *o;
    }
}

impl<const P: u64> Sub for Zp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Zp((self.0 + P - o.0) % P)
    }
}

impl<const P: u64> Neg for Zp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Zp((P - self.0) % P)
    }
}

impl<const P: u64> Mul for Zp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Zp(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Zp<P> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(o.0 != 0, "division by zero in Z/{P}");
        self * o.pow(P - 2)
    }
}

impl<const P: u64> Zero for Zp<P> {
    fn zero() -> Self {
        Zp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Zp<P> {
    fn one() -> Self {
        Zp(1 % P)
    }
}

impl<const P: u64> Scalar for Zp<P> {
    fn from_i64(v: i64) -> Self {
        Zp::new(v)
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        let p = BigInt::from(P);
        let n = r.numer().mod_floor(&p).to_u64()?;
        let d = r.denom().mod_floor(&p).to_u64()?;
        if d == 0 {
            return None;
        }
        Some(Zp(n) / Zp(d))
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }
}

/// Converts between rational scalars, failing on non-representable values.
pub fn convert<S: Scalar, T: Scalar>(x: &S) -> Option<T> {
    T::from_rational(&x.to_rational()?)
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Integer value of a scalar, when it is an integral rational.
pub fn as_integer<S: Scalar>(x: &S) -> Option<BigInt> {
    let r = x.to_rational()?;
    r.is_integer().then(|| r.to_integer())
}

/// Sign of a rational scalar: -1, 0 or 1.
pub fn sign<S: Scalar>(x: &S) -> i32 {
    match x.to_rational() {
        Some(r) if r.is_positive() => 1,
        Some(r) if r.is_negative() => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        for v in 1..7 {
            let x = Zp::<7>::new(v);
            assert_eq!(x * x.inverse().unwrap(), Zp::one());
        }
        assert!(Zp::<7>::zero().inverse().is_none());
    }

    #[test]
    fn rational_reduction_mod_p() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(Zp::<5>::from_rational(&half), Some(Zp::new(3)));
        assert_eq!(Zp::<2>::from_rational(&half), None);
    }

    #[test]
    fn machine_ratio_roundtrip() {
        let r = BigRational::new((-3).into(), 4.into());
        let m: Ratio<i64> = Scalar::from_rational(&r).unwrap();
        assert_eq!(m.to_rational().unwrap(), r);
        assert_eq!(fmt_rational(&r), "-3/4");
    }
}
