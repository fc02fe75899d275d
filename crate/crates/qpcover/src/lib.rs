//! Exact computations for coverings of quivers with potential.
//!
//! Truncated Jacobian algebras and their projectives, coverings and the lifting map `σ`,
//! nice gradings and non-wrapping checks, Euler characteristics of quiver Grassmannians and
//! Quot schemes, and order-truncated scattering diagrams. Everything is generic over a
//! [`Scalar`] field; [`Rational`] is the usual choice.

pub mod error;
pub mod linalg;
pub mod quiver;
pub mod scalar;
pub mod jacobian;
pub mod seed;
pub mod covering;
pub mod surface;
pub mod grading;
pub mod document;
pub mod fixtures;
pub mod grassmannian;
pub mod scattering;

pub use error::{Error, Result};
pub use scalar::{Scalar, Zp};

/// Arbitrary-precision rationals, the default scalar field.
pub type Rational = num_rational::BigRational;
/// Machine rationals; fast but may overflow on large computations.
pub type Rational64 = num_rational::Ratio<i64>;
pub type Rational128 = num_rational::Ratio<i128>;
/// Prime fields used by the point-counting oracle.
pub type F2 = Zp<2>;
pub type F3 = Zp<3>;
pub type F5 = Zp<5>;
pub type F7 = Zp<7>;
