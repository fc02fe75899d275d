//! Order-truncated wall-crossing automorphisms, stability θ, cluster walls, rank-2
//! consistent completion and restriction of walls along a covering.
//!
//! Series live in `k[[N^⊕]]`: a key `n` (unfrozen coordinates) stands for `y^n = x^{p*(n)}`.
//! An automorphism is stored by `θ(x_i) = x_i · S_i(y)` for every index `i`.
//!
//! Sign conventions are collected in [`crossing_sign`], [`rank2_complete`] (outgoing rays
//! point along `−p*(n)`) and [`TruncatedAutomorphism::compose`] (a product `g₂g₁` acts as
//! `θ(g₂) ∘ θ(g₁)`). The A2 pentagon and the stability comparison in the tests lock them.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::covering::QuiverCovering;
use crate::error::{Error, Result};
use crate::grassmannian::{euler_quot, MethodChoice};
use crate::jacobian::TruncatedJacobian;
use crate::quiver::{opposite, Potential, Quiver};
use crate::scalar::{as_integer, Scalar};
use crate::seed::{principal_seed, seed_covering, seed_from_quiver, Seed, SeedCovering};

fn degree(n: &[u32]) -> usize {
    n.iter().map(|&x| x as usize).sum()
}

/// A power series in `y^n`, `n ∈ N^⊕`, with all terms of degree above `order` dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S> {
    pub rank: usize,
    pub order: usize,
    pub coeffs: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn zero(rank: usize, order: usize) -> Self {
        TruncatedSeries { rank, order, coeffs: BTreeMap::new() }
    }

    pub fn constant(rank: usize, order: usize, c: S) -> Self {
        let mut s = Self::zero(rank, order);
        s.add_term(vec![0; rank], c);
        s
    }

    pub fn one(rank: usize, order: usize) -> Self {
        Self::constant(rank, order, S::one())
    }

    pub fn monomial(order: usize, n: Vec<u32>, c: S) -> Self {
        let mut s = Self::zero(n.len(), order);
        s.add_term(n, c);
        s
    }

    /// Adds `c·y^n`, ignoring terms above the truncation order.
    pub fn add_term(&mut self, n: Vec<u32>, c: S) {
        debug_assert_eq!(n.len(), self.rank);
        if degree(&n) > self.order || c.is_zero() {
            return;
        }
        match self.coeffs.entry(n) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, n: &[u32]) -> S {
        self.coeffs.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&vec![0; self.rank])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.constant_term() == S::one()
    }

    /// Smallest degree of a nonzero term, if any.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|k| degree(k)).min()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let coeffs =
            self.coeffs.iter().filter(|(k, _)| degree(k) <= order).map(|(k, v)| (k.clone(), v.clone())).collect();
        TruncatedSeries { rank: self.rank, order: order.min(self.order), coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out = out.truncate(out.order);
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.rank, self.order);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<Vec<u32>, S> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            let da = degree(a);
            for (b, y) in &other.coeffs {
                if da + degree(b) > order {
                    continue;
                }
                let k: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                *acc.entry(k).or_insert_with(S::zero) += &(x.clone() * y.clone());
            }
        }
        acc.retain(|_, v| !v.is_zero());
        TruncatedSeries { rank: self.rank, order, coeffs: acc }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let inv0 = c0
            .inverse()
            .ok_or_else(|| Error::Precondition("series with zero constant term is not invertible".into()))?;
        // self = c0 (1 + a), 1/self = c0^{-1} Σ (-a)^k
        let a = self.scale(&inv0).sub(&Self::one(self.rank, self.order));
        let mna = a.neg();
        let mut out = Self::one(self.rank, self.order);
        let mut p = Self::one(self.rank, self.order);
        for _ in 0..self.order {
            p = p.mul(&mna);
            if p.is_zero() {
                break;
            }
            out = out.add(&p);
        }
        Ok(out.scale(&inv0))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut out = Self::one(self.rank, self.order);
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(out)
    }

    /// `exp` of a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Precondition("exp needs a series without constant term".into()));
        }
        let mut out = Self::one(self.rank, self.order);
        let mut term = Self::one(self.rank, self.order);
        for k in 1..=self.order {
            term = term.mul(self).scale(&(S::one() / S::from_i64(k as i64)));
            if term.is_zero() {
                break;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// `log` of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.constant_term() != S::one() {
            return Err(Error::Precondition("log needs constant term 1".into()));
        }
        let a = self.sub(&Self::one(self.rank, self.order));
        let mut out = Self::zero(self.rank, self.order);
        let mut p = Self::one(self.rank, self.order);
        for k in 1..=self.order {
            p = p.mul(&a);
            if p.is_zero() {
                break;
            }
            let c = S::from_i64(if k % 2 == 1 { 1 } else { -1 }) / S::from_i64(k as i64);
            out = out.add(&p.scale(&c));
        }
        Ok(out)
    }

    /// `Σ c_n Π_k images[k]^{n_k}`; every image must have positive minimal degree.
    pub fn substitute(&self, images: &[TruncatedSeries<S>]) -> Self {
        assert_eq!(images.len(), self.rank, "one image per variable");
        let rank = images.first().map_or(self.rank, |s| s.rank);
        let order = images.iter().map(|s| s.order).min().unwrap_or(self.order).min(self.order);
        let mut powers: Vec<Vec<TruncatedSeries<S>>> = images
            .iter()
            .map(|s| vec![TruncatedSeries::one(rank, order), s.truncate(order)])
            .collect();
        let mut out = TruncatedSeries::zero(rank, order);
        for (n, c) in &self.coeffs {
            if degree(n) > order {
                continue;
            }
            let mut term = TruncatedSeries::constant(rank, order, c.clone());
            for (k, &e) in n.iter().enumerate() {
                while powers[k].len() <= e as usize {
                    let next = powers[k].last().expect("nonempty").mul(&powers[k][1]);
                    powers[k].push(next);
                }
                term = term.mul(&powers[k][e as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Replaces every key by `f(key)`, which must not lower the degree.
    pub fn map_keys(&self, rank: usize, f: impl Fn(&[u32]) -> Vec<u32>) -> Self {
        let mut out = TruncatedSeries::zero(rank, self.order);
        for (k, v) in &self.coeffs {
            out.add_term(f(k), v.clone());
        }
        out
    }
}

/// Renders a series with variable names, e.g. `1 + 2*y1*y2^2`.
pub fn format_series<S: Scalar>(s: &TruncatedSeries<S>, names: &[String]) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (k, v) in &s.coeffs {
        let mono: Vec<String> = k
            .iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, name)| if *e == 1 { name.clone() } else { format!("{name}^{e}") })
            .collect();
        parts.push(if mono.is_empty() {
            v.to_string()
        } else if *v == S::one() {
            mono.join("*")
        } else {
            format!("{v}*{}", mono.join("*"))
        });
    }
    parts.join(" + ")
}

fn int_entry<S: Scalar>(x: &S) -> i64 {
    as_integer(x).and_then(|b| b.to_i64()).expect("integral exchange-matrix entry")
}

/// `θ(x_i) = x_i S_i` for every index of the seed, truncated at `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedAutomorphism<S> {
    pub seed: Seed<S>,
    pub order: usize,
    pub images: Vec<TruncatedSeries<S>>,
}

impl<S: Scalar> TruncatedAutomorphism<S> {
    pub fn identity(seed: &Seed<S>, order: usize) -> Self {
        let r = seed.rank_uf();
        TruncatedAutomorphism {
            seed: seed.clone(),
            order,
            images: (0..seed.len()).map(|_| TruncatedSeries::one(r, order)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.seed.rank_uf()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|s| s.is_one())
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncatedAutomorphism {
            seed: self.seed.clone(),
            order: order.min(self.order),
            images: self.images.iter().map(|s| s.truncate(order)).collect(),
        }
    }

    /// `θ(y^n) / y^n = Π_i S_i^{(Bn)_i}`.
    pub fn y_factor(&self, n: &[i64]) -> TruncatedSeries<S> {
        let uf = self.seed.unfrozen();
        let mut out = TruncatedSeries::one(self.rank(), self.order);
        for (i, s) in self.images.iter().enumerate() {
            let e: i64 = uf.iter().zip(n).map(|(&k, &nk)| int_entry(&self.seed.b[i][k]) * nk).sum();
            if e != 0 && !s.is_one() {
                out = out.mul(&s.pow(e).expect("constant term 1"));
            }
        }
        out
    }

    /// Images `θ(y_k)` of the unfrozen variables.
    pub fn y_images(&self) -> Vec<TruncatedSeries<S>> {
        let r = self.rank();
        (0..r)
            .map(|pos| {
                let mut e = vec![0i64; r];
                e[pos] = 1;
                let mut key = vec![0u32; r];
                key[pos] = 1;
                TruncatedSeries::monomial(self.order, key, S::one()).mul(&self.y_factor(&e))
            })
            .collect()
    }

    /// `self ∘ other`: `(φ∘ψ)(x_i) = φ(x_i) · S^ψ_i(φ(y))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.seed != other.seed {
            return Err(Error::Precondition("automorphisms over different seeds".into()));
        }
        let order = self.order.min(other.order);
        let ys: Vec<_> = self.y_images().iter().map(|s| s.truncate(order)).collect();
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(sp, ss)| {
                if ss.is_one() {
                    sp.truncate(order)
                } else {
                    sp.truncate(order).mul(&ss.truncate(order).substitute(&ys))
                }
            })
            .collect();
        Ok(TruncatedAutomorphism { seed: self.seed.clone(), order, images })
    }

    /// Inverse by the fixed point `ψ(x_i) = x_i / S_i(ψ(y))`.
    pub fn inverse(&self) -> Self {
        let mut psi = Self::identity(&self.seed, self.order);
        for _ in 0..=self.order {
            let ys = psi.y_images();
            let images = self
                .images
                .iter()
                .map(|s| s.substitute(&ys).inverse().expect("constant term 1"))
                .collect();
            let next = TruncatedAutomorphism { seed: self.seed.clone(), order: self.order, images };
            if next == psi {
                break;
            }
            psi = next;
        }
        psi
    }
}

/// `⟨n, f_i⟩` for every index `i`.
fn pairings_with_f<S: Scalar>(seed: &Seed<S>, n: &[u32]) -> Vec<S> {
    let uf = seed.unfrozen();
    let mut out = vec![S::zero(); seed.len()];
    for (pos, &k) in uf.iter().enumerate() {
        out[k] = S::from_i64(n[pos] as i64) / seed.d[k].clone();
    }
    out
}

/// `exp(ad_H)` for a Hamiltonian `H = Σ h_n y^n` without constant term, computed from
/// `{y^n, x^m} = ⟨n, m⟩ x^{m + p*(n)}`.
pub fn exp_action<S: Scalar>(seed: &Seed<S>, h: &TruncatedSeries<S>, order: usize) -> Result<TruncatedAutomorphism<S>> {
    if !h.constant_term().is_zero() {
        return Err(Error::Precondition("Hamiltonian must have no constant term".into()));
    }
    let r = seed.rank_uf();
    let uf = seed.unfrozen();
    // ω[a][b] = ⟨e_a, p*(e_b)⟩ on unfrozen coordinates
    let omega: Vec<Vec<S>> = uf
        .iter()
        .map(|&ka| uf.iter().map(|&kb| seed.b[ka][kb].clone() / seed.d[ka].clone()).collect())
        .collect();
    let pair = |n: &[u32], m: &[u32]| -> S {
        let mut acc = S::zero();
        for a in 0..r {
            for b in 0..r {
                if n[a] != 0 && m[b] != 0 {
                    acc += &(S::from_i64(n[a] as i64 * m[b] as i64) * omega[a][b].clone());
                }
            }
        }
        acc
    };
    let h = h.truncate(order);
    let mut images = Vec::with_capacity(seed.len());
    for i in 0..seed.len() {
        let fi: Vec<S> = h.coeffs.keys().map(|n| pairings_with_f(seed, n)[i].clone()).collect();
        let derive = |f: &TruncatedSeries<S>| {
            let mut out = TruncatedSeries::zero(r, order);
            for (np, c) in &f.coeffs {
                for ((n, hn), fin) in h.coeffs.iter().zip(&fi) {
                    let coef = fin.clone() + pair(n, np);
                    if coef.is_zero() {
                        continue;
                    }
                    let k: Vec<u32> = n.iter().zip(np).map(|(a, b)| a + b).collect();
                    out.add_term(k, coef * hn.clone() * c.clone());
                }
            }
            out
        };
        let mut total = TruncatedSeries::one(r, order);
        let mut term = TruncatedSeries::one(r, order);
        for k in 1..=order {
            term = derive(&term).scale(&(S::one() / S::from_i64(k as i64)));
            if term.is_zero() {
                break;
            }
            total = total.add(&term);
        }
        images.push(total);
    }
    Ok(TruncatedAutomorphism { seed: seed.clone(), order, images })
}

/// Wall-crossing of a wall with normal `n0` and Hamiltonian `Σ_j h_j y^{j n0}`, with sign `ε`:
/// `θ(x_i) = x_i · exp(ε ⟨n0, f_i⟩ Σ_j j h_j y^{j n0})`.
pub fn wall_action<S: Scalar>(
    seed: &Seed<S>,
    n0: &[u32],
    hamiltonian: &BTreeMap<u32, S>,
    sign: i32,
    order: usize,
) -> TruncatedAutomorphism<S> {
    let r = seed.rank_uf();
    let d0 = degree(n0).max(1);
    let uorder = order / d0;
    let mut g = TruncatedSeries::zero(1, uorder);
    for (&j, h) in hamiltonian {
        g.add_term(vec![j], S::from_i64(j as i64 * sign as i64) * h.clone());
    }
    let to_y = |s: &TruncatedSeries<S>| {
        let mut out = TruncatedSeries::zero(r, order);
        for (k, v) in &s.coeffs {
            out.add_term(n0.iter().map(|&x| x * k[0]).collect(), v.clone());
        }
        out
    };
    let f = pairings_with_f(seed, n0);
    let images = f
        .iter()
        .map(|fi| {
            if fi.is_zero() || g.is_zero() {
                TruncatedSeries::one(r, order)
            } else {
                to_y(&g.scale(fi).exp().expect("no constant term"))
            }
        })
        .collect();
    TruncatedAutomorphism { seed: seed.clone(), order, images }
}

/// `−d Li₂(−z) = −d Σ_j (−1)^j z^j / j²` up to `z^order`.
pub fn dilog_hamiltonian<S: Scalar>(d: &S, order: usize) -> BTreeMap<u32, S> {
    (1..=order as u32)
        .map(|j| {
            let s = if j % 2 == 0 { -S::one() } else { S::one() };
            (j, s * d.clone() / S::from_i64((j * j) as i64))
        })
        .collect()
}

// ---------------------------------------------------------------------------------------
// Rank-2 geometry. Points of M_ℝ are written in the basis dual to the unfrozen e_k, so that
// ⟨n, m⟩ is the dot product.

/// Support of a rank-2 wall: a line or a ray through the origin, by a primitive direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Support {
    Line([i64; 2]),
    Ray([i64; 2]),
}

fn primitive(v: [BigRational; 2]) -> Option<[i64; 2]> {
    let l = v[0].denom().lcm(v[1].denom());
    let a = (&v[0] * BigRational::from_integer(l.clone())).to_integer();
    let b = (&v[1] * BigRational::from_integer(l)).to_integer();
    let g = a.gcd(&b);
    if g.is_zero() {
        return None;
    }
    Some([(a / &g).to_i64()?, (b / &g).to_i64()?])
}

fn canonical_line(u: [i64; 2]) -> [i64; 2] {
    if u[0] < 0 || (u[0] == 0 && u[1] < 0) {
        [-u[0], -u[1]]
    } else {
        u
    }
}

/// Half-plane index then cross product: counterclockwise order of directions from angle 0.
fn angle_cmp(a: [i64; 2], b: [i64; 2]) -> Ordering {
    let half = |v: [i64; 2]| if v[1] > 0 || (v[1] == 0 && v[0] > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| {
        let cross = a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128;
        0.cmp(&cross)
    })
}

fn rot90(u: [i64; 2]) -> [i64; 2] {
    [-u[1], u[0]]
}

/// `ε = −sign⟨n0, γ'⟩`.
pub fn crossing_sign(n0: &[u32], tangent: [i64; 2]) -> i32 {
    let dot: i64 = n0.iter().zip(tangent).map(|(&a, b)| a as i64 * b).sum();
    -dot.signum() as i32
}

fn check_rank2<S: Scalar>(seed: &Seed<S>) -> Result<()> {
    if seed.rank_uf() != 2 {
        return Err(Error::Unsupported(format!(
            "rank-2 diagrams need exactly two unfrozen indices (got {}); compare θ operators instead",
            seed.rank_uf()
        )));
    }
    Ok(())
}

/// `p*(n)` in the dual basis of the unfrozen `e_k`.
fn p_star_dual<S: Scalar>(seed: &Seed<S>, n: &[u32]) -> Result<[BigRational; 2]> {
    let uf = seed.unfrozen();
    let ni: Vec<i64> = n.iter().map(|&x| x as i64).collect();
    let m = seed.p_star(&ni);
    let coord = |pos: usize| -> Result<BigRational> {
        let k = uf[pos];
        (m[k].clone() / seed.d[k].clone())
            .to_rational()
            .ok_or_else(|| Error::Unsupported("wall geometry needs rational scalars".into()))
    };
    Ok([coord(0)?, coord(1)?])
}

/// A wall in a rank-2 `M_ℝ` with Hamiltonian `Σ_j h_j y^{j n0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wall2D<S> {
    pub n0: Vec<u32>,
    pub support: Support,
    pub hamiltonian: BTreeMap<u32, S>,
    pub incoming: bool,
}

impl<S: Scalar> Wall2D<S> {
    /// The wall function `f(z) = exp(Σ_j j h_j z^j)`, so that crossing acts as
    /// `x^m ↦ x^m f(y^{n0})^{±⟨n0, m⟩}`.
    pub fn function(&self, order: usize) -> TruncatedSeries<S> {
        let mut g = TruncatedSeries::zero(1, order);
        for (&j, h) in &self.hamiltonian {
            g.add_term(vec![j], S::from_i64(j as i64) * h.clone());
        }
        g.exp().expect("no constant term")
    }

    pub fn is_trivial(&self) -> bool {
        self.hamiltonian.values().all(|h| h.is_zero())
    }

    fn truncated(&self, order: usize) -> Self {
        let d0 = degree(&self.n0).max(1);
        let mut w = self.clone();
        w.hamiltonian.retain(|j, h| (*j as usize) * d0 <= order && !h.is_zero());
        w
    }
}

/// Whether `p*(n0)` lies in the support.
pub fn is_incoming<S: Scalar>(seed: &Seed<S>, n0: &[u32], support: Support) -> Result<bool> {
    let p = p_star_dual(seed, n0)?;
    Ok(match support {
        Support::Line(_) => true,
        Support::Ray(u) => match primitive(p) {
            None => true,
            Some(v) => v == u,
        },
    })
}

/// `(e_k^⊥, exp(−d_k Li₂(−y_k)))` for both unfrozen `k`.
pub fn initial_cluster_walls<S: Scalar>(seed: &Seed<S>, order: usize) -> Result<Vec<Wall2D<S>>> {
    check_rank2(seed)?;
    let uf = seed.unfrozen();
    Ok((0..2)
        .map(|pos| {
            let mut n0 = vec![0u32; 2];
            n0[pos] = 1;
            let dir = if pos == 0 { [0, 1] } else { [1, 0] };
            Wall2D {
                n0,
                support: Support::Line(dir),
                hamiltonian: dilog_hamiltonian(&seed.d[uf[pos]], order),
                incoming: true,
            }
        })
        .collect())
}

/// One step of a path: the wall crossed and its sign `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub wall: usize,
    pub sign: i32,
}

/// A finite rank-2 scattering diagram truncated at `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankTwoDiagram<S> {
    pub seed: Seed<S>,
    pub walls: Vec<Wall2D<S>>,
    pub order: usize,
}

impl<S: Scalar> RankTwoDiagram<S> {
    pub fn new(seed: &Seed<S>, walls: Vec<Wall2D<S>>, order: usize) -> Result<Self> {
        check_rank2(seed)?;
        Ok(RankTwoDiagram { seed: seed.clone(), walls, order })
    }

    pub fn truncate(&self, order: usize) -> Self {
        RankTwoDiagram {
            seed: self.seed.clone(),
            walls: self.walls.iter().map(|w| w.truncated(order)).filter(|w| !w.is_trivial()).collect(),
            order: order.min(self.order),
        }
    }

    pub fn nontrivial_walls(&self) -> Vec<&Wall2D<S>> {
        self.walls.iter().filter(|w| !w.truncated(self.order).is_trivial()).collect()
    }

    /// Rays of all walls (a line contributes both halves), sorted counterclockwise from
    /// angle 0.
    pub fn rays(&self) -> Vec<([i64; 2], usize)> {
        let mut out = Vec::new();
        for (i, w) in self.walls.iter().enumerate() {
            match w.support {
                Support::Line(u) => {
                    out.push((u, i));
                    out.push(([-u[0], -u[1]], i));
                }
                Support::Ray(u) => out.push((u, i)),
            }
        }
        out.sort_by(|a, b| angle_cmp(a.0, b.0).then(a.1.cmp(&b.1)));
        out
    }

    fn crossings_of(&self, rays: &[([i64; 2], usize)]) -> Vec<Crossing> {
        rays.iter()
            .map(|&(u, i)| Crossing { wall: i, sign: crossing_sign(&self.walls[i].n0, rot90(u)) })
            .collect()
    }

    /// Counterclockwise loop around the origin based just below angle 0.
    pub fn loop_crossings(&self) -> Vec<Crossing> {
        self.crossings_of(&self.rays())
    }

    /// Counterclockwise path from the positive chamber (direction `(1,1)`) to the negative
    /// chamber (direction `(−1,−1)`).
    pub fn half_loop_crossings(&self) -> Vec<Crossing> {
        let rays: Vec<_> = self
            .rays()
            .into_iter()
            .filter(|(u, _)| {
                angle_cmp([1, 1], *u) == Ordering::Less && angle_cmp(*u, [-1, -1]) == Ordering::Less
            })
            .collect();
        self.crossings_of(&rays)
    }

    /// `𝔭_γ = ⋯ 𝔭_2^{ε_2} 𝔭_1^{ε_1}` acting as `θ_k ∘ ⋯ ∘ θ_1`.
    pub fn path_ordered_product(&self, path: &[Crossing]) -> Result<TruncatedAutomorphism<S>> {
        let mut acc = TruncatedAutomorphism::identity(&self.seed, self.order);
        for c in path {
            let w = self
                .walls
                .get(c.wall)
                .ok_or_else(|| Error::Structural(format!("no wall with index {}", c.wall)))?;
            if c.sign == 0 {
                return Err(Error::Precondition(format!("crossing of wall {} is tangent", c.wall)));
            }
            let step = wall_action(&self.seed, &w.n0, &w.hamiltonian, c.sign.signum(), self.order);
            acc = step.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn loop_product(&self) -> Result<TruncatedAutomorphism<S>> {
        self.path_ordered_product(&self.loop_crossings())
    }

    /// `θ_{−,+}` along [`RankTwoDiagram::half_loop_crossings`].
    pub fn theta_minus_plus(&self) -> Result<TruncatedAutomorphism<S>> {
        self.path_ordered_product(&self.half_loop_crossings())
    }

    pub fn is_consistent(&self) -> Result<bool> {
        Ok(self.loop_product()?.is_identity())
    }
}

/// Order-by-order consistent completion: after each degree the loop defect is removed by
/// outgoing rays `ℝ_{≥0}(−p*(n))`.
pub fn rank2_complete<S: Scalar>(seed: &Seed<S>, walls: &[Wall2D<S>], order: usize) -> Result<RankTwoDiagram<S>> {
    check_rank2(seed)?;
    for w in walls {
        if !matches!(w.support, Support::Line(_)) {
            return Err(Error::Precondition("input walls must be lines through the origin".into()));
        }
    }
    let uf = seed.unfrozen();
    let mut diagram = RankTwoDiagram::new(seed, walls.to_vec(), order)?;
    for deg in 1..=order {
        let theta = diagram.truncate(deg).loop_product()?;
        let mut defects: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
        for s in &theta.images {
            for k in s.coeffs.keys() {
                if degree(k) == deg {
                    defects.insert(k.clone(), ());
                }
            }
        }
        for n in defects.keys() {
            let pos = n.iter().position(|&x| x != 0).expect("positive degree");
            let k = uf[pos];
            let c = theta.images[k].coeff(n) * seed.d[k].clone() / S::from_i64(n[pos] as i64);
            let f = pairings_with_f(seed, n);
            for (i, s) in theta.images.iter().enumerate() {
                if s.coeff(n) != c.clone() * f[i].clone() {
                    return Err(Error::Rejected(format!(
                        "loop defect at {n:?} is not a wall-crossing term (index {})",
                        seed.ids[i]
                    )));
                }
            }
            if c.is_zero() {
                continue;
            }
            let dir = primitive(p_star_dual(seed, n)?.map(|x| -x)).ok_or_else(|| {
                Error::Rejected(format!("loop defect at {n:?} lies in the kernel of p*"))
            })?;
            let g = n.iter().fold(0u32, |a, &b| a.gcd(&b));
            let n0: Vec<u32> = n.iter().map(|&x| x / g).collect();
            let eps = crossing_sign(&n0, rot90(dir));
            let h = -(S::from_i64(eps as i64) * c);
            let support = Support::Ray(dir);
            match diagram.walls.iter_mut().find(|w| w.support == support && w.n0 == n0) {
                Some(w) => {
                    let e = w.hamiltonian.entry(g).or_insert_with(S::zero);
                    *e += &h;
                }
                None => {
                    let mut ham = BTreeMap::new();
                    ham.insert(g, h);
                    diagram.walls.push(Wall2D { incoming: is_incoming(seed, &n0, support)?, n0, support, hamiltonian: ham });
                }
            }
        }
    }
    if !diagram.is_consistent()? {
        return Err(Error::Rejected("completion left a nontrivial loop product".into()));
    }
    Ok(diagram)
}

// ---------------------------------------------------------------------------------------
// Coverings.

/// A wall of arbitrary rank: `n0^⊥ ∩ {m : ⟨v, m⟩ ≥ 0 for v in inequalities}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneWall<S> {
    pub n0: Vec<u32>,
    pub inequalities: Vec<Vec<i64>>,
    pub hamiltonian: BTreeMap<u32, S>,
}

/// Initial cluster walls `(e_k^⊥, exp(−d_k Li₂(−y_k)))` in any rank.
pub fn initial_cluster_hyperplanes<S: Scalar>(seed: &Seed<S>, order: usize) -> Vec<HyperplaneWall<S>> {
    let uf = seed.unfrozen();
    (0..uf.len())
        .map(|pos| {
            let mut n0 = vec![0u32; uf.len()];
            n0[pos] = 1;
            HyperplaneWall { n0, inequalities: vec![], hamiltonian: dilog_hamiltonian(&seed.d[uf[pos]], order) }
        })
        .collect()
}

/// Seed covering induced by a quiver covering: skew-symmetric total seed, orbits = fibers.
pub fn quiver_seed_covering<S: Scalar>(c: &QuiverCovering) -> Result<SeedCovering<S>> {
    let sd = seed_from_quiver::<S>(&c.total)?;
    let orbits: Vec<(String, Vec<usize>)> =
        (0..c.base.num_vertices()).map(|b| (c.base.vertex(b).id.clone(), c.vertex_fiber(b))).collect();
    seed_covering(&sd, &orbits)
}

/// Principal extension of a seed covering: `i'` lies over `ī'`.
pub fn principal_seed_covering<S: Scalar>(sc: &SeedCovering<S>) -> Result<SeedCovering<S>> {
    let n = sc.total.len();
    let prin = principal_seed(&sc.total);
    let mut orbits: Vec<(String, Vec<usize>)> =
        (0..sc.base.len()).map(|o| (sc.base.ids[o].clone(), sc.orbit(o))).collect();
    for o in 0..sc.base.len() {
        orbits.push((format!("{}'", sc.base.ids[o]), sc.orbit(o).into_iter().map(|i| i + n).collect()));
    }
    seed_covering(&prin, &orbits)
}

/// Restriction of cover walls to `κ(M̄_ℝ)`: supports `κ^{-1}(𝔡)`, functions `π(𝔭_𝔡)`, walls on
/// a common support merged by adding Hamiltonians.
pub fn restrict_walls<S: Scalar>(sc: &SeedCovering<S>, walls: &[HyperplaneWall<S>]) -> Result<Vec<Wall2D<S>>> {
    check_rank2(&sc.base)?;
    let to_i = |v: &[u32]| v.iter().map(|&x| x as i64).collect::<Vec<_>>();
    let mut merged: BTreeMap<(Vec<u32>, Support), BTreeMap<u32, S>> = BTreeMap::new();
    for w in walls {
        let nbar: Vec<u32> = sc.project_n(&to_i(&w.n0)).into_iter().map(|x| x as u32).collect();
        let g = nbar.iter().fold(0u32, |a, &b| a.gcd(&b));
        if g == 0 {
            continue;
        }
        let n0: Vec<u32> = nbar.iter().map(|&x| x / g).collect();
        // ⟨n, κ(m̄)⟩ = ⟨π n, m̄⟩
        let u = [-(n0[1] as i64), n0[0] as i64];
        let (mut fwd, mut back) = (true, true);
        for v in &w.inequalities {
            let vb = sc.project_n(v);
            match (vb[0] * u[0] + vb[1] * u[1]).signum() {
                1 => back = false,
                -1 => fwd = false,
                _ => {}
            }
        }
        let support = match (fwd, back) {
            (true, true) => Support::Line(canonical_line(u)),
            (true, false) => Support::Ray(u),
            (false, true) => Support::Ray([-u[0], -u[1]]),
            (false, false) => continue,
        };
        let ham = merged.entry((n0, support)).or_default();
        for (&j, h) in &w.hamiltonian {
            let e = ham.entry(j * g).or_insert_with(S::zero);
            *e += h;
        }
    }
    let mut out = Vec::new();
    for ((n0, support), mut hamiltonian) in merged {
        hamiltonian.retain(|_, h| !h.is_zero());
        if hamiltonian.is_empty() {
            continue;
        }
        out.push(Wall2D { incoming: is_incoming(&sc.base, &n0, support)?, n0, support, hamiltonian });
    }
    Ok(out)
}

/// Canonical ordering for comparing wall lists.
pub fn sorted_walls<S: Scalar>(walls: &[Wall2D<S>]) -> Vec<Wall2D<S>> {
    let mut w: Vec<Wall2D<S>> = walls
        .iter()
        .cloned()
        .map(|mut w| {
            if let Support::Line(u) = w.support {
                w.support = Support::Line(canonical_line(u));
            }
            w
        })
        .collect();
    w.sort_by(|a, b| (&a.n0, a.support).cmp(&(&b.n0, b.support)));
    w
}

// ---------------------------------------------------------------------------------------
// Stability θ.

/// `θ(x_i) = x_i Σ_{|n| ≤ order} χ(Quot_n^{nilp}(P_i)) x^{p*(n)}` for unfrozen `i` and
/// `θ(x_i) = x_i` otherwise.
///
/// `q` must be the unfrozen part of the seed, vertex for vertex. With `opposite` the
/// projectives are taken over the opposite quiver with potential.
pub fn theta_stability<S: Scalar>(
    q: &Quiver,
    w: &Potential<S>,
    seed: &Seed<S>,
    order: usize,
    principal: bool,
    opposite_side: bool,
) -> Result<TruncatedAutomorphism<S>> {
    let uf = seed.unfrozen();
    if q.num_vertices() != uf.len() || uf.iter().enumerate().any(|(p, &k)| q.vertex(p).id != seed.ids[k]) {
        return Err(Error::Precondition("quiver vertices must match the unfrozen seed indices".into()));
    }
    let sd = if principal { principal_seed(seed) } else { seed.clone() };
    let mut theta = TruncatedAutomorphism::identity(&sd, order);
    if order == 0 {
        return Ok(theta);
    }
    let (qq, ww) = if opposite_side { opposite(q, w) } else { (q.clone(), w.clone()) };
    let alg = TruncatedJacobian::build(&qq, &ww, order.saturating_sub(1).max(1))?;
    let r = uf.len();
    for (p, &k) in uf.iter().enumerate() {
        let module = alg.projective(p).module;
        let dims = module.dim_vector(r);
        let keys = dimension_vectors_up_to(&dims, order);
        let values: Vec<Result<(Vec<u32>, i64)>> = keys
            .par_iter()
            .map(|n| {
                let nu: Vec<usize> = n.iter().map(|&x| x as usize).collect();
                euler_quot(&module, &nu, MethodChoice::Auto)
                    .map(|e| (n.clone(), e.value))
                    .map_err(|e| match e {
                        Error::Inconclusive(m) => {
                            Error::Inconclusive(format!("vertex {}, n = {:?}: {m}", q.vertex(p).id, n))
                        }
                        other => other,
                    })
            })
            .collect();
        let mut s = TruncatedSeries::one(r, order);
        for v in values {
            let (n, chi) = v?;
            s.add_term(n, S::from_i64(chi));
        }
        theta.images[k] = s;
    }
    Ok(theta)
}

/// All `n ≤ caps` componentwise with `1 ≤ |n| ≤ order`.
fn dimension_vectors_up_to(caps: &[usize], order: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; caps.len()];
    fn rec(i: usize, left: usize, caps: &[usize], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == caps.len() {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=caps[i].min(left) {
            cur[i] = v as u32;
            rec(i + 1, left - v, caps, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, order, caps, &mut cur, &mut out);
    out
}

/// Sets `x_{i'} = 1` for the principal frozen partners; the result lives over `original`.
pub fn evaluate_principal_at_one<S: Scalar>(
    theta: &TruncatedAutomorphism<S>,
    original: &Seed<S>,
) -> Result<TruncatedAutomorphism<S>> {
    if theta.seed != principal_seed(original) {
        return Err(Error::Precondition("automorphism is not over the principal extension of the seed".into()));
    }
    Ok(TruncatedAutomorphism {
        seed: original.clone(),
        order: theta.order,
        images: theta.images[..original.len()].to_vec(),
    })
}

/// `π` on series: `y^n ↦ y^{π(n)}`.
pub fn project_series<S: Scalar>(sc: &SeedCovering<S>, s: &TruncatedSeries<S>) -> TruncatedSeries<S> {
    let r = sc.base.rank_uf();
    s.map_keys(r, |k| {
        let ki: Vec<i64> = k.iter().map(|&x| x as i64).collect();
        sc.project_n(&ki).into_iter().map(|x| x as u32).collect()
    })
}

/// Base automorphism with `θ̄(x_ī) = π(θ(x_i))`, checking independence of `i` in the orbit.
pub fn pi_project_automorphism<S: Scalar>(
    sc: &SeedCovering<S>,
    theta: &TruncatedAutomorphism<S>,
) -> Result<TruncatedAutomorphism<S>> {
    if theta.seed != sc.total {
        return Err(Error::Precondition("automorphism is not over the covering's total seed".into()));
    }
    let mut images = Vec::with_capacity(sc.base.len());
    for o in 0..sc.base.len() {
        let members = sc.orbit(o);
        let first = project_series(sc, &theta.images[members[0]]);
        for &i in &members[1..] {
            if project_series(sc, &theta.images[i]) != first {
                return Err(Error::Rejected(format!(
                    "projection differs on orbit {}: {} vs {}",
                    sc.base.ids[o], sc.total.ids[members[0]], sc.total.ids[i]
                )));
            }
        }
        images.push(first);
    }
    Ok(TruncatedAutomorphism { seed: sc.base.clone(), order: theta.order, images })
}

/// One coefficient where the projected cover θ and the base θ disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaDiscrepancy<S> {
    pub index: String,
    pub n: Vec<u32>,
    pub base: S,
    pub projected: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaComparison<S> {
    pub order: usize,
    /// Number of `(i, n)` coefficients compared.
    pub compared: usize,
    pub discrepancies: Vec<ThetaDiscrepancy<S>>,
    pub base: TruncatedAutomorphism<S>,
    pub projected: TruncatedAutomorphism<S>,
}

impl<S> ThetaComparison<S> {
    pub fn holds(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Compares `π(θ^st(J̃^op))` with `θ^st(J̄^op)` coefficientwise up to `order`, with principal
/// coefficients on both sides. `sc` must be [`quiver_seed_covering`] of `c`.
pub fn compare_theta_covering<S: Scalar>(
    c: &QuiverCovering,
    sc: &SeedCovering<S>,
    wbar: &Potential<S>,
    order: usize,
) -> Result<ThetaComparison<S>> {
    let w = c.sigma_potential(wbar);
    let psc = principal_seed_covering(sc)?;
    let cover = theta_stability(&c.total, &w, &sc.total, order, true, true)?;
    let projected = pi_project_automorphism(&psc, &cover)?;
    let base = theta_stability(&c.base, wbar, &sc.base, order, true, true)?;
    let mut discrepancies = Vec::new();
    let mut compared = 0;
    for (i, (sb, sp)) in base.images.iter().zip(&projected.images).enumerate() {
        let mut keys: Vec<&Vec<u32>> = sb.coeffs.keys().chain(sp.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        compared += keys.len();
        for k in keys {
            let (a, b) = (sb.coeff(k), sp.coeff(k));
            if a != b {
                discrepancies.push(ThetaDiscrepancy { index: base.seed.ids[i].clone(), n: k.clone(), base: a, projected: b });
            }
        }
    }
    Ok(ThetaComparison { order, compared, discrepancies, base, projected })
}
