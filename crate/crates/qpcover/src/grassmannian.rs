//! Euler characteristics of quiver Grassmannians and Quot schemes of projective modules,
//! by torus localization with a finite-field point count as an independent check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::covering::{pullback_module, QuiverCovering};
use crate::error::{Error, Result};
use crate::grading::find_nice_grading;
use crate::jacobian::{QuiverModule, TruncatedJacobian};
use crate::linalg::{nullspace, Matrix};
use crate::quiver::Potential;
use crate::scalar::{Scalar, Zp};

/// Integer weights on a module basis making every arrow act homogeneously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedBasis {
    pub weights: Vec<Vec<i64>>,
    pub arrow_weights: Vec<Vec<i64>>,
}

impl WeightedBasis {
    /// Whether all weight spaces at each vertex are one-dimensional.
    pub fn multiplicity_free<S>(&self, m: &QuiverModule<S>) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        (0..m.vertex_of.len()).all(|b| seen.insert((m.vertex_of[b], &self.weights[b])))
    }
}

/// Outcome of [`auto_weighting`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weighting {
    Separating(WeightedBasis),
    /// Basis elements sharing a vertex and every weight.
    Insufficient { collisions: Vec<(usize, usize)> },
}

/// Solves `w(b') − w(b) = ω(a)` for every nonzero action entry `b → b'` under `a`, keeping
/// every independent solution as a weight coordinate. `extra` appends given per-element
/// coordinates, which must themselves be arrow-homogeneous.
pub fn auto_weighting<S: Scalar>(m: &QuiverModule<S>, extra: &[Vec<i64>]) -> Result<Weighting> {
    let n = m.dim();
    let na = m.actions.len();
    let mut rows: Matrix<BigRational> = Vec::new();
    let mut edges = Vec::new();
    for (a, mat) in m.actions.iter().enumerate() {
        for (i, row) in mat.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    let mut r = vec![BigRational::zero(); n + na];
                    r[i] += BigRational::one();
                    r[j] -= BigRational::one();
                    r[n + a] -= BigRational::one();
                    rows.push(r);
                    edges.push((a, j, i));
                }
            }
        }
    }
    let sols = if rows.is_empty() {
        (0..n + na)
            .map(|i| (0..n + na).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect()
    } else {
        nullspace(&rows, n + na)
    };
    let mut weights = vec![Vec::new(); n];
    let mut arrow_weights = vec![Vec::new(); na];
    for v in sols {
        let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<i64> = v
            .iter()
            .map(|x| {
                let y = x * BigRational::from_integer(l.clone());
                i64::try_from(y.to_integer()).map_err(|_| Error::Resource("weight overflow".into()))
            })
            .collect::<Result<_>>()?;
        for b in 0..n {
            weights[b].push(ints[b]);
        }
        for a in 0..na {
            arrow_weights[a].push(ints[n + a]);
        }
    }
    for coords in extra {
        if coords.len() != n {
            return Err(Error::Precondition("extra grading has the wrong length".into()));
        }
        let mut omega: BTreeMap<usize, i64> = BTreeMap::new();
        for &(a, j, i) in &edges {
            let x = coords[i] - coords[j];
            if *omega.entry(a).or_insert(x) != x {
                return Err(Error::Rejected(format!(
                    "supplied grading is not homogeneous for arrow {a}"
                )));
            }
        }
        for b in 0..n {
            weights[b].push(coords[b]);
        }
        for a in 0..na {
            arrow_weights[a].push(omega.get(&a).copied().unwrap_or(0));
        }
    }
    let wb = WeightedBasis { weights, arrow_weights };
    let mut collisions = Vec::new();
    let mut seen: BTreeMap<(usize, &Vec<i64>), usize> = BTreeMap::new();
    for b in 0..n {
        if let Some(&c) = seen.get(&(m.vertex_of[b], &wb.weights[b])) {
            collisions.push((c, b));
        } else {
            seen.insert((m.vertex_of[b], &wb.weights[b]), b);
        }
    }
    if collisions.is_empty() {
        Ok(Weighting::Separating(wb))
    } else {
        Ok(Weighting::Insufficient { collisions })
    }
}

/// Calls `visit` on every subset of the basis with dimension profile `n` that is closed
/// under the support of every arrow action.
pub fn for_each_closed_subset<S: Scalar>(
    m: &QuiverModule<S>,
    n: &[usize],
    mut visit: impl FnMut(&[bool]),
) {
    let dim = m.dim();
    // direct successors of each basis element
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for mat in &m.actions {
        for (i, row) in mat.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() && !succ[j].contains(&i) {
                    succ[j].push(i);
                }
            }
        }
    }
    // transitive closures
    let closure: Vec<Vec<usize>> = (0..dim)
        .map(|b| {
            let mut seen = vec![false; dim];
            let mut stack = vec![b];
            seen[b] = true;
            while let Some(x) = stack.pop() {
                for &y in &succ[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            (0..dim).filter(|&y| seen[y]).collect()
        })
        .collect();
    let nv = n.len();
    if m.vertex_of.iter().any(|&v| v >= nv) {
        return;
    }
    let total = m.dim_vector(nv);
    if n.iter().zip(&total).any(|(a, b)| a > b) {
        return;
    }
    // state: 0 undecided, 1 in, 2 out
    let mut state = vec![0u8; dim];
    let mut inside = vec![0usize; nv];
    let mut outside = vec![0usize; nv];
    struct Ctx<'a, F> {
        m_vertex: &'a [usize],
        closure: &'a [Vec<usize>],
        n: &'a [usize],
        total: &'a [usize],
        visit: F,
    }
    fn rec<F: FnMut(&[bool])>(
        ctx: &mut Ctx<'_, F>,
        b: usize,
        state: &mut Vec<u8>,
        inside: &mut Vec<usize>,
        outside: &mut Vec<usize>,
    ) {
        if b == state.len() {
            let sel: Vec<bool> = state.iter().map(|&s| s == 1).collect();
            (ctx.visit)(&sel);
            return;
        }
        if state[b] != 0 {
            rec(ctx, b + 1, state, inside, outside);
            return;
        }
        // include b together with its closure
        let mut added = Vec::new();
        let mut ok = true;
        for &y in &ctx.closure[b] {
            match state[y] {
                2 => {
                    ok = false;
                    break;
                }
                0 => {
                    state[y] = 1;
                    inside[ctx.m_vertex[y]] += 1;
                    added.push(y);
                    if inside[ctx.m_vertex[y]] > ctx.n[ctx.m_vertex[y]] {
                        ok = false;
                        break;
                    }
                }
                _ => {}
            }
        }
        if ok {
            rec(ctx, b + 1, state, inside, outside);
        }
        for y in added {
            state[y] = 0;
            inside[ctx.m_vertex[y]] -= 1;
        }
        // exclude b (any included element whose closure contains b was handled when it
        // was included, since closures are forced eagerly)
        let v = ctx.m_vertex[b];
        if ctx.total[v] - outside[v] > ctx.n[v] {
            state[b] = 2;
            outside[v] += 1;
            rec(ctx, b + 1, state, inside, outside);
            outside[v] -= 1;
            state[b] = 0;
        }
    }
    let mut ctx = Ctx { m_vertex: &m.vertex_of, closure: &closure, n, total: &total, visit: &mut visit };
    rec(&mut ctx, 0, &mut state, &mut inside, &mut outside);
}

/// Number of closed coordinate subsets with profile `n`.
pub fn count_closed_subsets<S: Scalar>(m: &QuiverModule<S>, n: &[usize]) -> u64 {
    let mut count = 0u64;
    for_each_closed_subset(m, n, |_| count += 1);
    count
}

/// How an Euler characteristic was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// Fixed-point count under a separating torus action.
    Localization { fixed_points: u64 },
    /// Polynomial point count over finite fields, evaluated at `q = 1`.
    FiniteField(OracleCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCertificate {
    pub counts: Vec<(u64, u64)>,
    /// Coefficients of the fitted polynomial, constant term first.
    pub polynomial: Vec<BigRational>,
    pub held_out_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerResult {
    pub value: i64,
    pub method: Method,
}

/// Which methods [`euler_gr`] may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Localization when a separating weighting exists, otherwise the oracle.
    #[default]
    Auto,
    Localization,
    FiniteField,
}

/// `χ(Gr_n(M))`.
pub fn euler_gr<S: Scalar>(m: &QuiverModule<S>, n: &[usize], choice: MethodChoice) -> Result<EulerResult> {
    if choice != MethodChoice::FiniteField {
        match auto_weighting(m, &[])? {
            Weighting::Separating(_) => {
                let c = count_closed_subsets(m, n);
                return Ok(EulerResult { value: c as i64, method: Method::Localization { fixed_points: c } });
            }
            Weighting::Insufficient { collisions } if choice == MethodChoice::Localization => {
                let (a, b) = collisions[0];
                return Err(Error::Inconclusive(format!(
                    "no separating weighting: `{}` and `{}` share all weights",
                    m.labels[a], m.labels[b]
                )));
            }
            Weighting::Insufficient { .. } => {}
        }
    }
    let primes = oracle_primes()?;
    finite_field_count_oracle(m, n, &primes)
}

/// `χ(Quot_n(M))` through the complement Grassmannian.
pub fn euler_quot<S: Scalar>(m: &QuiverModule<S>, n: &[usize], choice: MethodChoice) -> Result<EulerResult> {
    let total = m.dim_vector(n.len());
    if n.iter().zip(&total).any(|(a, b)| a > b) {
        return Ok(EulerResult { value: 0, method: Method::Localization { fixed_points: 0 } });
    }
    let comp: Vec<usize> = total.iter().zip(n).map(|(t, x)| t - x).collect();
    euler_gr(m, &comp, choice)
}

/// Truncation order sufficient for `Quot_n^{nilp}(P_k)`.
pub fn quot_order(n: &[usize]) -> usize {
    (n.iter().sum::<usize>().saturating_sub(1)).max(1)
}

/// `χ(Quot_n^{nilp}(P_k))` computed on `P_k^l` with `l = max(|n| − 1, 1)`.
pub fn euler_quot_nilp<S: Scalar>(
    q: &crate::quiver::Quiver,
    w: &Potential<S>,
    k: usize,
    n: &[usize],
    choice: MethodChoice,
) -> Result<EulerResult> {
    let alg = TruncatedJacobian::build(q, w, quot_order(n))?;
    euler_quot(&alg.projective(k).module, n, choice)
}

/// Default oracle primes, or the comma-separated list in `QPCOVER_PRIMES`.
pub fn oracle_primes() -> Result<Vec<u64>> {
    match std::env::var("QPCOVER_PRIMES") {
        Ok(s) if !s.trim().is_empty() => s
            .split(',')
            .map(|t| {
                let p: u64 = t
                    .trim()
                    .parse()
                    .map_err(|_| Error::Structural(format!("bad prime `{t}` in QPCOVER_PRIMES")))?;
                if SUPPORTED_PRIMES.contains(&p) {
                    Ok(p)
                } else {
                    Err(Error::Unsupported(format!("prime {p} is not supported (primes below 100)")))
                }
            })
            .collect(),
        _ => Ok(vec![2, 3, 5, 7, 11, 13, 17, 19]),
    }
}

pub const SUPPORTED_PRIMES: &[u64] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

macro_rules! dispatch_prime {
    ($p:expr, $m:expr, $n:expr; $($q:literal),*) => {
        match $p {
            $($q => count_submodules::<$q, _>($m, $n),)*
            _ => Err(Error::Unsupported(format!("prime {} is not supported", $p))),
        }
    };
}

/// Number of submodules with dimension vector `n` over `F_p`.
pub fn count_submodules_mod<S: Scalar>(m: &QuiverModule<S>, n: &[usize], p: u64) -> Result<u64> {
    dispatch_prime!(p, m, n; 2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
        67, 71, 73, 79, 83, 89, 97)
}

fn count_submodules<const P: u64, S: Scalar>(m: &QuiverModule<S>, n: &[usize]) -> Result<u64> {
    let nv = n.len();
    let dims = m.dim_vector(nv);
    if n.iter().zip(&dims).any(|(a, b)| a > b) {
        return Ok(0);
    }
    let local: Vec<Vec<usize>> = (0..nv).map(|v| (0..m.dim()).filter(|&b| m.vertex_of[b] == v).collect()).collect();
    let mut pos = vec![0; m.dim()];
    for l in &local {
        for (i, &b) in l.iter().enumerate() {
            pos[b] = i;
        }
    }
    // arrow blocks over F_p: (source vertex, target vertex, matrix target × source)
    let mut blocks: Vec<(usize, usize, Vec<Vec<Zp<P>>>)> = Vec::new();
    for mat in &m.actions {
        let mut by_pair: BTreeMap<(usize, usize), Vec<Vec<Zp<P>>>> = BTreeMap::new();
        for (i, row) in mat.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let r = x.to_rational().ok_or_else(|| {
                    Error::Unsupported("finite-field counting needs rational entries".into())
                })?;
                let y = Zp::<P>::from_rational(&r).ok_or_else(|| {
                    Error::Precondition(format!("an action entry is not invertible mod {P}"))
                })?;
                let (s, t) = (m.vertex_of[j], m.vertex_of[i]);
                let blk = by_pair
                    .entry((s, t))
                    .or_insert_with(|| vec![vec![Zp::<P>::new(0); dims[s]]; dims[t]]);
                blk[pos[i]][pos[j]] = y;
            }
        }
        for ((s, t), b) in by_pair {
            if b.iter().any(|r| r.iter().any(|x| !x.is_zero())) {
                blocks.push((s, t, b));
            }
        }
    }
    let order: Vec<usize> = (0..nv).collect();
    let mut chosen: Vec<Option<Vec<Vec<Zp<P>>>>> = vec![None; nv];
    let mut count = 0u64;
    fn in_span<const P: u64>(rref: &[Vec<Zp<P>>], v: &[Zp<P>]) -> bool {
        let mut v = v.to_vec();
        for row in rref {
            let piv = row.iter().position(|x| !x.is_zero()).expect("nonzero rows");
            let c = v[piv];
            if !c.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = *x - c * *y;
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }
    fn ok_at<const P: u64>(
        v: usize,
        chosen: &[Option<Vec<Vec<Zp<P>>>>],
        blocks: &[(usize, usize, Vec<Vec<Zp<P>>>)],
    ) -> bool {
        for (s, t, b) in blocks {
            if (*s != v && *t != v) || chosen[*s].is_none() || chosen[*t].is_none() {
                continue;
            }
            let us = chosen[*s].as_ref().unwrap();
            let ut = chosen[*t].as_ref().unwrap();
            for u in us {
                let img: Vec<Zp<P>> = b
                    .iter()
                    .map(|row| row.iter().zip(u).fold(Zp::<P>::new(0), |acc, (x, y)| acc + *x * *y))
                    .collect();
                if !in_span(ut, &img) {
                    return false;
                }
            }
        }
        true
    }
    fn rec<const P: u64>(
        i: usize,
        order: &[usize],
        n: &[usize],
        dims: &[usize],
        chosen: &mut Vec<Option<Vec<Vec<Zp<P>>>>>,
        blocks: &[(usize, usize, Vec<Vec<Zp<P>>>)],
        count: &mut u64,
    ) {
        if i == order.len() {
            *count += 1;
            return;
        }
        let v = order[i];
        for_each_subspace::<P>(dims[v], n[v], &mut |sub| {
            chosen[v] = Some(sub.to_vec());
            if ok_at(v, chosen, blocks) {
                rec(i + 1, order, n, dims, chosen, blocks, count);
            }
        });
        chosen[v] = None;
    }
    rec::<P>(0, &order, n, &dims, &mut chosen, &blocks, &mut count);
    Ok(count)
}

/// Enumerates `k`-dimensional subspaces of `F_p^m` as reduced row echelon bases.
fn for_each_subspace<const P: u64>(m: usize, k: usize, f: &mut dyn FnMut(&[Vec<Zp<P>>])) {
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free positions: (row, column) with column > pivot[row] and not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let piv = pivots.clone();
                ((pivots[r] + 1)..m).filter(move |c| !piv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let mut rows: Vec<Vec<Zp<P>>> = (0..k)
            .map(|r| (0..m).map(|c| Zp::<P>::new((c == pivots[r]) as i64)).collect())
            .collect();
        let mut digits = vec![0u64; free.len()];
        loop {
            f(&rows);
            // odometer increment
            let mut j = 0;
            while j < digits.len() {
                digits[j] += 1;
                if digits[j] == P {
                    digits[j] = 0;
                    let (r, c) = free[j];
                    rows[r][c] = Zp::new(0);
                    j += 1;
                } else {
                    let (r, c) = free[j];
                    rows[r][c] = Zp::new(digits[j] as i64);
                    break;
                }
            }
            if j == digits.len() {
                break;
            }
        }
        // next combination of pivot columns
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < m - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}

/// Dimension of the product of ordinary Grassmannians containing `Gr_n(M)`.
pub fn degree_bound<S: Scalar>(m: &QuiverModule<S>, n: &[usize]) -> usize {
    let dims = m.dim_vector(n.len());
    n.iter().zip(&dims).map(|(&a, &b)| if a <= b { a * (b - a) } else { 0 }).sum()
}

/// Counts submodules over several `F_p`, fits the interpolating polynomial on all but two
/// primes, validates on the two held out and evaluates at `q = 1`.
pub fn finite_field_count_oracle<S: Scalar>(
    m: &QuiverModule<S>,
    n: &[usize],
    primes: &[u64],
) -> Result<EulerResult> {
    let need = degree_bound(m, n) + 3;
    if primes.len() < need {
        return Err(Error::Inconclusive(format!(
            "the point count needs {need} primes but only {} are available",
            primes.len()
        )));
    }
    let primes = &primes[..need];
    let counts: Vec<(u64, u64)> = primes
        .par_iter()
        .map(|&p| count_submodules_mod(m, n, p).map(|c| (p, c)))
        .collect::<Result<_>>()?;
    let (fit, held) = counts.split_at(counts.len() - 2);
    let poly = interpolate(fit);
    let held_out_ok = held
        .iter()
        .all(|&(p, c)| eval(&poly, &BigRational::from_integer(p.into())) == BigRational::from_integer(c.into()));
    let cert = OracleCertificate { counts: counts.clone(), polynomial: poly.clone(), held_out_ok };
    if !held_out_ok {
        return Err(Error::Inconclusive(format!(
            "held-out counts disagree with the fitted polynomial: {counts:?}"
        )));
    }
    let at_one = eval(&poly, &BigRational::one());
    if !at_one.is_integer() {
        return Err(Error::Inconclusive("fitted polynomial is not integral at q = 1".into()));
    }
    let value = i64::try_from(at_one.to_integer()).map_err(|_| Error::Resource("overflow".into()))?;
    Ok(EulerResult { value, method: Method::FiniteField(cert) })
}

fn eval(poly: &[BigRational], x: &BigRational) -> BigRational {
    poly.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Lagrange interpolation in the monomial basis, trailing zero coefficients removed.
fn interpolate(points: &[(u64, u64)]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); points.len()];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let xj = BigRational::from_integer(xj.into());
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c.clone();
                next[k] -= c.clone() * xj.clone();
            }
            basis = next;
            denom *= BigRational::from_integer(xi.into()) - xj;
        }
        let scale = BigRational::from_integer(yi.into()) / denom;
        for (k, c) in basis.into_iter().enumerate() {
            out[k] += c * scale.clone();
        }
    }
    while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

/// All ways to distribute `total` over `parts` slots, each bounded by `caps`.
pub fn compositions(total: usize, caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; caps.len()];
    fn go(i: usize, left: usize, caps: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: usize = caps[i + 1..].iter().sum();
        for x in left.saturating_sub(rest)..=left.min(caps[i]) {
            cur[i] = x;
            go(i + 1, left - x, caps, cur, out);
        }
        cur[i] = 0;
    }
    go(0, total, caps, &mut cur, &mut out);
    out
}

/// Total dimension vectors over a base dimension vector, bounded by `caps` per vertex.
pub fn fiber_dimension_vectors(c: &QuiverCovering, nbar: &[usize], caps: &[usize]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![vec![0; c.total.num_vertices()]];
    for (vb, &x) in nbar.iter().enumerate() {
        let fiber = c.vertex_fiber(vb);
        let fcaps: Vec<usize> = fiber.iter().map(|&v| caps[v]).collect();
        let parts = compositions(x, &fcaps);
        let mut next = Vec::with_capacity(acc.len() * parts.len());
        for a in &acc {
            for p in &parts {
                let mut v = a.clone();
                for (&f, &y) in fiber.iter().zip(p) {
                    v[f] = y;
                }
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// Which side of the projection identity to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Grassmannians of `P_k^l` at a fixed order.
    Gr { order: usize },
    /// Nilpotent Quot schemes of `P_k`.
    Quot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionReport {
    pub base_value: i64,
    /// Nonzero cover terms `(n, χ)`.
    pub cover_terms: Vec<(Vec<usize>, i64)>,
    pub cover_sum: i64,
    pub nice_grading_found: bool,
    pub holds: bool,
}

/// Compares `χ` on the base with the sum over all total dimension vectors over `nbar`.
pub fn verify_projection_euler<S: Scalar>(
    c: &QuiverCovering,
    wbar: &Potential<S>,
    k: usize,
    nbar: &[usize],
    mode: ProjectionMode,
    choice: MethodChoice,
) -> Result<ProjectionReport> {
    let w = c.sigma_potential(wbar);
    let l = match mode {
        ProjectionMode::Gr { order } => order,
        ProjectionMode::Quot => quot_order(nbar),
    };
    let alg = TruncatedJacobian::build(&c.total, &w, l)?;
    let balg = TruncatedJacobian::build(&c.base, wbar, l)?;
    let p = alg.projective(k);
    let pbar = balg.projective(c.vmap[k]);
    let sup = p.supports(c.total.num_vertices());
    let nice = find_nice_grading(c, &sup, k, 1)?.is_some();
    let base_value = match mode {
        ProjectionMode::Gr { .. } => euler_gr(&pbar.module, nbar, choice)?.value,
        ProjectionMode::Quot => euler_quot(&pbar.module, nbar, choice)?.value,
    };
    let caps = p.dim_vector(c.total.num_vertices());
    let fibers = fiber_dimension_vectors(c, nbar, &caps);
    let values: Vec<(Vec<usize>, i64)> = fibers
        .into_par_iter()
        .map(|n| {
            let v = match mode {
                ProjectionMode::Gr { .. } => euler_gr(&p.module, &n, choice)?.value,
                ProjectionMode::Quot => euler_quot(&p.module, &n, choice)?.value,
            };
            Ok((n, v))
        })
        .collect::<Result<_>>()?;
    let cover_terms: Vec<(Vec<usize>, i64)> = values.into_iter().filter(|(_, v)| *v != 0).collect();
    let cover_sum = cover_terms.iter().map(|(_, v)| v).sum();
    Ok(ProjectionReport {
        base_value,
        cover_terms,
        cover_sum,
        nice_grading_found: nice,
        holds: base_value == cover_sum,
    })
}

/// Fixed points of the pulled-back module grouped by total dimension vector.
pub fn pullback_fixed_points<S: Scalar>(
    c: &QuiverCovering,
    m: &QuiverModule<S>,
    nbar: &[usize],
) -> BTreeMap<Vec<usize>, u64> {
    let pb = pullback_module(c, m);
    let mut out = BTreeMap::new();
    for_each_closed_subset(&pb, nbar, |sel| {
        let mut dv = vec![0; c.total.num_vertices()];
        for (b, &s) in sel.iter().enumerate() {
            if s {
                dv[m.vertex_of[b]] += 1;
            }
        }
        *out.entry(dv).or_insert(0) += 1;
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::kronecker_cover2;

    type Q = BigRational;

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        let mut c = 0;
        for_each_subspace::<3>(4, 2, &mut |_| c += 1);
        // [4 choose 2]_3 = (3^4-1)(3^3-1)/((3^2-1)(3-1)) = 130
        assert_eq!(c, 130);
        let mut c0 = 0;
        for_each_subspace::<5>(3, 0, &mut |_| c0 += 1);
        assert_eq!(c0, 1);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let pts: Vec<(u64, u64)> = [2u64, 3, 5].iter().map(|&q| (q, q * q + 1)).collect();
        let p = interpolate(&pts);
        assert_eq!(p, vec![Q::one(), Q::zero(), Q::one()]);
    }

    #[test]
    fn kronecker_base_p1() {
        let c = kronecker_cover2();
        let alg = TruncatedJacobian::build(&c.base, &Potential::<Q>::zero(), 2).unwrap();
        let p = alg.projective(1).module;
        let loc = euler_gr(&p, &[1, 0], MethodChoice::Localization).unwrap();
        assert_eq!(loc.value, 2);
        let ff = euler_gr(&p, &[1, 0], MethodChoice::FiniteField).unwrap();
        assert_eq!(ff.value, 2);
        match ff.method {
            Method::FiniteField(cert) => {
                assert!(cert.counts.iter().all(|&(q, n)| n == q + 1));
                assert_eq!(cert.polynomial, vec![Q::one(), Q::one()]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn compositions_bounded() {
        assert_eq!(compositions(2, &[1, 2]), vec![vec![0, 2], vec![1, 1]]);
        assert_eq!(compositions(0, &[0, 0]), vec![vec![0, 0]]);
    }
}
