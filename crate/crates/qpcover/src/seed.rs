//! Seeds, the map `p*`, principal coefficients and coverings of seeds.
//!
//! Conventions: `B_ij = {e_j, e_i} d_i`, `f_i = e_i^* / d_i`, and
//! `p*(e_k) = Σ_i B_ik f_i`. Vectors in `N` are indexed by the unfrozen indices in
//! declaration order; vectors in `M°` are written in the `f`-basis over all indices.

use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix};
use crate::quiver::Quiver;
use crate::scalar::{as_integer, sign, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Seed<S> {
    pub ids: Vec<String>,
    pub frozen: Vec<bool>,
    pub d: Vec<S>,
    pub b: Matrix<S>,
}

impl<S: Scalar> Seed<S> {
    /// Validates skew-symmetrizability, positivity of `d` and integrality on unfrozen rows
    /// and columns.
    pub fn new(ids: Vec<String>, frozen: Vec<bool>, d: Vec<S>, b: Matrix<S>) -> Result<Self> {
        let n = ids.len();
        if frozen.len() != n || d.len() != n || b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("seed data has inconsistent sizes".into()));
        }
        for (i, di) in d.iter().enumerate() {
            if sign(di) <= 0 {
                return Err(Error::Rejected(format!("d_{} must be positive", ids[i])));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = b[i][j].clone() * d[j].clone();
                let rhs = -(b[j][i].clone() * d[i].clone());
                if lhs != rhs {
                    return Err(Error::Rejected(format!(
                        "B is not skew-symmetrizable at ({}, {})",
                        ids[i], ids[j]
                    )));
                }
                if (!frozen[i] || !frozen[j]) && as_integer(&b[i][j]).is_none() {
                    return Err(Error::Rejected(format!(
                        "B_({},{}) must be an integer",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        Ok(Seed { ids, frozen, d, b })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn unfrozen(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.frozen[i]).collect()
    }

    pub fn rank_uf(&self) -> usize {
        self.unfrozen().len()
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// `{e_i, e_j}`.
    pub fn bracket(&self, i: usize, j: usize) -> S {
        self.b[j][i].clone() / self.d[j].clone()
    }

    /// `p*(n)` in the `f`-basis, for `n` indexed by unfrozen indices.
    pub fn p_star(&self, n: &[i64]) -> Vec<S> {
        let uf = self.unfrozen();
        assert_eq!(n.len(), uf.len(), "dimension vector length");
        (0..self.len())
            .map(|i| {
                uf.iter().zip(n).fold(S::zero(), |acc, (&k, &nk)| {
                    acc + self.b[i][k].clone() * S::from_i64(nk)
                })
            })
            .collect()
    }

    /// `⟨n, m⟩` for `n ∈ N` (unfrozen coordinates) and `m` in the `f`-basis.
    pub fn pairing(&self, n: &[i64], m: &[S]) -> S {
        self.unfrozen().iter().zip(n).fold(S::zero(), |acc, (&k, &nk)| {
            acc + S::from_i64(nk) * m[k].clone() / self.d[k].clone()
        })
    }

    /// `{n, n'}` for unfrozen-coordinate vectors.
    pub fn omega(&self, n: &[i64], n2: &[i64]) -> S {
        // {n, n'} = ⟨n', p*(n)⟩
        self.pairing(n2, &self.p_star(n))
    }

    /// Whether `p*` restricted to `N_uf` is injective.
    pub fn p_star_injective(&self) -> bool {
        let uf = self.unfrozen();
        let m: Matrix<S> = (0..self.len())
            .map(|i| uf.iter().map(|&k| self.b[i][k].clone()).collect())
            .collect();
        rank(&m) == uf.len()
    }
}

/// Skew-symmetric seed of a quiver: `d = 1`, `B_ij = #(i→j) − #(j→i)`.
pub fn seed_from_quiver<S: Scalar>(q: &Quiver) -> Result<Seed<S>> {
    let n = q.num_vertices();
    for a in q.arrows() {
        if a.source == a.target {
            return Err(Error::Rejected(format!("loop `{}`", a.id)));
        }
    }
    for a in q.arrows() {
        for b in q.arrows() {
            let touches_uf = !q.is_frozen(a.source) || !q.is_frozen(a.target);
            if a.source == b.target && a.target == b.source && touches_uf {
                return Err(Error::Rejected(format!("2-cycle `{}`, `{}`", a.id, b.id)));
            }
        }
    }
    let mut b = vec![vec![S::zero(); n]; n];
    for a in q.arrows() {
        b[a.source][a.target] += &S::one();
        b[a.target][a.source] += &(-S::one());
    }
    Seed::new(
        q.vertices().iter().map(|v| v.id.clone()).collect(),
        q.vertices().iter().map(|v| v.frozen).collect(),
        vec![S::one(); n],
        b,
    )
}

/// Appends a frozen partner `i'` with `d_{i'} = 1` to every index, with `{e_i, e_{j'}} = δ_ij`
/// and `{e_{i'}, e_{j'}} = 0`. The matrix is rebuilt from the bracket via `B_ab = {e_b, e_a} d_a`.
pub fn principal_seed<S: Scalar>(sd: &Seed<S>) -> Seed<S> {
    let n = sd.len();
    let bracket = |a: usize, b: usize| -> S {
        match (a < n, b < n) {
            (true, true) => sd.bracket(a, b),
            (true, false) => {
                if a == b - n {
                    S::one()
                } else {
                    S::zero()
                }
            }
            (false, true) => {
                if a - n == b {
                    -S::one()
                } else {
                    S::zero()
                }
            }
            (false, false) => S::zero(),
        }
    };
    let d: Vec<S> = sd.d.iter().cloned().chain((0..n).map(|_| S::one())).collect();
    let b: Matrix<S> = (0..2 * n)
        .map(|a| (0..2 * n).map(|c| bracket(c, a) * d[a].clone()).collect())
        .collect();
    let ids = sd.ids.iter().cloned().chain(sd.ids.iter().map(|i| format!("{i}'"))).collect();
    let frozen = sd.frozen.iter().copied().chain((0..n).map(|_| true)).collect();
    Seed::new(ids, frozen, d, b).expect("principal extension stays skew-symmetrizable")
}

/// A covering of seeds: orbits of the total index set and the projected base seed.
#[derive(Clone, Debug)]
pub struct SeedCovering<S> {
    pub total: Seed<S>,
    pub base: Seed<S>,
    /// Orbit (base index) of every total index.
    pub orbit_of: Vec<usize>,
    pub orbit_sizes: Vec<usize>,
}

impl<S: Scalar> SeedCovering<S> {
    /// `π` on `N`: sums coordinates over orbits (unfrozen coordinates on both sides).
    pub fn project_n(&self, n: &[i64]) -> Vec<i64> {
        let uf = self.total.unfrozen();
        let buf = self.base.unfrozen();
        let mut out = vec![0; buf.len()];
        for (&k, &nk) in uf.iter().zip(n) {
            let pos = buf.iter().position(|&x| x == self.orbit_of[k]).expect("orbit unfrozen");
            out[pos] += nk;
        }
        out
    }

    /// `π` on `M°`: `f_i ↦ f_ī`.
    pub fn project_m(&self, m: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.base.len()];
        for (i, x) in m.iter().enumerate() {
            out[self.orbit_of[i]] += x;
        }
        out
    }

    /// `κ(f_ī) = (1/|ī|) Σ_{i'∈ī} f_{i'}`, extended linearly.
    pub fn kappa(&self, m: &[S]) -> Vec<S> {
        (0..self.total.len())
            .map(|i| {
                let o = self.orbit_of[i];
                m[o].clone() / S::from_i64(self.orbit_sizes[o] as i64)
            })
            .collect()
    }

    /// Total indices in orbit `o`.
    pub fn orbit(&self, o: usize) -> Vec<usize> {
        (0..self.total.len()).filter(|&i| self.orbit_of[i] == o).collect()
    }
}

/// Validates the covering conditions and builds the base seed.
///
/// `orbits` lists `(base id, member indices)`; together they must partition the index set.
pub fn seed_covering<S: Scalar>(
    sd: &Seed<S>,
    orbits: &[(String, Vec<usize>)],
) -> Result<SeedCovering<S>> {
    let n = sd.len();
    let mut orbit_of = vec![usize::MAX; n];
    for (o, (_, members)) in orbits.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::Structural("empty orbit".into()));
        }
        for &i in members {
            if i >= n || orbit_of[i] != usize::MAX {
                return Err(Error::Structural("orbits do not partition the index set".into()));
            }
            orbit_of[i] = o;
        }
    }
    if orbit_of.contains(&usize::MAX) {
        return Err(Error::Structural("orbits do not cover the index set".into()));
    }
    for (_, members) in orbits {
        let i0 = members[0];
        for &i in members {
            if sd.frozen[i] != sd.frozen[i0] {
                return Err(Error::Rejected(format!(
                    "orbit mixes frozen and unfrozen indices ({}, {})",
                    sd.ids[i0], sd.ids[i]
                )));
            }
            if sd.d[i] != sd.d[i0] {
                return Err(Error::Rejected(format!(
                    "d is not constant on the orbit of {} ({} vs {})",
                    sd.ids[i0], sd.d[i0], sd.d[i]
                )));
            }
        }
    }
    let col_sum = |o: usize, j: usize| -> S {
        orbits[o].1.iter().fold(S::zero(), |acc, &i| acc + sd.b[i][j].clone())
    };
    for o in 0..orbits.len() {
        for (_, members) in orbits {
            let j0 = members[0];
            let s0 = col_sum(o, j0);
            for &j in members {
                if col_sum(o, j) != s0 {
                    return Err(Error::Rejected(format!(
                        "orbit sums differ: orbit {}, columns {} and {}",
                        orbits[o].0, sd.ids[j0], sd.ids[j]
                    )));
                }
            }
        }
    }
    let m = orbits.len();
    let b: Matrix<S> =
        (0..m).map(|o| (0..m).map(|p| col_sum(o, orbits[p].1[0])).collect()).collect();
    let d: Vec<S> = orbits
        .iter()
        .map(|(_, mem)| S::from_i64(mem.len() as i64) * sd.d[mem[0]].clone())
        .collect();
    let base = Seed::new(
        orbits.iter().map(|(id, _)| id.clone()).collect(),
        orbits.iter().map(|(_, mem)| sd.frozen[mem[0]]).collect(),
        d,
        b,
    )?;
    Ok(SeedCovering {
        total: sd.clone(),
        base,
        orbit_of,
        orbit_sizes: orbits.iter().map(|(_, m)| m.len()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(v: i64) -> Q {
        Q::from_i64(v)
    }

    fn kronecker_base() -> Quiver {
        Quiver::from_parts(&["1", "2"], &[("a", "2", "1"), ("b", "2", "1")]).unwrap()
    }

    fn kronecker_cover() -> Quiver {
        Quiver::from_parts(
            &["1", "2", "3", "4"],
            &[("a1", "2", "1"), ("b1", "2", "3"), ("b2", "4", "1"), ("a2", "4", "3")],
        )
        .unwrap()
    }

    #[test]
    fn kronecker_exchange_matrix() {
        let s: Seed<Q> = seed_from_quiver(&kronecker_base()).unwrap();
        assert_eq!(s.b, vec![vec![q(0), q(-2)], vec![q(2), q(0)]]);
        // column of 2 is (-2, 0)
        assert_eq!(s.p_star(&[0, 1]), vec![q(-2), q(0)]);
    }

    #[test]
    fn loops_and_two_cycles_rejected() {
        let l = Quiver::from_parts(&["1"], &[("l", "1", "1")]).unwrap();
        assert!(seed_from_quiver::<Q>(&l).is_err());
        let t = Quiver::from_parts(&["1", "2"], &[("a", "1", "2"), ("b", "2", "1")]).unwrap();
        assert!(seed_from_quiver::<Q>(&t).is_err());
    }

    #[test]
    fn principal_a1() {
        let a1: Seed<Q> = seed_from_quiver(&Quiver::from_parts(&["1"], &[]).unwrap()).unwrap();
        assert_eq!(a1.p_star(&[1]), vec![q(0)]);
        let p = principal_seed(&a1);
        assert_eq!(p.b[1][0], q(1));
        assert_eq!(p.b[0][1], q(-1));
        assert_eq!(p.p_star(&[1]), vec![q(0), q(1)]);
        assert!(p.p_star_injective());
    }

    #[test]
    fn principal_kronecker_is_injective() {
        let s: Seed<Q> = seed_from_quiver(&kronecker_base()).unwrap();
        let p = principal_seed(&s);
        assert_eq!(p.len(), 4);
        assert!(p.p_star_injective());
        let empty: Seed<Q> = Seed::new(vec![], vec![], vec![], vec![]).unwrap();
        assert!(principal_seed(&empty).is_empty());
    }

    #[test]
    fn kronecker_cover_projects_to_base() {
        let s: Seed<Q> = seed_from_quiver(&kronecker_cover()).unwrap();
        let sc = seed_covering(&s, &[("1".into(), vec![0, 2]), ("2".into(), vec![1, 3])]).unwrap();
        let base: Seed<Q> = seed_from_quiver(&kronecker_base()).unwrap();
        assert_eq!(sc.base.b, base.b);
        assert_eq!(sc.base.d, vec![q(2), q(2)]);
        for k in 0..4 {
            let mut e = vec![0; 4];
            e[k] = 1;
            let lhs = sc.project_m(&s.p_star(&e));
            let rhs = sc.base.p_star(&sc.project_n(&e));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn trivial_partition_is_identity() {
        let s: Seed<Q> = seed_from_quiver(&kronecker_cover()).unwrap();
        let orbits: Vec<(String, Vec<usize>)> =
            (0..4).map(|i| (s.ids[i].clone(), vec![i])).collect();
        let sc = seed_covering(&s, &orbits).unwrap();
        assert_eq!(sc.base, s);
    }

    #[test]
    fn bad_orbits_reported() {
        let s: Seed<Q> = seed_from_quiver(&kronecker_cover()).unwrap();
        let err = seed_covering(&s, &[("x".into(), vec![0, 1]), ("y".into(), vec![2, 3])]);
        assert!(matches!(err, Err(Error::Rejected(_))));
    }
}
