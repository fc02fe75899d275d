//! Truncated Jacobian algebras `A^l = CQ^l / ⟨R^l⟩` and projective modules `P_k^l = A^l e_k`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{axpy, is_zero_matrix, mat_mul, zeros, Matrix, SparseEchelon, SparseVec};
use crate::quiver::{cyclic_derivative, enumerate_paths, AlgebraElement, Path, Potential, Quiver};
use crate::scalar::Scalar;

/// Normal-form engine for a truncated Jacobian algebra.
///
/// All paths of length at most `l` are numbered in path order. The relation space of each
/// `(source, target)` block is kept in echelon form with pivots on the latest paths, so the
/// surviving (non-pivot) paths are the earliest independent classes.
#[derive(Clone, Debug)]
pub struct TruncatedJacobian<S> {
    quiver: Quiver,
    potential: Potential<S>,
    order: usize,
    paths: Vec<Path>,
    ids: HashMap<(usize, Vec<usize>), usize>,
    blocks: HashMap<(usize, usize), SparseEchelon<S>>,
    from_vertex: Vec<Vec<usize>>,
    basis: Vec<usize>,
    basis_pos: HashMap<usize, usize>,
}

impl<S: Scalar> TruncatedJacobian<S> {
    pub fn build(q: &Quiver, w: &Potential<S>, l: usize) -> Result<Self> {
        if l < 1 {
            return Err(Error::Precondition("truncation order must be at least 1".into()));
        }
        if let Some((_, p)) = w.terms().iter().find(|(_, p)| p.len() < 3) {
            return Err(Error::Rejected(format!(
                "potential cycle {} has length {} < 3",
                q.fmt_path(p),
                p.len()
            )));
        }
        let paths = enumerate_paths(q, None, None, l);
        let ids: HashMap<(usize, Vec<usize>), usize> =
            paths.iter().enumerate().map(|(i, p)| ((p.source, p.arrows.clone()), i)).collect();
        let mut from_vertex = vec![Vec::new(); q.num_vertices()];
        for (i, p) in paths.iter().enumerate() {
            from_vertex[p.source].push(i);
        }
        let mut alg = TruncatedJacobian {
            quiver: q.clone(),
            potential: w.clone(),
            order: l,
            paths,
            ids,
            blocks: HashMap::new(),
            from_vertex,
            basis: Vec::new(),
            basis_pos: HashMap::new(),
        };

        let relations: Vec<(usize, Vec<(Path, S)>)> = (0..q.num_arrows())
            .map(|a| {
                let r = cyclic_derivative(q, a, w).truncate(l);
                (a, r.terms.into_iter().collect::<Vec<_>>())
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();

        let by_source: Vec<HashMap<(usize, usize), SparseEchelon<S>>> = (0..q.num_vertices())
            .into_par_iter()
            .map(|s| alg.ideal_blocks_from(s, &relations))
            .collect();
        for m in by_source {
            alg.blocks.extend(m);
        }
        alg.basis = (0..alg.paths.len()).filter(|&i| !alg.is_pivot(i)).collect();
        alg.basis_pos = alg.basis.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        Ok(alg)
    }

    /// Echelon forms of the ideal blocks whose paths start at `s`.
    fn ideal_blocks_from(
        &self,
        s: usize,
        relations: &[(usize, Vec<(Path, S)>)],
    ) -> HashMap<(usize, usize), SparseEchelon<S>> {
        let l = self.order;
        let mut blocks: HashMap<(usize, usize), SparseEchelon<S>> = HashMap::new();
        let from_s: Vec<&Path> = self.from_vertex[s].iter().map(|&i| &self.paths[i]).collect();
        for (_, terms) in relations {
            let r_src = terms[0].0.source;
            let r_tgt = terms[0].0.target;
            let min_len = terms.iter().map(|(p, _)| p.len()).min().unwrap_or(0);
            for v in from_s.iter().filter(|v| v.target == r_src && v.len() + min_len <= l) {
                let room = l - v.len() - min_len;
                let us = self.from_vertex[r_tgt].iter().map(|&i| &self.paths[i]);
                for u in us.take_while(|u| u.len() <= room) {
                    let mut vec: SparseVec<S> = BTreeMap::new();
                    for (t, c) in terms {
                        if v.len() + t.len() + u.len() > l {
                            continue;
                        }
                        let mut arrows = v.arrows.clone();
                        arrows.extend_from_slice(&t.arrows);
                        arrows.extend_from_slice(&u.arrows);
                        let id = self.ids[&(s, arrows)];
                        axpy(&mut vec, c, &[(id, S::one())]);
                    }
                    if !vec.is_empty() {
                        blocks.entry((s, u.target)).or_default().insert(vec);
                    }
                }
            }
        }
        blocks
    }

    fn is_pivot(&self, i: usize) -> bool {
        let p = &self.paths[i];
        self.blocks.get(&(p.source, p.target)).is_some_and(|e| e.is_pivot(i))
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn potential(&self) -> &Potential<S> {
        &self.potential
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the `(source, target)` block.
    pub fn block_dim(&self, s: usize, t: usize) -> usize {
        self.basis.iter().filter(|&&i| self.paths[i].source == s && self.paths[i].target == t).count()
    }

    /// Basis paths in path order.
    pub fn basis_paths(&self) -> Vec<&Path> {
        self.basis.iter().map(|&i| &self.paths[i]).collect()
    }

    pub fn path_id(&self, p: &Path) -> Option<usize> {
        self.ids.get(&(p.source, p.arrows.clone())).copied()
    }

    pub fn path(&self, id: usize) -> &Path {
        &self.paths[id]
    }

    /// Sparse vector of an element of `CQ`, dropping paths longer than `l`.
    pub fn to_vec(&self, x: &AlgebraElement<S>) -> SparseVec<S> {
        let mut v = BTreeMap::new();
        for (p, c) in &x.terms {
            if let Some(id) = self.path_id(p) {
                axpy(&mut v, c, &[(id, S::one())]);
            }
        }
        v
    }

    pub fn from_vec(&self, v: &SparseVec<S>) -> AlgebraElement<S> {
        let mut e = AlgebraElement::zero(Some(self.order));
        for (i, c) in v {
            e.add_term(self.paths[*i].clone(), c.clone());
        }
        e
    }

    /// Normal form of a path-id vector; the result is supported on basis paths.
    pub fn reduce_vec(&self, v: SparseVec<S>) -> SparseVec<S> {
        let mut parts: BTreeMap<(usize, usize), SparseVec<S>> = BTreeMap::new();
        for (i, c) in v {
            let p = &self.paths[i];
            parts.entry((p.source, p.target)).or_default().insert(i, c);
        }
        let mut out = BTreeMap::new();
        for (key, part) in parts {
            let red = match self.blocks.get(&key) {
                Some(e) => e.reduce(part),
                None => part,
            };
            out.extend(red);
        }
        out
    }

    pub fn normal_form(&self, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        self.from_vec(&self.reduce_vec(self.to_vec(x)))
    }

    pub fn is_zero(&self, x: &AlgebraElement<S>) -> bool {
        self.reduce_vec(self.to_vec(x)).is_empty()
    }

    /// Normal form of `x·y` (`y` traversed first).
    pub fn product(&self, x: &AlgebraElement<S>, y: &AlgebraElement<S>) -> AlgebraElement<S> {
        self.normal_form(&x.truncate(self.order).mul(&y.truncate(self.order)))
    }

    /// Coordinates of an element in the basis of the whole algebra.
    pub fn coordinates(&self, x: &AlgebraElement<S>) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim()];
        for (i, c) in self.reduce_vec(self.to_vec(x)) {
            out[self.basis_pos[&i]] = c;
        }
        out
    }

    /// Generators `∂_a W` truncated at `l`.
    pub fn relations(&self) -> Vec<(usize, AlgebraElement<S>)> {
        (0..self.quiver.num_arrows())
            .map(|a| (a, cyclic_derivative(&self.quiver, a, &self.potential).truncate(self.order)))
            .filter(|(_, r)| !r.is_zero())
            .collect()
    }

    /// The projective module `P_k^l`.
    pub fn projective(&self, k: usize) -> ProjectiveModule<S> {
        let q = &self.quiver;
        let basis: Vec<usize> =
            self.basis.iter().copied().filter(|&i| self.paths[i].source == k).collect();
        let pos: HashMap<usize, usize> = basis.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        let dim = basis.len();
        let mut actions = vec![zeros::<S>(dim, dim); q.num_arrows()];
        for (col, &i) in basis.iter().enumerate() {
            let p = &self.paths[i];
            for a in q.arrows_from(p.target) {
                if p.len() + 1 > self.order {
                    continue;
                }
                let mut arrows = p.arrows.clone();
                arrows.push(a);
                let id = self.ids[&(k, arrows)];
                let mut v = BTreeMap::new();
                v.insert(id, S::one());
                for (j, c) in self.reduce_vec(v) {
                    actions[a][pos[&j]][col] = c;
                }
            }
        }
        let paths: Vec<Path> = basis.iter().map(|&i| self.paths[i].clone()).collect();
        let module = QuiverModule {
            vertex_of: paths.iter().map(|p| p.target).collect(),
            labels: paths.iter().map(|p| q.fmt_path(p)).collect(),
            actions,
        };
        ProjectiveModule { vertex: k, order: self.order, paths, module }
    }
}

/// A finite-dimensional representation given by a basis with vertex labels and one action
/// matrix per arrow (columns indexed by source basis elements).
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverModule<S> {
    pub vertex_of: Vec<usize>,
    pub labels: Vec<String>,
    pub actions: Vec<Matrix<S>>,
}

impl<S: Scalar> QuiverModule<S> {
    pub fn zero(num_arrows: usize) -> Self {
        QuiverModule { vertex_of: vec![], labels: vec![], actions: vec![vec![]; num_arrows] }
    }

    pub fn dim(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn dim_vector(&self, num_vertices: usize) -> Vec<usize> {
        let mut d = vec![0; num_vertices];
        for &v in &self.vertex_of {
            d[v] += 1;
        }
        d
    }

    /// Matrix of a path (traversal order: first arrow applied first).
    pub fn path_action(&self, p: &Path) -> Matrix<S> {
        let n = self.dim();
        let mut m: Matrix<S> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j && self.vertex_of[i] == p.source {
                            S::one()
                        } else {
                            S::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for &a in &p.arrows {
            m = mat_mul(&self.actions[a], &m);
        }
        m
    }

    pub fn element_action(&self, x: &AlgebraElement<S>) -> Matrix<S> {
        let n = self.dim();
        let mut out = zeros(n, n);
        for (p, c) in &x.terms {
            let m = self.path_action(p);
            for i in 0..n {
                for j in 0..n {
                    if !m[i][j].is_zero() {
                        out[i][j] += &(c.clone() * m[i][j].clone());
                    }
                }
            }
        }
        out
    }

    /// Vertex and arrow supports.
    pub fn supports(&self, num_vertices: usize) -> SupportData {
        let d = self.dim_vector(num_vertices);
        SupportData {
            vertices: (0..num_vertices).filter(|&v| d[v] > 0).collect(),
            arrows: (0..self.actions.len()).filter(|&a| !is_zero_matrix(&self.actions[a])).collect(),
        }
    }

    /// Whether every product of `len` arrow actions vanishes.
    pub fn products_vanish(&self, len: usize) -> bool {
        let n = self.dim();
        // image of all words of the current length, as a spanning set of columns
        let mut span: Matrix<S> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        for _ in 0..len {
            let mut next: Matrix<S> = vec![Vec::new(); n];
            for a in &self.actions {
                let img = mat_mul(a, &span);
                for (row, r) in next.iter_mut().zip(img) {
                    row.extend(r);
                }
            }
            span = reduce_columns(next);
            if span.first().is_none_or(|r| r.is_empty()) {
                return true;
            }
        }
        is_zero_matrix(&span)
    }
}

/// Keeps a basis of the column space.
fn reduce_columns<S: Scalar>(m: Matrix<S>) -> Matrix<S> {
    let n = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut t: Matrix<S> = (0..cols).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect();
    let piv = crate::linalg::rref(&mut t);
    let k = piv.len();
    (0..n).map(|i| (0..k).map(|j| t[j][i].clone()).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportData {
    pub vertices: BTreeSet<usize>,
    pub arrows: BTreeSet<usize>,
}

/// `P_k^l` with its basis paths.
#[derive(Clone, Debug)]
pub struct ProjectiveModule<S> {
    pub vertex: usize,
    pub order: usize,
    pub paths: Vec<Path>,
    pub module: QuiverModule<S>,
}

impl<S: Scalar> ProjectiveModule<S> {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn dim_vector(&self, num_vertices: usize) -> Vec<usize> {
        self.module.dim_vector(num_vertices)
    }

    pub fn supports(&self, num_vertices: usize) -> SupportData {
        self.module.supports(num_vertices)
    }

    /// Whether the action matrices annihilate every truncated generator.
    pub fn satisfies_relations(&self, alg: &TruncatedJacobian<S>) -> bool {
        alg.relations().iter().all(|(_, r)| is_zero_matrix(&self.module.element_action(r)))
    }

    /// Nilpotency at order: all products of `l + 1` arrows vanish.
    pub fn is_nilpotent_at_order(&self) -> bool {
        self.module.products_vanish(self.order + 1)
    }
}

/// Outcome of [`stabilization_order`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stabilization {
    Stable { order: usize, dim: usize },
    NotStabilized { dims: Vec<usize> },
}

/// Smallest `l ≤ l_max` with `dim A^l = dim A^{l+1}`.
pub fn stabilization_order<S: Scalar>(
    q: &Quiver,
    w: &Potential<S>,
    l_max: usize,
) -> Result<Stabilization> {
    if l_max < 2 {
        return Err(Error::Precondition("l_max must be at least 2".into()));
    }
    let mut dims = Vec::new();
    let mut prev = TruncatedJacobian::build(q, w, 1)?.dim();
    dims.push(prev);
    for l in 1..=l_max {
        let next = TruncatedJacobian::build(q, w, l + 1)?.dim();
        if next == prev {
            return Ok(Stabilization::Stable { order: l, dim: prev });
        }
        dims.push(next);
        prev = next;
    }
    Ok(Stabilization::NotStabilized { dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

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
    fn kronecker_path_algebra() {
        for l in 1..4 {
            let a = TruncatedJacobian::build(&kronecker_base(), &Potential::<Q>::zero(), l).unwrap();
            assert_eq!(a.dim(), 4);
        }
    }

    #[test]
    fn kronecker_cover_projective() {
        let q = kronecker_cover();
        let a = TruncatedJacobian::build(&q, &Potential::<Q>::zero(), 2).unwrap();
        let p = a.projective(1);
        assert_eq!(p.module.labels, vec!["e_2", "a1", "b1"]);
        assert_eq!(p.dim_vector(4), vec![1, 1, 1, 0]);
        let s = p.supports(4);
        assert_eq!(s.vertices, [0, 1, 2].into_iter().collect());
        assert_eq!(s.arrows, [0, 1].into_iter().collect());
        assert!(p.is_nilpotent_at_order());
    }

    #[test]
    fn single_vertex() {
        let q = Quiver::from_parts(&["1"], &[]).unwrap();
        let a = TruncatedJacobian::build(&q, &Potential::<Q>::zero(), 1).unwrap();
        let p = a.projective(0);
        assert_eq!(p.module.labels, vec!["e_1"]);
        assert!(p.supports(1).arrows.is_empty());
    }

    #[test]
    fn short_cycles_rejected() {
        let q = Quiver::from_parts(&["1", "2"], &[("a", "1", "2"), ("b", "2", "1")]).unwrap();
        let w = Potential::new(vec![(Q::from_i64(1), q.path(&[0, 1]).unwrap())]).unwrap();
        assert!(TruncatedJacobian::build(&q, &w, 3).is_err());
    }

    #[test]
    fn three_cycle_relations() {
        // W = cba on the oriented triangle: all paths of length 2 vanish
        let q = Quiver::from_parts(
            &["1", "2", "3"],
            &[("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")],
        )
        .unwrap();
        let w = Potential::new(vec![(Q::from_i64(1), q.path(&[0, 1, 2]).unwrap())]).unwrap();
        let a = TruncatedJacobian::build(&q, &w, 4).unwrap();
        assert_eq!(a.dim(), 6);
        for k in 0..3 {
            assert!(a.projective(k).satisfies_relations(&a));
        }
    }

    #[test]
    fn stabilization() {
        assert_eq!(
            stabilization_order(&kronecker_base(), &Potential::<Q>::zero(), 4).unwrap(),
            Stabilization::Stable { order: 1, dim: 4 }
        );
        let l = Quiver::from_parts(&["v"], &[("l", "v", "v")]).unwrap();
        assert!(matches!(
            stabilization_order(&l, &Potential::<Q>::zero(), 5).unwrap(),
            Stabilization::NotStabilized { .. }
        ));
    }
}
