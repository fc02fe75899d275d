//! Quivers, paths, potentials and cyclic derivatives.
//!
//! Paths store their arrows in traversal order: the first arrow of the list is traversed
//! first. In product notation `αβ` means `β` is traversed first, so the product of two paths
//! `p·q` is the traversal concatenation `q` then `p`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub frozen: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

/// A finite quiver. Loops and 2-cycles are allowed.
#[derive(Clone, Debug, Default)]
pub struct Quiver {
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
    vindex: HashMap<String, usize>,
    aindex: HashMap<String, usize>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

impl Quiver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a quiver from unfrozen vertex ids and `(id, source, target)` arrow triples.
    pub fn from_parts(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Result<Self> {
        let mut q = Quiver::new();
        for v in vertices {
            q.add_vertex(v, false)?;
        }
        for (a, s, t) in arrows {
            q.add_arrow(a, s, t)?;
        }
        Ok(q)
    }

    pub fn add_vertex(&mut self, id: &str, frozen: bool) -> Result<usize> {
        if self.vindex.contains_key(id) {
            return Err(Error::Structural(format!("duplicate vertex id `{id}`")));
        }
        let i = self.vertices.len();
        self.vertices.push(Vertex { id: id.to_string(), frozen });
        self.vindex.insert(id.to_string(), i);
        Ok(i)
    }

    pub fn add_arrow(&mut self, id: &str, source: &str, target: &str) -> Result<usize> {
        let s = self.vertex_index(source)?;
        let t = self.vertex_index(target)?;
        self.add_arrow_idx(id, s, t)
    }

    pub fn add_arrow_idx(&mut self, id: &str, source: usize, target: usize) -> Result<usize> {
        if self.aindex.contains_key(id) {
            return Err(Error::Structural(format!("duplicate arrow id `{id}`")));
        }
        if source >= self.vertices.len() || target >= self.vertices.len() {
            return Err(Error::Structural(format!("arrow `{id}` has an undeclared endpoint")));
        }
        let i = self.arrows.len();
        self.arrows.push(Arrow { id: id.to_string(), source, target });
        self.aindex.insert(id.to_string(), i);
        Ok(i)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn arrow(&self, i: usize) -> &Arrow {
        &self.arrows[i]
    }

    pub fn vertex_id(&self, id: &str) -> Option<usize> {
        self.vindex.get(id).copied()
    }

    pub fn arrow_id(&self, id: &str) -> Option<usize> {
        self.aindex.get(id).copied()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_id(id).ok_or_else(|| Error::Structural(format!("unknown vertex `{id}`")))
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize> {
        self.arrow_id(id).ok_or_else(|| Error::Structural(format!("unknown arrow `{id}`")))
    }

    pub fn arrows_from(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&a| self.arrows[a].source == v)
    }

    pub fn arrows_into(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&a| self.arrows[a].target == v)
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        self.vertices[v].frozen
    }

    /// Lazy path at `v`.
    pub fn lazy(&self, v: usize) -> Path {
        Path { source: v, target: v, arrows: Vec::new() }
    }

    /// Path of length one.
    pub fn arrow_path(&self, a: usize) -> Path {
        let ar = &self.arrows[a];
        Path { source: ar.source, target: ar.target, arrows: vec![a] }
    }

    /// Builds a path from arrow indices in traversal order.
    pub fn path(&self, arrows: &[usize]) -> Result<Path> {
        let Some(&first) = arrows.first() else {
            return Err(Error::Structural("composite path needs at least one arrow".into()));
        };
        for w in arrows.windows(2) {
            if self.arrows[w[0]].target != self.arrows[w[1]].source {
                return Err(Error::Structural(format!(
                    "arrows `{}` and `{}` do not compose",
                    self.arrows[w[0]].id, self.arrows[w[1]].id
                )));
            }
        }
        Ok(Path {
            source: self.arrows[first].source,
            target: self.arrows[*arrows.last().unwrap()].target,
            arrows: arrows.to_vec(),
        })
    }

    /// Builds a path from arrow ids in traversal order.
    pub fn path_by_ids(&self, ids: &[&str]) -> Result<Path> {
        let idx = ids.iter().map(|a| self.arrow_index(a)).collect::<Result<Vec<_>>>()?;
        self.path(&idx)
    }

    /// Product notation, rightmost arrow traversed first.
    pub fn fmt_path(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            return format!("e_{}", self.vertices[p.source].id);
        }
        p.arrows.iter().rev().map(|&a| self.arrows[a].id.as_str()).collect::<Vec<_>>().join("*")
    }

    /// Traversal-order arrow ids.
    pub fn traversal_ids(&self, p: &Path) -> Vec<String> {
        p.arrows.iter().map(|&a| self.arrows[a].id.clone()).collect()
    }

    /// Full subquiver on the vertices satisfying `keep`, with the induced vertex map.
    pub fn full_subquiver(&self, keep: impl Fn(usize) -> bool) -> (Quiver, Vec<Option<usize>>) {
        let mut q = Quiver::new();
        let mut map = vec![None; self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            if keep(i) {
                map[i] = Some(q.add_vertex(&v.id, v.frozen).expect("ids unique"));
            }
        }
        for a in &self.arrows {
            if let (Some(s), Some(t)) = (map[a.source], map[a.target]) {
                q.add_arrow_idx(&a.id, s, t).expect("ids unique");
            }
        }
        (q, map)
    }
}

/// A path: lazy when `arrows` is empty, otherwise arrows in traversal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_lazy(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_cycle(&self) -> bool {
        !self.arrows.is_empty() && self.source == self.target
    }

    /// Traversal concatenation: `self` first, then `next`. `None` when the ends do not meet.
    pub fn then(&self, next: &Path) -> Option<Path> {
        if self.target != next.source {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&next.arrows);
        Some(Path { source: self.source, target: next.target, arrows })
    }

    pub fn reversed(&self) -> Path {
        Path {
            source: self.target,
            target: self.source,
            arrows: self.arrows.iter().rev().copied().collect(),
        }
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| self.arrows.cmp(&other.arrows))
            .then_with(|| self.source.cmp(&other.source))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product `p·q` (q traversed first); `None` is the zero path.
pub fn compose(p: &Path, q: &Path) -> Option<Path> {
    q.then(p)
}

/// Smallest rotation of a cycle (as an arrow sequence).
pub fn cyclic_normal_form(cycle: &[usize]) -> Vec<usize> {
    let k = cycle.len();
    (0..k)
        .map(|r| cycle[r..].iter().chain(&cycle[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// A finite linear combination of cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential<S> {
    terms: Vec<(S, Path)>,
}

impl<S: Scalar> Potential<S> {
    pub fn zero() -> Self {
        Potential { terms: Vec::new() }
    }

    /// Builds a potential, merging terms with equal arrow sequences and dropping zeros.
    pub fn new(terms: Vec<(S, Path)>) -> Result<Self> {
        let mut out: Vec<(S, Path)> = Vec::new();
        for (c, p) in terms {
            if !p.is_cycle() {
                return Err(Error::Structural("potential term is not a closed path".into()));
            }
            match out.iter_mut().find(|(_, q)| q.arrows == p.arrows) {
                Some((d, _)) => *d += &c,
                None => out.push((c, p)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        Ok(Potential { terms: out })
    }

    pub fn terms(&self) -> &[(S, Path)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical form: every cycle rotated to its smallest rotation, merged and sorted.
    pub fn cyclic_key(&self) -> Vec<(Vec<usize>, S)> {
        let mut m: BTreeMap<Vec<usize>, S> = BTreeMap::new();
        for (c, p) in &self.terms {
            *m.entry(cyclic_normal_form(&p.arrows)).or_insert_with(S::zero) += c;
        }
        m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Potential in canonical rotation.
    pub fn normalized(&self, q: &Quiver) -> Potential<S> {
        let terms = self
            .cyclic_key()
            .into_iter()
            .map(|(arrows, c)| (c, q.path(&arrows).expect("rotation of a cycle")))
            .collect();
        Potential { terms }
    }

    /// Comparison up to cyclic rotation of cycles.
    pub fn cyclically_equal(&self, other: &Potential<S>) -> bool {
        self.cyclic_key() == other.cyclic_key()
    }

    pub fn scale(&self, c: &S) -> Potential<S> {
        Potential::new(self.terms.iter().map(|(x, p)| (x.clone() * c.clone(), p.clone())).collect())
            .expect("cycles stay closed")
    }

    pub fn add(&self, other: &Potential<S>) -> Potential<S> {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Potential::new(t).expect("cycles stay closed")
    }

    pub fn max_cycle_len(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.len()).max().unwrap_or(0)
    }
}

/// Element of the (possibly truncated) path algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    pub terms: BTreeMap<Path, S>,
    pub order: Option<usize>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(order: Option<usize>) -> Self {
        AlgebraElement { terms: BTreeMap::new(), order }
    }

    pub fn from_path(p: Path, order: Option<usize>) -> Self {
        let mut e = Self::zero(order);
        e.add_term(p, S::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Path, c: S) {
        if self.order.is_some_and(|l| p.len() > l) || c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (p, c) in &other.terms {
            e.add_term(p.clone(), c.clone());
        }
        e
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut e = Self::zero(self.order);
        for (p, x) in &self.terms {
            e.add_term(p.clone(), x.clone() * c.clone());
        }
        e
    }

    /// Product `self·other`; `other` is traversed first.
    pub fn mul(&self, other: &Self) -> Self {
        let order = match (self.order, other.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut e = Self::zero(order);
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                if let Some(r) = compose(p, q) {
                    e.add_term(r, x.clone() * y.clone());
                }
            }
        }
        e
    }

    pub fn truncate(&self, l: usize) -> Self {
        let mut e = Self::zero(Some(l));
        for (p, c) in &self.terms {
            e.add_term(p.clone(), c.clone());
        }
        e
    }

    pub fn fmt(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(p, c)| format!("{}·{}", c, q.fmt_path(p)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Cyclic derivative `∂_a w`.
pub fn cyclic_derivative<S: Scalar>(q: &Quiver, a: usize, w: &Potential<S>) -> AlgebraElement<S> {
    let mut out = AlgebraElement::zero(None);
    for (c, cycle) in w.terms() {
        let k = cycle.len();
        for i in 0..k {
            if cycle.arrows[i] != a {
                continue;
            }
            let rest: Vec<usize> =
                cycle.arrows[i + 1..].iter().chain(&cycle.arrows[..i]).copied().collect();
            let p = if rest.is_empty() {
                q.lazy(q.arrow(a).source)
            } else {
                q.path(&rest).expect("rotation of a cycle is a path")
            };
            out.add_term(p, c.clone());
        }
    }
    out
}

/// Opposite quiver and potential: arrows and cycles reversed, ids kept.
pub fn opposite<S: Scalar>(q: &Quiver, w: &Potential<S>) -> (Quiver, Potential<S>) {
    let mut op = Quiver::new();
    for v in q.vertices() {
        op.add_vertex(&v.id, v.frozen).expect("ids unique");
    }
    for a in q.arrows() {
        op.add_arrow_idx(&a.id, a.target, a.source).expect("ids unique");
    }
    let terms = w.terms().iter().map(|(c, p)| (c.clone(), p.reversed())).collect();
    (op, Potential::new(terms).expect("reversed cycles are closed"))
}

/// All paths of length at most `max_len` with the given endpoints, sorted by path order.
pub fn enumerate_paths(
    q: &Quiver,
    from: Option<usize>,
    to: Option<usize>,
    max_len: usize,
) -> Vec<Path> {
    let mut layer: Vec<Path> = (0..q.num_vertices())
        .filter(|v| from.is_none_or(|f| f == *v))
        .map(|v| q.lazy(v))
        .collect();
    let mut all = layer.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &layer {
            for a in q.arrows_from(p.target) {
                let mut arrows = p.arrows.clone();
                arrows.push(a);
                next.push(Path { source: p.source, target: q.arrow(a).target, arrows });
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    let mut out: Vec<Path> = all.into_iter().filter(|p| to.is_none_or(|t| t == p.target)).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn lie_grass_base() -> Quiver {
        Quiver::from_parts(
            &["A", "B", "C", "D"],
            &[
                ("a1", "A", "B"),
                ("a2", "A", "B"),
                ("b1", "B", "C"),
                ("b2", "B", "C"),
                ("c", "C", "A"),
                ("c1", "C", "D"),
                ("c2", "C", "D"),
                ("d", "D", "B"),
            ],
        )
        .unwrap()
    }

    fn lie_grass_potential(q: &Quiver) -> Potential<Q> {
        let one = Q::from_i64(1);
        let t = |ids: &[&str]| (one.clone(), q.path_by_ids(ids).unwrap());
        Potential::new(vec![
            t(&["a1", "b1", "c"]),
            t(&["a2", "b2", "c"]),
            t(&["b1", "c1", "d"]),
            t(&["b2", "c2", "d"]),
        ])
        .unwrap()
    }

    #[test]
    fn compose_identity_and_zero() {
        let q = Quiver::from_parts(&["1", "2"], &[("a", "2", "1"), ("b", "2", "1")]).unwrap();
        let a = q.arrow_path(0);
        let b = q.arrow_path(1);
        assert_eq!(compose(&a, &q.lazy(1)), Some(a.clone()));
        assert_eq!(compose(&b, &a), None);
    }

    #[test]
    fn derivative_of_lie_grass_potential() {
        let q = lie_grass_base();
        let w = lie_grass_potential(&q);
        let c = q.arrow_index("c").unwrap();
        let d = cyclic_derivative(&q, c, &w);
        let mut expect = AlgebraElement::zero(None);
        expect.add_term(q.path_by_ids(&["a1", "b1"]).unwrap(), Q::from_i64(1));
        expect.add_term(q.path_by_ids(&["a2", "b2"]).unwrap(), Q::from_i64(1));
        assert_eq!(d, expect);
        assert_eq!(q.fmt_path(&q.path_by_ids(&["a1", "b1"]).unwrap()), "b1*a1");
        assert!(cyclic_derivative(&q, c, &Potential::<Q>::zero()).is_zero());
    }

    #[test]
    fn derivative_term_count_equals_cycle_length() {
        let q = lie_grass_base();
        let w = Potential::new(vec![(Q::from_i64(2), q.path_by_ids(&["a1", "b1", "c"]).unwrap())])
            .unwrap();
        let total: usize = (0..q.num_arrows()).map(|a| cyclic_derivative(&q, a, &w).terms.len()).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn loop_derivative_is_lazy() {
        let q = Quiver::from_parts(&["v"], &[("l", "v", "v")]).unwrap();
        let w = Potential::new(vec![(Q::from_i64(1), q.path(&[0]).unwrap())]).unwrap();
        let d = cyclic_derivative(&q, 0, &w);
        assert_eq!(d.terms.keys().next().unwrap(), &q.lazy(0));
    }

    #[test]
    fn opposite_is_an_involution() {
        let q = lie_grass_base();
        let w = lie_grass_potential(&q);
        let (op, wop) = opposite(&q, &w);
        assert_eq!(op.arrow(0).source, q.arrow(0).target);
        let (q2, w2) = opposite(&op, &wop);
        assert_eq!(q2, q);
        assert_eq!(w2, w);
    }

    #[test]
    fn enumerate_matches_dfs_count() {
        fn dfs(q: &Quiver, v: usize, left: usize) -> usize {
            1 + if left == 0 {
                0
            } else {
                q.arrows_from(v).map(|a| dfs(q, q.arrow(a).target, left - 1)).sum()
            }
        }
        let q = lie_grass_base();
        for k in 0..q.num_vertices() {
            assert_eq!(enumerate_paths(&q, Some(k), None, 3).len(), dfs(&q, k, 3));
        }
        assert!(enumerate_paths(&q, None, None, 0).iter().all(|p| p.is_lazy()));
    }

    #[test]
    fn normalized_potential_ignores_rotation() {
        let q = lie_grass_base();
        let one = Q::from_i64(1);
        let w1 = Potential::new(vec![(one.clone(), q.path_by_ids(&["a1", "b1", "c"]).unwrap())])
            .unwrap();
        let w2 = Potential::new(vec![(one, q.path_by_ids(&["b1", "c", "a1"]).unwrap())]).unwrap();
        assert_ne!(w1, w2);
        assert!(w1.cyclically_equal(&w2));
    }
}
