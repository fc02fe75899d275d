//! Nice gradings of projective supports, non-wrapping assignments and the extended cyclic
//! cover built from them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::covering::{compose_coverings, DeckElement, QuiverCovering};
use crate::error::{Error, Result};
use crate::jacobian::SupportData;
use crate::quiver::{Potential, Quiver};
use crate::scalar::Scalar;

/// Vertex degrees on a support together with the induced degree of each base arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceGrading {
    pub vertices: BTreeMap<usize, i64>,
    pub arrows: BTreeMap<usize, i64>,
}

/// Verifies both nice-grading conditions; returns the violations.
pub fn check_nice_grading(
    c: &QuiverCovering,
    sup: &SupportData,
    grading: &BTreeMap<usize, i64>,
) -> Result<Vec<String>> {
    let q = &c.total;
    if let Some(v) = sup.vertices.iter().find(|v| !grading.contains_key(v)) {
        return Err(Error::Precondition(format!(
            "grading is undefined at `{}`",
            q.vertex(*v).id
        )));
    }
    let mut errs = Vec::new();
    let mut seen: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for &v in &sup.vertices {
        if let Some(&w) = seen.get(&(c.vmap[v], grading[&v])) {
            errs.push(format!(
                "`{}` and `{}` share a fiber and the degree {}",
                q.vertex(w).id,
                q.vertex(v).id,
                grading[&v]
            ));
        } else {
            seen.insert((c.vmap[v], grading[&v]), v);
        }
    }
    let mut deg: BTreeMap<usize, (usize, i64)> = BTreeMap::new();
    for &a in &sup.arrows {
        let ar = q.arrow(a);
        let (Some(s), Some(t)) = (grading.get(&ar.source), grading.get(&ar.target)) else {
            errs.push(format!("arrow `{}` leaves the graded support", ar.id));
            continue;
        };
        let x = t - s;
        match deg.get(&c.amap[a]) {
            Some(&(b, y)) if y != x => errs.push(format!(
                "lifts `{}` and `{}` have degrees {y} and {x}",
                q.arrow(b).id,
                ar.id
            )),
            Some(_) => {}
            None => {
                deg.insert(c.amap[a], (a, x));
            }
        }
    }
    Ok(errs)
}

/// The whole quiver as a support.
pub fn full_support(q: &Quiver) -> SupportData {
    SupportData {
        vertices: (0..q.num_vertices()).collect(),
        arrows: (0..q.num_arrows()).collect(),
    }
}

/// Candidate values `0, 1, −1, 2, −2, …` inside `[−w, w]`, filtered by a congruence.
fn candidates(w: i64, modulus: Option<(i64, i64)>) -> Vec<i64> {
    let mut out = vec![0];
    for k in 1..=w {
        out.push(k);
        out.push(-k);
    }
    match modulus {
        Some((m, r)) => out.into_iter().filter(|v| v.rem_euclid(m) == r).collect(),
        None => out,
    }
}

struct NiceSearch<'a> {
    c: &'a QuiverCovering,
    sup: &'a SupportData,
    root: usize,
    vars: Vec<usize>,
    domains: Vec<Vec<i64>>,
}

impl NiceSearch<'_> {
    /// Propagates vertex degrees from the root along arrows with assigned base degree.
    fn propagate(&self, assigned: &BTreeMap<usize, i64>) -> Option<BTreeMap<usize, i64>> {
        let q = &self.c.total;
        let mut val: BTreeMap<usize, i64> = BTreeMap::from([(self.root, 0)]);
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.sup.arrows {
                let ar = q.arrow(a);
                let Some(&x) = assigned.get(&self.c.amap[a]) else { continue };
                let (other, ov) = if ar.source == v {
                    (ar.target, val[&v] + x)
                } else if ar.target == v {
                    (ar.source, val[&v] - x)
                } else {
                    continue;
                };
                match val.get(&other) {
                    Some(&y) if y != ov => return None,
                    Some(_) => {}
                    None => {
                        val.insert(other, ov);
                        queue.push_back(other);
                    }
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (&v, &x) in &val {
            if !seen.insert((self.c.vmap[v], x)) {
                return None;
            }
        }
        Some(val)
    }

    fn run(&self, i: usize, assigned: &mut BTreeMap<usize, i64>) -> Option<BTreeMap<usize, i64>> {
        let val = self.propagate(assigned)?;
        if i == self.vars.len() {
            return (val.len() == self.sup.vertices.len()).then_some(val);
        }
        for &x in &self.domains[i] {
            assigned.insert(self.vars[i], x);
            if let Some(v) = self.run(i + 1, assigned) {
                return Some(v);
            }
        }
        assigned.remove(&self.vars[i]);
        None
    }
}

/// Bounded search for a nice grading on `sup`, rooted at `root` with degree zero.
///
/// Base arrow degrees range over `[−bound·d, bound·d]`, congruent to the sheet shift when
/// the covering carries a sheet labeling. Returns `None` when nothing exists in the window.
pub fn find_nice_grading(
    c: &QuiverCovering,
    sup: &SupportData,
    root: usize,
    bound: usize,
) -> Result<Option<NiceGrading>> {
    if bound < 1 {
        return Err(Error::Precondition("bound must be at least 1".into()));
    }
    if !sup.vertices.contains(&root) {
        return Err(Error::Precondition("root is not in the support".into()));
    }
    let d = c.order as i64;
    let shifts = if c.sheets.is_some() { Some(c.shifts()?) } else { None };
    let vars: Vec<usize> = sup.arrows.iter().map(|&a| c.amap[a]).collect::<BTreeSet<_>>().into_iter().collect();
    let w = bound as i64 * d;
    let domains = vars
        .iter()
        .map(|&ab| candidates(w, shifts.as_ref().map(|s| (d, s[ab] as i64))))
        .collect();
    let search = NiceSearch { c, sup, root, vars, domains };
    let mut assigned = BTreeMap::new();
    Ok(search.run(0, &mut assigned).map(|vertices| {
        let arrows = search.vars.iter().map(|&ab| (ab, assigned[&ab])).collect();
        NiceGrading { vertices, arrows }
    }))
}

/// Assignment `∂(ā) ∈ {δ_ā, δ_ā − d}` on the base arrows occurring in the potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapAssignment {
    pub degrees: BTreeMap<usize, i64>,
}

/// Searches for a non-wrapping assignment for `W` on the total quiver of a cyclic cover.
pub fn check_non_wrapping<S: Scalar>(
    c: &QuiverCovering,
    w: &Potential<S>,
    allow_large: bool,
) -> Result<Option<WrapAssignment>> {
    let delta = c.shifts()?;
    let d = c.order as i64;
    let terms: BTreeSet<Vec<usize>> = w
        .terms()
        .iter()
        .map(|(_, p)| p.arrows.iter().map(|&a| c.amap[a]).collect())
        .collect();
    let vars: Vec<usize> = terms.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if vars.len() > 24 && !allow_large {
        return Err(Error::Resource(format!(
            "{} binary variables exceed the exhaustive limit of 24; pass the large-search flag",
            vars.len()
        )));
    }
    let pos: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // per term: multiplicity of each variable
    let rows: Vec<Vec<i64>> = terms
        .iter()
        .map(|t| {
            let mut r = vec![0i64; vars.len()];
            for a in t {
                r[pos[a]] += 1;
            }
            r
        })
        .collect();
    let choices: Vec<[i64; 2]> = vars.iter().map(|&v| [delta[v] as i64, delta[v] as i64 - d]).collect();
    let mut cur = vec![0i64; vars.len()];
    fn feasible(rows: &[Vec<i64>], choices: &[[i64; 2]], cur: &[i64], fixed: usize) -> bool {
        rows.iter().all(|r| {
            let (mut lo, mut hi) = (0i64, 0i64);
            for (j, &m) in r.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                if j < fixed {
                    lo += m * cur[j];
                    hi += m * cur[j];
                } else {
                    lo += m * choices[j][0].min(choices[j][1]);
                    hi += m * choices[j][0].max(choices[j][1]);
                }
            }
            lo <= 0 && 0 <= hi
        })
    }
    fn go(rows: &[Vec<i64>], choices: &[[i64; 2]], cur: &mut Vec<i64>, i: usize) -> bool {
        if !feasible(rows, choices, cur, i) {
            return false;
        }
        if i == cur.len() {
            return true;
        }
        for x in choices[i] {
            cur[i] = x;
            if go(rows, choices, cur, i + 1) {
                return true;
            }
        }
        false
    }
    Ok(go(&rows, &choices, &mut cur, 0)
        .then(|| WrapAssignment { degrees: vars.iter().copied().zip(cur).collect() }))
}

/// The `2ld:1` cyclic cover of the base determined by a non-wrapping assignment, together
/// with its factorization through the original `d:1` cover.
#[derive(Clone, Debug)]
pub struct ExtendedCover {
    pub covering: QuiverCovering,
    /// Covering of the original total quiver by the extended one.
    pub factor: QuiverCovering,
    /// Base arrow degrees used (assignment, or `δ` for arrows outside the potential).
    pub degrees: Vec<i64>,
}

pub fn build_extended_cyclic_cover(
    c: &QuiverCovering,
    wa: &WrapAssignment,
    l: usize,
) -> Result<ExtendedCover> {
    let d = c.order;
    if d < 2 {
        return Err(Error::Precondition("the extended cover needs d > 1".into()));
    }
    if l < 1 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    let delta = c.shifts()?;
    let sheets = c.sheets.as_ref().expect("shifts succeeded");
    let qb = &c.base;
    let big = 2 * l * d;
    let degrees: Vec<i64> =
        (0..qb.num_arrows()).map(|a| wa.degrees.get(&a).copied().unwrap_or(delta[a] as i64)).collect();
    let (nv, na) = (qb.num_vertices(), qb.num_arrows());
    let mut total = Quiver::new();
    for s in 0..big {
        for v in qb.vertices() {
            total.add_vertex(&format!("{}^{s}", v.id), v.frozen)?;
        }
    }
    for s in 0..big {
        for (a, ar) in qb.arrows().iter().enumerate() {
            let t = (s as i64 + degrees[a]).rem_euclid(big as i64) as usize;
            total.add_arrow_idx(&format!("{}^{s}", ar.id), s * nv + ar.source, t * nv + ar.target)?;
        }
    }
    let shift = |k: usize| DeckElement {
        vertices: (0..big * nv).map(|v| ((v / nv + k) % big) * nv + v % nv).collect(),
        arrows: (0..big * na).map(|a| ((a / na + k) % big) * na + a % na).collect(),
    };
    let covering = QuiverCovering {
        total: total.clone(),
        base: qb.clone(),
        vmap: (0..big * nv).map(|v| v % nv).collect(),
        amap: (0..big * na).map(|a| a % na).collect(),
        order: big,
        generators: vec![shift(1)],
        sheets: Some((0..big * nv).map(|v| v / nv).collect()),
    };
    covering.validate()?;
    // vertex v̄^s ↦ the vertex over v̄ on sheet s mod d
    let vmap: Vec<usize> = (0..big * nv)
        .map(|v| {
            c.vertex_fiber(v % nv).into_iter().find(|&x| sheets[x] == (v / nv) % d).expect("sheet")
        })
        .collect();
    let amap: Vec<usize> = (0..big * na)
        .map(|a| {
            let src = vmap[total.arrow(a).source];
            c.total.arrows_from(src).find(|&x| c.amap[x] == a % na).expect("unique lift")
        })
        .collect();
    let factor = QuiverCovering {
        total,
        base: c.total.clone(),
        vmap,
        amap,
        order: 2 * l,
        generators: vec![shift(d)],
        sheets: None,
    };
    factor.validate()?;
    let composed = compose_coverings(&factor, c)?;
    if composed.vmap != covering.vmap || composed.amap != covering.amap {
        return Err(Error::Rejected("extended cover does not factor through the original".into()));
    }
    Ok(ExtendedCover { covering, factor, degrees })
}

/// Cyclic `d:1` cover of `base` where the lift of `ā` from sheet `s` ends on sheet
/// `s + shifts[ā]`. Names are `x^s`.
pub fn cyclic_cover_from_shifts(base: &Quiver, d: usize, shifts: &[usize]) -> Result<QuiverCovering> {
    let (nv, na) = (base.num_vertices(), base.num_arrows());
    let mut total = Quiver::new();
    for s in 0..d {
        for v in base.vertices() {
            total.add_vertex(&format!("{}^{s}", v.id), v.frozen)?;
        }
    }
    for s in 0..d {
        for (a, ar) in base.arrows().iter().enumerate() {
            let t = (s + shifts[a]) % d;
            total.add_arrow_idx(&format!("{}^{s}", ar.id), s * nv + ar.source, t * nv + ar.target)?;
        }
    }
    let c = QuiverCovering {
        total,
        base: base.clone(),
        vmap: (0..d * nv).map(|v| v % nv).collect(),
        amap: (0..d * na).map(|a| a % na).collect(),
        order: d,
        generators: vec![DeckElement {
            vertices: (0..d * nv).map(|v| ((v / nv + 1) % d) * nv + v % nv).collect(),
            arrows: (0..d * na).map(|a| ((a / na + 1) % d) * na + a % na).collect(),
        }],
        sheets: Some((0..d * nv).map(|v| v / nv).collect()),
    };
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::TruncatedJacobian;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn loopwrap_has_no_assignment() {
        let (c, wbar) = crate::fixtures::loopwrap::<Q>();
        assert_eq!(check_non_wrapping(&c, &c.sigma_potential(&wbar), false).unwrap(), None);
    }

    #[test]
    fn zero_shifts_give_zero_assignment() {
        let mut base = Quiver::new();
        base.add_vertex("v", false).unwrap();
        base.add_arrow("l", "v", "v").unwrap();
        let c = cyclic_cover_from_shifts(&base, 2, &[0]).unwrap();
        let wbar = Potential::new(vec![(Q::from_i64(1), base.path(&[0, 0, 0]).unwrap())]).unwrap();
        let wa = check_non_wrapping(&c, &c.sigma_potential(&wbar), false).unwrap().unwrap();
        assert_eq!(wa.degrees, BTreeMap::from([(0, 0)]));
    }

    #[test]
    fn candidates_order() {
        assert_eq!(candidates(2, None), vec![0, 1, -1, 2, -2]);
        assert_eq!(candidates(2, Some((2, 1))), vec![1, -1]);
    }

    #[test]
    fn kronecker_example_grading() {
        let c = crate::fixtures::kronecker_cover2();
        let alg = TruncatedJacobian::build(&c.total, &Potential::<Q>::zero(), 2).unwrap();
        let sup = alg.projective(1).supports(4);
        let g = find_nice_grading(&c, &sup, 1, 1).unwrap().unwrap();
        assert_eq!(g.vertices, BTreeMap::from([(0, 0), (1, 0), (2, 1)]));
        assert!(check_nice_grading(&c, &sup, &g.vertices).unwrap().is_empty());
        assert_eq!(find_nice_grading(&c, &full_support(&c.total), 1, 1).unwrap(), None);
    }
}
