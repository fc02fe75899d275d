//! Coverings of quivers: deck actions, path lifting, the maps `σ` and `π`, pullbacks of
//! modules and composition of coverings.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::jacobian::{QuiverModule, TruncatedJacobian};
use crate::linalg::{nullspace, rank, Matrix};
use crate::quiver::{cyclic_derivative, AlgebraElement, Path, Potential, Quiver};
use crate::scalar::Scalar;

/// A deck transformation: permutations of vertices and arrows of the total quiver.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeckElement {
    pub vertices: Vec<usize>,
    pub arrows: Vec<usize>,
}

impl DeckElement {
    pub fn identity(nv: usize, na: usize) -> Self {
        DeckElement { vertices: (0..nv).collect(), arrows: (0..na).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DeckElement) -> DeckElement {
        DeckElement {
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
            arrows: other.arrows.iter().map(|&a| self.arrows[a]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertices.iter().enumerate().all(|(i, &v)| i == v)
            && self.arrows.iter().enumerate().all(|(i, &a)| i == a)
    }

    pub fn act_path(&self, p: &Path) -> Path {
        Path {
            source: self.vertices[p.source],
            target: self.vertices[p.target],
            arrows: p.arrows.iter().map(|&a| self.arrows[a]).collect(),
        }
    }
}

/// Where a lift is anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    Start(usize),
    End(usize),
}

/// A covering map `π : Q → Q̄` with a deck group given by generators.
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverCovering {
    pub total: Quiver,
    pub base: Quiver,
    pub vmap: Vec<usize>,
    pub amap: Vec<usize>,
    pub order: usize,
    pub generators: Vec<DeckElement>,
    /// Optional cyclic sheet labels on total vertices.
    pub sheets: Option<Vec<usize>>,
}

impl QuiverCovering {
    pub fn identity(q: &Quiver) -> Self {
        QuiverCovering {
            total: q.clone(),
            base: q.clone(),
            vmap: (0..q.num_vertices()).collect(),
            amap: (0..q.num_arrows()).collect(),
            order: 1,
            generators: vec![],
            sheets: None,
        }
    }

    /// The same maps between the opposite quivers.
    pub fn opposite(&self) -> Self {
        let op = |q: &Quiver| {
            let mut o = Quiver::new();
            for v in q.vertices() {
                o.add_vertex(&v.id, v.frozen).expect("ids unique");
            }
            for a in q.arrows() {
                o.add_arrow_idx(&a.id, a.target, a.source).expect("ids unique");
            }
            o
        };
        QuiverCovering { total: op(&self.total), base: op(&self.base), ..self.clone() }
    }

    pub fn vertex_fiber(&self, vb: usize) -> Vec<usize> {
        (0..self.vmap.len()).filter(|&v| self.vmap[v] == vb).collect()
    }

    pub fn arrow_fiber(&self, ab: usize) -> Vec<usize> {
        (0..self.amap.len()).filter(|&a| self.amap[a] == ab).collect()
    }

    /// All deck group elements, by closure of the generators (at most `limit`).
    pub fn group_elements(&self, limit: usize) -> Result<Vec<DeckElement>> {
        let id = DeckElement::identity(self.total.num_vertices(), self.total.num_arrows());
        let mut seen: HashSet<DeckElement> = HashSet::new();
        let mut out = vec![id.clone()];
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for h in &self.generators {
                let gh = h.compose(&g);
                if seen.insert(gh.clone()) {
                    if out.len() >= limit {
                        return Err(Error::Resource(format!("deck group exceeds {limit} elements")));
                    }
                    out.push(gh.clone());
                    queue.push_back(gh);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Checks every covering axiom; returns the list of violations (empty when valid).
    pub fn violations(&self) -> Vec<String> {
        let (q, qb) = (&self.total, &self.base);
        let mut errs = Vec::new();
        if self.vmap.len() != q.num_vertices() || self.amap.len() != q.num_arrows() {
            errs.push("vertex or arrow map has the wrong length".to_string());
            return errs;
        }
        if self.vmap.iter().any(|&v| v >= qb.num_vertices())
            || self.amap.iter().any(|&a| a >= qb.num_arrows())
        {
            errs.push("map points outside the base quiver".to_string());
            return errs;
        }
        for (a, ar) in q.arrows().iter().enumerate() {
            let ab = qb.arrow(self.amap[a]);
            if self.vmap[ar.source] != ab.source || self.vmap[ar.target] != ab.target {
                errs.push(format!("arrow `{}` is not mapped compatibly with its endpoints", ar.id));
            }
        }
        for (gi, g) in self.generators.iter().enumerate() {
            if !is_permutation(&g.vertices, q.num_vertices())
                || !is_permutation(&g.arrows, q.num_arrows())
            {
                errs.push(format!("generator {gi} is not a permutation"));
                return errs;
            }
            for (a, ar) in q.arrows().iter().enumerate() {
                let ga = q.arrow(g.arrows[a]);
                if ga.source != g.vertices[ar.source] || ga.target != g.vertices[ar.target] {
                    errs.push(format!("generator {gi} is not a quiver map at arrow `{}`", ar.id));
                }
                if self.amap[g.arrows[a]] != self.amap[a] {
                    errs.push(format!("generator {gi} does not commute with π at `{}`", ar.id));
                }
            }
            for v in 0..q.num_vertices() {
                if self.vmap[g.vertices[v]] != self.vmap[v] {
                    errs.push(format!(
                        "generator {gi} does not commute with π at `{}`",
                        q.vertex(v).id
                    ));
                }
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        match self.group_elements(100_000) {
            Err(e) => errs.push(e.to_string()),
            Ok(group) => {
                if group.len() != self.order {
                    errs.push(format!(
                        "declared deck order {} but the generators give {}",
                        self.order,
                        group.len()
                    ));
                }
                for g in group.iter().filter(|g| !g.is_identity()) {
                    if let Some(v) = (0..q.num_vertices()).find(|&v| g.vertices[v] == v) {
                        errs.push(format!("deck action fixes vertex `{}`", q.vertex(v).id));
                        break;
                    }
                    if let Some(a) = (0..q.num_arrows()).find(|&a| g.arrows[a] == a) {
                        errs.push(format!("deck action fixes arrow `{}`", q.arrow(a).id));
                        break;
                    }
                }
                for vb in 0..qb.num_vertices() {
                    let f = self.vertex_fiber(vb);
                    if f.len() != group.len() {
                        errs.push(format!(
                            "fiber over `{}` has size {} instead of the group order {}",
                            qb.vertex(vb).id,
                            f.len(),
                            group.len()
                        ));
                    }
                }
                for ab in 0..qb.num_arrows() {
                    let f = self.arrow_fiber(ab);
                    if f.len() != group.len() {
                        errs.push(format!(
                            "fiber over arrow `{}` has size {} instead of {}",
                            qb.arrow(ab).id,
                            f.len(),
                            group.len()
                        ));
                    }
                }
            }
        }
        for v in 0..q.num_vertices() {
            for ab in 0..qb.num_arrows() {
                let abar = qb.arrow(ab);
                if abar.source == self.vmap[v] {
                    let n = q.arrows_from(v).filter(|&a| self.amap[a] == ab).count();
                    if n != 1 {
                        errs.push(format!(
                            "{n} lifts of `{}` start at `{}`",
                            abar.id,
                            q.vertex(v).id
                        ));
                    }
                }
                if abar.target == self.vmap[v] {
                    let n = q.arrows_into(v).filter(|&a| self.amap[a] == ab).count();
                    if n != 1 {
                        errs.push(format!("{n} lifts of `{}` end at `{}`", abar.id, q.vertex(v).id));
                    }
                }
            }
        }
        if let Some(sh) = &self.sheets {
            errs.extend(self.sheet_violations(sh));
        }
        errs
    }

    fn sheet_violations(&self, sh: &[usize]) -> Vec<String> {
        let q = &self.total;
        let d = self.order;
        let mut errs = Vec::new();
        if sh.len() != q.num_vertices() || sh.iter().any(|&s| s >= d) {
            return vec!["sheet labels missing or out of range".into()];
        }
        if let Some(g) = self.generators.first() {
            for v in 0..q.num_vertices() {
                if sh[g.vertices[v]] != (sh[v] + 1) % d {
                    errs.push(format!("generator does not shift the sheet of `{}`", q.vertex(v).id));
                }
            }
        }
        for vb in 0..self.base.num_vertices() {
            let mut labels: Vec<usize> = self.vertex_fiber(vb).iter().map(|&v| sh[v]).collect();
            labels.sort();
            if labels != (0..d).collect::<Vec<_>>() {
                errs.push(format!("fiber over `{}` does not meet every sheet once", self.base.vertex(vb).id));
            }
        }
        if self.shifts().is_err() {
            errs.push("lifts of some arrow have inconsistent sheet shifts".into());
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Rejected(v.join("; ")))
        }
    }

    /// Sheet shift `δ_ā` of every base arrow.
    pub fn shifts(&self) -> Result<Vec<usize>> {
        let sh = self
            .sheets
            .as_ref()
            .ok_or_else(|| Error::Precondition("covering has no sheet labeling".into()))?;
        let d = self.order;
        let mut out = vec![None; self.base.num_arrows()];
        for (a, ar) in self.total.arrows().iter().enumerate() {
            let delta = (sh[ar.target] + d - sh[ar.source]) % d;
            let e = &mut out[self.amap[a]];
            match e {
                None => *e = Some(delta),
                Some(x) if *x != delta => {
                    return Err(Error::Rejected(format!(
                        "lifts of `{}` have different sheet shifts",
                        self.base.arrow(self.amap[a]).id
                    )))
                }
                _ => {}
            }
        }
        Ok(out.into_iter().map(|x| x.unwrap_or(0)).collect())
    }

    /// Sheet labeling by propagation along a spanning tree of the base, starting from the
    /// fiber of the first base vertex; the first generator must act cyclically.
    pub fn compute_sheets(&self) -> Result<Vec<usize>> {
        let g = self
            .generators
            .first()
            .ok_or_else(|| Error::Precondition("a cyclic generator is required".into()))?;
        let (q, qb) = (&self.total, &self.base);
        let comps = components(qb);
        if comps.len() > 1 {
            return Err(Error::Rejected(format!(
                "base quiver is disconnected: components {comps:?}"
            )));
        }
        let mut label = vec![usize::MAX; q.num_vertices()];
        let mut rep = vec![usize::MAX; qb.num_vertices()];
        let set_fiber = |label: &mut Vec<usize>, start: usize| {
            let mut v = start;
            for s in 0..self.order {
                label[v] = s;
                v = g.vertices[v];
            }
        };
        if qb.num_vertices() == 0 {
            return Ok(label);
        }
        rep[0] = self.vertex_fiber(0)[0];
        set_fiber(&mut label, rep[0]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(vb) = queue.pop_front() {
            for (ab, abar) in qb.arrows().iter().enumerate() {
                let (next, lift) = if abar.source == vb && rep[abar.target] == usize::MAX {
                    (abar.target, self.lift_arrow(ab, Anchor::Start(rep[vb]))?)
                } else if abar.target == vb && rep[abar.source] == usize::MAX {
                    (abar.source, self.lift_arrow(ab, Anchor::End(rep[vb]))?)
                } else {
                    continue;
                };
                let ar = q.arrow(lift);
                rep[next] = if abar.source == vb { ar.target } else { ar.source };
                set_fiber(&mut label, rep[next]);
                queue.push_back(next);
            }
        }
        Ok(label)
    }

    fn lift_arrow(&self, ab: usize, anchor: Anchor) -> Result<usize> {
        let q = &self.total;
        let found = match anchor {
            Anchor::Start(v) => q.arrows_from(v).find(|&a| self.amap[a] == ab),
            Anchor::End(v) => q.arrows_into(v).find(|&a| self.amap[a] == ab),
        };
        found.ok_or_else(|| Error::Precondition("anchor is not in the fiber of the path".into()))
    }

    /// The unique lift of a base path with the given anchor.
    pub fn lift_path(&self, p: &Path, anchor: Anchor) -> Result<Path> {
        let (v, vb) = match anchor {
            Anchor::Start(v) => (v, p.source),
            Anchor::End(v) => (v, p.target),
        };
        if self.vmap.get(v) != Some(&vb) {
            return Err(Error::Precondition("anchor is not in the fiber of the path".into()));
        }
        if p.is_lazy() {
            return Ok(self.total.lazy(v));
        }
        let mut arrows = Vec::with_capacity(p.len());
        match anchor {
            Anchor::Start(mut cur) => {
                for &ab in &p.arrows {
                    let a = self.lift_arrow(ab, Anchor::Start(cur))?;
                    cur = self.total.arrow(a).target;
                    arrows.push(a);
                }
            }
            Anchor::End(mut cur) => {
                for &ab in p.arrows.iter().rev() {
                    let a = self.lift_arrow(ab, Anchor::End(cur))?;
                    cur = self.total.arrow(a).source;
                    arrows.push(a);
                }
                arrows.reverse();
            }
        }
        self.total.path(&arrows)
    }

    /// All lifts of a base path, one per vertex over its start.
    pub fn lifts(&self, p: &Path) -> Vec<Path> {
        self.vertex_fiber(p.source)
            .into_iter()
            .map(|v| self.lift_path(p, Anchor::Start(v)).expect("valid covering"))
            .collect()
    }

    pub fn project_path(&self, p: &Path) -> Path {
        Path {
            source: self.vmap[p.source],
            target: self.vmap[p.target],
            arrows: p.arrows.iter().map(|&a| self.amap[a]).collect(),
        }
    }

    /// `σ`: each base path goes to the sum of its lifts.
    pub fn sigma<S: Scalar>(&self, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = AlgebraElement::zero(x.order);
        for (p, c) in &x.terms {
            for lift in self.lifts(p) {
                out.add_term(lift, c.clone());
            }
        }
        out
    }

    /// `σ(W̄)`.
    pub fn sigma_potential<S: Scalar>(&self, w: &Potential<S>) -> Potential<S> {
        let terms = w
            .terms()
            .iter()
            .flat_map(|(c, p)| self.lifts(p).into_iter().map(move |l| (c.clone(), l)))
            .collect();
        Potential::new(terms).expect("lifts of cycles are closed by unique lifting")
    }

    pub fn project_element<S: Scalar>(&self, x: &AlgebraElement<S>) -> AlgebraElement<S> {
        let mut out = AlgebraElement::zero(x.order);
        for (p, c) in &x.terms {
            out.add_term(self.project_path(p), c.clone());
        }
        out
    }

    /// `π(W)` as a potential on the base.
    pub fn project_potential<S: Scalar>(&self, w: &Potential<S>) -> Potential<S> {
        Potential::new(w.terms().iter().map(|(c, p)| (c.clone(), self.project_path(p))).collect())
            .expect("images of cycles are cycles")
    }

    /// Whether every lift of every cycle of `w` is closed.
    pub fn lifts_closed<S: Scalar>(&self, w: &Potential<S>) -> bool {
        w.terms().iter().all(|(_, p)| self.lifts(p).iter().all(|l| l.source == l.target))
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Connected components of the underlying undirected graph.
pub fn components(q: &Quiver) -> Vec<Vec<usize>> {
    let n = q.num_vertices();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = out.len();
        let mut members = vec![];
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            members.push(v);
            for a in q.arrows() {
                for (x, y) in [(a.source, a.target), (a.target, a.source)] {
                    if x == v && comp[y] == usize::MAX {
                        comp[y] = c;
                        stack.push(y);
                    }
                }
            }
        }
        members.sort();
        out.push(members);
    }
    out
}

/// Pullback `σ̄*V`: same basis relabelled by `π`, arrow actions summed over fibers.
pub fn pullback_module<S: Scalar>(c: &QuiverCovering, m: &QuiverModule<S>) -> QuiverModule<S> {
    let n = m.dim();
    let mut actions: Vec<Matrix<S>> = vec![vec![vec![S::zero(); n]; n]; c.base.num_arrows()];
    for (a, mat) in m.actions.iter().enumerate() {
        let ab = c.amap[a];
        for i in 0..n {
            for j in 0..n {
                if !mat[i][j].is_zero() {
                    actions[ab][i][j] += &mat[i][j];
                }
            }
        }
    }
    QuiverModule {
        vertex_of: m.vertex_of.iter().map(|&v| c.vmap[v]).collect(),
        labels: m.labels.clone(),
        actions,
    }
}

/// Checks `σ(∂_ā W̄) = ∂_{σ(ā)} W` for every base arrow; returns the first failing arrow.
pub fn check_partial_exchange<S: Scalar>(
    c: &QuiverCovering,
    wbar: &Potential<S>,
    w: &Potential<S>,
) -> Result<()> {
    for ab in 0..c.base.num_arrows() {
        let lhs = c.sigma(&cyclic_derivative(&c.base, ab, wbar));
        let mut rhs = AlgebraElement::zero(None);
        for a in c.arrow_fiber(ab) {
            rhs = rhs.add(&cyclic_derivative(&c.total, a, w));
        }
        if lhs != rhs {
            return Err(Error::Rejected(format!(
                "σ(∂W̄) and ∂σ(W̄) differ at arrow `{}`",
                c.base.arrow(ab).id
            )));
        }
    }
    Ok(())
}

/// Result of [`check_sigma_injectivity`].
#[derive(Clone, Debug)]
pub struct InjectivityReport<S> {
    pub injective: bool,
    pub base_dim: usize,
    pub rank: usize,
    /// A nonzero kernel element of `Ā^l → A^l`, when one exists.
    pub witness: Option<AlgebraElement<S>>,
}

/// Exact kernel computation for the map `σ̄ : Ā^l → A^l` with `W = σ(W̄)`.
pub fn check_sigma_injectivity<S: Scalar>(
    c: &QuiverCovering,
    wbar: &Potential<S>,
    l: usize,
) -> Result<InjectivityReport<S>> {
    let w = c.sigma_potential(wbar);
    let abar = TruncatedJacobian::build(&c.base, wbar, l)?;
    let a = TruncatedJacobian::build(&c.total, &w, l)?;
    let basis: Vec<Path> = abar.basis_paths().into_iter().cloned().collect();
    // columns: coordinates of σ(p̄) for basis paths p̄
    let cols: Vec<Vec<S>> = basis
        .iter()
        .map(|p| a.coordinates(&c.sigma(&AlgebraElement::from_path(p.clone(), Some(l)))))
        .collect();
    let m: Matrix<S> = (0..a.dim()).map(|i| cols.iter().map(|col| col[i].clone()).collect()).collect();
    let r = if a.dim() == 0 { 0 } else { rank(&m) };
    let witness = if r < basis.len() {
        let ns = nullspace(&m, basis.len());
        ns.first().map(|v| {
            let mut e = AlgebraElement::zero(Some(l));
            for (p, x) in basis.iter().zip(v) {
                e.add_term(p.clone(), x.clone());
            }
            e
        })
    } else {
        None
    };
    Ok(InjectivityReport { injective: r == basis.len(), base_dim: basis.len(), rank: r, witness })
}

/// Builds the isomorphism candidate `u_p ↦ π(p)` from `σ̄*P_k` to `P̄_k̄` and checks that it
/// is invertible and intertwines the arrow actions.
pub fn pullback_matches_projective<S: Scalar>(
    c: &QuiverCovering,
    a: &TruncatedJacobian<S>,
    abar: &TruncatedJacobian<S>,
    k: usize,
) -> bool {
    let p = a.projective(k);
    let pb = pullback_module(c, &p.module);
    let pbar = abar.projective(c.vmap[k]);
    if pb.dim() != pbar.dim() {
        return false;
    }
    let n = pb.dim();
    let pos: BTreeMap<&Path, usize> = pbar.paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
    // column j: coordinates of π(p_j) in the basis of P̄
    let mut t: Matrix<S> = vec![vec![S::zero(); n]; n];
    for (j, path) in p.paths.iter().enumerate() {
        let img = abar.normal_form(&AlgebraElement::from_path(c.project_path(path), Some(abar.order())));
        for (q, x) in &img.terms {
            match pos.get(q) {
                Some(&i) => t[i][j] = x.clone(),
                None => return false,
            }
        }
    }
    if rank(&t) != n {
        return false;
    }
    (0..c.base.num_arrows()).all(|ab| {
        let lhs = crate::linalg::mat_mul(&pbar.module.actions[ab], &t);
        let rhs = crate::linalg::mat_mul(&t, &pb.actions[ab]);
        lhs == rhs
    })
}

/// Composite covering `Q̃ → Q → Q̄`. Generators of the second stage are lifted to `Q̃`.
pub fn compose_coverings(c1: &QuiverCovering, c2: &QuiverCovering) -> Result<QuiverCovering> {
    if c1.base != c2.total {
        return Err(Error::Structural("the first covering's base is not the second's total".into()));
    }
    let mut generators = c1.generators.clone();
    for g in &c2.generators {
        generators.push(lift_automorphism(c1, g)?);
    }
    Ok(QuiverCovering {
        total: c1.total.clone(),
        base: c2.base.clone(),
        vmap: c1.vmap.iter().map(|&v| c2.vmap[v]).collect(),
        amap: c1.amap.iter().map(|&a| c2.amap[a]).collect(),
        order: c1.order * c2.order,
        generators,
        sheets: None,
    })
}

/// Lifts an automorphism of `c.base` commuting with nothing in particular to an automorphism
/// of `c.total` covering it, trying every image of one base point.
fn lift_automorphism(c: &QuiverCovering, g: &DeckElement) -> Result<DeckElement> {
    let q = &c.total;
    let nv = q.num_vertices();
    if nv == 0 {
        return Ok(DeckElement::identity(0, 0));
    }
    if components(q).len() > 1 {
        return Err(Error::Precondition("total quiver must be connected to lift deck maps".into()));
    }
    let target_fiber = c.vertex_fiber(g.vertices[c.vmap[0]]);
    'candidates: for &y in &target_fiber {
        let mut vimg = vec![usize::MAX; nv];
        let mut aimg = vec![usize::MAX; q.num_arrows()];
        vimg[0] = y;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for (a, ar) in q.arrows().iter().enumerate() {
                let (anchor, other, other_img) = if ar.source == v {
                    let ab = g.arrows[c.amap[a]];
                    let Ok(img) = c.lift_arrow(ab, Anchor::Start(vimg[v])) else { continue 'candidates };
                    (img, ar.target, q.arrow(img).target)
                } else if ar.target == v {
                    let ab = g.arrows[c.amap[a]];
                    let Ok(img) = c.lift_arrow(ab, Anchor::End(vimg[v])) else { continue 'candidates };
                    (img, ar.source, q.arrow(img).source)
                } else {
                    continue;
                };
                if aimg[a] != usize::MAX && aimg[a] != anchor {
                    continue 'candidates;
                }
                aimg[a] = anchor;
                if vimg[other] == usize::MAX {
                    vimg[other] = other_img;
                    queue.push_back(other);
                } else if vimg[other] != other_img {
                    continue 'candidates;
                }
            }
        }
        if is_permutation(&vimg, nv) && is_permutation(&aimg, q.num_arrows()) {
            return Ok(DeckElement { vertices: vimg, arrows: aimg });
        }
    }
    Err(Error::Rejected("deck transformation does not lift to the total quiver".into()))
}
