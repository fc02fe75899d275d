//! Triangulated surfaces: adjacency quivers, the maps `f` and `g`, surface potentials, the
//! combinatorial basis of the Jacobian algebra and cyclic covers of once-punctured surfaces.

use std::collections::BTreeMap;

use crate::covering::{components, DeckElement, QuiverCovering};
use crate::error::{Error, Result};
use crate::quiver::{Path, Potential, Quiver};
use crate::scalar::Scalar;

/// Combinatorial triangulation data.
///
/// Arrows are named counterclockwise adjacencies between arcs. Each triangle lists its three
/// arrows in traversal order `α, f(α), f²(α)`; each puncture lists its arrows in the order
/// `β, g(β), g²(β), …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub arcs: Vec<String>,
    /// `(id, source arc, target arc)`.
    pub arrows: Vec<(String, usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
    /// `(puncture id, rotation)`.
    pub punctures: Vec<(String, Vec<usize>)>,
}

/// Adjacency quiver with its arrow maps.
#[derive(Clone, Debug)]
pub struct SurfaceQuiver {
    pub quiver: Quiver,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub triangle_of: Vec<usize>,
    pub puncture_of: Vec<usize>,
}

impl SurfaceQuiver {
    /// Size of the `g`-orbit of `a`.
    pub fn n(&self, a: usize) -> usize {
        let mut k = 1;
        let mut b = self.g[a];
        while b != a {
            b = self.g[b];
            k += 1;
        }
        k
    }

    /// Traversal path `a, g(a), …, g^r(a)`.
    pub fn g_path(&self, a: usize, r: usize) -> Path {
        let mut arrows = vec![a];
        for _ in 0..r {
            arrows.push(self.g[*arrows.last().unwrap()]);
        }
        self.quiver.path(&arrows).expect("g-chains are paths")
    }

    /// Triangle cycle `α, f(α), f²(α)`.
    pub fn triangle_cycle(&self, a: usize) -> Path {
        self.quiver.path(&[a, self.f[a], self.f[self.f[a]]]).expect("triangles are cycles")
    }

    /// Full puncture cycle starting with `a`.
    pub fn puncture_cycle(&self, a: usize) -> Path {
        self.g_path(a, self.n(a) - 1)
    }
}

impl Triangulation {
    pub fn arc_index(&self, id: &str) -> Result<usize> {
        self.arcs
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| Error::Structural(format!("unknown arc `{id}`")))
    }

    /// Builds the triangulation of a closed surface from oriented faces given by their
    /// puncture labels `(p, q, r)` in counterclockwise order. Arcs are named `p_q` with the
    /// labels sorted; the arrow at corner `p` of face `t` is named `t{t}{p}`.
    pub fn from_oriented_faces(faces: &[[&str; 3]]) -> Result<Self> {
        let arc_name = |x: &str, y: &str| {
            if x <= y {
                format!("{x}_{y}")
            } else {
                format!("{y}_{x}")
            }
        };
        let mut arcs: Vec<String> = Vec::new();
        for f in faces {
            for i in 0..3 {
                let n = arc_name(f[i], f[(i + 1) % 3]);
                if !arcs.contains(&n) {
                    arcs.push(n);
                }
            }
        }
        let idx = |n: &str| arcs.iter().position(|a| a == n).unwrap();
        let mut arrows = Vec::new();
        let mut triangles = Vec::new();
        // corner -> (face, arrow index, source arc, target arc)
        let mut corners: Vec<(String, usize, usize, usize, usize)> = Vec::new();
        for (t, f) in faces.iter().enumerate() {
            let [p, q, r] = *f;
            let (pq, qr, rp) = (idx(&arc_name(p, q)), idx(&arc_name(q, r)), idx(&arc_name(r, p)));
            let base = arrows.len();
            // pq -> rp at p, rp -> qr at r, qr -> pq at q
            for (corner, s, tg) in [(p, pq, rp), (r, rp, qr), (q, qr, pq)] {
                corners.push((corner.to_string(), t, arrows.len(), s, tg));
                arrows.push((format!("t{t}{corner}"), s, tg));
            }
            triangles.push([base, base + 1, base + 2]);
        }
        let mut punctures: Vec<(String, Vec<usize>)> = Vec::new();
        let mut labels: Vec<&str> = faces.iter().flatten().copied().collect();
        labels.sort();
        labels.dedup();
        for lab in labels {
            let at: Vec<&(String, usize, usize, usize, usize)> =
                corners.iter().filter(|c| c.0 == lab).collect();
            let mut rot = vec![at[0].2];
            loop {
                let cur = at.iter().find(|c| c.2 == *rot.last().unwrap()).unwrap();
                let next = at
                    .iter()
                    .find(|c| c.1 != cur.1 && c.3 == cur.4)
                    .ok_or_else(|| Error::Structural(format!("puncture `{lab}` is not closed")))?;
                if next.2 == rot[0] {
                    break;
                }
                if rot.len() > at.len() {
                    return Err(Error::Structural(format!("puncture `{lab}` is not a single cycle")));
                }
                rot.push(next.2);
            }
            punctures.push((lab.to_string(), rot));
        }
        Ok(Triangulation { arcs, arrows, triangles, punctures })
    }

    /// Validates the data and builds the adjacency quiver with `f` and `g`.
    pub fn adjacency_quiver(&self) -> Result<SurfaceQuiver> {
        let na = self.arrows.len();
        let mut q = Quiver::new();
        for a in &self.arcs {
            q.add_vertex(a, false)?;
        }
        for (id, s, t) in &self.arrows {
            q.add_arrow_idx(id, *s, *t)?;
        }
        let mut f = vec![usize::MAX; na];
        let mut g = vec![usize::MAX; na];
        let mut triangle_of = vec![usize::MAX; na];
        let mut puncture_of = vec![usize::MAX; na];
        for (ti, tri) in self.triangles.iter().enumerate() {
            let arcs: Vec<usize> = tri.iter().map(|&a| q.arrow(a).source).collect();
            if arcs[0] == arcs[1] || arcs[1] == arcs[2] || arcs[0] == arcs[2] {
                return Err(Error::Rejected(format!("triangle {ti} repeats an arc (self-folded)")));
            }
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                if a >= na || triangle_of[a] != usize::MAX {
                    return Err(Error::Structural(format!(
                        "arrow in triangle {ti} is missing or used twice"
                    )));
                }
                if q.arrow(a).target != q.arrow(b).source {
                    return Err(Error::Structural(format!("triangle {ti} is not a cycle")));
                }
                triangle_of[a] = ti;
                f[a] = b;
            }
        }
        for (pi, (pid, rot)) in self.punctures.iter().enumerate() {
            for i in 0..rot.len() {
                let (a, b) = (rot[i], rot[(i + 1) % rot.len()]);
                if a >= na || puncture_of[a] != usize::MAX {
                    return Err(Error::Structural(format!(
                        "arrow at puncture `{pid}` is missing or used twice"
                    )));
                }
                if q.arrow(a).target != q.arrow(b).source {
                    return Err(Error::Structural(format!("rotation at `{pid}` is not a cycle")));
                }
                puncture_of[a] = pi;
                g[a] = b;
            }
        }
        if let Some(a) = (0..na).find(|&a| triangle_of[a] == usize::MAX || puncture_of[a] == usize::MAX) {
            return Err(Error::Structural(format!(
                "arrow `{}` lacks a triangle or a puncture",
                q.arrow(a).id
            )));
        }
        for v in 0..q.num_vertices() {
            let (o, i) = (q.arrows_from(v).count(), q.arrows_into(v).count());
            if o != 2 || i != 2 {
                return Err(Error::Rejected(format!(
                    "arc `{}` has {o} outgoing and {i} incoming arrows",
                    q.vertex(v).id
                )));
            }
        }
        if let Some(a) = (0..na).find(|&a| f[a] == g[a]) {
            return Err(Error::Rejected(format!("f and g agree on `{}`", q.arrow(a).id)));
        }
        Ok(SurfaceQuiver { quiver: q, f, g, triangle_of, puncture_of })
    }
}

/// `W = Σ triangles − Σ c_p · puncture cycles`, representatives at the smallest arrow index.
pub fn surface_potential<S: Scalar>(sq: &SurfaceQuiver, constants: &[S]) -> Result<Potential<S>> {
    let num_punct = sq.puncture_of.iter().copied().max().map_or(0, |m| m + 1);
    if constants.len() < num_punct {
        return Err(Error::Precondition("one constant per puncture is required".into()));
    }
    if constants.iter().any(|c| c.is_zero()) {
        return Err(Error::Rejected("puncture constants must be nonzero".into()));
    }
    let na = sq.f.len();
    let mut terms = Vec::new();
    let mut seen_t = vec![false; na];
    let mut seen_p = vec![false; na];
    for a in 0..na {
        if !seen_t[sq.triangle_of[a]] {
            seen_t[sq.triangle_of[a]] = true;
            terms.push((S::one(), sq.triangle_cycle(a)));
        }
    }
    for a in 0..na {
        let p = sq.puncture_of[a];
        if !seen_p[p] {
            seen_p[p] = true;
            terms.push((-constants[p].clone(), sq.puncture_cycle(a)));
        }
    }
    Potential::new(terms)
}

/// Combinatorial basis of the Jacobian algebra of a surface potential.
#[derive(Clone, Debug)]
pub struct SurfaceBasis {
    pub lazy: Vec<Path>,
    /// `α, g(α), …, g^r(α)` for `0 ≤ r ≤ n_α − 2`.
    pub chains: Vec<Path>,
    /// Representative of `z_i` per vertex (triangle cycle of the first outgoing arrow).
    pub z: Vec<Path>,
}

impl SurfaceBasis {
    pub fn dim(&self) -> usize {
        self.lazy.len() + self.chains.len() + self.z.len()
    }

    /// Basis elements whose path starts at `k`.
    pub fn dim_from(&self, k: usize) -> usize {
        self.lazy.iter().chain(&self.chains).chain(&self.z).filter(|p| p.source == k).count()
    }
}

pub fn jacobian_basis_oracle(sq: &SurfaceQuiver) -> SurfaceBasis {
    let q = &sq.quiver;
    let lazy = (0..q.num_vertices()).map(|v| q.lazy(v)).collect();
    let mut chains = Vec::new();
    for a in 0..q.num_arrows() {
        for r in 0..sq.n(a).saturating_sub(1) {
            chains.push(sq.g_path(a, r));
        }
    }
    let z = (0..q.num_vertices())
        .map(|v| sq.triangle_cycle(q.arrows_from(v).next().expect("two arrows per arc")))
        .collect();
    SurfaceBasis { lazy, chains, z }
}

/// The paths `α, f(α), gf(α)` and `α, g(α), fg(α)`, which vanish in the Jacobian algebra.
pub fn zero_relation_paths(sq: &SurfaceQuiver) -> Vec<Path> {
    let q = &sq.quiver;
    let mut out = Vec::new();
    for a in 0..q.num_arrows() {
        out.push(q.path(&[a, sq.f[a], sq.g[sq.f[a]]]).expect("path"));
        out.push(q.path(&[a, sq.g[a], sq.f[sq.g[a]]]).expect("path"));
    }
    out
}

/// The four expressions for `z_i`: both triangle cycles at `i` and both scaled puncture
/// cycles at `i`.
pub fn z_expressions<S: Scalar>(sq: &SurfaceQuiver, constants: &[S], i: usize) -> Vec<(S, Path)> {
    let q = &sq.quiver;
    let mut out = Vec::new();
    for a in q.arrows_from(i) {
        out.push((S::one(), sq.triangle_cycle(a)));
        out.push((constants[sq.puncture_of[a]].clone(), sq.puncture_cycle(a)));
    }
    out
}

/// Output of [`cyclic_surface_cover`].
#[derive(Clone, Debug)]
pub struct SurfaceCover {
    pub total: Triangulation,
    pub covering: QuiverCovering,
}

/// `d`-sheeted cyclic cover of a once-punctured surface cut along the arc `gamma`.
///
/// The lift of a triangle on sheet `r` uses `x^r` for its arcs, except that the second
/// triangle containing `gamma` uses `gamma^{r+1}`. Names are `x^s`.
pub fn cyclic_surface_cover(base: &Triangulation, d: usize, gamma: &str) -> Result<SurfaceCover> {
    if d < 2 {
        return Err(Error::Precondition("at least two sheets are required".into()));
    }
    if base.punctures.len() != 1 {
        return Err(Error::Unsupported("only once-punctured surfaces are supported".into()));
    }
    let sq = base.adjacency_quiver()?;
    let bq = &sq.quiver;
    let gi = base.arc_index(gamma)?;
    let with_gamma: Vec<usize> = (0..base.triangles.len())
        .filter(|&t| base.triangles[t].iter().any(|&a| bq.arrow(a).source == gi))
        .collect();
    if with_gamma.len() != 2 {
        return Err(Error::Unsupported(format!(
            "arc `{gamma}` must lie on two distinct triangles"
        )));
    }
    let upper = with_gamma[1];
    let (nv, na) = (bq.num_vertices(), bq.num_arrows());
    let arc_of = |x: usize, s: usize| s * nv + x;
    let lift_arc = |x: usize, t: usize, r: usize| {
        if x == gi && t == upper {
            arc_of(x, (r + 1) % d)
        } else {
            arc_of(x, r)
        }
    };
    let arcs: Vec<String> =
        (0..d).flat_map(|s| base.arcs.iter().map(move |a| format!("{a}^{s}"))).collect();
    let mut arrows = Vec::with_capacity(d * na);
    for r in 0..d {
        for (a, (id, s, t)) in base.arrows.iter().enumerate() {
            let tri = sq.triangle_of[a];
            arrows.push((format!("{id}^{r}"), lift_arc(*s, tri, r), lift_arc(*t, tri, r)));
        }
    }
    let lift_arrow = |a: usize, r: usize| r * na + a;
    let triangles: Vec<[usize; 3]> = (0..d)
        .flat_map(|r| base.triangles.iter().map(move |t| t.map(|a| lift_arrow(a, r))))
        .collect();
    // g on the cover: the lift of g(α) starting where the lift of α ends
    let mut g = vec![0; d * na];
    for r in 0..d {
        for a in 0..na {
            let end = arrows[lift_arrow(a, r)].2;
            let b = sq.g[a];
            g[lift_arrow(a, r)] = (0..d)
                .map(|r2| lift_arrow(b, r2))
                .find(|&x| arrows[x].1 == end)
                .expect("g lifts uniquely");
        }
    }
    let (pid, rot) = &base.punctures[0];
    let beta = *rot.iter().min().unwrap();
    let mut punctures: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut done = vec![false; d * na];
    for r in 0..d {
        let start = lift_arrow(beta, r);
        if done[start] {
            continue;
        }
        let mut cyc = vec![start];
        done[start] = true;
        let mut x = g[start];
        while x != start {
            done[x] = true;
            cyc.push(x);
            x = g[x];
        }
        punctures.push((r, cyc));
    }
    let total = Triangulation {
        arcs,
        arrows,
        triangles,
        punctures: punctures.into_iter().map(|(r, c)| (format!("{pid}^{r}"), c)).collect(),
    };
    let tq = total.adjacency_quiver()?.quiver;
    if components(&tq).len() > 1 {
        return Err(Error::Rejected(format!("cutting along `{gamma}` disconnects the cover")));
    }
    let shift = DeckElement {
        vertices: (0..d * nv).map(|v| arc_of(v % nv, (v / nv + 1) % d)).collect(),
        arrows: (0..d * na).map(|a| lift_arrow(a % na, (a / na + 1) % d)).collect(),
    };
    let covering = QuiverCovering {
        total: tq,
        base: bq.clone(),
        vmap: (0..d * nv).map(|v| v % nv).collect(),
        amap: (0..d * na).map(|a| a % na).collect(),
        order: d,
        generators: vec![shift],
        sheets: Some((0..d * nv).map(|v| v / nv).collect()),
    };
    covering.validate()?;
    Ok(SurfaceCover { total, covering })
}

/// Once-punctured torus with arcs `a, b, c` and two triangles.
pub fn torus1p() -> Triangulation {
    let arcs = ["a", "b", "c"].map(String::from).to_vec();
    let arrows = [
        ("alpha1", 0, 1),
        ("beta1", 1, 2),
        ("gamma1", 2, 0),
        ("alpha2", 0, 1),
        ("beta2", 1, 2),
        ("gamma2", 2, 0),
    ]
    .iter()
    .map(|&(n, s, t)| (n.to_string(), s, t))
    .collect();
    Triangulation {
        arcs,
        arrows,
        triangles: vec![[0, 1, 2], [3, 4, 5]],
        punctures: vec![("m".into(), vec![3, 1, 5, 0, 4, 2])],
    }
}

/// Sphere with four punctures, triangulated as a tetrahedron.
pub fn sphere4() -> Triangulation {
    Triangulation::from_oriented_faces(&[["1", "2", "3"], ["1", "4", "2"], ["1", "3", "4"], ["2", "4", "3"]])
        .expect("tetrahedron faces are consistent")
}

/// Per-arrow `g`-orbit sizes keyed by arrow id, for reporting.
pub fn orbit_sizes(sq: &SurfaceQuiver) -> BTreeMap<String, usize> {
    (0..sq.f.len()).map(|a| (sq.quiver.arrow(a).id.clone(), sq.n(a))).collect()
}
