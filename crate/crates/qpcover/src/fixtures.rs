//! Built-in fixtures: quivers with potential and coverings used throughout the tests and
//! the command line.

use crate::covering::{DeckElement, QuiverCovering};
use crate::error::{Error, Result};
use crate::grading::cyclic_cover_from_shifts;
use crate::quiver::{Potential, Quiver};
use crate::scalar::Scalar;
use crate::surface::{cyclic_surface_cover, surface_potential, torus1p};

/// A quiver with potential, optionally presented as the total space of a covering whose
/// base carries `base_potential` with `potential = σ(base_potential)`.
#[derive(Clone, Debug)]
pub struct Fixture<S> {
    pub name: String,
    pub quiver: Quiver,
    pub potential: Potential<S>,
    pub cover: Option<QuiverCovering>,
    pub base_potential: Option<Potential<S>>,
}

pub const NAMES: &[&str] = &[
    "torus1p",
    "torus1p-cover2",
    "torus1p-cover3",
    "kronecker-cover2",
    "liegrass-base",
    "liegrass-cover<d>",
    "loopwrap",
    "sphere4",
    "a2",
    "a1xa1",
    "kronecker",
];

/// Looks up a fixture by registry name.
pub fn fixture<S: Scalar>(name: &str) -> Result<Fixture<S>> {
    match name {
        "torus1p" => {
            let sq = torus1p().adjacency_quiver()?;
            let w = surface_potential(&sq, &[S::one()])?;
            Ok(plain(name, sq.quiver, w))
        }
        "sphere4" => {
            let sq = crate::surface::sphere4().adjacency_quiver()?;
            let w = surface_potential(&sq, &vec![S::one(); 4])?;
            Ok(plain(name, sq.quiver, w))
        }
        "torus1p-cover2" => torus_cover(name, 2),
        "torus1p-cover3" => torus_cover(name, 3),
        "kronecker-cover2" => {
            let c = kronecker_cover2();
            Ok(covered(name, c, Potential::zero()))
        }
        "liegrass-base" => {
            let (q, w) = liegrass_base::<S>();
            Ok(plain(name, q, w))
        }
        "a2" => Ok(plain(name, Quiver::from_parts(&["1", "2"], &[("a", "1", "2")])?, Potential::zero())),
        "a1xa1" => Ok(plain(name, Quiver::from_parts(&["1", "2"], &[])?, Potential::zero())),
        "kronecker" => Ok(plain(
            name,
            Quiver::from_parts(&["1", "2"], &[("a", "2", "1"), ("b", "2", "1")])?,
            Potential::zero(),
        )),
        "loopwrap" | "loopwrap-fixture" => {
            let (c, wbar) = loopwrap::<S>();
            Ok(covered(name, c, wbar))
        }
        _ => {
            if let Some(d) = name.strip_prefix("liegrass-cover") {
                let d: usize = d
                    .parse()
                    .map_err(|_| Error::Structural(format!("bad sheet count in `{name}`")))?;
                let c = liegrass_cover(d)?;
                let (_, wbar) = liegrass_base::<S>();
                return Ok(covered(name, c, wbar));
            }
            if let Some(d) = name.strip_prefix("torus1p-cover") {
                let d: usize = d
                    .parse()
                    .map_err(|_| Error::Structural(format!("bad sheet count in `{name}`")))?;
                return torus_cover(name, d);
            }
            Err(Error::Structural(format!("unknown fixture `{name}`")))
        }
    }
}

fn plain<S: Scalar>(name: &str, quiver: Quiver, potential: Potential<S>) -> Fixture<S> {
    Fixture { name: name.into(), quiver, potential, cover: None, base_potential: None }
}

fn covered<S: Scalar>(name: &str, c: QuiverCovering, wbar: Potential<S>) -> Fixture<S> {
    Fixture {
        name: name.into(),
        quiver: c.total.clone(),
        potential: c.sigma_potential(&wbar),
        cover: Some(c),
        base_potential: Some(wbar),
    }
}

fn torus_cover<S: Scalar>(name: &str, d: usize) -> Result<Fixture<S>> {
    let base = torus1p();
    let cov = cyclic_surface_cover(&base, d, "b")?;
    let sq = cov.total.adjacency_quiver()?;
    let w = surface_potential(&sq, &vec![S::one(); d])?;
    let wbar = surface_potential(&base.adjacency_quiver()?, &[S::one()])?;
    Ok(Fixture {
        name: name.into(),
        quiver: sq.quiver,
        potential: w,
        cover: Some(cov.covering),
        base_potential: Some(wbar),
    })
}

/// The `2:1` cover of the Kronecker quiver with total vertices `1..4`.
pub fn kronecker_cover2() -> QuiverCovering {
    let total = Quiver::from_parts(
        &["1", "2", "3", "4"],
        &[("a1", "2", "1"), ("b1", "2", "3"), ("b2", "4", "1"), ("a2", "4", "3")],
    )
    .expect("static data");
    let base = Quiver::from_parts(&["1bar", "2bar"], &[("abar", "2bar", "1bar"), ("bbar", "2bar", "1bar")])
        .expect("static data");
    QuiverCovering {
        total,
        base,
        vmap: vec![0, 1, 0, 1],
        amap: vec![0, 1, 1, 0],
        order: 2,
        generators: vec![DeckElement { vertices: vec![2, 3, 0, 1], arrows: vec![3, 2, 1, 0] }],
        sheets: Some(vec![0, 0, 1, 1]),
    }
}

/// Base quiver `A, B, C, D` with `W̄ = c b1 a1 + c b2 a2 + d c1 b1 + d c2 b2`.
pub fn liegrass_base<S: Scalar>() -> (Quiver, Potential<S>) {
    let q = Quiver::from_parts(
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
    .expect("static data");
    let term = |ids: &[&str]| (S::one(), q.path_by_ids(ids).expect("static data"));
    let w = Potential::new(vec![
        term(&["a1", "b1", "c"]),
        term(&["a2", "b2", "c"]),
        term(&["b1", "c1", "d"]),
        term(&["b2", "c2", "d"]),
    ])
    .expect("cycles");
    (q, w)
}

/// `d:1` cover of the Lie-Grass base where `a2`, `b2`, `c2` change sheets.
pub fn liegrass_cover(d: usize) -> Result<QuiverCovering> {
    if d < 2 {
        return Err(Error::Precondition("at least two sheets are required".into()));
    }
    let (q, _) = liegrass_base::<num_rational::BigRational>();
    // a1 a2 b1 b2 c c1 c2 d
    cyclic_cover_from_shifts(&q, d, &[0, 1, 0, d - 1, 0, 0, 1, 0])
}

/// One vertex with a loop `l`, `W̄ = l³`, and the `3:1` cover on which `l` winds once.
pub fn loopwrap<S: Scalar>() -> (QuiverCovering, Potential<S>) {
    let mut base = Quiver::new();
    base.add_vertex("v", false).expect("static data");
    base.add_arrow("l", "v", "v").expect("static data");
    let c = cyclic_cover_from_shifts(&base, 3, &[1]).expect("static data");
    let w = Potential::new(vec![(S::one(), base.path(&[0, 0, 0]).expect("loop"))]).expect("cycle");
    (c, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn all_fixtures_build() {
        for name in ["torus1p", "torus1p-cover2", "torus1p-cover3", "kronecker-cover2", "liegrass-base", "liegrass-cover2", "liegrass-cover3", "loopwrap", "sphere4"] {
            let f = fixture::<Q>(name).unwrap();
            if let (Some(c), Some(wbar)) = (&f.cover, &f.base_potential) {
                assert!(c.validate().is_ok(), "{name}");
                assert!(c.sigma_potential(wbar).cyclically_equal(&f.potential), "{name}");
                let d = Q::from_i64(c.order as i64);
                assert!(c.project_potential(&f.potential).cyclically_equal(&wbar.scale(&d)), "{name}");
            }
        }
    }
}
