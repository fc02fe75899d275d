//! Resolution of `SOURCE[:OBJECT]` references: a built-in fixture name or a `.qp` file.

use qpcover::covering::QuiverCovering;
use qpcover::document::{parse_document, Document};
use qpcover::fixtures::fixture;
use qpcover::quiver::{Potential, Quiver};
use qpcover::seed::{seed_from_quiver, Seed};
use qpcover::{Error, Rational, Result};

/// A quiver with potential and the seed to use for it.
pub struct QuiverWithPotential {
    pub label: String,
    pub quiver: Quiver,
    pub potential: Potential<Rational>,
    pub seed: Seed<Rational>,
}

/// A covering with the base potential `W̄`.
pub struct CoverSource {
    pub label: String,
    pub covering: QuiverCovering,
    pub base_potential: Potential<Rational>,
}

fn split(reference: &str) -> (&str, Option<&str>) {
    if let Some(pos) = reference.rfind(':') {
        let (file, obj) = (&reference[..pos], &reference[pos + 1..]);
        if file.ends_with(".qp") {
            return (file, Some(obj));
        }
    }
    (reference, None)
}

fn is_file(source: &str) -> bool {
    source.ends_with(".qp")
}

pub fn load_document(path: &str) -> Result<Document<Rational>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Structural(format!("cannot read `{path}`: {e}")))?;
    parse_document(&text).map_err(|e| match e {
        Error::Structural(m) => Error::Structural(format!("{path}: {m}")),
        other => other,
    })
}

fn missing(kind: &str, name: &str, path: &str) -> Error {
    Error::Structural(format!("no {kind} `{name}` in `{path}`"))
}

/// Loads a quiver with potential.
///
/// In a file, `OBJECT` may name a potential, a quiver (using the first potential on it, or
/// zero), a cover (the total quiver with `σ(W̄)`) or a seed. Without `OBJECT` the first
/// potential is used, or else the first quiver.
pub fn load_qp(reference: &str) -> Result<QuiverWithPotential> {
    let (source, object) = split(reference);
    if !is_file(source) {
        if object.is_some() {
            return Err(Error::Structural("objects can only be selected inside .qp files".into()));
        }
        let f = fixture::<Rational>(source)?;
        let seed = seed_from_quiver(&f.quiver)?;
        return Ok(QuiverWithPotential { label: f.name, quiver: f.quiver, potential: f.potential, seed });
    }
    let doc = load_document(source)?;
    let on_quiver = |qname: &str, w: Option<Potential<Rational>>, seed: Option<Seed<Rational>>| -> Result<QuiverWithPotential> {
        let q = doc.quiver(qname).expect("resolved by the parser").clone();
        let w = w.unwrap_or_else(|| doc.potential_on(qname).map(|p| p.potential.clone()).unwrap_or_else(Potential::zero));
        let seed = match seed {
            Some(s) => s,
            None => seed_from_quiver(&q)?,
        };
        Ok(QuiverWithPotential { label: reference.to_string(), quiver: q, potential: w, seed })
    };
    match object {
        Some(obj) => {
            if let Some(p) = doc.potential(obj) {
                on_quiver(&p.quiver, Some(p.potential.clone()), None)
            } else if doc.quiver(obj).is_some() {
                on_quiver(obj, None, None)
            } else if let Some(c) = doc.cover(obj) {
                let wbar = doc.potential_on(&c.base).map(|p| p.potential.clone()).unwrap_or_else(Potential::zero);
                on_quiver(&c.total, Some(c.covering.sigma_potential(&wbar)), None)
            } else if let Some(s) = doc.seed(obj) {
                on_quiver(&s.quiver, None, Some(s.seed.clone()))
            } else {
                Err(missing("object", obj, source))
            }
        }
        None => {
            if let Some(p) = doc.potentials.first() {
                on_quiver(&p.quiver, Some(p.potential.clone()), None)
            } else if let Some((name, _)) = doc.quivers.first() {
                on_quiver(name, None, None)
            } else {
                Err(Error::Structural(format!("`{source}` declares no quiver")))
            }
        }
    }
}

/// Loads a covering: a fixture with a cover, or `FILE.qp[:COVER]` with `W̄` the first
/// potential on the base quiver (zero if there is none).
pub fn load_cover(reference: &str) -> Result<CoverSource> {
    let (source, object) = split(reference);
    if !is_file(source) {
        let f = fixture::<Rational>(source)?;
        let covering = f.cover.ok_or_else(|| Error::Structural(format!("fixture `{source}` is not a covering")))?;
        return Ok(CoverSource {
            label: f.name,
            covering,
            base_potential: f.base_potential.unwrap_or_else(Potential::zero),
        });
    }
    let doc = load_document(source)?;
    let c = match object {
        Some(obj) => doc.cover(obj).ok_or_else(|| missing("cover", obj, source))?,
        None => doc.covers.first().ok_or_else(|| Error::Structural(format!("`{source}` declares no cover")))?,
    };
    let wbar = doc.potential_on(&c.base).map(|p| p.potential.clone()).unwrap_or_else(Potential::zero);
    Ok(CoverSource { label: reference.to_string(), covering: c.covering.clone(), base_potential: wbar })
}

/// Vertex by id, with a readable error.
pub fn vertex(q: &Quiver, id: &str) -> Result<usize> {
    q.vertex_id(id).ok_or_else(|| Error::Structural(format!("unknown vertex `{id}`")))
}

/// Parses a comma-separated dimension vector of the given length.
pub fn dim_vector(s: &str, len: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Structural(format!("bad dimension vector `{s}`"))))
        .collect::<Result<_>>()?;
    if v.len() != len {
        return Err(Error::Structural(format!("dimension vector `{s}` needs {len} entries")));
    }
    Ok(v)
}
