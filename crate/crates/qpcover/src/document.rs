//! The line-based `.qp` input format.
//!
//! ```text
//! [quiver NAME]
//! vertex ID (frozen|unfrozen)
//! arrow ID SRC -> TGT
//! [potential NAME on QUIVER]
//! term COEFF : A1 A2 ... Ak
//! [cover NAME : TOTAL -> BASE]
//! vmap V -> VBAR
//! amap A -> ABAR
//! deck order D vgen (CYCLES) agen (CYCLES)
//! sheets V:S ...
//! [seed NAME on QUIVER]
//! d V RATIONAL
//! ```
//!
//! `#` starts a comment. Potential terms list arrows in traversal order, which is also the
//! order in which [`Path`](crate::quiver::Path) stores them. A seed takes `B` from the arrow
//! counts of its quiver (`B_ij = #(i→j) − #(j→i)`) and `d` from its `d` lines (default 1).

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::covering::{DeckElement, QuiverCovering};
use crate::error::{Error, Result};
use crate::quiver::{Potential, Quiver};
use crate::scalar::{fmt_rational, Scalar};
use crate::seed::{seed_from_quiver, Seed};

#[derive(Clone, Debug, PartialEq)]
pub struct NamedPotential<S> {
    pub name: String,
    pub quiver: String,
    pub potential: Potential<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedCover {
    pub name: String,
    pub total: String,
    pub base: String,
    pub covering: QuiverCovering,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedSeed<S> {
    pub name: String,
    pub quiver: String,
    pub seed: Seed<S>,
}

/// Everything declared in one file, in declaration order.
#[derive(Clone, Debug, PartialEq)]
pub struct Document<S> {
    pub quivers: Vec<(String, Quiver)>,
    pub potentials: Vec<NamedPotential<S>>,
    pub covers: Vec<NamedCover>,
    pub seeds: Vec<NamedSeed<S>>,
}

impl<S> Default for Document<S> {
    fn default() -> Self {
        Document { quivers: vec![], potentials: vec![], covers: vec![], seeds: vec![] }
    }
}

impl<S: Scalar> Document<S> {
    pub fn quiver(&self, name: &str) -> Option<&Quiver> {
        self.quivers.iter().find(|(n, _)| n == name).map(|(_, q)| q)
    }

    pub fn potential(&self, name: &str) -> Option<&NamedPotential<S>> {
        self.potentials.iter().find(|p| p.name == name)
    }

    pub fn cover(&self, name: &str) -> Option<&NamedCover> {
        self.covers.iter().find(|c| c.name == name)
    }

    pub fn seed(&self, name: &str) -> Option<&NamedSeed<S>> {
        self.seeds.iter().find(|s| s.name == name)
    }

    /// First potential declared on the given quiver.
    pub fn potential_on(&self, quiver: &str) -> Option<&NamedPotential<S>> {
        self.potentials.iter().find(|p| p.quiver == quiver)
    }

    pub fn is_empty(&self) -> bool {
        self.quivers.is_empty() && self.potentials.is_empty() && self.covers.is_empty() && self.seeds.is_empty()
    }
}

/// A whitespace-separated token with its 1-based column.
#[derive(Clone, Debug)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

/// Splits on whitespace, with `(` and `)` as tokens of their own.
fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        let special = ch == '(' || ch == ')';
        if ch.is_whitespace() || special {
            if let Some(s) = start.take() {
                out.push(Tok { text: &line[s..i], col: line[..s].chars().count() + 1 });
            }
            if special {
                out.push(Tok { text: &line[i..i + 1], col: line[..i].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &line[s..], col: line[..s].chars().count() + 1 });
    }
    out
}

fn err(line: usize, col: usize, msg: impl std::fmt::Display) -> Error {
    Error::Structural(format!("line {line}, column {col}: {msg}"))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(n, d))
}

enum Section {
    None,
    Quiver(usize),
    Potential { idx: usize, terms: Vec<(S0, Vec<usize>, usize)> },
    Cover(Box<CoverDraft>),
    Seed { quiver: String, name: String, d: BTreeMap<usize, BigRational>, line: usize },
}

type S0 = BigRational;

struct CoverDraft {
    name: String,
    total: String,
    base: String,
    line: usize,
    vmap: BTreeMap<usize, usize>,
    amap: BTreeMap<usize, usize>,
    order: Option<usize>,
    generators: Vec<DeckElement>,
    sheets: Option<Vec<Option<usize>>>,
}

struct Parser<S> {
    doc: Document<S>,
    names: HashSet<String>,
    section: Section,
    potential_lines: Vec<usize>,
}

impl<S: Scalar> Parser<S> {
    fn claim(&mut self, name: &str, line: usize, col: usize) -> Result<()> {
        if !self.names.insert(name.to_string()) {
            return Err(err(line, col, format!("duplicate name `{name}`")));
        }
        Ok(())
    }

    fn quiver_ref(&self, name: &Tok, line: usize) -> Result<&Quiver> {
        self.doc.quiver(name.text).ok_or_else(|| err(line, name.col, format!("unknown quiver `{}`", name.text)))
    }

    fn finish_section(&mut self) -> Result<()> {
        match std::mem::replace(&mut self.section, Section::None) {
            Section::None | Section::Quiver(_) => Ok(()),
            Section::Potential { idx, terms } => {
                let qname = self.doc.potentials[idx].quiver.clone();
                let q = self.doc.quiver(&qname).expect("checked");
                let mut out = Vec::new();
                for (c, arrows, line) in terms {
                    let p = q.path(&arrows).map_err(|e| err(line, 1, e))?;
                    let c = S::from_rational(&c)
                        .ok_or_else(|| err(line, 1, "coefficient is not representable in the scalar field"))?;
                    out.push((c, p));
                }
                self.doc.potentials[idx].potential = Potential::new(out).map_err(|e| {
                    err(self.potential_lines[idx], 1, format!("potential `{}`: {e}", self.doc.potentials[idx].name))
                })?;
                Ok(())
            }
            Section::Cover(d) => {
                let total = self.doc.quiver(&d.total).expect("checked").clone();
                let base = self.doc.quiver(&d.base).expect("checked").clone();
                let mut vmap = Vec::with_capacity(total.num_vertices());
                for v in 0..total.num_vertices() {
                    vmap.push(*d.vmap.get(&v).ok_or_else(|| {
                        err(d.line, 1, format!("cover `{}`: no vmap entry for `{}`", d.name, total.vertex(v).id))
                    })?);
                }
                let mut amap = Vec::with_capacity(total.num_arrows());
                for a in 0..total.num_arrows() {
                    amap.push(*d.amap.get(&a).ok_or_else(|| {
                        err(d.line, 1, format!("cover `{}`: no amap entry for `{}`", d.name, total.arrow(a).id))
                    })?);
                }
                let order =
                    d.order.ok_or_else(|| err(d.line, 1, format!("cover `{}`: missing `deck order` line", d.name)))?;
                let sheets = match d.sheets {
                    None => None,
                    Some(s) => Some(
                        s.into_iter()
                            .enumerate()
                            .map(|(v, x)| {
                                x.ok_or_else(|| {
                                    err(d.line, 1, format!("cover `{}`: no sheet for `{}`", d.name, total.vertex(v).id))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                };
                let covering = QuiverCovering { total, base, vmap, amap, order, generators: d.generators, sheets };
                self.doc.covers.push(NamedCover { name: d.name, total: d.total, base: d.base, covering });
                Ok(())
            }
            Section::Seed { quiver, name, d, line } => {
                let q = self.doc.quiver(&quiver).expect("checked");
                let base: Seed<S> = seed_from_quiver(q).map_err(|e| err(line, 1, e))?;
                let mut dv = base.d.clone();
                for (v, r) in d {
                    dv[v] = S::from_rational(&r).ok_or_else(|| err(line, 1, "d value not representable"))?;
                }
                let seed = Seed::new(base.ids, base.frozen, dv, base.b).map_err(|e| err(line, 1, e))?;
                self.doc.seeds.push(NamedSeed { name, quiver, seed });
                Ok(())
            }
        }
    }

    fn header(&mut self, toks: &[Tok], line: usize) -> Result<()> {
        self.finish_section()?;
        // tokens inside `[...]`, with the brackets stripped from the first and last
        let first = toks[0].text.trim_start_matches('[');
        let mut words: Vec<Tok> = Vec::new();
        if !first.is_empty() {
            words.push(Tok { text: first, col: toks[0].col + 1 });
        }
        for t in &toks[1..] {
            words.push(t.clone());
        }
        let last = words.last().ok_or_else(|| err(line, 1, "empty section header"))?.clone();
        if !last.text.ends_with(']') {
            return Err(err(line, last.col, "section header must end with `]`"));
        }
        let trimmed = last.text.trim_end_matches(']');
        words.pop();
        if !trimmed.is_empty() {
            words.push(Tok { text: trimmed, col: last.col });
        }
        let kind = words.first().ok_or_else(|| err(line, 1, "empty section header"))?;
        let w: Vec<&str> = words.iter().map(|t| t.text).collect();
        match (kind.text, w.len()) {
            ("quiver", 2) => {
                self.claim(w[1], line, words[1].col)?;
                self.doc.quivers.push((w[1].to_string(), Quiver::new()));
                self.section = Section::Quiver(self.doc.quivers.len() - 1);
            }
            ("potential", 4) if w[2] == "on" => {
                self.quiver_ref(&words[3], line)?;
                self.claim(w[1], line, words[1].col)?;
                self.doc.potentials.push(NamedPotential {
                    name: w[1].into(),
                    quiver: w[3].into(),
                    potential: Potential::zero(),
                });
                self.potential_lines.push(line);
                self.section = Section::Potential { idx: self.doc.potentials.len() - 1, terms: vec![] };
            }
            ("cover", 6) if w[2] == ":" && w[4] == "->" => {
                self.quiver_ref(&words[3], line)?;
                self.quiver_ref(&words[5], line)?;
                self.claim(w[1], line, words[1].col)?;
                self.section = Section::Cover(Box::new(CoverDraft {
                    name: w[1].into(),
                    total: w[3].into(),
                    base: w[5].into(),
                    line,
                    vmap: BTreeMap::new(),
                    amap: BTreeMap::new(),
                    order: None,
                    generators: vec![],
                    sheets: None,
                }));
            }
            ("seed", 4) if w[2] == "on" => {
                self.quiver_ref(&words[3], line)?;
                self.claim(w[1], line, words[1].col)?;
                self.section =
                    Section::Seed { quiver: w[3].into(), name: w[1].into(), d: BTreeMap::new(), line };
            }
            _ => return Err(err(line, kind.col, format!("malformed section header `{}`", w.join(" ")))),
        }
        Ok(())
    }

    fn body(&mut self, toks: &[Tok], line: usize) -> Result<()> {
        let kw = &toks[0];
        match &mut self.section {
            Section::None => Err(err(line, kw.col, "statement outside of a section")),
            Section::Quiver(i) => {
                let q = &mut self.doc.quivers[*i].1;
                match (kw.text, toks.len()) {
                    ("vertex", 2) | ("vertex", 3) => {
                        let frozen = match toks.get(2).map(|t| t.text) {
                            None | Some("unfrozen") => false,
                            Some("frozen") => true,
                            Some(other) => return Err(err(line, toks[2].col, format!("expected frozen|unfrozen, got `{other}`"))),
                        };
                        q.add_vertex(toks[1].text, frozen).map_err(|e| err(line, toks[1].col, e))?;
                        Ok(())
                    }
                    ("arrow", 5) if toks[3].text == "->" => {
                        for t in [&toks[2], &toks[4]] {
                            if q.vertex_id(t.text).is_none() {
                                return Err(err(line, t.col, format!("unknown vertex `{}`", t.text)));
                            }
                        }
                        q.add_arrow(toks[1].text, toks[2].text, toks[4].text).map_err(|e| err(line, toks[1].col, e))?;
                        Ok(())
                    }
                    _ => Err(err(line, kw.col, "expected `vertex ID [frozen|unfrozen]` or `arrow ID SRC -> TGT`")),
                }
            }
            Section::Potential { idx, terms } => {
                if kw.text != "term" || toks.len() < 4 || toks[2].text != ":" {
                    return Err(err(line, kw.col, "expected `term COEFF : A1 ... Ak`"));
                }
                let c = parse_rational(toks[1].text)
                    .ok_or_else(|| err(line, toks[1].col, format!("bad coefficient `{}`", toks[1].text)))?;
                let qname = self.doc.potentials[*idx].quiver.clone();
                let q = self.doc.quiver(&qname).expect("checked");
                let mut arrows = Vec::new();
                for t in &toks[3..] {
                    arrows.push(q.arrow_id(t.text).ok_or_else(|| err(line, t.col, format!("unknown arrow `{}`", t.text)))?);
                }
                terms.push((c, arrows, line));
                Ok(())
            }
            Section::Cover(d) => {
                let total = self.doc.quivers.iter().find(|(n, _)| *n == d.total).map(|(_, q)| q).expect("checked");
                let base = self.doc.quivers.iter().find(|(n, _)| *n == d.base).map(|(_, q)| q).expect("checked");
                match kw.text {
                    "vmap" | "amap" if toks.len() == 4 && toks[2].text == "->" => {
                        let is_v = kw.text == "vmap";
                        let look = |q: &Quiver, t: &Tok| {
                            if is_v { q.vertex_id(t.text) } else { q.arrow_id(t.text) }
                                .ok_or_else(|| err(line, t.col, format!("unknown {} `{}`", if is_v { "vertex" } else { "arrow" }, t.text)))
                        };
                        let x = look(total, &toks[1])?;
                        let y = look(base, &toks[3])?;
                        let map = if is_v { &mut d.vmap } else { &mut d.amap };
                        if map.insert(x, y).is_some() {
                            return Err(err(line, toks[1].col, format!("`{}` mapped twice", toks[1].text)));
                        }
                        Ok(())
                    }
                    "deck" => {
                        if toks.len() < 3 || toks[1].text != "order" {
                            return Err(err(line, kw.col, "expected `deck order D vgen (...) agen (...)`"));
                        }
                        let order: usize = toks[2]
                            .text
                            .parse()
                            .map_err(|_| err(line, toks[2].col, format!("bad order `{}`", toks[2].text)))?;
                        d.order = Some(order);
                        let mut i = 3;
                        while i < toks.len() {
                            if toks[i].text != "vgen" {
                                return Err(err(line, toks[i].col, "expected `vgen`"));
                            }
                            let (vertices, next) = parse_cycles(toks, i + 1, line, total.num_vertices(), |s| total.vertex_id(s))?;
                            if next >= toks.len() || toks[next].text != "agen" {
                                return Err(err(line, toks.get(next).map_or(1, |t| t.col), "expected `agen`"));
                            }
                            let (arrows, next) = parse_cycles(toks, next + 1, line, total.num_arrows(), |s| total.arrow_id(s))?;
                            d.generators.push(DeckElement { vertices, arrows });
                            i = next;
                        }
                        Ok(())
                    }
                    "sheets" => {
                        let mut s = d.sheets.take().unwrap_or_else(|| vec![None; total.num_vertices()]);
                        for t in &toks[1..] {
                            let (v, k) = t.text.rsplit_once(':').ok_or_else(|| err(line, t.col, "expected `V:S`"))?;
                            let vi = total.vertex_id(v).ok_or_else(|| err(line, t.col, format!("unknown vertex `{v}`")))?;
                            let k: usize = k.parse().map_err(|_| err(line, t.col, format!("bad sheet `{k}`")))?;
                            s[vi] = Some(k);
                        }
                        d.sheets = Some(s);
                        Ok(())
                    }
                    _ => Err(err(line, kw.col, "expected `vmap`, `amap`, `deck` or `sheets`")),
                }
            }
            Section::Seed { quiver, d, .. } => {
                if kw.text != "d" || toks.len() != 3 {
                    return Err(err(line, kw.col, "expected `d V RATIONAL`"));
                }
                let q = self.doc.quivers.iter().find(|(n, _)| n == quiver).map(|(_, q)| q).expect("checked");
                let v = q.vertex_id(toks[1].text).ok_or_else(|| err(line, toks[1].col, format!("unknown vertex `{}`", toks[1].text)))?;
                let r = parse_rational(toks[2].text).ok_or_else(|| err(line, toks[2].col, format!("bad rational `{}`", toks[2].text)))?;
                d.insert(v, r);
                Ok(())
            }
        }
    }
}

/// Parses cycle notation `(x y z)(u v)` into a permutation of `0..n`; stops at the first
/// token that is not `(`.
fn parse_cycles(
    toks: &[Tok],
    mut i: usize,
    line: usize,
    n: usize,
    look: impl Fn(&str) -> Option<usize>,
) -> Result<(Vec<usize>, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    while i < toks.len() && toks[i].text == "(" {
        i += 1;
        let mut cycle = Vec::new();
        while i < toks.len() && toks[i].text != ")" {
            let x = look(toks[i].text).ok_or_else(|| err(line, toks[i].col, format!("unknown id `{}`", toks[i].text)))?;
            if seen[x] {
                return Err(err(line, toks[i].col, format!("`{}` appears twice", toks[i].text)));
            }
            seen[x] = true;
            cycle.push(x);
            i += 1;
        }
        if i >= toks.len() {
            return Err(err(line, toks.last().map_or(1, |t| t.col), "unclosed `(`"));
        }
        i += 1;
        for (j, &x) in cycle.iter().enumerate() {
            perm[x] = cycle[(j + 1) % cycle.len()];
        }
    }
    Ok((perm, i))
}

/// Parses a `.qp` document.
pub fn parse_document<S: Scalar>(text: &str) -> Result<Document<S>> {
    let mut p = Parser { doc: Document::default(), names: HashSet::new(), section: Section::None, potential_lines: vec![] };
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(content);
        if toks.is_empty() {
            continue;
        }
        if toks[0].text.starts_with('[') {
            p.header(&toks, line)?;
        } else {
            p.body(&toks, line)?;
        }
    }
    p.finish_section()?;
    Ok(p.doc)
}

fn cycles(perm: &[usize], name: impl Fn(usize) -> String) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut c = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            c.push(name(x));
            x = perm[x];
        }
        write!(out, "({})", c.join(" ")).expect("string");
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// Writes a document in the `.qp` format; [`parse_document`] reads it back unchanged.
pub fn serialize_document<S: Scalar>(doc: &Document<S>) -> Result<String> {
    let mut out = String::new();
    let w = &mut out;
    for (name, q) in &doc.quivers {
        writeln!(w, "[quiver {name}]").expect("string");
        for v in q.vertices() {
            writeln!(w, "vertex {} {}", v.id, if v.frozen { "frozen" } else { "unfrozen" }).expect("string");
        }
        for a in q.arrows() {
            writeln!(w, "arrow {} {} -> {}", a.id, q.vertex(a.source).id, q.vertex(a.target).id).expect("string");
        }
        writeln!(w).expect("string");
    }
    for p in &doc.potentials {
        let q = doc.quiver(&p.quiver).ok_or_else(|| Error::Structural(format!("unknown quiver `{}`", p.quiver)))?;
        writeln!(w, "[potential {} on {}]", p.name, p.quiver).expect("string");
        for (c, path) in p.potential.terms() {
            let r = c
                .to_rational()
                .ok_or_else(|| Error::Unsupported("only rational coefficients can be written".into()))?;
            writeln!(w, "term {} : {}", fmt_rational(&r), q.traversal_ids(path).join(" ")).expect("string");
        }
        writeln!(w).expect("string");
    }
    for c in &doc.covers {
        let cov = &c.covering;
        writeln!(w, "[cover {} : {} -> {}]", c.name, c.total, c.base).expect("string");
        for v in 0..cov.total.num_vertices() {
            writeln!(w, "vmap {} -> {}", cov.total.vertex(v).id, cov.base.vertex(cov.vmap[v]).id).expect("string");
        }
        for a in 0..cov.total.num_arrows() {
            writeln!(w, "amap {} -> {}", cov.total.arrow(a).id, cov.base.arrow(cov.amap[a]).id).expect("string");
        }
        write!(w, "deck order {}", cov.order).expect("string");
        for g in &cov.generators {
            write!(
                w,
                " vgen {} agen {}",
                cycles(&g.vertices, |i| cov.total.vertex(i).id.clone()),
                cycles(&g.arrows, |i| cov.total.arrow(i).id.clone())
            )
            .expect("string");
        }
        writeln!(w).expect("string");
        if let Some(s) = &cov.sheets {
            let parts: Vec<String> =
                s.iter().enumerate().map(|(v, k)| format!("{}:{k}", cov.total.vertex(v).id)).collect();
            writeln!(w, "sheets {}", parts.join(" ")).expect("string");
        }
        writeln!(w).expect("string");
    }
    for s in &doc.seeds {
        writeln!(w, "[seed {} on {}]", s.name, s.quiver).expect("string");
        for (i, d) in s.seed.d.iter().enumerate() {
            let r = d.to_rational().ok_or_else(|| Error::Unsupported("only rational d can be written".into()))?;
            writeln!(w, "d {} {}", s.seed.ids[i], fmt_rational(&r)).expect("string");
        }
        writeln!(w).expect("string");
    }
    Ok(out)
}

/// A document holding one covering and a potential on each side.
pub fn covering_document<S: Scalar>(
    name: &str,
    c: &QuiverCovering,
    wbar: Option<&Potential<S>>,
) -> Document<S> {
    let mut doc = Document::default();
    let (tn, bn) = (format!("{name}_total"), format!("{name}_base"));
    doc.quivers.push((tn.clone(), c.total.clone()));
    doc.quivers.push((bn.clone(), c.base.clone()));
    if let Some(wbar) = wbar {
        doc.potentials.push(NamedPotential { name: format!("{name}_W"), quiver: bn.clone(), potential: wbar.clone() });
    }
    doc.covers.push(NamedCover { name: name.into(), total: tn, base: bn, covering: c.clone() });
    doc
}
