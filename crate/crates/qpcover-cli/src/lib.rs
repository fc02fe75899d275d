//! The `qpcover` command line: argument parsing, command dispatch and reports.
//!
//! Every command produces a plain-text report, or with `--json` a JSON document. Exit codes:
//! 0 success or the property holds, 1 the property fails, 2 input error, 3 inconclusive.

mod sources;

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qpcover::covering::QuiverCovering;
use qpcover::document::{covering_document, serialize_document, Document, NamedPotential};
use qpcover::fixtures::{fixture, NAMES};
use qpcover::grading::{build_extended_cyclic_cover, check_non_wrapping, find_nice_grading};
use qpcover::grassmannian::{
    compositions, euler_gr, euler_quot, quot_order, verify_projection_euler, EulerResult, Method, MethodChoice,
    ProjectionMode,
};
use qpcover::jacobian::TruncatedJacobian;
use qpcover::quiver::Quiver;
use qpcover::scalar::fmt_rational;
use qpcover::scattering::{
    compare_theta_covering, format_series, initial_cluster_hyperplanes, initial_cluster_walls, quiver_seed_covering,
    rank2_complete, restrict_walls, sorted_walls, theta_stability, RankTwoDiagram, Support, Wall2D,
};
use qpcover::seed::Seed;
use qpcover::surface::{cyclic_surface_cover, surface_potential, torus1p};
use qpcover::{Error, Rational, Result};

pub use sources::{load_cover, load_qp};

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "qpcover", version, about = "Coverings of quivers with potential, computed exactly")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a source and check every covering in it.
    Validate { source: String },
    /// Truncated Jacobian algebra dimensions, optionally one projective.
    Jacobian {
        source: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        projective: Option<String>,
    },
    /// Supports of every projective `P_k^l`.
    Supports {
        source: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Nice gradings.
    Grading {
        #[command(subcommand)]
        cmd: GradingCmd,
    },
    /// Search for a non-wrapping assignment of the cover's potential.
    Nonwrap {
        #[arg(long)]
        cover: String,
        /// Lift the 24-variable search limit.
        #[arg(long)]
        allow_large: bool,
    },
    /// Build the extended `2ld:1` cyclic cover from a non-wrapping assignment.
    ExtendCover {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        order: usize,
    },
    /// Euler characteristics of quiver Grassmannians and Quot schemes.
    Euler {
        #[command(subcommand)]
        cmd: EulerCmd,
    },
    /// Wall-crossing operators from stability data.
    Theta {
        #[command(subcommand)]
        cmd: ThetaCmd,
    },
    /// Rank-2 cluster scattering diagrams.
    Rank2 {
        #[command(subcommand)]
        cmd: Rank2Cmd,
    },
    /// Restrict the cover's initial cluster walls and compare with the folded seed.
    RestrictWalls {
        #[arg(long)]
        cover: String,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Triangulated surfaces.
    Surface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
    /// Built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        cmd: FixturesCmd,
    },
}

#[derive(Subcommand, Debug)]
enum GradingCmd {
    /// Bounded search for a nice grading of `P_K^L` on the cover.
    Nice {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1)]
        bound: usize,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Loc,
    Ff,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Loc => MethodChoice::Localization,
            MethodArg::Ff => MethodChoice::FiniteField,
        }
    }
}

#[derive(Args, Debug)]
struct EulerArgs {
    source: String,
    #[arg(long)]
    vertex: String,
    /// Dimension vector, comma-separated in vertex order.
    #[arg(long)]
    dim: String,
    /// Truncation order of `P_K^l` (default: `max(|n| − 1, 1)`).
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Gr,
    Quot,
}

#[derive(Subcommand, Debug)]
enum EulerCmd {
    /// `χ(Gr_n(P_K^l))`.
    Gr(EulerArgs),
    /// `χ(Quot_n(P_K^l))`.
    Quot(EulerArgs),
    /// Base value against the fiber sum over the cover.
    CompareCover {
        #[arg(long)]
        cover: String,
        /// A single base dimension vector; otherwise all with `1 ≤ |n̄| ≤ max-total`.
        #[arg(long)]
        dim: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_total: usize,
        /// Total vertex `k`; default one vertex over each base vertex.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Gr)]
        mode: ModeArg,
        /// Truncation order in Gr mode (default: max-total).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
}

#[derive(Subcommand, Debug)]
enum ThetaCmd {
    /// `θ(x_i) = x_i Σ χ(Quot_n(P_i)) x^{p*(n)}` up to the given order.
    Stability {
        #[arg(default_value = "torus1p")]
        source: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        principal: bool,
        /// Take the projectives over the opposite quiver with potential.
        #[arg(long)]
        opposite: bool,
    },
    /// Projected cover θ against base θ, principal coefficients, opposite algebras.
    Compare {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Rank2Cmd {
    /// Consistent completion of the initial cluster walls.
    Complete {
        #[arg(default_value = "kronecker")]
        source: String,
        #[arg(long)]
        order: usize,
    },
    /// Completion followed by the loop check and the comparison with order − 1.
    Loopcheck {
        #[arg(default_value = "kronecker")]
        source: String,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SurfaceCmd {
    /// Cyclic cover of a once-punctured surface, written as a `.qp` document.
    Cover {
        #[arg(long)]
        fixture: String,
        #[arg(long)]
        sheets: usize,
        /// Arc along which the surface is cut.
        #[arg(long, default_value = "b")]
        arc: String,
    },
}

#[derive(Subcommand, Debug)]
enum FixturesCmd {
    /// Names of the built-in fixtures.
    List,
    /// A fixture written as a `.qp` document.
    Show { name: String },
}

/// A finished report: exit code, human text and JSON.
struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: i32, text: String, json: Value) -> Self {
        Report { code, text, json }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) | Error::Resource(_) => 3,
        _ => 2,
    }
}

fn configure_threads() {
    if let Ok(s) = std::env::var("QPCOVER_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n > 0 {
                // a second configuration attempt in the same process is harmless
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    configure_threads();
    match dispatch(&cli.command) {
        Ok(r) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&r.json).expect("json");
                s.push('\n');
                s
            } else {
                r.text
            };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = exit_code(&e);
            let stdout = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&json!({ "error": e.to_string(), "exit": code })).expect("json"))
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Validate { source } => validate(source),
        Command::Jacobian { source, order, projective } => jacobian(source, *order, projective.as_deref()),
        Command::Supports { source, order } => supports(source, *order),
        Command::Grading { cmd: GradingCmd::Nice { cover, vertex, order, bound } } => {
            grading_nice(cover, vertex, *order, *bound)
        }
        Command::Nonwrap { cover, allow_large } => nonwrap(cover, *allow_large),
        Command::ExtendCover { cover, order } => extend_cover(cover, *order),
        Command::Euler { cmd } => match cmd {
            EulerCmd::Gr(a) => euler_single(a, false),
            EulerCmd::Quot(a) => euler_single(a, true),
            EulerCmd::CompareCover { cover, dim, max_total, vertex, mode, order, method } => {
                compare_cover(cover, dim.as_deref(), *max_total, vertex.as_deref(), *mode, *order, (*method).into())
            }
        },
        Command::Theta { cmd } => match cmd {
            ThetaCmd::Stability { source, order, principal, opposite } => {
                theta_stability_cmd(source, *order, *principal, *opposite)
            }
            ThetaCmd::Compare { cover, order } => theta_compare(cover, *order),
        },
        Command::Rank2 { cmd } => match cmd {
            Rank2Cmd::Complete { source, order } => rank2(source, *order, false),
            Rank2Cmd::Loopcheck { source, order } => rank2(source, *order, true),
        },
        Command::RestrictWalls { cover, order } => restrict(cover, *order),
        Command::Surface { cmd: SurfaceCmd::Cover { fixture, sheets, arc } } => surface_cover(fixture, *sheets, arc),
        Command::Fixtures { cmd } => match cmd {
            FixturesCmd::List => fixtures_list(),
            FixturesCmd::Show { name } => fixtures_show(name),
        },
    }
}

/// Left-aligned table with a header rule.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> =
            cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
    }
    out
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn ids(q: &Quiver) -> Vec<String> {
    q.vertices().iter().map(|v| v.id.clone()).collect()
}

fn validate(source: &str) -> Result<Report> {
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    let mut check_cover = |name: &str, c: &QuiverCovering, rows: &mut Vec<Vec<String>>| {
        let v = c.violations();
        rows.push(vec![
            "cover".into(),
            name.into(),
            format!("{}:1, {} -> {} vertices", c.order, c.total.num_vertices(), c.base.num_vertices()),
            if v.is_empty() { "ok".into() } else { format!("{} violations", v.len()) },
        ]);
        bad.extend(v.into_iter().map(|m| format!("{name}: {m}")));
    };
    if source.ends_with(".qp") || source.contains(".qp:") {
        let path = source.split(".qp").next().expect("split").to_string() + ".qp";
        let doc = sources::load_document(&path)?;
        for (name, q) in &doc.quivers {
            rows.push(vec!["quiver".into(), name.clone(), format!("{} vertices, {} arrows", q.num_vertices(), q.num_arrows()), "ok".into()]);
        }
        for p in &doc.potentials {
            rows.push(vec!["potential".into(), p.name.clone(), format!("{} terms on {}", p.potential.terms().len(), p.quiver), "ok".into()]);
        }
        for c in &doc.covers {
            check_cover(&c.name, &c.covering, &mut rows);
        }
        for s in &doc.seeds {
            rows.push(vec!["seed".into(), s.name.clone(), format!("rank {}", s.seed.len()), "ok".into()]);
        }
    } else {
        let f = fixture::<Rational>(source)?;
        rows.push(vec!["quiver".into(), f.name.clone(), format!("{} vertices, {} arrows", f.quiver.num_vertices(), f.quiver.num_arrows()), "ok".into()]);
        rows.push(vec!["potential".into(), f.name.clone(), format!("{} terms", f.potential.terms().len()), "ok".into()]);
        if let Some(c) = &f.cover {
            check_cover(&f.name, c, &mut rows);
        }
    }
    let code = if bad.is_empty() { 0 } else { 1 };
    let mut text = table(&["kind", "name", "summary", "status"], &rows);
    for b in &bad {
        writeln!(text, "violation: {b}").expect("string");
    }
    let json = json!({
        "command": "validate",
        "objects": rows.iter().map(|r| json!({"kind": r[0], "name": r[1], "summary": r[2], "status": r[3]})).collect::<Vec<_>>(),
        "violations": bad,
        "holds": code == 0,
    });
    Ok(Report::new(code, text, json))
}

fn jacobian(source: &str, order: usize, projective: Option<&str>) -> Result<Report> {
    let qp = load_qp(source)?;
    let alg = TruncatedJacobian::build(&qp.quiver, &qp.potential, order)?;
    let q = &qp.quiver;
    let n = q.num_vertices();
    let mut rows = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let d = alg.block_dim(s, t);
            if d > 0 {
                rows.push(vec![q.vertex(s).id.clone(), q.vertex(t).id.clone(), d.to_string()]);
            }
        }
    }
    let mut text = format!("{}: dim A^{order} = {}\n\n", qp.label, alg.dim());
    text.push_str(&table(&["source", "target", "dim"], &rows));
    let mut json = json!({
        "command": "jacobian",
        "source": qp.label,
        "order": order,
        "dim": alg.dim(),
        "blocks": rows.iter().map(|r| json!({"source": r[0], "target": r[1], "dim": r[2].parse::<usize>().expect("int")})).collect::<Vec<_>>(),
    });
    if let Some(k) = projective {
        let kv = sources::vertex(q, k)?;
        let p = alg.projective(kv);
        let dv = p.dim_vector(n);
        let basis: Vec<String> = p.paths.iter().map(|x| q.fmt_path(x)).collect();
        writeln!(text, "\nP_{k}: dim {} , dimension vector ({}) over ({})", p.dim(), fmt_vec(&dv), ids(q).join(",")).expect("string");
        for b in &basis {
            writeln!(text, "  {b}").expect("string");
        }
        json["projective"] = json!({"vertex": k, "dim": p.dim(), "vertex_order": ids(q), "dimension_vector": dv, "basis": basis});
    }
    Ok(Report::new(0, text, json))
}

fn supports(source: &str, order: usize) -> Result<Report> {
    let qp = load_qp(source)?;
    let q = &qp.quiver;
    let alg = TruncatedJacobian::build(q, &qp.potential, order)?;
    let mut rows = Vec::new();
    let mut js = Vec::new();
    for k in 0..q.num_vertices() {
        let sup = alg.projective(k).supports(q.num_vertices());
        let vs: Vec<String> = sup.vertices.iter().map(|&v| q.vertex(v).id.clone()).collect();
        let as_: Vec<String> = sup.arrows.iter().map(|&a| q.arrow(a).id.clone()).collect();
        rows.push(vec![q.vertex(k).id.clone(), vs.join(" "), as_.join(" ")]);
        js.push(json!({"vertex": q.vertex(k).id, "support_vertices": vs, "support_arrows": as_}));
    }
    let text = format!("{}: supports of P_k^{order}\n\n{}", qp.label, table(&["k", "vertices", "arrows"], &rows));
    Ok(Report::new(0, text, json!({"command": "supports", "source": qp.label, "order": order, "projectives": js})))
}

fn grading_nice(cover: &str, vertex: &str, order: usize, bound: usize) -> Result<Report> {
    let cs = load_cover(cover)?;
    let c = &cs.covering;
    let w = c.sigma_potential(&cs.base_potential);
    let k = sources::vertex(&c.total, vertex)?;
    let alg = TruncatedJacobian::build(&c.total, &w, order)?;
    let sup = alg.projective(k).supports(c.total.num_vertices());
    let found = find_nice_grading(c, &sup, k, bound)?;
    match found {
        Some(g) => {
            let vrows: Vec<Vec<String>> =
                g.vertices.iter().map(|(&v, d)| vec![c.total.vertex(v).id.clone(), d.to_string()]).collect();
            let arows: Vec<Vec<String>> =
                g.arrows.iter().map(|(&a, d)| vec![c.base.arrow(a).id.clone(), d.to_string()]).collect();
            let text = format!(
                "nice grading of P_{vertex}^{order} on {} (bound {bound})\n\n{}\n{}",
                cs.label,
                table(&["vertex", "degree"], &vrows),
                table(&["base arrow", "degree"], &arows)
            );
            let json = json!({
                "command": "grading nice", "cover": cs.label, "vertex": vertex, "order": order, "bound": bound,
                "found": true,
                "vertex_degrees": vrows.iter().map(|r| json!({"vertex": r[0], "degree": r[1].parse::<i64>().expect("int")})).collect::<Vec<_>>(),
                "arrow_degrees": arows.iter().map(|r| json!({"arrow": r[0], "degree": r[1].parse::<i64>().expect("int")})).collect::<Vec<_>>(),
            });
            Ok(Report::new(0, text, json))
        }
        None => Ok(Report::new(
            1,
            format!("no nice grading of P_{vertex}^{order} on {} within bound {bound}\n", cs.label),
            json!({"command": "grading nice", "cover": cs.label, "vertex": vertex, "order": order, "bound": bound, "found": false}),
        )),
    }
}

fn nonwrap(cover: &str, allow_large: bool) -> Result<Report> {
    let cs = load_cover(cover)?;
    let c = &cs.covering;
    let w = c.sigma_potential(&cs.base_potential);
    let shifts = c.shifts()?;
    match check_non_wrapping(c, &w, allow_large)? {
        Some(wa) => {
            let rows: Vec<Vec<String>> = wa
                .degrees
                .iter()
                .map(|(&a, d)| vec![c.base.arrow(a).id.clone(), shifts[a].to_string(), d.to_string()])
                .collect();
            let text = format!("non-wrapping assignment for {}\n\n{}", cs.label, table(&["base arrow", "shift", "degree"], &rows));
            let json = json!({
                "command": "nonwrap", "cover": cs.label, "found": true,
                "assignment": rows.iter().map(|r| json!({"arrow": r[0], "shift": r[1].parse::<i64>().expect("int"), "degree": r[2].parse::<i64>().expect("int")})).collect::<Vec<_>>(),
            });
            Ok(Report::new(0, text, json))
        }
        None => Ok(Report::new(
            1,
            format!("no assignment: the potential of {} wraps\n", cs.label),
            json!({"command": "nonwrap", "cover": cs.label, "found": false}),
        )),
    }
}

fn extend_cover(cover: &str, order: usize) -> Result<Report> {
    let cs = load_cover(cover)?;
    let c = &cs.covering;
    let w = c.sigma_potential(&cs.base_potential);
    let wa = check_non_wrapping(c, &w, false)?
        .ok_or_else(|| Error::Rejected(format!("the potential of {} wraps; no extended cover", cs.label)))?;
    let ext = build_extended_cyclic_cover(c, &wa, order)?;
    let v1 = ext.covering.violations();
    let v2 = ext.factor.violations();
    let closed = ext.covering.lifts_closed(&cs.base_potential);
    let holds = v1.is_empty() && v2.is_empty() && closed;
    let rows: Vec<Vec<String>> = ext
        .degrees
        .iter()
        .enumerate()
        .map(|(a, d)| vec![c.base.arrow(a).id.clone(), d.to_string()])
        .collect();
    let text = format!(
        "extended cover of {}: order {} ({} vertices, {} arrows), factor order {}\ncovering valid: {}\nfactor valid: {}\npotential lifts to cycles: {}\n\n{}",
        cs.label,
        ext.covering.order,
        ext.covering.total.num_vertices(),
        ext.covering.total.num_arrows(),
        ext.factor.order,
        v1.is_empty(),
        v2.is_empty(),
        closed,
        table(&["base arrow", "degree"], &rows)
    );
    let json = json!({
        "command": "extend-cover", "cover": cs.label, "order": ext.covering.order,
        "vertices": ext.covering.total.num_vertices(), "arrows": ext.covering.total.num_arrows(),
        "factor_order": ext.factor.order, "covering_valid": v1.is_empty(), "factor_valid": v2.is_empty(),
        "lifts_closed": closed, "holds": holds,
        "degrees": rows.iter().map(|r| json!({"arrow": r[0], "degree": r[1].parse::<i64>().expect("int")})).collect::<Vec<_>>(),
    });
    Ok(Report::new(if holds { 0 } else { 1 }, text, json))
}

fn method_json(r: &EulerResult) -> (String, Value) {
    match &r.method {
        Method::Localization { fixed_points } => {
            (format!("localization ({fixed_points} fixed points)"), json!({"kind": "localization", "fixed_points": fixed_points}))
        }
        Method::FiniteField(cert) => {
            let poly: Vec<String> = cert.polynomial.iter().map(fmt_rational).collect();
            (
                format!("finite-field oracle, counts {:?}, polynomial [{}], held-out ok: {}", cert.counts, poly.join(", "), cert.held_out_ok),
                json!({"kind": "finite_field", "counts": cert.counts, "polynomial": poly, "held_out_ok": cert.held_out_ok}),
            )
        }
    }
}

fn euler_single(a: &EulerArgs, quot: bool) -> Result<Report> {
    let qp = load_qp(&a.source)?;
    let q = &qp.quiver;
    let k = sources::vertex(q, &a.vertex)?;
    let n = sources::dim_vector(&a.dim, q.num_vertices())?;
    let order = a.order.unwrap_or_else(|| quot_order(&n));
    let alg = TruncatedJacobian::build(q, &qp.potential, order)?;
    let p = alg.projective(k);
    let r = if quot { euler_quot(&p.module, &n, a.method.into())? } else { euler_gr(&p.module, &n, a.method.into())? };
    let kind = if quot { "Quot" } else { "Gr" };
    let (mtext, mjson) = method_json(&r);
    let text = format!(
        "χ({kind}_({})(P_{}^{order})) = {}\nvertex order: {}\nmethod: {mtext}\n",
        fmt_vec(&n),
        a.vertex,
        r.value,
        ids(q).join(",")
    );
    let json = json!({
        "command": format!("euler {}", kind.to_lowercase()), "source": qp.label, "vertex": a.vertex,
        "vertex_order": ids(q), "dim": n, "order": order, "value": r.value, "method": mjson,
    });
    Ok(Report::new(0, text, json))
}

fn compare_cover(
    cover: &str,
    dim: Option<&str>,
    max_total: usize,
    vertex: Option<&str>,
    mode: ModeArg,
    order: Option<usize>,
    choice: MethodChoice,
) -> Result<Report> {
    let cs = load_cover(cover)?;
    let c = &cs.covering;
    let nb = c.base.num_vertices();
    let ks: Vec<usize> = match vertex {
        Some(v) => vec![sources::vertex(&c.total, v)?],
        None => (0..nb).filter_map(|b| c.vertex_fiber(b).first().copied()).collect(),
    };
    let nbars: Vec<Vec<usize>> = match dim {
        Some(d) => vec![sources::dim_vector(d, nb)?],
        None => (1..=max_total).flat_map(|t| compositions(t, &vec![t; nb])).collect(),
    };
    let pmode = match mode {
        ModeArg::Gr => ProjectionMode::Gr { order: order.unwrap_or(max_total.max(1)) },
        ModeArg::Quot => ProjectionMode::Quot,
    };
    let mut rows = Vec::new();
    let mut js = Vec::new();
    let mut all = true;
    for &k in &ks {
        for nbar in &nbars {
            let r = verify_projection_euler(c, &cs.base_potential, k, nbar, pmode, choice)?;
            all &= r.holds;
            let terms: Vec<String> = r.cover_terms.iter().map(|(_, v)| v.to_string()).collect();
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            rows.push(vec![
                c.total.vertex(k).id.clone(),
                format!("({})", fmt_vec(nbar)),
                r.base_value.to_string(),
                rhs.clone(),
                r.cover_sum.to_string(),
                if r.holds { "yes".into() } else { "NO".into() },
            ]);
            js.push(json!({
                "vertex": c.total.vertex(k).id, "nbar": nbar, "base": r.base_value,
                "cover_terms": r.cover_terms.iter().map(|(n, v)| json!({"n": n, "chi": v})).collect::<Vec<_>>(),
                "cover_sum": r.cover_sum, "nice_grading_found": r.nice_grading_found, "holds": r.holds,
            }));
        }
    }
    let mode_name = match pmode {
        ProjectionMode::Gr { order } => format!("Gr, order {order}"),
        ProjectionMode::Quot => "Quot".to_string(),
    };
    let text = format!(
        "projection identity on {} ({mode_name}); base vertex order {}\n\n{}",
        cs.label,
        ids(&c.base).join(","),
        table(&["k", "nbar", "base", "fiber terms", "sum", "holds"], &rows)
    );
    let json = json!({"command": "euler compare-cover", "cover": cs.label, "mode": mode_name, "base_vertex_order": ids(&c.base), "rows": js, "holds": all});
    Ok(Report::new(if all { 0 } else { 1 }, text, json))
}

fn series_names(seed: &Seed<Rational>) -> Vec<String> {
    seed.unfrozen().iter().map(|&k| format!("y_{}", seed.ids[k])).collect()
}

fn theta_stability_cmd(source: &str, order: usize, principal: bool, opposite: bool) -> Result<Report> {
    let qp = load_qp(source)?;
    let th = theta_stability(&qp.quiver, &qp.potential, &qp.seed, order, principal, opposite)?;
    let names = series_names(&th.seed);
    let mut rows = Vec::new();
    let mut js = Vec::new();
    for (i, s) in th.images.iter().enumerate() {
        let f = format_series(s, &names);
        rows.push(vec![th.seed.ids[i].clone(), f.clone()]);
        js.push(json!({
            "index": th.seed.ids[i], "frozen": th.seed.frozen[i], "series": f,
            "coefficients": s.coeffs.iter().map(|(n, c)| json!({"n": n, "c": c.to_string()})).collect::<Vec<_>>(),
        }));
    }
    let header = if th.is_identity() { "identity" } else { "θ(x_i) = x_i · S_i" };
    let text = format!(
        "stability θ of {} at order {order}{}{}: {header}\ny_k stands for x^(p*(e_k))\n\n{}",
        qp.label,
        if principal { ", principal" } else { "" },
        if opposite { ", opposite" } else { "" },
        table(&["i", "S_i"], &rows)
    );
    let json = json!({
        "command": "theta stability", "source": qp.label, "order": order, "principal": principal,
        "opposite": opposite, "identity": th.is_identity(), "unfrozen_order": names, "images": js,
    });
    Ok(Report::new(0, text, json))
}

fn theta_compare(cover: &str, order: usize) -> Result<Report> {
    let cs = load_cover(cover)?;
    let sc = quiver_seed_covering::<Rational>(&cs.covering)?;
    let r = compare_theta_covering(&cs.covering, &sc, &cs.base_potential, order)?;
    let rows: Vec<Vec<String>> = r
        .discrepancies
        .iter()
        .map(|d| vec![d.index.clone(), format!("({})", fmt_vec(&d.n)), d.base.to_string(), d.projected.to_string()])
        .collect();
    let names = series_names(&sc.base);
    let mut text = format!(
        "θ comparison for {} at order {order}: {} coefficients compared, {} discrepancies\n",
        cs.label,
        r.compared,
        rows.len()
    );
    for (i, s) in r.base.images.iter().enumerate().filter(|(i, _)| !r.base.seed.frozen[*i]) {
        writeln!(text, "  S_{} = {}", r.base.seed.ids[i], format_series(s, &names)).expect("string");
    }
    text.push('\n');
    text.push_str(&table(&["index", "n", "base", "projected"], &rows));
    let json = json!({
        "command": "theta compare", "cover": cs.label, "order": order, "compared": r.compared,
        "unfrozen_order": names,
        "discrepancies": r.discrepancies.iter().map(|d| json!({"index": d.index, "n": d.n, "base": d.base.to_string(), "projected": d.projected.to_string()})).collect::<Vec<_>>(),
        "holds": r.holds(),
    });
    Ok(Report::new(if r.holds() { 0 } else { 1 }, text, json))
}

fn fmt_support(s: Support) -> String {
    match s {
        Support::Line(u) => format!("line ({},{})", u[0], u[1]),
        Support::Ray(u) => format!("ray ({},{})", u[0], u[1]),
    }
}

fn wall_rows(walls: &[Wall2D<Rational>], order: usize) -> (Vec<Vec<String>>, Vec<Value>) {
    let mut rows = Vec::new();
    let mut js = Vec::new();
    for w in sorted_walls(walls) {
        let d0: usize = w.n0.iter().map(|&x| x as usize).sum::<usize>().max(1);
        let f = w.function(order / d0);
        let fs = format_series(&f, &["z".to_string()]);
        let ham: Vec<String> = w.hamiltonian.iter().map(|(j, h)| format!("{j}:{h}")).collect();
        rows.push(vec![
            format!("({})", fmt_vec(&w.n0)),
            fmt_support(w.support),
            if w.incoming { "in".into() } else { "out".into() },
            fs.clone(),
        ]);
        js.push(json!({
            "n0": w.n0, "support": fmt_support(w.support), "incoming": w.incoming,
            "hamiltonian": ham, "function": fs,
        }));
    }
    (rows, js)
}

fn rank2(source: &str, order: usize, check: bool) -> Result<Report> {
    let qp = load_qp(source)?;
    let seed = &qp.seed;
    let walls = initial_cluster_walls(seed, order)?;
    let d = rank2_complete(seed, &walls, order)?;
    let nontrivial: Vec<Wall2D<Rational>> = d.nontrivial_walls().into_iter().cloned().collect();
    let (rows, js) = wall_rows(&nontrivial, order);
    let consistent = d.is_consistent()?;
    let mut text = format!(
        "rank-2 completion of {} at order {order}: {} nontrivial walls, {} added\nwall functions f(z) with z = y^n0; directions in the basis dual to e_k\n\n{}",
        qp.label,
        nontrivial.len(),
        nontrivial.iter().filter(|w| !w.incoming).count(),
        table(&["n0", "support", "kind", "f(z)"], &rows)
    );
    let mut json = json!({"command": if check { "rank2 loopcheck" } else { "rank2 complete" }, "source": qp.label, "order": order, "walls": js, "consistent": consistent});
    let mut holds = consistent;
    writeln!(text, "\nloop product is the identity: {consistent}").expect("string");
    if check && order >= 1 {
        let lower = rank2_complete(seed, &initial_cluster_walls(seed, order - 1)?, order - 1)?;
        let coherent = sorted_walls(&d.truncate(order - 1).walls) == sorted_walls(&lower.walls);
        let half: RankTwoDiagram<Rational> = d.clone();
        let theta = half.theta_minus_plus()?;
        let names = series_names(seed);
        writeln!(text, "truncation to order {} equals the order-{} completion: {coherent}", order - 1, order - 1).expect("string");
        for (i, s) in theta.images.iter().enumerate() {
            writeln!(text, "θ_(-,+)(x_{}) = x_{} · ({})", seed.ids[i], seed.ids[i], format_series(s, &names)).expect("string");
        }
        json["order_coherent"] = json!(coherent);
        holds &= coherent;
    }
    json["holds"] = json!(holds);
    Ok(Report::new(if holds { 0 } else { 1 }, text, json))
}

fn restrict(cover: &str, order: usize) -> Result<Report> {
    let cs = load_cover(cover)?;
    let sc = quiver_seed_covering::<Rational>(&cs.covering)?;
    let restricted = restrict_walls(&sc, &initial_cluster_hyperplanes(&sc.total, order))?;
    let folded: Vec<_> = initial_cluster_walls(&sc.base, order)?.into_iter().filter(|w| !w.is_trivial()).collect();
    let holds = sorted_walls(&restricted) == sorted_walls(&folded);
    let (r1, j1) = wall_rows(&restricted, order);
    let (r2, j2) = wall_rows(&folded, order);
    let dbar: Vec<String> = sc.base.d.iter().map(|d| d.to_string()).collect();
    let text = format!(
        "restriction of the initial cluster walls of {} at order {order}\nfolded seed d = ({})\n\nrestricted:\n{}\nfolded initial walls:\n{}\nequal: {holds}\n",
        cs.label,
        dbar.join(","),
        table(&["n0", "support", "kind", "f(z)"], &r1),
        table(&["n0", "support", "kind", "f(z)"], &r2)
    );
    let json = json!({"command": "restrict-walls", "cover": cs.label, "order": order, "folded_d": dbar, "restricted": j1, "folded": j2, "holds": holds});
    Ok(Report::new(if holds { 0 } else { 1 }, text, json))
}

fn surface_cover(name: &str, sheets: usize, arc: &str) -> Result<Report> {
    let base = match name {
        "torus1p" => torus1p(),
        "sphere4" => qpcover::surface::sphere4(),
        other => return Err(Error::Structural(format!("`{other}` is not a surface fixture"))),
    };
    let cov = cyclic_surface_cover(&base, sheets, arc)?;
    let bsq = base.adjacency_quiver()?;
    let wbar = surface_potential::<Rational>(&bsq, &[Rational::from_integer(1.into())])?;
    let violations = cov.covering.violations();
    let label = format!("{name}-cover{sheets}");
    let doc = covering_document(&label, &cov.covering, Some(&wbar));
    let text = serialize_document(&doc)?;
    let json = json!({
        "command": "surface cover", "fixture": name, "sheets": sheets, "arc": arc,
        "vertices": cov.covering.total.num_vertices(), "arrows": cov.covering.total.num_arrows(),
        "valid": violations.is_empty(), "document": text,
    });
    Ok(Report::new(if violations.is_empty() { 0 } else { 1 }, text, json))
}

fn fixtures_list() -> Result<Report> {
    let mut rows = Vec::new();
    for &n in NAMES {
        let probe = if n.contains('<') { n.replace("<d>", "2") } else { n.to_string() };
        let f = fixture::<Rational>(&probe)?;
        rows.push(vec![
            n.to_string(),
            f.quiver.num_vertices().to_string(),
            f.quiver.num_arrows().to_string(),
            f.potential.terms().len().to_string(),
            f.cover.as_ref().map_or("-".to_string(), |c| format!("{}:1", c.order)),
        ]);
    }
    let text = table(&["name", "vertices", "arrows", "terms", "cover"], &rows);
    let json = json!({"command": "fixtures list", "fixtures": rows.iter().map(|r| json!({"name": r[0], "vertices": r[1], "arrows": r[2], "terms": r[3], "cover": r[4]})).collect::<Vec<_>>()});
    Ok(Report::new(0, text, json))
}

fn fixtures_show(name: &str) -> Result<Report> {
    let f = fixture::<Rational>(name)?;
    let doc = match &f.cover {
        Some(c) => covering_document(name, c, f.base_potential.as_ref()),
        None => {
            let mut d: Document<Rational> = Document::default();
            d.quivers.push((name.to_string(), f.quiver.clone()));
            d.potentials.push(NamedPotential { name: format!("{name}_W"), quiver: name.to_string(), potential: f.potential.clone() });
            d
        }
    };
    let text = serialize_document(&doc)?;
    Ok(Report::new(0, text.clone(), json!({"command": "fixtures show", "name": name, "document": text})))
}
