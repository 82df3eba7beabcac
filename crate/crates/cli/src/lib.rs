//! Command-line front end: argument parsing, file I/O and report printing.
//!
//! Exit status: 0 when the object verifies or the parameters are feasible,
//! 1 on a violation or infeasibility, 2 on usage or I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use lssd_core::designs::{validate_params, DesignParams};
use lssd_core::exact::{RatMatrix, Rational};
use lssd_core::feasibility::families::{indices_for_range, primary_index, screen_family, RowOutcome, FAMILY_COUNT};
use lssd_core::feasibility::{bounds, screen_params, ScreenVerdict};
use lssd_core::geometry::{equiangular_gram, mub_gram};
use lssd_core::gf2kerdock::{cameron_seidel_lssd, golden_kerdock_n4, search_kerdock_family, KerdockFamily};
use lssd_core::hadamard_oa::{
    beth_wocjan_unbiased_set, golden_h36, golden_h4, golden_oa16, hadamards_from_lssd, lssd_from_unbiased_hadamards,
    macneish_product, mols_oa, sylvester, HadamardMatrix, OrthogonalArray, UnbiasedHadamardSet,
};
use lssd_core::lssd::{degenerate_lssd, mu_nu, verify_lssd, LssdGraph, LssdReport};
use lssd_core::scheme::{q111, relation_matrices, scheme_tables, verify_scheme};
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

pub mod format;

use format::{gram_to_json, FormatError, LssdDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lssd",
    about = "Exact construction and verification of linked systems of symmetric designs"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a linked system and write it as a JSON document.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Check the LSSD axioms, and optionally the association scheme.
    Verify {
        graph: PathBuf,
        /// Also verify the relation algebra and print P, Q and Krein tables.
        #[arg(long)]
        scheme: bool,
    },
    /// Check the ordered-pair property of an orthogonal array file.
    VerifyOa { oa: String },
    /// Integrality screen for a parameter triple or a classical family.
    Screen(ScreenArgs),
    /// Upper bounds on the number of fibers.
    Bounds {
        #[arg(long, value_parser = parse_triple)]
        params: (i64, i64, i64),
    },
    /// Derived Euclidean and Hadamard objects.
    Derive {
        #[command(subcommand)]
        what: Derive,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Cameron–Seidel system from a Kerdock set of quadratic forms.
    Kerdock {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Number of fibers; defaults to the maximum 2^(n-1).
        #[arg(long)]
        w: Option<usize>,
        /// Use the embedded n = 4 family instead of searching.
        #[arg(long)]
        embedded_family: bool,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Beth–Wocjan unbiased Hadamards from an orthogonal array and a regular Hadamard.
    BethWocjan {
        /// Array file, or builtin:oa16, builtin:mols:Q, builtin:macneish:Q1,Q2,...
        #[arg(long, default_value = "builtin:oa16")]
        oa: String,
        /// Hadamard file, or builtin:h4, builtin:h36, builtin:sylvester:E.
        #[arg(long, default_value = "builtin:h4")]
        hadamard: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The degenerate system (v, 1, 0; w): every block is the identity.
    Degenerate {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// System from regular unbiased Hadamard matrix files.
    FromHadamards {
        #[arg(required = true)]
        files: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(skip)]
#[command(group(ArgGroup::new("target").required(true).args(["params", "family"])))]
pub struct ScreenArgs {
    #[arg(long, value_parser = parse_triple)]
    pub params: Option<(i64, i64, i64)>,
    #[arg(long, requires = "range")]
    pub family: Option<u8>,
    /// Inclusive range of the family's primary index, written A..B.
    #[arg(long, value_parser = parse_range, requires = "family", conflicts_with = "params")]
    pub range: Option<(u64, u64)>,
}

#[derive(Debug, Subcommand)]
pub enum Derive {
    /// Equiangular lines from the first t fibers.
    Lines {
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gram matrix of the bases attached to each fiber.
    MubGram {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The w-1 unbiased Hadamards of a Menon-parameter system.
    Hadamards {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_triple(s: &str) -> Result<(i64, i64, i64), String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("{x:?} is not an integer")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [v, k, l] => Ok((v, k, l)),
        _ => Err(format!("expected v,k,lambda, got {s:?}")),
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: u64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad range end {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

/// Runs with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx { out, json: cli.json };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    fn emit_json(&mut self, v: &Value) {
        let _ = writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(v).expect("report serializes")
        );
    }
}

fn dispatch(ctx: &mut Ctx, cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Construct { what } => construct(ctx, what),
        Command::Verify { graph, scheme } => verify(ctx, &graph, scheme),
        Command::VerifyOa { oa } => verify_oa(ctx, &oa),
        Command::Screen(args) => screen(ctx, args),
        Command::Bounds { params } => bounds_cmd(ctx, params),
        Command::Derive { what } => derive(ctx, what),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn read_document(path: &Path) -> Result<LssdDocument, CliError> {
    LssdDocument::parse(&read_text(path)?).map_err(|source| CliError::Format {
        path: path.into(),
        source,
    })
}

/// Resolves a `builtin:` name or reads an array file.
pub fn load_oa(src: &str) -> Result<OrthogonalArray, CliError> {
    let Some(name) = src.strip_prefix("builtin:") else {
        let path = Path::new(src);
        return OrthogonalArray::from_text(&read_text(path)?).map_err(|e| CliError::Input(format!("{src}: {e}")));
    };
    let orders = |list: &str| -> Result<Vec<u32>, CliError> {
        list.split(',')
            .map(|q| {
                q.trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad order {q:?} in {src}")))
            })
            .collect()
    };
    if name == "oa16" {
        Ok(golden_oa16())
    } else if let Some(q) = name.strip_prefix("mols:") {
        let q = orders(q)?;
        mols_oa(q[0]).map_err(CliError::input)
    } else if let Some(list) = name.strip_prefix("macneish:") {
        let mut arrays = orders(list)?.into_iter().map(mols_oa);
        let first = arrays
            .next()
            .ok_or_else(|| CliError::Input(format!("{src}: no orders")))?;
        arrays.try_fold(first.map_err(CliError::input)?, |acc, o| {
            Ok(macneish_product(&acc, &o.map_err(CliError::input)?))
        })
    } else {
        Err(CliError::Input(format!("unknown builtin array {name:?}")))
    }
}

pub fn load_hadamard(src: &str) -> Result<HadamardMatrix, CliError> {
    match src.strip_prefix("builtin:") {
        Some("h4") => Ok(golden_h4()),
        Some("h36") => Ok(golden_h36()),
        Some(name) => match name.strip_prefix("sylvester:").and_then(|e| e.parse::<u32>().ok()) {
            Some(e) if e <= 12 => Ok(sylvester(e)),
            _ => Err(CliError::Input(format!("unknown builtin Hadamard {name:?}"))),
        },
        None => {
            HadamardMatrix::from_text(&read_text(Path::new(src))?).map_err(|e| CliError::Input(format!("{src}: {e}")))
        }
    }
}

fn opt_u64(x: Option<u64>) -> String {
    x.map_or("-".into(), |x| x.to_string())
}

fn params_line(p: &DesignParams, w: Option<usize>) -> String {
    let mn = mu_nu(p).ok();
    let mut line = format!(
        "v = {}, k = {}, λ = {}, s = {}, μ = {}, ν = {}",
        p.v,
        p.k,
        p.lambda,
        opt_u64(p.s),
        opt_u64(mn.map(|m| m.mu)),
        opt_u64(mn.map(|m| m.nu))
    );
    if let Some(w) = w {
        line.push_str(&format!(", w = {w}"));
    }
    line
}

fn report_lines(ctx: &mut Ctx, g: &LssdGraph, r: &LssdReport) {
    ctx.line(format!("LSSD {}", params_line(g.params(), Some(g.w()))));
    let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
    ctx.line(format!("  axiom (i)   no edges inside a fiber: {}", mark(r.axiom_i_ok)));
    ctx.line(format!(
        "  axiom (ii)  every block is a design: {}",
        mark(r.axiom_ii_ok)
    ));
    let vac = if r.vacuous_triangles { " (vacuous, w = 2)" } else { "" };
    ctx.line(format!("  axiom (iii) constant μ, ν: {}{vac}", mark(r.axiom_iii_ok)));
    if let (Some(mu), Some(nu)) = (r.observed_mu, r.observed_nu) {
        ctx.line(format!("  observed μ = {mu}, ν = {nu}"));
    }
    if let Some(c) = r.class {
        ctx.line(format!("  class: {c}"));
    }
    for (axiom, witness) in &r.failures {
        ctx.line(format!("  witness for {axiom:?}: {witness:?}"));
    }
    ctx.line(if r.passed() { "verified" } else { "NOT an LSSD" });
}

fn report_json(g: &LssdGraph, r: &LssdReport) -> Value {
    json!({
        "params": g.params(),
        "w": g.w(),
        "report": r,
        "passed": r.passed(),
    })
}

/// Writes the document (to `--out` or standard output) and reports verification.
fn finish_construct(ctx: &mut Ctx, g: LssdGraph, construction: &str, out: Option<PathBuf>) -> Result<i32, CliError> {
    let r = verify_lssd(&g);
    let doc = LssdDocument::with_construction(g, construction);
    let code = if r.passed() { EXIT_OK } else { EXIT_VIOLATION };
    match out {
        Some(path) => {
            write_text(&path, &doc.to_json())?;
            if ctx.json {
                let mut v = report_json(&doc.graph, &r);
                v["out"] = json!(path.display().to_string());
                ctx.emit_json(&v);
            } else {
                report_lines(ctx, &doc.graph, &r);
                ctx.line(format!("wrote {}", path.display()));
            }
        }
        None => {
            let _ = ctx.out.write_all(doc.to_json().as_bytes());
        }
    }
    Ok(code)
}

fn construct(ctx: &mut Ctx, what: Construct) -> Result<i32, CliError> {
    match what {
        Construct::Kerdock {
            n,
            w,
            embedded_family,
            budget,
            out,
        } => {
            let fam = if embedded_family {
                if n != 4 {
                    return Err(CliError::Input(format!("the embedded family has n = 4, not {n}")));
                }
                let mut fam = golden_kerdock_n4();
                if let Some(w) = w {
                    if !(2..=fam.forms.len()).contains(&w) {
                        return Err(CliError::Input(format!("w = {w} outside 2..={}", fam.forms.len())));
                    }
                    fam.forms.truncate(w);
                }
                fam
            } else {
                let target = w.unwrap_or(if (2..=8).contains(&n) { 1 << (n - 1) } else { 0 });
                search_kerdock_family(n, target, budget).map_err(CliError::input)?
            };
            let label = kerdock_label(&fam, embedded_family);
            let g = cameron_seidel_lssd(&fam).map_err(CliError::input)?;
            finish_construct(ctx, g, &label, out)
        }
        Construct::BethWocjan { oa, hadamard, out } => {
            let o = load_oa(&oa)?;
            let h = load_hadamard(&hadamard)?;
            let bw = beth_wocjan_unbiased_set(&o, &h).map_err(CliError::input)?;
            let g = lssd_from_unbiased_hadamards(&bw.set).map_err(CliError::input)?;
            finish_construct(ctx, g, &format!("beth-wocjan oa={oa} hadamard={hadamard}"), out)
        }
        Construct::Degenerate { v, w, out } => {
            let g = degenerate_lssd(v, w).map_err(CliError::input)?;
            finish_construct(ctx, g, "degenerate", out)
        }
        Construct::FromHadamards { files, out } => {
            let mats = files.iter().map(|f| load_hadamard(f)).collect::<Result<Vec<_>, _>>()?;
            let set = UnbiasedHadamardSet::new(mats).map_err(CliError::input)?;
            match lssd_from_unbiased_hadamards(&set) {
                Ok(g) => finish_construct(ctx, g, "from-hadamards", out),
                Err(e) => {
                    ctx.line(format!("refused: {e}"));
                    Ok(EXIT_VIOLATION)
                }
            }
        }
    }
}

fn kerdock_label(fam: &KerdockFamily, embedded: bool) -> String {
    let source = if embedded { "embedded" } else { "search" };
    format!("kerdock n={} w={} ({source})", fam.n, fam.forms.len())
}

fn rat_table(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(Rational::to_string).collect())
        .collect()
}

fn verify(ctx: &mut Ctx, path: &Path, scheme: bool) -> Result<i32, CliError> {
    let doc = read_document(path)?;
    let g = &doc.graph;
    let r = verify_lssd(g);
    let mut ok = r.passed();
    let mut json_out = report_json(g, &r);
    if !ctx.json {
        report_lines(ctx, g, &r);
    }
    if scheme {
        let sr = verify_scheme(g).map_err(CliError::input)?;
        ok &= sr.passed();
        let refusal = relation_matrices(g).err().map(|e| e.to_string());
        let tables = scheme_tables(g.params(), g.w());
        if ctx.json {
            let mut s = json!({ "report": sr, "passed": sr.passed(), "refusal": refusal });
            if let Ok(t) = &tables {
                s["tables"] = json!({
                    "intersection": t.l,
                    "P": rat_table(&t.p),
                    "Q": rat_table(&t.q),
                    "Lstar1": rat_table(&t.lstar1),
                    "Lstar3": rat_table(&t.lstar3),
                    "multiplicities": t.multiplicities,
                });
            }
            json_out["scheme"] = s;
        } else {
            ctx.line("Association scheme");
            if let Some(reason) = &refusal {
                ctx.line(format!("  refused: {reason}"));
            }
            let mark = |b: bool| if b { "ok" } else { "FAILED" };
            ctx.line(format!("  relation algebra: {}", mark(sr.algebra_ok)));
            if let Some(w) = sr.algebra_witness {
                ctx.line(format!("    first failing (i, j, x, y): {w:?}"));
            }
            ctx.line(format!("  PQ = vwI: {}", mark(sr.eigen_ok)));
            ctx.line(format!("  Krein conditions: {}", mark(sr.krein_ok)));
            if let Some(e) = &sr.krein_error {
                ctx.line(format!("    {e}"));
            }
            ctx.line(format!("  Q-polynomial: {}", mark(sr.q_polynomial)));
            match sr.q_antipodal {
                Some(b) => ctx.line(format!("  Q-antipodal: {}", mark(b))),
                None => ctx.line("  Q-antipodal: not checked (w = 2)"),
            }
            if let Ok(t) = &tables {
                ctx.line(format!("  multiplicities m0..m3 = {:?}", t.multiplicities));
                let _ = write!(ctx.out, "  P (rows E0..E3, columns A0..A3):\n{}", t.p);
                let _ = write!(ctx.out, "  Q (rows A0..A3, columns E0..E3):\n{}", t.q);
                let _ = write!(ctx.out, "  L1* (q^k_1j at row k, column j):\n{}", t.lstar1);
                let _ = write!(ctx.out, "  L3* (q^k_3j at row k, column j):\n{}", t.lstar3);
                let q = t.krein.get(1, 1, 1);
                ctx.line(format!(
                    "  q^1_11 = {q}{}",
                    if q.is_zero() { " (Krein bound tight)" } else { "" }
                ));
            }
            ctx.line(if sr.passed() {
                "scheme verified"
            } else {
                "scheme NOT verified"
            });
        }
    }
    if ctx.json {
        json_out["passed"] = json!(ok);
        ctx.emit_json(&json_out);
    }
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn verify_oa(ctx: &mut Ctx, src: &str) -> Result<i32, CliError> {
    let o = load_oa(src)?;
    let res = o.check();
    if ctx.json {
        ctx.emit_json(&json!({
            "n": o.n(),
            "cols": o.cols(),
            "passed": res.is_ok(),
            "error": res.as_ref().err().map(|e| e.to_string()),
        }));
    } else {
        ctx.line(format!("OA({}, {}) with {} symbols", o.rows().len(), o.cols(), o.n()));
        match &res {
            Ok(()) => ctx.line("every column pair meets each ordered symbol pair exactly once"),
            Err(e) => ctx.line(format!("FAILED: {e}")),
        }
    }
    Ok(if res.is_ok() { EXIT_OK } else { EXIT_VIOLATION })
}

fn verdict_text(v: &ScreenVerdict) -> String {
    if v.feasible {
        format!("pass (ν = {}, μ = {})", opt_u64(v.nu), opt_u64(v.mu))
    } else {
        format!("fail: {}", v.notes.join("; "))
    }
}

fn screen(ctx: &mut Ctx, args: ScreenArgs) -> Result<i32, CliError> {
    if let Some((v, k, l)) = args.params {
        let verdict = match validate_params(v, k, l) {
            Ok(p) => screen_params(&p),
            Err(e) => {
                ctx.line(format!("({v}, {k}, {l}) is not a symmetric design triple: {e}"));
                return Ok(EXIT_VIOLATION);
            }
        };
        if ctx.json {
            ctx.emit_json(&json!(verdict));
        } else {
            ctx.line(params_line(&verdict.params, None));
            ctx.line(verdict_text(&verdict));
        }
        return Ok(if verdict.feasible { EXIT_OK } else { EXIT_VIOLATION });
    }
    let family = args.family.expect("clap enforces the group");
    if !(1..=FAMILY_COUNT).contains(&family) {
        return Err(CliError::Input(format!("family must be in 1..={FAMILY_COUNT}")));
    }
    let (a, b) = args.range.expect("clap enforces requires");
    let table = screen_family(family, &indices_for_range(family, a..=b));
    let any_pass = table.rows.iter().any(|r| r.counts() && r.passes());
    if ctx.json {
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| {
                let (params, verdict, failed) = match &r.outcome {
                    RowOutcome::Screened(s) => (
                        json!(s.params),
                        if s.feasible { "pass" } else { "fail" },
                        json!(s.notes),
                    ),
                    RowOutcome::Rejected(e) => (Value::Null, "rejected", json!([e.to_string()])),
                };
                json!({"family": r.family, "indices": r.index, "params": params, "verdict": verdict, "failed": failed})
            })
            .collect();
        ctx.emit_json(&json!({"family": family, "verdict": table.verdict.to_string(), "rows": rows}));
    } else {
        ctx.line(format!("family {family}, {} over {a}..{b}", primary_index(family)));
        ctx.line(format!("{:<18} {:>10} {:>10} {:>10}  verdict", "index", "v", "k", "λ"));
        for r in &table.rows {
            match &r.outcome {
                RowOutcome::Screened(s) => ctx.line(format!(
                    "{:<18} {:>10} {:>10} {:>10}  {}",
                    r.index.to_string(),
                    s.params.v,
                    s.params.k,
                    s.params.lambda,
                    verdict_text(s)
                )),
                RowOutcome::Rejected(e) => ctx.line(format!(
                    "{:<18} {:>10} {:>10} {:>10}  rejected: {e}",
                    r.index.to_string(),
                    "-",
                    "-",
                    "-"
                )),
            }
        }
        ctx.line(format!("summary: {}", table.verdict));
    }
    Ok(if any_pass { EXIT_OK } else { EXIT_VIOLATION })
}

fn bounds_cmd(ctx: &mut Ctx, (v, k, l): (i64, i64, i64)) -> Result<i32, CliError> {
    let p = match validate_params(v, k, l) {
        Ok(p) => p,
        Err(e) => {
            ctx.line(format!("({v}, {k}, {l}) is not a symmetric design triple: {e}"));
            return Ok(EXIT_VIOLATION);
        }
    };
    let pre = bounds(&p, false);
    // q^1_11 vanishes exactly at the Krein bound when that bound is integral.
    let tight = pre
        .krein_w_max
        .as_ref()
        .filter(|w| w.is_integer())
        .and_then(|w| w.to_integer().to_usize())
        .is_some_and(|w| q111(&p, w).is_ok_and(|q| q.is_zero()));
    let b = bounds(&p, tight);
    let noda_max = b
        .noda_full_holds_at_w
        .iter()
        .filter(|(_, ok)| *ok)
        .map(|(w, _)| *w)
        .max();
    if ctx.json {
        ctx.emit_json(&json!({ "bounds": b, "q111_zero": tight, "noda_w_max": noda_max }));
    } else {
        ctx.line(params_line(&p, None));
        ctx.line(format!("  Noda (full inequality): w ≤ {}", opt_u64(noda_max)));
        match &b.krein_w_max {
            Some(w) => ctx.line(format!("  Krein: w ≤ (v−2)s/(2k−v) + 1 = {w}")),
            None => ctx.line("  Krein: no bound (2k ≤ v or s irrational)"),
        }
        let why = if tight { "q^1_11 = 0" } else { "q^1_11 ≠ 0" };
        ctx.line(format!("  absolute: w ≤ {} ({why})", b.absolute_w_max));
        if let Some(m) = b.menon_w_max {
            ctx.line(format!("  Menon: w ≤ {m}"));
        }
        if b.menon_forces_w2 {
            ctx.line("  Menon with u odd forces w = 2");
        }
    }
    Ok(EXIT_OK)
}

fn derive(ctx: &mut Ctx, what: Derive) -> Result<i32, CliError> {
    match what {
        Derive::Lines { graph, t, out } => {
            let doc = read_document(&graph)?;
            let (gram, c) = match equiangular_gram(&doc.graph, t) {
                Ok(x) => x,
                Err(e) => {
                    ctx.line(format!("refused: {e}"));
                    return Ok(EXIT_VIOLATION);
                }
            };
            let text = gram_to_json(&gram);
            let summary = json!({
                "lines": gram.dim,
                "rank": gram.claimed_rank,
                "scale": gram.scale.to_string(),
                "cosine": c.cosine.to_string(),
            });
            emit_artifact(ctx, &text, out.as_deref(), summary, |ctx| {
                ctx.line(format!(
                    "{} equiangular lines in dimension {}, |cos| = {}, Gram scale {}",
                    gram.dim, gram.claimed_rank, c.cosine, gram.scale
                ));
            })
        }
        Derive::MubGram { graph, out } => {
            let doc = read_document(&graph)?;
            let m = match mub_gram(&doc.graph) {
                Ok(m) => m,
                Err(e) => {
                    ctx.line(format!("refused: {e}"));
                    return Ok(EXIT_VIOLATION);
                }
            };
            let text = gram_to_json(&m.gram);
            let summary = json!({
                "dim": m.gram.dim,
                "beta1": m.beta1.to_string(),
                "beta2": m.beta2.to_string(),
                "is_mub": m.is_mub,
            });
            emit_artifact(ctx, &text, out.as_deref(), summary, |ctx| {
                ctx.line(format!(
                    "{} vectors, cross inner products β1 = {}, β2 = {}; mutually unbiased: {}",
                    m.gram.dim,
                    m.beta1,
                    m.beta2,
                    if m.is_mub { "yes" } else { "no" }
                ));
            })
        }
        Derive::Hadamards { graph, out } => {
            let doc = read_document(&graph)?;
            let set = match hadamards_from_lssd(&doc.graph) {
                Ok(s) => s,
                Err(e) => {
                    ctx.line(format!("refused: {e}"));
                    return Ok(EXIT_VIOLATION);
                }
            };
            fs::create_dir_all(&out).map_err(|source| CliError::Io {
                path: out.clone(),
                source,
            })?;
            let mut written = Vec::new();
            for (i, h) in set.matrices().iter().enumerate() {
                let path = out.join(format!("H{}.txt", i + 2));
                write_text(&path, &h.to_text())?;
                written.push(path.display().to_string());
            }
            if ctx.json {
                ctx.emit_json(&json!({ "order": set.order(), "files": written }));
            } else {
                ctx.line(format!(
                    "{} regular pairwise-unbiased Hadamard matrices of order {}",
                    set.len(),
                    set.order()
                ));
                for f in &written {
                    ctx.line(format!("wrote {f}"));
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn emit_artifact(
    ctx: &mut Ctx,
    text: &str,
    out: Option<&Path>,
    summary: Value,
    report: impl FnOnce(&mut Ctx),
) -> Result<i32, CliError> {
    match out {
        Some(path) => {
            write_text(path, text)?;
            if ctx.json {
                ctx.emit_json(&summary);
            } else {
                report(ctx);
                ctx.line(format!("wrote {}", path.display()));
            }
        }
        None => {
            let _ = ctx.out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_OK)
}
