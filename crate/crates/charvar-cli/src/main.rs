//! Batch front end: run the exact counters, assemble E-series, verify the
//! exponential identity and the quiver count identities, and emit
//! machine-readable reports.
//!
//! Exit codes: 0 success, 2 an identity/verification failed, 1 usage or
//! validation error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use charvar::charcount::{
    additive_mu_stack_count, stack_count, surface_circle_stack_count, twisted_count,
    twisted_variety_count, untwisted_count, CountRecord,
};
use charvar::exactq::degree_bound_for;
use charvar::plethys::{
    assemble_eseries_numeric, assemble_eseries_poly, interpolated_count_poly, verify_exp_numeric,
    verify_exp_polynomial, PlethCoeff, Side,
};
use charvar::repscan::{dimred_count_check, gtrue_count_check, morita_count_check};
use charvar::tileforge::{
    arrow_name, builtin_tiling, dual_quiver, find_cuts, potential_of, BraneTiling,
};
use charvar::{Error, Limits};

#[derive(Parser)]
#[command(name = "charvar", version, about = "Exact character-variety counting workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Iteration budget; overrides the CHARVAR_MAX_ITER environment variable.
    #[arg(long, global = true)]
    max_iterations: Option<u128>,
    /// Worker thread count (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    Twisted,
    Untwisted,
    TwistedVariety,
    TwistedStack,
    UntwistedStack,
    SurfaceCircle,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Numeric,
    Polynomial,
}

#[derive(Subcommand)]
enum Command {
    /// One exact count for a rank, genus and finite field.
    Count {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Assemble one side's E-series up to degree N.
    Eseries {
        #[arg(long, value_enum)]
        side: CliSide,
        #[arg(long)]
        g: usize,
        #[arg(long = "N")]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Mode::Numeric)]
        mode: Mode,
        /// Base prime (numeric mode).
        #[arg(long)]
        p: Option<u64>,
    },
    /// Verify Exp(twisted series) = untwisted series up to degree N.
    VerifyExp {
        #[arg(long)]
        g: usize,
        #[arg(long = "N")]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Mode::Numeric)]
        mode: Mode,
        /// Base prime (numeric mode).
        #[arg(long)]
        p: Option<u64>,
    },
    /// Combinatorial summary of a tiling and its dual quiver with potential.
    TilingInfo {
        #[arg(long)]
        tiling: String,
    },
    /// All cuts of the dual quiver's potential, in lexicographic order.
    Cuts {
        #[arg(long)]
        tiling: String,
    },
    /// Check the linear-fiber counting identity for one cut.
    DimredCheck {
        #[arg(long)]
        tiling: String,
        /// Index into the cut list (see `cuts`).
        #[arg(long, default_value_t = 0)]
        cut_index: usize,
        /// Dimension at every quiver vertex.
        #[arg(long)]
        gamma: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Compare the reduced-algebra stack count with the untwisted stack count.
    MoritaCheck {
        #[arg(long)]
        tiling: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Compare the localized-algebra stack count with the surface x circle count.
    GtrueCheck {
        #[arg(long)]
        tiling: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Additive commutator-fiber stack count at the origin.
    MuCount {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Run the full acceptance suite.
    Audit {
        /// Run a single criterion (1-11).
        #[arg(long)]
        only: Option<usize>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum CliSide {
    Twisted,
    Untwisted,
}

impl From<CliSide> for Side {
    fn from(s: CliSide) -> Side {
        match s {
            CliSide::Twisted => Side::Twisted,
            CliSide::Untwisted => Side::Untwisted,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(w) = cli.common.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(1);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let limits = resolve_limits(&cli.common);
    match run(&cli.command, &limits) {
        Ok((value, pass)) => {
            if let Err(e) = emit(&cli.common, &value) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if pass { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::IdentityFailure(_)
        | Error::HoldoutMismatch { .. }
        | Error::NonIntegralQuotient(_)
        | Error::AuditFailure(_) => 2,
        _ => 1,
    }
}

fn resolve_limits(common: &Common) -> Limits {
    let mut limits = Limits::default();
    if let Ok(s) = std::env::var("CHARVAR_MAX_ITER") {
        if let Ok(v) = s.trim().parse::<u128>() {
            limits = Limits::with_max(v);
        } else {
            eprintln!("warning: ignoring unparsable CHARVAR_MAX_ITER={s}");
        }
    }
    if let Some(v) = common.max_iterations {
        limits = Limits::with_max(v);
    }
    limits
}

/// Exact rational as a JSON value: a plain decimal string when integral,
/// otherwise a {num, den} pair of decimal strings.
fn rational_json(v: &BigRational) -> Value {
    if v.denom().is_one() {
        Value::String(v.numer().to_string())
    } else {
        json!({"num": v.numer().to_string(), "den": v.denom().to_string()})
    }
}

fn record_json(rec: &CountRecord) -> Value {
    json!({
        "schema": 1,
        "kind": serde_json::to_value(rec.kind).expect("kind serializes"),
        "n": rec.n,
        "g": rec.g,
        "p": rec.p,
        "k": rec.k,
        "q": rec.q(),
        "value": rational_json(&rec.value),
    })
}

fn load_tiling(spec: &str) -> Result<BraneTiling, Error> {
    let path = std::path::Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {spec}: {e}")))?;
        return BraneTiling::from_json(&text);
    }
    if let Some(t) = builtin_tiling(spec.trim_end_matches(".json")) {
        return Ok(t);
    }
    Err(Error::InvalidInput(format!(
        "{spec}: no such file or built-in tiling (built-ins: hex-torus, square-torus, genus2)"
    )))
}

fn first_primes(count: usize, min: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = min.max(2);
    while out.len() < count {
        if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn field(p: u64, k: usize) -> Result<charvar::ffield::FiniteField, Error> {
    charvar::ffield::FiniteField::new(p, k)
}

fn run(cmd: &Command, limits: &Limits) -> Result<(Value, bool), Error> {
    match cmd {
        Command::Count { kind, n, g, p, k } => {
            let f = field(*p, *k)?;
            let rec = match kind {
                Kind::Twisted => twisted_count(*n, *g, &f, limits)?,
                Kind::Untwisted => untwisted_count(*n, *g, &f, limits)?,
                Kind::TwistedVariety => twisted_variety_count(*n, *g, &f, limits)?,
                Kind::TwistedStack => stack_count(&twisted_count(*n, *g, &f, limits)?)?,
                Kind::UntwistedStack => stack_count(&untwisted_count(*n, *g, &f, limits)?)?,
                Kind::SurfaceCircle => surface_circle_stack_count(*n, *g, &f, limits)?,
            };
            Ok((record_json(&rec), true))
        }
        Command::Eseries { side, g, n_max, mode, p } => {
            let side: Side = (*side).into();
            let series_json: Vec<Value> = match mode {
                Mode::Numeric => {
                    let p = p.ok_or_else(|| {
                        Error::InvalidInput("numeric mode needs --p".into())
                    })?;
                    let mut counts = std::collections::BTreeMap::new();
                    for n in 1..=*n_max {
                        for j in 1..=(*n_max as u64 / n as u64) {
                            let f = field(p, j as usize)?;
                            let rec = match side {
                                Side::Twisted => twisted_count(n, *g, &f, limits)?,
                                Side::Untwisted => untwisted_count(n, *g, &f, limits)?,
                            };
                            counts.insert((n, j), rec.value);
                        }
                    }
                    let es = assemble_eseries_numeric(side, *g, *n_max, p, &counts)?;
                    (0..=*n_max)
                        .map(|d| json!({"degree": d, "coefficient": es.series.coeff(d).render()}))
                        .collect()
                }
                Mode::Polynomial => {
                    let needed = degree_bound_for(*n_max, *g) + 1;
                    let primes = first_primes(needed + 1, 3);
                    let samples: Vec<(u64, usize)> =
                        primes[..needed].iter().map(|&p| (p, 1)).collect();
                    let holdout = Some((primes[needed], 1));
                    let mut counts = std::collections::BTreeMap::new();
                    for n in 1..=*n_max {
                        counts.insert(
                            n,
                            interpolated_count_poly(side, n, *g, &samples, holdout, limits)?,
                        );
                    }
                    let es = assemble_eseries_poly(side, *g, *n_max, &counts)?;
                    (0..=*n_max)
                        .map(|d| json!({"degree": d, "coefficient": es.series.coeff(d).render()}))
                        .collect()
                }
            };
            let mode_name = match mode {
                Mode::Numeric => "numeric",
                Mode::Polynomial => "polynomial",
            };
            Ok((
                json!({
                    "schema": 1,
                    "side": serde_json::to_value(side).expect("side serializes"),
                    "g": g,
                    "N": n_max,
                    "mode": mode_name,
                    "coefficients": series_json,
                }),
                true,
            ))
        }
        Command::VerifyExp { g, n_max, mode, p } => {
            let report = match mode {
                Mode::Numeric => {
                    let p = p.ok_or_else(|| {
                        Error::InvalidInput("numeric mode needs --p".into())
                    })?;
                    verify_exp_numeric(*g, *n_max, p, limits)?
                }
                Mode::Polynomial => {
                    let needed = degree_bound_for(*n_max, *g) + 1;
                    let primes = first_primes(needed + 1, 3);
                    let samples: Vec<(u64, usize)> =
                        primes[..needed].iter().map(|&p| (p, 1)).collect();
                    verify_exp_polynomial(*g, *n_max, &samples, Some((primes[needed], 1)), limits)?
                }
            };
            let pass = report.pass;
            let mut value = serde_json::to_value(&report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            value["schema"] = json!(1);
            Ok((value, pass))
        }
        Command::TilingInfo { tiling } => {
            let t = load_tiling(tiling)?;
            let q = dual_quiver(&t);
            let w = potential_of(&t, &q);
            let terms: Vec<String> = w
                .terms
                .iter()
                .map(|(sign, word)| {
                    let path: Vec<String> = word.iter().map(|&a| arrow_name(a)).collect();
                    format!("{}{}", if *sign < 0 { "-" } else { "+" }, path.join("*"))
                })
                .collect();
            Ok((
                json!({
                    "schema": 1,
                    "edges": t.edges,
                    "vertices": t.vertices(),
                    "faces": t.face_count(),
                    "genus": t.genus,
                    "quiver": {
                        "vertices": q.vertices,
                        "arrows": q.arrows.iter().map(|a| json!([a.source, a.target])).collect::<Vec<_>>(),
                    },
                    "potential": terms,
                }),
                true,
            ))
        }
        Command::Cuts { tiling } => {
            let t = load_tiling(tiling)?;
            let q = dual_quiver(&t);
            let w = potential_of(&t, &q);
            let cuts: Vec<Vec<usize>> = find_cuts(&q, &w)
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect();
            Ok((json!({"schema": 1, "cuts": cuts}), true))
        }
        Command::DimredCheck { tiling, cut_index, gamma, p, k } => {
            let t = load_tiling(tiling)?;
            let q = dual_quiver(&t);
            let w = potential_of(&t, &q);
            let cuts = find_cuts(&q, &w);
            let cut = cuts.get(*cut_index).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "cut index {cut_index} out of range; the tiling has {} cuts",
                    cuts.len()
                ))
            })?;
            let f = field(*p, *k)?;
            let dims = vec![*gamma; q.vertices];
            let report = dimred_count_check(&q, &w, cut, &dims, &f, limits)?;
            let pass = report.pass;
            let mut value = serde_json::to_value(&report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            value["schema"] = json!(1);
            Ok((value, pass))
        }
        Command::MoritaCheck { tiling, n, p, k } => {
            let t = load_tiling(tiling)?;
            let f = field(*p, *k)?;
            let report = morita_count_check(&t, *n, &f, limits)?;
            let pass = report.pass;
            let mut value = serde_json::to_value(&report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            value["schema"] = json!(1);
            Ok((value, pass))
        }
        Command::GtrueCheck { tiling, n, p, k } => {
            let t = load_tiling(tiling)?;
            let f = field(*p, *k)?;
            let report = gtrue_count_check(&t, *n, &f, limits)?;
            let pass = report.pass;
            let mut value = serde_json::to_value(&report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            value["schema"] = json!(1);
            Ok((value, pass))
        }
        Command::MuCount { n, g, p, k } => {
            let f = field(*p, *k)?;
            let rec = additive_mu_stack_count(*n, *g, &f, limits)?;
            Ok((record_json(&rec), true))
        }
        Command::Audit { only } => {
            let results = match only {
                Some(id) => {
                    if !(1..=charvar::audit::CRITERIA).contains(id) {
                        return Err(Error::InvalidInput(format!(
                            "criterion id must be 1..={}",
                            charvar::audit::CRITERIA
                        )));
                    }
                    vec![charvar::audit::run_one(*id, limits)]
                }
                None => charvar::audit::run_all(limits),
            };
            let pass = results.iter().all(|r| r.pass);
            for r in &results {
                eprintln!(
                    "criterion {:>2}: {} - {}",
                    r.id,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name
                );
            }
            Ok((
                json!({
                    "schema": 1,
                    "criteria": serde_json::to_value(&results)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?,
                    "pass": pass,
                }),
                pass,
            ))
        }
    }
}

fn emit(common: &Common, value: &Value) -> std::io::Result<()> {
    let text = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(value),
    };
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => csv_escape(s),
        other => csv_escape(&other.to_string()),
    }
}

/// Flatten a report into deterministic key,value rows; arrays of objects
/// become one row per element.
fn to_csv(value: &Value) -> String {
    let mut out = String::from("key,value\n");
    flatten_csv("", value, &mut out);
    out
}

fn flatten_csv(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_csv(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_csv(&format!("{prefix}[{i}]"), v, out);
            }
        }
        scalar => {
            out.push_str(prefix);
            out.push(',');
            out.push_str(&csv_scalar(scalar));
            out.push('\n');
        }
    }
}
