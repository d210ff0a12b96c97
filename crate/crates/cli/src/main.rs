//! Command-line surface for the relative Malcev toolkit.
//!
//! Exit codes: 0 success, 1 validation failure (well-formed input that fails
//! a mathematical check), 2 numerical-tolerance failure, 3 malformed input
//! (unreadable files, JSON/schema errors, bad braid words, unknown suites).
//!
//! All floating output is printed to 12 significant digits, rationals as
//! "p/q", and repeated runs with identical flags produce byte-identical
//! output: every map is emitted in a sorted order and nothing time- or
//! address-dependent reaches stdout.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use relmalcev::bar::BarContext;
use relmalcev::braid::{BraidError, BraidWord, KzSystem};
use relmalcev::checks::{run_suite, SuiteReport, SUITE_NAMES};
use relmalcev::envelope::Envelope;
use relmalcev::freelie::nilpotent_quotient;
use relmalcev::interchange::{
    dga_to_json, load_dga, load_form, load_lie_presentation, load_path, InterchangeError,
};
use relmalcev::rational::{format_c64, format_sig};
use relmalcev::transport::{transport, OdeOptions};

#[derive(Parser)]
#[command(
    name = "relmalcev",
    version,
    about = "Bar constructions, nilpotent Lie quotients, Chen transport, and braid holonomy"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a DGA model file (with its optional coefficient block).
    ValidateDga {
        /// DGA model JSON file.
        #[arg(long)]
        dga: PathBuf,
        /// Emit the normalized model in the input schema as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Bar-filtered H0 dimension tables of a DGA model.
    BarH0 {
        /// DGA model JSON file.
        #[arg(long)]
        dga: PathBuf,
        /// Largest bar degree to report.
        #[arg(long, default_value_t = 4)]
        cap: usize,
        /// Emit the tables as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Graded dimensions of a presented nilpotent Lie quotient.
    LieQuotient {
        /// Lie presentation JSON file.
        #[arg(long)]
        lie: PathBuf,
        /// Override the truncation stored in the file.
        #[arg(long)]
        trunc: Option<usize>,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Parallel transport of a Lie-valued 1-form along a path.
    Transport {
        /// Path JSON file.
        #[arg(long)]
        path: PathBuf,
        /// One-form JSON file (Lie coefficients resolved against --lie).
        #[arg(long)]
        form: PathBuf,
        /// Lie presentation JSON file for the coefficient algebra.
        #[arg(long)]
        lie: PathBuf,
        /// Override the truncation stored in the Lie file.
        #[arg(long)]
        trunc: Option<usize>,
        /// Grouplikeness tolerance on the resulting series.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Emit the series as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Holonomy of a braid word in the truncated Drinfeld-Kohno envelope.
    Braid {
        /// Number of strands.
        #[arg(long)]
        n: usize,
        /// Braid word, e.g. "s1 s2 s1^-1".
        #[arg(long)]
        word: String,
        /// Weight truncation of the Drinfeld-Kohno algebra.
        #[arg(long, default_value_t = 3)]
        trunc: usize,
        /// Grouplikeness tolerance on the resulting series.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Emit the holonomy as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run verification suites (all of them by default).
    Verify {
        /// Single suite to run; omit to run every suite.
        #[arg(long)]
        suite: Option<String>,
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Tolerance override for the numerical suites.
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the reports as JSON.
        #[arg(long)]
        json: bool,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl From<InterchangeError> for CliError {
    fn from(e: InterchangeError) -> Self {
        let code = match &e {
            InterchangeError::Io { .. }
            | InterchangeError::Json { .. }
            | InterchangeError::Schema { .. } => 3,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<BraidError> for CliError {
    fn from(e: BraidError) -> Self {
        let code = match &e {
            BraidError::BadWord(_)
            | BraidError::BadIndex { .. }
            | BraidError::StrandMismatch { .. } => 3,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn validation<E: std::fmt::Display>(e: E) -> CliError {
    CliError { code: 1, message: e.to_string() }
}

fn fmt_f(x: f64) -> String {
    format_sig(x, 12)
}

fn fmt_z(z: Complex64) -> String {
    format_c64(z, 12)
}

/// Round to 12 significant digits so JSON numbers carry exactly the printed
/// precision (serde then emits the shortest decimal for the rounded value).
fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn dims_tuple(dims: &[usize]) -> String {
    let strs: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    format!("({})", strs.join(", "))
}

fn monomial_labels(env: &Envelope, idx: usize) -> Vec<String> {
    env.monomials[idx].iter().map(|&l| env.lie.labels[l].clone()).collect()
}

fn series_json(env: &Envelope, s: &relmalcev::envelope::Series<Complex64>) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = s
        .support()
        .map(|(idx, c)| {
            serde_json::json!({
                "monomial": monomial_labels(env, idx),
                "re": round12(c.re),
                "im": round12(c.im),
            })
        })
        .collect();
    serde_json::Value::Array(terms)
}

fn print_series_human(env: &Envelope, s: &relmalcev::envelope::Series<Complex64>) {
    println!("series (nonzero coefficients):");
    for (idx, c) in s.support() {
        let labels = monomial_labels(env, idx);
        let name = if labels.is_empty() { "1".to_string() } else { labels.join("*") };
        println!("  {:<24} {}", name, fmt_z(*c));
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::ValidateDga { dga, json } => {
            let (model, coalg) = load_dga(&dga)?;
            if json {
                let out = dga_to_json(&model, coalg.as_ref());
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                let max_degree = model.basis.iter().map(|b| b.degree).max().unwrap_or(0);
                println!("model: {}", model.name);
                println!("status: valid");
                println!("dimension: {}", model.dim());
                println!("top degree: {max_degree}");
                match &coalg {
                    Some(c) => println!(
                        "coefficients: group {} of order {}",
                        c.group.name,
                        c.group.order()
                    ),
                    None => println!("coefficients: trivial"),
                }
            }
            Ok(0)
        }
        Cmd::BarH0 { dga, cap, json } => {
            let (model, coalg) = load_dga(&dga)?;
            let ctx = BarContext::new(&model, coalg.as_ref());
            let h0 = ctx.h0(cap).map_err(validation)?;
            let report = h0.report();
            if json {
                let out = serde_json::json!({
                    "model": model.name,
                    "cap": report.cap,
                    "new_dims": report.new_dims,
                    "cumulative": report.cumulative,
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("model: {}", model.name);
                println!("cap: {}", report.cap);
                println!("new cocycle dims by bar degree: {}", dims_tuple(&report.new_dims));
                println!("cumulative dims: {}", dims_tuple(&report.cumulative));
            }
            Ok(0)
        }
        Cmd::LieQuotient { lie, trunc, json } => {
            let mut pres = load_lie_presentation(&lie)?;
            if let Some(t) = trunc {
                pres.truncation = t;
            }
            let q = nilpotent_quotient(pres).map_err(validation)?;
            if json {
                let labels_by_degree: Vec<Vec<&String>> = (1..=q.lie.truncation)
                    .map(|deg| {
                        q.lie
                            .labels
                            .iter()
                            .zip(&q.lie.degree_of)
                            .filter(|&(_, &d)| d == deg)
                            .map(|(l, _)| l)
                            .collect()
                    })
                    .collect();
                let out = serde_json::json!({
                    "truncation": q.lie.truncation,
                    "dims": q.lie.dims,
                    "ideal_dims": q.ideal_dims,
                    "total_dim": q.lie.labels.len(),
                    "labels": labels_by_degree,
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("truncation: {}", q.lie.truncation);
                println!("graded dims: {}", dims_tuple(&q.lie.dims));
                println!("relation ideal dims: {}", dims_tuple(&q.ideal_dims));
                println!("total dim: {}", q.lie.labels.len());
            }
            Ok(0)
        }
        Cmd::Transport { path, form, lie, trunc, tol, json } => {
            if tol <= 0.0 {
                return Err(CliError { code: 3, message: "--tol must be positive".into() });
            }
            let mut pres = load_lie_presentation(&lie)?;
            if let Some(t) = trunc {
                pres.truncation = t;
            }
            let q = nilpotent_quotient(pres).map_err(validation)?;
            let env = Envelope::new(q.lie.clone());
            let omega = load_form(&form, &env.lie)?;
            let gamma = load_path(&path)?;
            let result =
                transport(&gamma, &omega, &env, &OdeOptions::default()).map_err(validation)?;
            let defect = env.grouplike_defect(&result.series);
            if json {
                let out = serde_json::json!({
                    "dimension": gamma.dimension,
                    "truncation": env.truncation,
                    "series": series_json(&env, &result.series),
                    "estimated_error": round12(result.estimated_error),
                    "steps": result.steps,
                    "grouplike_defect": round12(defect),
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("dimension: {}", gamma.dimension);
                println!("truncation: {}", env.truncation);
                print_series_human(&env, &result.series);
                println!("estimated error: {}", fmt_f(result.estimated_error));
                println!("steps: {}", result.steps);
                println!("grouplike defect: {}", fmt_f(defect));
            }
            if defect > tol {
                eprintln!(
                    "tolerance failure: grouplike defect {} exceeds {}",
                    fmt_f(defect),
                    fmt_f(tol)
                );
                return Ok(2);
            }
            Ok(0)
        }
        Cmd::Braid { n, word, trunc, tol, json } => {
            if tol <= 0.0 {
                return Err(CliError { code: 3, message: "--tol must be positive".into() });
            }
            let word = BraidWord::parse(&word, n)?;
            let system = KzSystem::new(n, trunc)?;
            let hol = system.holonomy(&word, &OdeOptions::default())?;
            let perm: Vec<usize> =
                system.sym.perms[hol.element.s].iter().map(|&i| i + 1).collect();
            let defect = system.env.grouplike_defect(&hol.element.u);
            if json {
                let out = serde_json::json!({
                    "n": n,
                    "word": word.to_string(),
                    "trunc": trunc,
                    "permutation": perm,
                    "series": series_json(&system.env, &hol.element.u),
                    "estimated_error": round12(hol.estimated_error),
                    "steps": hol.steps,
                    "grouplike_defect": round12(defect),
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!("n: {n}");
                println!("word: {word}");
                println!("trunc: {trunc}");
                let perm_strs: Vec<String> = perm.iter().map(|i| i.to_string()).collect();
                println!("permutation: [{}]", perm_strs.join(", "));
                print_series_human(&system.env, &hol.element.u);
                println!("estimated error: {}", fmt_f(hol.estimated_error));
                println!("steps: {}", hol.steps);
                println!("grouplike defect: {}", fmt_f(defect));
            }
            if defect > tol {
                eprintln!(
                    "tolerance failure: grouplike defect {} exceeds {}",
                    fmt_f(defect),
                    fmt_f(tol)
                );
                return Ok(2);
            }
            Ok(0)
        }
        Cmd::Verify { suite, seed, tol, json } => {
            let names: Vec<String> = match suite {
                Some(s) => vec![s],
                None => SUITE_NAMES.iter().map(|s| s.to_string()).collect(),
            };
            let mut reports: Vec<SuiteReport> = Vec::new();
            for name in &names {
                let suite_tol =
                    tol.unwrap_or(if name == "braid-relations" { 1e-7 } else { 1e-8 });
                let report = run_suite(name, seed, suite_tol)
                    .map_err(|message| CliError { code: 3, message })?;
                reports.push(report);
            }
            if json {
                let out: Vec<serde_json::Value> = reports
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "suite": r.name,
                            "pass": r.pass,
                            "tolerance_based": r.tolerance_based,
                            "cases": r.cases,
                            "max_error": round12(r.max_error),
                            "detail": r.detail,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                for r in &reports {
                    println!(
                        "{:<16} {}  cases={}  max_error={}  {}",
                        r.name,
                        if r.pass { "PASS" } else { "FAIL" },
                        r.cases,
                        fmt_f(r.max_error),
                        r.detail
                    );
                }
                let passed = reports.iter().filter(|r| r.pass).count();
                println!("{passed}/{} suites passed", reports.len());
            }
            if reports.iter().all(|r| r.pass) {
                Ok(0)
            } else if reports.iter().any(|r| !r.pass && !r.tolerance_based) {
                Ok(1)
            } else {
                Ok(2)
            }
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes (grep -q, head, ...) instead
    // of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
