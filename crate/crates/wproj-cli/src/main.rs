//! wproj: evaluate geometric quantities at points of the weight (+1,-1)
//! projective space, run the seeded verification suite, and map chart
//! coordinates through transitions. Output is deterministic JSON; see
//! jsonio for the encoding.
//!
//! Exit codes: 0 success, 1 verification found a failing check, 2 usage or
//! parse or configuration error, 3 domain error (the input is outside the
//! operation's mathematical domain).

mod jsonio;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wproj_core::symplectic::{
    hamiltonian, normalize_to_level, omega_formula, omega_in_chart, omega_oracle, LevelSpec,
    ReductionContext,
};
use wproj_core::tolerances::DEFAULT_STEP;
use wproj_core::verify::{run_all, run_check, CheckConfig, CheckResult, CHECK_NAMES};
use wproj_core::{ChartId, Error};

/// A diagnostic plus the exit code it maps to.
pub struct Failure {
    pub msg: String,
    pub code: i32,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let code = if err.is_domain() { 3 } else { 2 };
        Failure {
            msg: err.to_string(),
            code,
        }
    }
}

fn parse_chart(s: &str) -> Result<ChartId, String> {
    let (tag, index) = s.split_at(1);
    let index: usize = index
        .parse()
        .map_err(|_| format!("chart must be v<index> or w<index>, got {s:?}"))?;
    match tag {
        "v" => Ok(ChartId::v(index)),
        "w" => Ok(ChartId::w(index)),
        _ => Err(format!("chart must be v<index> or w<index>, got {s:?}")),
    }
}

#[derive(Parser)]
#[command(name = "wproj", version, about = "Weighted projective space toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum What {
    /// H = (|v|^2 - alpha |w|^2) / 2.
    Hamiltonian,
    /// The positive scale moving the point onto the (alpha, beta) level.
    Lambda0,
    /// The canonical matrix v^a w^k, rows indexed by a.
    Matrix,
    /// The reduced symplectic form via the closed formula (alpha=1, beta=0).
    Omega,
    /// The reduced form via the finite-difference pullback oracle.
    OmegaOracle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a quantity at a point given in homogeneous coordinates.
    Eval {
        /// JSON file {"v": [[re,im],...], "w": [[re,im],...]}.
        #[arg(long, value_name = "FILE")]
        point: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
        /// Express omega in this chart (e.g. v0) instead of the ambient frame.
        #[arg(long, value_parser = parse_chart)]
        chart: Option<ChartId>,
        /// Finite-difference step for the oracle.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        h: f64,
    },
    /// Run verification checks and write a report.
    Verify {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Defaults to WPROJ_DEFAULT_SEED if set, else 42.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        h: f64,
        /// Override one check's tolerance; repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Run a single named check instead of the full registry.
        #[arg(long)]
        check: Option<String>,
        /// Also write the JSON report to this path.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Print the JSON report on stdout instead of the summary table.
        #[arg(long)]
        json: bool,
    },
    /// Map chart coordinates through a transition.
    Transition {
        /// JSON file {"u": [[re,im],...], "fiber": [[re,im],...]}.
        #[arg(long, value_name = "FILE")]
        coords: PathBuf,
        #[arg(long, value_parser = parse_chart)]
        from_chart: ChartId,
        #[arg(long, value_parser = parse_chart)]
        to_chart: ChartId,
    },
}

#[derive(Serialize)]
struct Report {
    config: CheckConfig,
    results: Vec<CheckResult>,
    all_passed: bool,
    version: &'static str,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            std::process::exit(f.code);
        }
    }
}

fn run(cmd: Cmd) -> Result<i32, Failure> {
    match cmd {
        Cmd::Eval {
            point,
            what,
            alpha,
            beta,
            chart,
            h,
        } => cmd_eval(&point, what, alpha, beta, chart, h),
        Cmd::Verify {
            n,
            m,
            trials,
            seed,
            h,
            tol,
            check,
            out,
            json,
        } => cmd_verify(n, m, trials, seed, h, &tol, check, out, json),
        Cmd::Transition {
            coords,
            from_chart,
            to_chart,
        } => {
            let c = jsonio::read_coords(&coords, from_chart)?;
            println!("{}", jsonio::fcoords(&c.transition(to_chart)?));
            Ok(0)
        }
    }
}

fn cmd_eval(
    point: &Path,
    what: What,
    alpha: f64,
    beta: f64,
    chart: Option<ChartId>,
    h: f64,
) -> Result<i32, Failure> {
    if chart.is_some() && what != What::Omega {
        return Err(Error::InvalidConfig(
            "--chart applies only to --what omega".into(),
        )
        .into());
    }
    let p = jsonio::read_point(point)?;
    let spec = LevelSpec::new(alpha, beta);
    match what {
        What::Hamiltonian => {
            let ctx = ReductionContext::for_point(&p, spec);
            println!("{}", jsonio::fnum(hamiltonian(&ctx, &p)?));
        }
        What::Lambda0 => {
            let ctx = ReductionContext::for_point(&p, spec);
            println!("{}", jsonio::fnum(normalize_to_level(&ctx, &p)?));
        }
        What::Matrix => {
            let m = p.canonical_matrix();
            let rows: Vec<String> = (0..m.nrows())
                .map(|r| {
                    let cells: Vec<String> =
                        (0..m.ncols()).map(|c| jsonio::fcplx(m[(r, c)])).collect();
                    format!("[{}]", cells.join(","))
                })
                .collect();
            println!("[{}]", rows.join(","));
        }
        What::Omega => {
            if alpha != 1.0 || beta != 0.0 {
                return Err(Error::InvalidConfig(
                    "the closed formula is stated on the standard level (alpha = 1, beta = 0); \
                     use --what omega-oracle for other levels"
                        .into(),
                )
                .into());
            }
            match chart {
                None => {
                    let form = omega_formula(&p);
                    let labels = jsonio::ambient_labels(form.frame());
                    println!("{}", jsonio::ftwo_form(&form, &labels));
                }
                Some(id) => {
                    let c = p.to_chart(id)?;
                    let form = omega_in_chart(&c);
                    let labels = jsonio::chart_labels(form.frame(), id);
                    println!("{}", jsonio::ftwo_form(&form, &labels));
                }
            }
        }
        What::OmegaOracle => {
            let ctx = ReductionContext::for_point(&p, spec);
            let form = omega_oracle(&ctx, &p, h)?;
            let labels = jsonio::ambient_labels(form.frame());
            println!("{}", jsonio::ftwo_form(&form, &labels));
        }
    }
    Ok(0)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("WPROJ_DEFAULT_SEED") {
        Ok(text) => text.trim().parse().map_err(|e| Failure {
            msg: format!("InvalidConfig: WPROJ_DEFAULT_SEED is not an integer: {e}"),
            code: 2,
        }),
        Err(_) => Ok(42),
    }
}

fn parse_tol_overrides(specs: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut overrides = BTreeMap::new();
    for spec in specs {
        let (name, value) = spec.split_once('=').ok_or_else(|| Failure {
            msg: format!("InvalidConfig: --tol expects NAME=VALUE, got {spec:?}"),
            code: 2,
        })?;
        if !CHECK_NAMES.contains(&name) {
            return Err(Error::UnknownCheck(name.to_string()).into());
        }
        let value: f64 = value.parse().map_err(|e| Failure {
            msg: format!("InvalidConfig: --tol {name}: {e}"),
            code: 2,
        })?;
        overrides.insert(name.to_string(), value);
    }
    Ok(overrides)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    n: usize,
    m: usize,
    trials: usize,
    seed: Option<u64>,
    h: f64,
    tol: &[String],
    check: Option<String>,
    out: Option<PathBuf>,
    json: bool,
) -> Result<i32, Failure> {
    let cfg = CheckConfig {
        n,
        m,
        trials,
        seed: resolve_seed(seed)?,
        h,
        tol_overrides: parse_tol_overrides(tol)?,
    };
    let results = match check {
        Some(name) => vec![run_check(&name, &cfg)?],
        None => run_all(&cfg)?,
    };
    let all_passed = results.iter().all(|r| r.passed);
    let report = Report {
        config: cfg,
        results,
        all_passed,
        version: env!("CARGO_PKG_VERSION"),
    };
    let rendered = serde_json::to_string_pretty(&report).map_err(|e| Failure {
        msg: format!("Json: cannot serialize report: {e}"),
        code: 2,
    })?;
    if let Some(path) = out {
        std::fs::write(&path, format!("{rendered}\n")).map_err(|e| Failure {
            msg: format!("Io: cannot write {}: {e}", path.display()),
            code: 2,
        })?;
    }
    if json {
        println!("{rendered}");
    } else {
        print_table(&report);
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn print_table(report: &Report) {
    println!(
        "{:<28} {:>13} {:>9} {:>7}  status",
        "check", "max_abs_err", "tol", "trials"
    );
    for r in &report.results {
        println!(
            "{:<28} {:>13.3e} {:>9.0e} {:>7}  {}",
            r.name,
            r.max_abs_err,
            r.tol,
            r.trials,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    let passed = report.results.iter().filter(|r| r.passed).count();
    let cfg = &report.config;
    println!(
        "{passed}/{} checks passed (n={}, m={}, trials={}, seed={})",
        report.results.len(),
        cfg.n,
        cfg.m,
        cfg.trials,
        cfg.seed
    );
}
