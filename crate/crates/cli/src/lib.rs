//! Batch runner behind the `difflab` binary: configs in, CSV and a JSON
//! summary out.

pub mod config;
pub mod experiments;

use std::io::Write;
use std::path::{Path, PathBuf};

use difflab::frob_reduce::mq_reduce;
use difflab::selftest::{run_all, run_case, SelftestOptions, Suite};
use difflab::DiffPoly;
use serde::Serialize;

pub use config::{ExperimentConfig, Kind};
pub use experiments::{Assertion, Report};

pub const WORKERS_ENV: &str = "DIFFLAB_WORKERS";

/// Process exit statuses.
pub mod status {
    pub const PASS: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const BUDGET: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] difflab::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn status(&self) -> i32 {
        use difflab::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => status::INVALID,
            CliError::Engine(e) => match e {
                E::BudgetExceeded { .. } | E::Infeasible(_) => status::BUDGET,
                E::NotPrime(_)
                | E::NotPrimePower { .. }
                | E::CharMismatch(..)
                | E::VarMismatch(..)
                | E::Syntax { .. }
                | E::UnknownVariable { .. }
                | E::NegativeExponent { .. }
                | E::NonSquare
                | E::AbsentVariable(_)
                | E::ConstantInVariable
                | E::ExponentOverflow(_)
                | E::Invalid(_) => status::INVALID,
                _ => status::ASSERTION,
            },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Sizes the global rayon pool from `DIFFLAB_WORKERS` when set.
pub fn init_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    pass: bool,
    assertions: &'a [Assertion],
    max_residual: Option<f64>,
    csv: String,
    rows: usize,
    notes: &'a [String],
}

/// Files written by [`run`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub pass: bool,
    pub csv: PathBuf,
    pub summary: PathBuf,
}

pub fn csv_name(kind: Kind) -> String {
    format!("{}.csv", kind.name())
}

/// Validates, runs and writes `<output>/<kind>.csv` and `<output>/summary.json`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let report = experiments::run_kind(cfg)?;
    let dir = &cfg.output;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv = dir.join(csv_name(cfg.kind));
    let mut w = csv::Writer::from_path(&csv).map_err(|e| CliError::Io {
        path: csv.clone(),
        source: e.into(),
    })?;
    let csv_err = |e: csv::Error| CliError::Io {
        path: csv.clone(),
        source: e.into(),
    };
    w.write_record(&report.header).map_err(csv_err)?;
    for row in &report.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&csv))?;
    let summary = dir.join("summary.json");
    let body = Summary {
        config: cfg,
        pass: report.pass(),
        assertions: &report.assertions,
        max_residual: report.max_residual,
        csv: csv_name(cfg.kind),
        rows: report.rows.len(),
        notes: &report.notes,
    };
    let mut text = serde_json::to_string_pretty(&body).expect("summary serializes");
    text.push('\n');
    std::fs::write(&summary, text).map_err(io_err(&summary))?;
    Ok(RunOutput {
        pass: report.pass(),
        csv,
        summary,
    })
}

/// Loads a config, applies overrides, runs it and reports to `out`/`err`.
/// Returns the exit status.
pub fn run_file(
    path: &Path,
    seed: Option<u64>,
    force_kind: Option<Kind>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = ExperimentConfig::load(path).and_then(|mut cfg| {
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if let Some(k) = force_kind {
            cfg.kind = k;
        }
        run(&cfg)
    });
    match result {
        Ok(o) => {
            let verdict = if o.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{verdict} {} {}", o.csv.display(), o.summary.display());
            if o.pass {
                status::PASS
            } else {
                status::ASSERTION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.status()
        }
    }
}

/// `M_q(poly)` in display form.
pub fn reduce(poly: &str, p: u64, q: u64) -> Result<String, CliError> {
    if !difflab::ffield::is_prime(p) {
        return Err(CliError::Config(format!("p must be prime, got {p}")));
    }
    let f = DiffPoly::parse_infer(poly, p)?;
    Ok(mq_reduce(&f, q)?.to_string())
}

#[derive(Serialize)]
struct Repro<'a> {
    suite: &'a str,
    seed: u64,
    case: u64,
    message: &'a str,
}

/// Runs every suite, or one case when `only` is given. A failure is printed
/// as a JSON line that replays it through `--suite/--seed/--case`.
pub fn selftest(opts: &SelftestOptions, only: Option<(Suite, u64)>, out: &mut dyn Write) -> i32 {
    if let Some((suite, case)) = only {
        return match run_case(suite, opts.seed, case, opts.binom) {
            Ok(()) => {
                let _ = writeln!(out, "PASS {} case {case}", suite.name());
                status::PASS
            }
            Err(message) => {
                let _ = writeln!(out, "FAIL {} case {case}: {message}", suite.name());
                status::ASSERTION
            }
        };
    }
    let reports = run_all(opts);
    let mut pass = true;
    for r in &reports {
        match &r.failure {
            None => {
                let _ = writeln!(out, "PASS {} ({} cases)", r.suite.name(), r.cases);
            }
            Some(f) => {
                pass = false;
                let repro = Repro {
                    suite: f.suite.name(),
                    seed: f.seed,
                    case: f.case,
                    message: &f.message,
                };
                let _ = writeln!(out, "FAIL {} at case {}", r.suite.name(), f.case);
                let _ = writeln!(out, "{}", serde_json::to_string(&repro).expect("serializes"));
            }
        }
    }
    if pass {
        status::PASS
    } else {
        status::ASSERTION
    }
}
