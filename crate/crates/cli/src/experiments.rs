//! One function per experiment kind, each producing CSV rows and assertions.

use difflab::counting::{fit_error, CountSeries, PlaneCorrespondence};
use difflab::diff_poly::max_var_index;
use difflab::ffield::{resultant_y, MultiPoly, PrimeField};
use difflab::frob_reduce::{degree_asymptotics, ReducedSystem};
use difflab::growth::{check_budget, growth_profile, DirectPresentation};
use difflab::jacobi::{verify_bezout, verify_jacobi_dimension};
use difflab::{DiffPoly, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, Kind};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub assertions: Vec<Assertion>,
    pub max_residual: Option<f64>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_system(cfg: &ExperimentConfig, nvars: usize) -> Result<Vec<DiffPoly>, CliError> {
    cfg.system
        .iter()
        .map(|t| DiffPoly::parse(t, cfg.p, nvars).map_err(CliError::Engine))
        .collect()
}

pub fn run_kind(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    match cfg.kind {
        Kind::TwistedCount => twisted_count(cfg),
        Kind::Jacobi => jacobi(cfg),
        Kind::Bezout => bezout(cfg),
        Kind::Growth => growth(cfg),
        Kind::DegreeAsymptotics => degree(cfg),
    }
}

fn twisted_count(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let [text] = cfg.system.as_slice() else {
        return Err(CliError::Config("twisted_count takes exactly one polynomial in x1".into()));
    };
    let s = PlaneCorrespondence::parse(text, cfg.p)?;
    let series = CountSeries::collect(&s, &cfg.q_grid())?;
    let fit = fit_error(&series)?;
    let a = series.a;
    let rows = series
        .records
        .iter()
        .zip(&fit.residuals)
        .map(|(r, (_, res))| {
            vec![
                cfg.kind.name().to_string(),
                cfg.p.to_string(),
                r.q.to_string(),
                r.distinct.to_string(),
                r.with_mult.to_string(),
                a.numer().to_string(),
                a.denom().to_string(),
                fmt_f64(*res),
            ]
        })
        .collect();
    let c = cfg.tolerance.unwrap_or(10.0);
    Ok(Report {
        header: vec!["kind", "p", "q", "distinct", "with_mult", "a_num", "a_den", "residual"],
        rows,
        assertions: vec![
            Assertion::new(
                "residual_bound",
                fit.c_max <= c,
                format!("max |N_q - a q| / q^(1/2) = {} (bound {c})", fmt_f64(fit.c_max)),
            ),
            Assertion::new(
                "no_monotone_growth",
                !fit.monotone_growth,
                if fit.monotone_growth { "residuals increase along the grid" } else { "" },
            ),
        ],
        max_residual: Some(fit.c_max),
        notes: series.excluded.iter().map(|(q, why)| format!("q = {q} excluded: {why}")).collect(),
    })
}

fn jacobi(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let system = parse_system(cfg, cfg.system.len())?;
    let exps = cfg.q_exponents.clone().unwrap_or_default();
    let tol = cfg.tolerance.unwrap_or(0.3);
    let r = verify_jacobi_dimension(&system, cfg.p, &exps, tol)?;
    let id = cfg.id();
    let j = r.j.to_string();
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                id.clone(),
                row.q.to_string(),
                row.count.to_string(),
                j.clone(),
                row.bound.to_string(),
                fmt_f64(r.w_hat),
                r.ok.to_string(),
            ]
        })
        .collect();
    let slack = r.j.finite().map(|j| r.w_hat - j as f64);
    Ok(Report {
        header: vec!["system_id", "q", "N", "j", "J", "w_hat", "ok"],
        rows,
        assertions: vec![Assertion::new(
            "w_hat_within_jacobi_bound",
            r.ok,
            format!("w_hat = {} vs j = {j} + {tol}", fmt_f64(r.w_hat)),
        )],
        max_residual: slack,
        notes: r.excluded.iter().map(|(q, why)| format!("q = {q} excluded: {why}")).collect(),
    })
}

fn random_pair(rng: &mut ChaCha8Rng, field: PrimeField) -> [MultiPoly; 2] {
    let p = field.p();
    loop {
        let mut gen = || {
            let terms: Vec<_> = (0..rng.gen_range(2..=5))
                .map(|_| (vec![rng.gen_range(0..=3), rng.gen_range(0..=3)], rng.gen_range(1..p)))
                .collect();
            MultiPoly::from_terms(field, 2, terms)
        };
        let pair = [gen(), gen()];
        let nonzero = |a, b| resultant_y(&pair[0], &pair[1], a, b).is_ok_and(|r| !r.is_zero());
        if nonzero(0, 1) && nonzero(1, 0) {
            return pair;
        }
    }
}

fn bezout(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut cases: Vec<(String, u64, Vec<MultiPoly>)> = Vec::new();
    if let Some(k) = cfg.random_systems {
        let field = PrimeField::new(cfg.p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for i in 0..k {
            cases.push((format!("r{i}"), cfg.p, random_pair(&mut rng, field).to_vec()));
        }
    } else {
        if cfg.system.len() != 2 {
            return Err(CliError::Config("bezout takes two polynomials in x1, x2".into()));
        }
        let system = parse_system(cfg, 2)?;
        for q in cfg.q_grid() {
            cases.push((cfg.id(), q, ReducedSystem::new(&system, q)?.polys));
        }
    }
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut skipped = 0;
    for (id, q, polys) in &cases {
        let r = verify_bezout(polys)?;
        let count = match r.count {
            Some(n) => n.to_string(),
            None => {
                skipped += 1;
                "skip".into()
            }
        };
        if !r.ok {
            violations.push(format!("{id} at q = {q}"));
        }
        rows.push(vec![id.clone(), q.to_string(), count, r.bound.to_string(), r.ok.to_string()]);
    }
    let mut notes = Vec::new();
    if skipped > 0 {
        notes.push(format!("{skipped} positive-dimensional case(s) skipped"));
    }
    Ok(Report {
        header: vec!["system_id", "q", "count", "J", "ok"],
        rows,
        assertions: vec![Assertion::new(
            "count_at_most_permanent",
            violations.is_empty(),
            violations.join("; "),
        )],
        max_residual: None,
        notes,
    })
}

fn degree(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let nvars = cfg.system.iter().map(|t| max_var_index(t)).max().unwrap_or(0).max(1);
    let system = parse_system(cfg, nvars)?;
    let q_grid = cfg.q_grid();
    let id = cfg.id();
    let mut rows = Vec::new();
    let mut inexact = Vec::new();
    let mut loose = Vec::new();
    let mut worst = 0.0f64;
    for (i, u) in system.iter().enumerate() {
        let sid = if system.len() == 1 { id.clone() } else { format!("{id}.{}", i + 1) };
        for j in 0..nvars {
            let table = match degree_asymptotics(u, j, &q_grid) {
                Err(Error::AbsentVariable(_)) => continue,
                other => other?,
            };
            for r in table {
                let dev = (r.log_q_degree - r.order as f64).abs();
                worst = worst.max(dev);
                if r.above_threshold && !r.exact() {
                    inexact.push(format!("{sid} x{} q = {}", j + 1, r.q));
                }
                if dev > 2.0 / (r.q as f64).log2() {
                    loose.push(format!("{sid} x{} q = {}", j + 1, r.q));
                }
                rows.push(vec![
                    sid.clone(),
                    format!("x{}", j + 1),
                    r.q.to_string(),
                    r.degree.to_string(),
                    r.order.to_string(),
                    fmt_f64(r.log_q_degree),
                    r.nu_max.to_string(),
                ]);
            }
        }
    }
    Ok(Report {
        header: vec!["system_id", "var", "q", "H", "h", "log_q_H", "nu_max"],
        rows,
        assertions: vec![
            Assertion::new("degree_equals_nu_max", inexact.is_empty(), inexact.join("; ")),
            Assertion::new("log_degree_near_order", loose.is_empty(), loose.join("; ")),
        ],
        max_residual: Some(worst),
        notes: Vec::new(),
    })
}

fn growth(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let d = cfg.d();
    let texts: Vec<&str> = cfg.system.iter().map(String::as_str).collect();
    let pres = DirectPresentation::parse(&texts, cfg.p, d)?;
    let n_grid = cfg.n_grid();
    let s_grid = cfg.s_grid.clone().unwrap_or_default();
    let over: Vec<Error> = n_grid
        .iter()
        .flat_map(|&n| s_grid.iter().map(move |&s| (n, s)))
        .filter_map(|(n, s)| check_budget(cfg.p, s, n, d).err())
        .collect();
    let g = match growth_profile(&pres, cfg.p, &n_grid, &s_grid) {
        Err(Error::InsufficientData(_)) if !over.is_empty() => return Err(over[0].clone().into()),
        other => other?,
    };
    let fixture = cfg.id();
    let mut rows = Vec::new();
    for r in &g.rows {
        for &(s, n) in &r.estimate.counts {
            rows.push(vec![
                fixture.clone(),
                r.n.to_string(),
                s.to_string(),
                n.to_string(),
                fmt_f64(r.estimate.slope),
                fmt_f64(g.a_fit),
                fmt_f64(g.b_fit),
            ]);
        }
    }
    let tol = cfg.tolerance.unwrap_or(0.25);
    let mut assertions = vec![Assertion::new(
        "affine_dimension_law",
        g.max_residual <= tol && g.off_line.is_empty(),
        format!(
            "dim X[n] ~ {}(n+1) + {}, max residual {}{}",
            g.a,
            g.b,
            fmt_f64(g.max_residual),
            if g.off_line.is_empty() { String::new() } else { format!(", off the line at n = {:?}", g.off_line) }
        ),
    )];
    if let Some((a, b)) = cfg.expect {
        assertions.push(Assertion::new(
            "expected_a_b",
            (g.a, g.b) == (a, b),
            format!("fitted ({}, {}), expected ({a}, {b})", g.a, g.b),
        ));
    }
    Ok(Report {
        header: vec!["fixture", "n", "s", "N", "slope_n", "a_fit", "b_fit"],
        rows,
        assertions,
        max_residual: Some(g.max_residual),
        notes: g.gaps.iter().map(|(n, why)| format!("n = {n} skipped: {why}")).collect(),
    })
}
