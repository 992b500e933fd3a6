//! Dimension growth of directly presented difference schemes, estimated from
//! exact point counts of the prolongations `X[n]` over `F_{p^s}`.
//!
//! `X[n]` is the set of chains `(x_0, …, x_n)` with `S(x_i, x_{i+1}) = 0`, so
//! `|X[n](F)| = 1ᵀ Aⁿ 1` for the 0/1 adjacency matrix `A` of the relation
//! `S(F)`. Counting walks enumerates every chain exactly once without
//! materializing them.

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::diff_poly::DiffPoly;
use crate::ffield::{make_field, is_prime, Field, MultiPoly, PrimeField, TableField};
use crate::stats::fit_line;
use crate::{Error, Result};

/// Largest `q^{s(n+1)d}` a single cell may range over.
pub const ENUMERATION_BUDGET: u128 = 1 << 26;

/// A correspondence `S ⊆ A^d × A^d` cut out by polynomials in `2d`
/// variables: `0..d` for the `x`-stage and `d..2d` for the `σx`-stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectPresentation {
    d: usize,
    equations: Vec<MultiPoly>,
    field: PrimeField,
}

impl DirectPresentation {
    pub fn new(field: PrimeField, d: usize, equations: Vec<MultiPoly>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        for e in &equations {
            if e.nvars() != 2 * d {
                return Err(Error::VarMismatch(e.nvars(), 2 * d));
            }
            if e.p() != field.p() {
                return Err(Error::CharMismatch(e.p(), field.p()));
            }
        }
        Ok(DirectPresentation { d, equations, field })
    }

    /// From difference polynomials of order at most 1 in `d` variables:
    /// `x_j` is the `x`-stage, `σ(x_j)` the `σx`-stage.
    pub fn from_diff_polys(system: &[DiffPoly], p: u64, d: usize) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let mut equations = Vec::with_capacity(system.len());
        for u in system {
            if u.nvars() != d {
                return Err(Error::VarMismatch(u.nvars(), d));
            }
            if u.order().is_some_and(|o| o > 1) {
                return Err(Error::Invalid(format!("order {} > 1 in a direct presentation", u.order().unwrap())));
            }
            let u = u.reduced_mod(p)?;
            let terms = u.terms().map(|(exps, c)| {
                let mut e = vec![0u64; 2 * d];
                for (j, s) in exps.iter().enumerate() {
                    e[j] = s.coeff(0) as u64;
                    e[d + j] = s.coeff(1) as u64;
                }
                (e, c.to_u64().expect("reduced coefficient"))
            });
            equations.push(MultiPoly::from_terms(field, 2 * d, terms));
        }
        Self::new(field, d, equations)
    }

    /// Parses each string in the difference-polynomial grammar.
    pub fn parse(texts: &[&str], p: u64, d: usize) -> Result<Self> {
        let system = texts
            .iter()
            .map(|t| DiffPoly::parse(t, p, d))
            .collect::<Result<Vec<_>>>()?;
        Self::from_diff_polys(&system, p, d)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }
}

/// The chained system `{S(x_i, x_{i+1}) : 0 ≤ i < n}` in `(n+1)d` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prolongation {
    pub n: usize,
    pub presentation: DirectPresentation,
    pub polys: Vec<MultiPoly>,
}

impl Prolongation {
    pub fn nvars(&self) -> usize {
        (self.n + 1) * self.presentation.d
    }
}

pub fn prolong(pres: &DirectPresentation, n: usize) -> Prolongation {
    let d = pres.d;
    let nv = (n + 1) * d;
    let mut polys = Vec::with_capacity(n * pres.equations.len());
    for i in 0..n {
        for s in &pres.equations {
            polys.push(MultiPoly::from_terms(
                pres.field,
                nv,
                s.terms().map(|(e, &c)| {
                    let mut ext = vec![0u64; nv];
                    ext[i * d..(i + 2) * d].copy_from_slice(e);
                    (ext, c)
                }),
            ));
        }
    }
    Prolongation {
        n,
        presentation: pres.clone(),
        polys,
    }
}

/// `q^{s(n+1)d}` for `q = p`, saturating.
pub fn search_space(p: u64, s: u32, n: usize, d: usize) -> u128 {
    let e = s as u64 * (n as u64 + 1) * d as u64;
    (p as u128).checked_pow(e.min(u32::MAX as u64) as u32).unwrap_or(u128::MAX)
}

pub fn check_budget(p: u64, s: u32, n: usize, d: usize) -> Result<()> {
    let size = search_space(p, s, n, d);
    if size > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            size,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

fn table_field(p: u64, s: u32) -> Result<TableField> {
    if (p as u128).pow(s) > TableField::MAX_ORDER as u128 {
        return Err(Error::Invalid(format!("F_{{{p}^{s}}} is too large to tabulate")));
    }
    TableField::new(&make_field(p, s as usize, 0)?)
}

/// Decodes point index `i` of `F^d` into coordinates, least significant first.
fn decode(i: usize, order: usize, out: &mut [u16]) {
    let mut i = i;
    for c in out.iter_mut() {
        *c = (i % order) as u16;
        i /= order;
    }
}

/// `|X[n](F_{p^s})|`.
pub fn count_points(x: &Prolongation, s: u32) -> Result<u64> {
    let pres = &x.presentation;
    let (p, d, n) = (pres.p(), pres.d, x.n);
    check_budget(p, s, n, d)?;
    let field = table_field(p, s)?;
    let order = field.order_u32() as usize;
    let points = order.pow(d as u32);
    if n == 0 {
        return Ok(points as u64);
    }
    // successors of each point under S, rows built in parallel
    let succ: Vec<Vec<u32>> = (0..points)
        .into_par_iter()
        .map(|a| {
            let mut pt = vec![0u16; 2 * d];
            decode(a, order, &mut pt[..d]);
            (0..points)
                .filter(|&b| {
                    decode(b, order, &mut pt[d..]);
                    pres.equations.iter().all(|e| field.is_zero(&e.eval(&field, &pt)))
                })
                .map(|b| b as u32)
                .collect()
        })
        .collect();
    let mut walks = vec![1u64; points];
    for _ in 0..n {
        let mut next = vec![0u64; points];
        for (a, row) in succ.iter().enumerate() {
            for &b in row {
                next[b as usize] += walks[a];
            }
        }
        walks = next;
    }
    Ok(walks.iter().sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimEstimate {
    /// `(s, N(s))`.
    pub counts: Vec<(u32, u64)>,
    /// Least-squares slope of `log_p N(s)` against `s`.
    pub slope: f64,
}

/// Exact `N(s)` for each `s` and the slope of `log_p N(s)` in `s`.
pub fn estimate_dim(x: &Prolongation, p: u64, s_grid: &[u32]) -> Result<DimEstimate> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p != x.presentation.p() {
        return Err(Error::CharMismatch(p, x.presentation.p()));
    }
    for &s in s_grid {
        check_budget(p, s, x.n, x.presentation.d)?;
    }
    let counts = s_grid
        .iter()
        .map(|&s| Ok((s, count_points(x, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let lnp = (p as f64).ln();
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .filter(|c| c.1 > 0)
        .map(|&(s, n)| (s as f64, (n as f64).ln() / lnp))
        .collect();
    if pts.is_empty() {
        return Err(Error::InsufficientData("all counts are zero".into()));
    }
    let slope = fit_line(&pts)?.slope;
    Ok(DimEstimate { counts, slope })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub estimate: DimEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProfile {
    pub rows: Vec<GrowthRow>,
    /// `n` with no estimate, and why.
    pub gaps: Vec<(usize, String)>,
    /// Raw fit `dim X[n] ≈ a_fit·(n+1) + b_fit`.
    pub a_fit: f64,
    pub b_fit: f64,
    pub a: i64,
    pub b: i64,
    /// Largest `|slope_n − (a(n+1) + b)|`.
    pub max_residual: f64,
    /// `n` whose rounded estimate is off the fitted line.
    pub off_line: Vec<usize>,
}

pub const MIN_PROFILE_POINTS: usize = 3;

/// Per-`n` dimension estimates and the integer affine law through them.
/// Each `n` uses the part of `s_grid` inside the enumeration budget.
pub fn growth_profile(
    pres: &DirectPresentation,
    p: u64,
    n_grid: &[usize],
    s_grid: &[u32],
) -> Result<GrowthProfile> {
    let cells: Vec<(usize, Result<DimEstimate>)> = n_grid
        .par_iter()
        .map(|&n| {
            let within: Vec<u32> = s_grid
                .iter()
                .copied()
                .filter(|&s| check_budget(p, s, n, pres.d).is_ok())
                .collect();
            (n, estimate_dim(&prolong(pres, n), p, &within))
        })
        .collect();
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for (n, cell) in cells {
        match cell {
            Ok(estimate) => rows.push(GrowthRow { n, estimate }),
            Err(e @ (Error::InsufficientData(_) | Error::BudgetExceeded { .. })) => gaps.push((n, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if rows.len() < MIN_PROFILE_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} usable stage counts, need {MIN_PROFILE_POINTS}",
            rows.len()
        )));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n + 1) as f64, r.estimate.slope)).collect();
    let fit = fit_line(&pts)?;
    let (a, b) = (fit.slope.round() as i64, fit.intercept.round() as i64);
    let line = |n: usize| (a * (n as i64 + 1) + b) as f64;
    let max_residual = rows
        .iter()
        .map(|r| (r.estimate.slope - line(r.n)).abs())
        .fold(0.0, f64::max);
    let off_line = rows
        .iter()
        .filter(|r| r.estimate.slope.round() != line(r.n))
        .map(|r| r.n)
        .collect();
    Ok(GrowthProfile {
        rows,
        gaps,
        a_fit: fit.slope,
        b_fit: fit.intercept,
        a,
        b,
        max_residual,
        off_line,
    })
}
