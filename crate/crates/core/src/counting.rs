//! Exact point counts: twisted counts `|S ∩ Φ_q|` for plane correspondences
//! and closure counts of zero-dimensional plane systems.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::diff_poly::DiffPoly;
use crate::ffield::{
    census_with_witness, distinct_root_count, factor_squarefree, is_irreducible_over, prime_power_exponent,
    radical, resultant_y, sparse_census, Census, FieldCtx, FqElement, MultiPoly, PolyRing, PrimeField,
    SparsePoly, UniPoly, DENSE_LIMIT,
};
use crate::frob_reduce::mq_reduce;
use crate::{Error, Result};

/// `s(x, y) ∈ F_p[x, y]` read as a correspondence `S ⊂ A¹ × A¹`, with `x`
/// the first variable and `y` the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCorrespondence {
    s: MultiPoly,
    delta: u64,
    delta_x: u64,
    insep: u64,
}

impl PlaneCorrespondence {
    pub fn new(s: MultiPoly) -> Result<Self> {
        if s.nvars() != 2 {
            return Err(Error::VarMismatch(s.nvars(), 2));
        }
        let (delta, delta_x) = (s.degree_in(1), s.degree_in(0));
        if delta == 0 || delta_x == 0 {
            return Err(Error::ConstantInVariable);
        }
        let p = s.p();
        let mut g = s.clone();
        let mut insep = 1;
        while g.partial(0).is_zero() {
            g = g.map_exponents(|i, e| if i == 0 { e / p } else { e });
            insep *= p;
        }
        Ok(PlaneCorrespondence {
            s,
            delta,
            delta_x,
            insep,
        })
    }

    /// From a one-variable difference polynomial of order ≤ 1: `x = x1`, `y = σ(x1)`.
    pub fn from_diff_poly(f: &DiffPoly, p: u64) -> Result<Self> {
        if f.nvars() != 1 {
            return Err(Error::VarMismatch(f.nvars(), 1));
        }
        if f.order().unwrap_or(0) > 1 {
            return Err(Error::Invalid("a plane correspondence needs order at most 1".into()));
        }
        let field = PrimeField::new(p)?;
        let f = f.reduced_mod(p)?;
        let terms = f.terms().map(|(e, c)| {
            let nu = &e[0];
            let c = u64::try_from(c).unwrap();
            (vec![nu.coeff(0) as u64, nu.coeff(1) as u64], c)
        });
        Self::new(MultiPoly::from_terms(field, 2, terms))
    }

    pub fn parse(text: &str, p: u64) -> Result<Self> {
        Self::from_diff_poly(&DiffPoly::parse(text, p, 1)?, p)
    }

    pub fn s(&self) -> &MultiPoly {
        &self.s
    }
    pub fn p(&self) -> u64 {
        self.s.p()
    }
    /// `[S : X] = deg_y s`.
    pub fn delta(&self) -> u64 {
        self.delta
    }
    pub fn delta_x(&self) -> u64 {
        self.delta_x
    }
    /// `p^r`, the purely inseparable part found by the `x ↦ x^p` descent.
    pub fn insep(&self) -> u64 {
        self.insep
    }

    /// `a = [S:X] / [S:X']_insep`.
    pub fn expected_coefficient(&self) -> Ratio<u64> {
        Ratio::new(self.delta, self.insep)
    }

    /// `T(x) = s(x, x^q)`.
    pub fn twisted_polynomial(&self, q: u64) -> SparsePoly {
        twisted_polynomial(&self.s, q)
    }

    /// Root statistics of `T(x) = s(x, x^q)`.
    pub fn count_twisted(&self, q: u64) -> Result<TwistedCount> {
        if prime_power_exponent(q, self.p()).is_none() {
            return Err(Error::NotPrimePower { q, p: self.p() });
        }
        let t = self.twisted_polynomial(q);
        let with_mult = t.degree().ok_or(Error::Degenerate(q))?;
        if with_mult == 0 {
            return Err(Error::Degenerate(q));
        }
        let histogram = twisted_census(&self.s, q)?;
        Ok(TwistedCount {
            q,
            distinct: histogram.distinct(),
            with_mult,
            histogram,
        })
    }

    /// Sufficient test for absolute irreducibility: `s` has no factor in
    /// `F_p[x]`, some fibre `s(x_0, y)` with `x_0 ∈ F_p` is irreducible of full
    /// degree `δ`, and `gcd(δ, deg_x s) = 1`. The first two give irreducibility
    /// over `F_p`; a splitting over an extension would be into `k` conjugates
    /// of equal bidegree with `k | gcd(δ, deg_x s)`.
    pub fn certify_absolutely_irreducible(&self) -> bool {
        if num_integer::gcd(self.delta, self.delta_x) != 1 {
            return false;
        }
        let field = self.s.field();
        let ring = PolyRing::new(field);
        let rows = self.s.as_bivariate(1, 0);
        let content = rows.iter().fold(UniPoly::zero(), |g, c| ring.gcd(&g, c));
        if content.deg() > 0 {
            return false;
        }
        (0..field.p()).any(|x0| {
            let fibre = ring.poly(rows.iter().map(|c| ring.eval(c, &x0)).collect());
            fibre.degree() == Some(self.delta as usize) && is_irreducible_over(&ring, &fibre)
        })
    }
}

/// `s(x, x^q)` with like powers merged.
pub fn twisted_polynomial(s: &MultiPoly, q: u64) -> SparsePoly {
    SparsePoly::from_terms(s.field(), s.terms().map(|(e, &c)| (e[0] + q * e[1], c)))
}

/// Multiplicity census of `s(x, x^q)` over the closure.
///
/// When `p | q` the derivative of `T` is `s_x(x, x^q)`, so every multiple
/// root `α` makes `(α, α^q)` a common zero of `s` and `s_x`, and
/// `Res_y(s, s_x)` is a witness for the sparse engine. `s_x = 0` means
/// `s = g(x^p, y)` and `T = g(x, x^{q/p})^p`.
pub fn twisted_census(s: &MultiPoly, q: u64) -> Result<Census> {
    twisted_census_above(s, q, DENSE_LIMIT)
}

fn twisted_census_above(s: &MultiPoly, q: u64, dense_limit: u64) -> Result<Census> {
    let t = twisted_polynomial(s, q);
    let deg = t.degree().ok_or(Error::Degenerate(q))?;
    let p = s.p();
    if deg <= dense_limit || !q.is_multiple_of(p) {
        return sparse_census(&t, None);
    }
    let sx = s.partial(0);
    if sx.is_zero() {
        let g = s.map_exponents(|i, e| if i == 0 { e / p } else { e });
        return Ok(twisted_census_above(&g, q / p, dense_limit)?.scaled(p));
    }
    let w = if s.degree_in(1) == 0 && sx.degree_in(1) == 0 {
        sx.as_univariate(0)
    } else {
        resultant_y(s, &sx, 0, 1)?
    };
    if w.is_zero() {
        sparse_census(&t, None)
    } else {
        census_with_witness(&t, &w)
    }
}

/// Census of the univariate reduction `M_q(u)` of a one-variable difference
/// polynomial. Order ≤ 1 goes through [`twisted_census`]; higher orders rely
/// on the derivative witness of [`sparse_census`].
pub fn reduction_census(u: &DiffPoly, q: u64) -> Result<Census> {
    let (p, _) = crate::ffield::as_prime_power(q).ok_or(Error::NotPrimePower { q, p: u.char() })?;
    if u.nvars() != 1 {
        return Err(Error::VarMismatch(u.nvars(), 1));
    }
    if u.order().unwrap_or(0) <= 1 {
        let field = PrimeField::new(p)?;
        let f = u.reduced_mod(p)?;
        let s = MultiPoly::from_terms(
            field,
            2,
            f.terms().map(|(e, c)| {
                let c: u64 = c.try_into().unwrap();
                (vec![e[0].coeff(0) as u64, e[0].coeff(1) as u64], c)
            }),
        );
        return twisted_census(&s, q).map_err(|e| match e {
            Error::Degenerate(_) => Error::ZeroPolynomial,
            e => e,
        });
    }
    let m = mq_reduce(u, q)?;
    sparse_census(&SparsePoly::from_multi(&m, 0), None)
}

/// One cell of a twisted-count experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedCount {
    pub q: u64,
    pub distinct: u64,
    pub with_mult: u64,
    /// multiplicity → number of distinct roots
    pub histogram: Census,
}

/// Twisted counts of one correspondence along a `q`-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSeries {
    pub records: Vec<TwistedCount>,
    pub a: Ratio<u64>,
    pub d: u32,
    /// `q` values left out, with the reason.
    pub excluded: Vec<(u64, String)>,
}

impl CountSeries {
    /// Counts every `q` in parallel; degenerate `q` are excluded and logged.
    pub fn collect(s: &PlaneCorrespondence, q_grid: &[u64]) -> Result<Self> {
        let cells: Vec<Result<TwistedCount>> = q_grid.par_iter().map(|&q| s.count_twisted(q)).collect();
        let mut records = Vec::new();
        let mut excluded = Vec::new();
        for (q, cell) in q_grid.iter().zip(cells) {
            match cell {
                Ok(r) => records.push(r),
                Err(e @ Error::Degenerate(_)) => excluded.push((*q, e.to_string())),
                Err(e) => return Err(e),
            }
        }
        Ok(CountSeries {
            records,
            a: s.expected_coefficient(),
            d: 1,
            excluded,
        })
    }

    /// Largest total multiplicity carried by roots of multiplicity `≥ b`.
    pub fn max_weight_at_least(&self, b: u64) -> u64 {
        self.records.iter().map(|r| r.histogram.weight_at_least(b)).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub c_max: f64,
    /// `(q, |distinct − a·q^d| / q^{d − 1/2})`
    pub residuals: Vec<(u64, f64)>,
    /// At least three residuals, each strictly larger than the one before.
    pub monotone_growth: bool,
}

/// Normalized residuals of a series against `a·q^d`.
pub fn fit_error(series: &CountSeries) -> Result<FitReport> {
    if series.records.is_empty() {
        return Err(Error::InsufficientData("empty count series".into()));
    }
    let a = *series.a.numer() as f64 / *series.a.denom() as f64;
    let d = series.d as f64;
    let residuals: Vec<(u64, f64)> = series
        .records
        .iter()
        .map(|r| {
            let q = r.q as f64;
            (r.q, (r.distinct as f64 - a * q.powf(d)).abs() / q.powf(d - 0.5))
        })
        .collect();
    let c_max = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    let monotone_growth = residuals.len() >= 3 && residuals.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(FitReport {
        c_max,
        residuals,
        monotone_growth,
    })
}

/// Above this resultant degree bound the general path gives up.
pub const RESULTANT_LIMIT: u64 = 1500;

/// Number of distinct common zeros in the closure of two polynomials in
/// `F_p[x, y]` (variables `x = x_1`, `y = x_2`).
pub fn count_affine_system(polys: &[MultiPoly]) -> Result<u64> {
    let (u1, u2) = check_pair(polys)?;
    if let Some(n) = fast_paths(u1, u2)? {
        return Ok(n);
    }
    Ok(general(u1, u2, false)?.values().sum())
}

/// Common zeros grouped by the degree over `F_p` of their field of definition.
pub fn solutions_by_degree(polys: &[MultiPoly]) -> Result<BTreeMap<u64, u64>> {
    let (u1, u2) = check_pair(polys)?;
    general(u1, u2, true)
}

fn check_pair(polys: &[MultiPoly]) -> Result<(&MultiPoly, &MultiPoly)> {
    let [u1, u2] = polys else {
        return Err(Error::Invalid(format!("expected 2 polynomials, got {}", polys.len())));
    };
    for u in [u1, u2] {
        if u.nvars() != 2 {
            return Err(Error::VarMismatch(u.nvars(), 2));
        }
    }
    if u1.p() != u2.p() {
        return Err(Error::CharMismatch(u1.p(), u2.p()));
    }
    Ok((u1, u2))
}

fn uses_only(u: &MultiPoly, var: usize) -> bool {
    !u.uses_var(1 - var)
}

fn univariate_distinct(u: &MultiPoly, var: usize) -> Result<u64> {
    if u.is_zero() {
        return Err(Error::PositiveDimensional);
    }
    Ok(sparse_census(&SparsePoly::from_multi(u, var), None)?.distinct())
}

/// Structured shapes with closed-form counts:
/// decoupled `{U_1(x), U_2(y)}`, and triangular `{U_a(x), U_b(x, y)}` with
/// `∂U_b/∂y` a nonzero constant and the top `y`-coefficient constant, so
/// every fibre of `U_b` over a root of `U_a` has exactly `deg_y U_b` simple roots.
fn fast_paths(u1: &MultiPoly, u2: &MultiPoly) -> Result<Option<u64>> {
    for (a, b) in [(u1, u2), (u2, u1)] {
        if a.is_zero() || b.is_zero() {
            return Err(Error::PositiveDimensional);
        }
        for var in 0..2 {
            let other = 1 - var;
            if !uses_only(a, var) || a.is_constant() {
                continue;
            }
            if uses_only(b, other) && !b.is_constant() {
                return Ok(Some(univariate_distinct(a, var)? * univariate_distinct(b, other)?));
            }
            let db = b.partial(other);
            let top = b.degree_in(other);
            let top_constant = b.terms().filter(|(e, _)| e[other] == top).all(|(e, _)| e[var] == 0);
            if top > 0 && db.is_constant() && !db.is_zero() && top_constant {
                return Ok(Some(univariate_distinct(a, var)? * top));
            }
        }
    }
    Ok(None)
}

fn general(u1: &MultiPoly, u2: &MultiPoly, by_degree: bool) -> Result<BTreeMap<u64, u64>> {
    let field = u1.field();
    let ring = PolyRing::new(field);
    let (dx1, dy1, dx2, dy2) = (u1.degree_in(0), u1.degree_in(1), u2.degree_in(0), u2.degree_in(1));
    let mut out = BTreeMap::new();
    if u1.is_zero() || u2.is_zero() {
        return Err(Error::PositiveDimensional);
    }
    if dy1 == 0 && dy2 == 0 {
        let g = ring.gcd(&u1.as_univariate(0), &u2.as_univariate(0));
        return if g.deg() == 0 { Ok(out) } else { Err(Error::PositiveDimensional) };
    }
    let bound = dx1 * dy2 + dx2 * dy1;
    if bound > RESULTANT_LIMIT {
        return Err(Error::Infeasible(format!("resultant degree bound {bound}")));
    }
    let r = resultant_y(u1, u2, 0, 1)?;
    if r.is_zero() {
        return Err(Error::PositiveDimensional);
    }
    if r.deg() == 0 {
        return Ok(out);
    }
    let rows1 = u1.as_bivariate(1, 0);
    let rows2 = u2.as_bivariate(1, 0);
    for (pi, e) in factor_squarefree(&ring, &radical(&ring, &r), 0)? {
        let ctx = FieldCtx::from_modulus(field.p(), pi.coeffs())?;
        let fring = PolyRing::new(ctx.clone());
        let specialize = |rows: &[UniPoly<PrimeField>]| -> UniPoly<FieldCtx> {
            let coeffs: Vec<FqElement> = rows.iter().map(|c| ctx.element(ring.rem(c, &pi).coeffs())).collect();
            fring.poly(coeffs)
        };
        let (a, b) = (specialize(&rows1), specialize(&rows2));
        let g = match (a.is_zero(), b.is_zero()) {
            (true, true) => return Err(Error::PositiveDimensional),
            (true, false) => b,
            (false, true) => a,
            (false, false) => fring.gcd(&a, &b),
        };
        if g.deg() == 0 {
            continue;
        }
        let e = e as u64;
        if by_degree {
            for (_, f) in factor_squarefree(&fring, &radical(&fring, &g), e)? {
                *out.entry(e * f as u64).or_insert(0) += e * f as u64;
            }
        } else {
            *out.entry(e).or_insert(0) += e * distinct_root_count(&fring, &g)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::{multiplicity_census, Field, TableField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corr(text: &str, p: u64) -> PlaneCorrespondence {
        PlaneCorrespondence::parse(text, p).unwrap()
    }

    fn powers(p: u64, lo: u32, hi: u32) -> Vec<u64> {
        (lo..=hi).map(|e| p.pow(e)).collect()
    }

    /// Dense oracle: expand `T` and run the squarefree decomposition.
    fn dense_twisted(s: &PlaneCorrespondence, q: u64) -> Census {
        let ring = PolyRing::new(s.s().field());
        multiplicity_census(&ring, &s.twisted_polynomial(q).to_dense()).unwrap()
    }

    #[test]
    fn expected_coefficient_examples() {
        assert_eq!(corr("x1@1 - x1", 7).expected_coefficient(), Ratio::new(1, 1));
        assert_eq!(corr("x1@1 - x1^2", 5).expected_coefficient(), Ratio::new(1, 1));
        assert_eq!(corr("x1@1 - x1^2", 2).expected_coefficient(), Ratio::new(1, 2));
        assert_eq!(corr("x1@1^2 - x1^3 - 1", 5).expected_coefficient(), Ratio::new(2, 1));
        assert_eq!(corr("x1@1 - x1^9", 3).expected_coefficient(), Ratio::new(1, 9));
        assert_eq!(PlaneCorrespondence::parse("x1@1 - 1", 3), Err(Error::ConstantInVariable));
        assert_eq!(PlaneCorrespondence::parse("x1^2 - 1", 3), Err(Error::ConstantInVariable));
    }

    #[test]
    fn count_twisted_examples() {
        for q in [2u64, 4, 8, 16] {
            assert_eq!(corr("x1@1 - x1", 2).count_twisted(q).unwrap().distinct, q);
        }
        let c = corr("x1@1 - x1^2", 3).count_twisted(9).unwrap();
        assert_eq!((c.distinct, c.with_mult), (8, 9));
        assert_eq!(c.histogram, [(2, 1), (1, 7)].into_iter().collect());
        let c = corr("x1@1 - x1^2", 2).count_twisted(8).unwrap();
        assert_eq!(c.distinct, 4);
        assert_eq!(c.histogram, [(2, 4)].into_iter().collect());
        assert!(matches!(corr("x1@1 - x1", 3).count_twisted(4), Err(Error::NotPrimePower { .. })));
    }

    #[test]
    fn degenerate_twist_is_reported() {
        // x·y − x^{q+1} vanishes identically at q = 3, not at q = 9
        let s = corr("x1*x1@1 - x1^4", 3);
        assert_eq!(s.count_twisted(3), Err(Error::Degenerate(3)));
        assert!(s.count_twisted(9).is_ok());
        let series = CountSeries::collect(&s, &[3, 9, 27]).unwrap();
        assert_eq!(series.excluded.len(), 1);
        assert_eq!(series.records.len(), 2);
    }

    #[test]
    fn large_q_matches_closed_forms() {
        for p in [3u64, 5, 7] {
            for q in powers(p, 1, 6) {
                assert_eq!(corr("x1@1 - x1^2", p).count_twisted(q).unwrap().distinct, q - 1);
            }
        }
        for q in powers(2, 2, 12) {
            assert_eq!(corr("x1@1 - x1^2", 2).count_twisted(q).unwrap().distinct, q / 2);
        }
    }

    #[test]
    fn sparse_engine_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for p in [2u64, 3, 5] {
            let field = PrimeField::new(p).unwrap();
            let mut checked = 0;
            while checked < 25 {
                let terms: Vec<(Vec<u64>, u64)> = (0..5)
                    .map(|_| (vec![rng.gen_range(0..4), rng.gen_range(0..4)], rng.gen_range(1..p.max(2))))
                    .collect();
                let Ok(s) = PlaneCorrespondence::new(MultiPoly::from_terms(field, 2, terms)) else {
                    continue;
                };
                let q = p.pow(rng.gen_range(1..5));
                let Ok(c) = twisted_census_above(s.s(), q, 0) else { continue };
                assert_eq!(c, dense_twisted(&s, q), "{} q = {q}", s.s());
                checked += 1;
            }
        }
    }

    #[test]
    fn with_mult_is_top_exponent() {
        let s = corr("3*x1^2*x1@1^3 + x1^3 + x1@1 + 1", 5);
        for q in powers(5, 1, 5) {
            let c = s.count_twisted(q).unwrap();
            assert_eq!(c.with_mult, 2 + 3 * q);
            assert_eq!(c.histogram.weighted(), c.with_mult);
        }
    }

    #[test]
    fn fit_error_examples() {
        let diag = CountSeries::collect(&corr("x1@1 - x1", 5), &powers(5, 1, 5)).unwrap();
        let rep = fit_error(&diag).unwrap();
        assert!(rep.residuals.iter().all(|r| r.1 == 0.0));
        assert!(!rep.monotone_growth);

        let graph = CountSeries::collect(&corr("x1@1 - x1^2", 3), &powers(3, 1, 6)).unwrap();
        let rep = fit_error(&graph).unwrap();
        for (q, r) in &rep.residuals {
            assert!((r - 1.0 / (*q as f64).sqrt()).abs() < 1e-12);
        }
        assert!(rep.residuals.windows(2).all(|w| w[1].1 < w[0].1));

        let elliptic = CountSeries::collect(&corr("x1@1^2 - x1^3 - 1", 5), &powers(5, 1, 6)).unwrap();
        let rep = fit_error(&elliptic).unwrap();
        assert!(rep.c_max < 10.0, "{rep:?}");
        assert!(!rep.monotone_growth);

        let empty = CountSeries {
            records: vec![],
            a: Ratio::new(1, 1),
            d: 1,
            excluded: vec![],
        };
        assert!(fit_error(&empty).is_err());
    }

    #[test]
    fn irreducibility_certificate() {
        assert!(corr("x1@1 - x1", 5).certify_absolutely_irreducible());
        assert!(corr("x1@1^2 - x1^3 - 1", 5).certify_absolutely_irreducible());
        // (y − x)(y + x): reducible, and δ = deg_x = 2 anyway
        assert!(!corr("x1@1^2 - x1^2", 5).certify_absolutely_irreducible());
        // x·(y − 1) has content x
        assert!(!corr("x1*x1@1 - x1", 5).certify_absolutely_irreducible());
    }

    fn mp(p: u64, terms: &[((u64, u64), i64)]) -> MultiPoly {
        let f = PrimeField::new(p).unwrap();
        MultiPoly::from_terms(f, 2, terms.iter().map(|((a, b), c)| (vec![*a, *b], f.from_i64(*c))))
    }

    #[test]
    fn affine_examples() {
        let sys = [mp(5, &[((1, 0), 1), ((0, 0), -1)]), mp(5, &[((0, 1), 1), ((0, 0), -2)])];
        assert_eq!(count_affine_system(&sys).unwrap(), 1);
        let sys = [mp(5, &[((0, 1), 1), ((2, 0), -1)]), mp(5, &[((0, 1), 1), ((0, 0), -1)])];
        assert_eq!(count_affine_system(&sys).unwrap(), 2);
        // y = x^2, x = y^2 over F_3: x^4 − x = x (x − 1)^3 so only two points
        let sys = [mp(3, &[((0, 1), 1), ((2, 0), -1)]), mp(3, &[((1, 0), 1), ((0, 2), -1)])];
        assert_eq!(count_affine_system(&sys).unwrap(), 2);
        assert_eq!(solutions_by_degree(&sys).unwrap(), [(1, 2)].into_iter().collect());
        // and four over F_5
        let sys = [mp(5, &[((0, 1), 1), ((2, 0), -1)]), mp(5, &[((1, 0), 1), ((0, 2), -1)])];
        assert_eq!(count_affine_system(&sys).unwrap(), 4);
    }

    #[test]
    fn affine_errors() {
        let line = mp(5, &[((0, 1), 1), ((1, 0), -1)]);
        let twice = mp(5, &[((0, 1), 2), ((1, 0), -2)]);
        assert_eq!(count_affine_system(&[line.clone(), twice]), Err(Error::PositiveDimensional));
        assert!(matches!(count_affine_system(&[line]), Err(Error::Invalid(_))));
        let x = mp(5, &[((1, 0), 1)]);
        let x_shift = mp(5, &[((1, 0), 1), ((0, 0), 1)]);
        assert_eq!(count_affine_system(&[x.clone(), x_shift]).unwrap(), 0);
        assert_eq!(count_affine_system(&[x.clone(), x]), Err(Error::PositiveDimensional));
    }

    /// Points over `F_{p^s}` by exhaustive enumeration.
    fn brute(polys: &[MultiPoly], p: u64, s: usize) -> u64 {
        let ctx = FieldCtx::make_field(p, s, 0).unwrap();
        let t = TableField::new(&ctx).unwrap();
        let n = t.order_u32() as u16;
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                if polys.iter().all(|u| t.is_zero(&u.eval(&t, &[a, b]))) {
                    count += 1;
                }
            }
        }
        count
    }

    fn random_poly(rng: &mut ChaCha8Rng, p: u64, deg: u64) -> MultiPoly {
        let f = PrimeField::new(p).unwrap();
        let n = rng.gen_range(2..6);
        MultiPoly::from_terms(
            f,
            2,
            (0..n).map(|_| {
                let a = rng.gen_range(0..=deg);
                let b = rng.gen_range(0..=deg - a);
                (vec![a, b], rng.gen_range(0..p))
            }),
        )
    }

    #[test]
    fn agrees_with_enumeration_over_small_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            let mut checked = 0;
            while checked < 15 {
                let sys = [random_poly(&mut rng, p, 3), random_poly(&mut rng, p, 3)];
                let Ok(by_deg) = solutions_by_degree(&sys) else { continue };
                for s in 1..=3u64 {
                    let expected: u64 = by_deg.iter().filter(|(d, _)| s % **d == 0).map(|(_, n)| n).sum();
                    assert_eq!(brute(&sys, p, s as usize), expected, "{sys:?} s = {s}");
                }
                assert_eq!(count_affine_system(&sys).unwrap(), by_deg.values().sum::<u64>());
                checked += 1;
            }
        }
    }

    #[test]
    fn fast_paths_agree_with_general_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [3u64, 5] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..30 {
                let q = p.pow(rng.gen_range(1..3));
                let g: Vec<(Vec<u64>, u64)> =
                    (0..3).map(|_| (vec![rng.gen_range(0..3), 0], rng.gen_range(0..p))).collect();
                // U_a = x^q − g(x), U_b = y^q − y − h(x)
                let mut ua = MultiPoly::from_terms(f, 2, g.clone());
                ua = MultiPoly::from_terms(f, 2, [(vec![q, 0], 1)]).sub(&ua);
                let h: Vec<(Vec<u64>, u64)> =
                    (0..3).map(|_| (vec![rng.gen_range(0..3), 0], rng.gen_range(0..p))).collect();
                let ub = MultiPoly::from_terms(f, 2, [(vec![0, q], 1), (vec![0, 1], p - 1)])
                    .sub(&MultiPoly::from_terms(f, 2, h));
                let sys = [ua.clone(), ub];
                let fast = count_affine_system(&sys).unwrap();
                let slow: u64 = general(&sys[0], &sys[1], false).unwrap().values().sum();
                assert_eq!(fast, slow);
                let vy = MultiPoly::from_terms(f, 2, [(vec![0, 2], 1), (vec![0, 0], p - 1)]);
                let sys = [ua, vy];
                let fast = count_affine_system(&sys).unwrap();
                let slow: u64 = general(&sys[0], &sys[1], false).unwrap().values().sum();
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn reduction_census_matches_dense() {
        let cases = ["x1@1 - x1 - 1", "x1@2 - x1^2", "x1@2 + x1*x1@1 + 1", "x1@2*x1 - x1@1^2 + 2"];
        for p in [3u64, 5] {
            for text in cases {
                let u = DiffPoly::parse(text, 0, 1).unwrap();
                for q in powers(p, 1, 2) {
                    let m = mq_reduce(&u, q).unwrap();
                    let dense = SparsePoly::from_multi(&m, 0).to_dense();
                    let ring = PolyRing::new(PrimeField::new(p).unwrap());
                    assert_eq!(
                        reduction_census(&u, q).unwrap(),
                        multiplicity_census(&ring, &dense).unwrap(),
                        "{text} q = {q}"
                    );
                }
            }
        }
        let u = DiffPoly::parse("x1@1 - x1 - 1", 0, 1).unwrap();
        assert_eq!(reduction_census(&u, 3u64.pow(8)).unwrap().distinct(), 3u64.pow(8));
    }
}
