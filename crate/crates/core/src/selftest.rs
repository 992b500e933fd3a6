//! Seeded property suites run by the `selftest` command. Every case draws
//! its inputs from its own ChaCha stream, so `(suite, seed, case)` replays a
//! single case exactly.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diff_poly::DiffPoly;
use crate::ffield::{
    factor_squarefree, is_irreducible_over, is_squarefree, make_field, radical, squarefree_decomposition, Field,
    PolyRing, PrimeField, UniPoly,
};
use crate::frob_reduce::{collision_threshold, mq_reduce};
use crate::jacobi::{algebraic_jacobi, permanent_naive};
use crate::sigma_exp::{binom_mod, SigmaExp};

/// Binomial coefficient `C(n, k) mod p`.
pub type BinomFn = fn(u64, u64, u64) -> u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    DerivativeSum,
    DerivativeLeibniz,
    DerivativeShift,
    TaylorCompleteness,
    FieldAxioms,
    Gcd,
    Squarefree,
    Factorization,
    EvalAt,
    Permanent,
    DegreeLaw,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::DerivativeSum,
        Suite::DerivativeLeibniz,
        Suite::DerivativeShift,
        Suite::TaylorCompleteness,
        Suite::FieldAxioms,
        Suite::Gcd,
        Suite::Squarefree,
        Suite::Factorization,
        Suite::EvalAt,
        Suite::Permanent,
        Suite::DegreeLaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DerivativeSum => "derivative_sum",
            Suite::DerivativeLeibniz => "derivative_leibniz",
            Suite::DerivativeShift => "derivative_shift",
            Suite::TaylorCompleteness => "taylor_completeness",
            Suite::FieldAxioms => "field_axioms",
            Suite::Gcd => "gcd",
            Suite::Squarefree => "squarefree",
            Suite::Factorization => "factorization",
            Suite::EvalAt => "eval_at",
            Suite::Permanent => "permanent",
            Suite::DegreeLaw => "degree_law",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    pub cases: u64,
    /// Binomial routine used by the derivative suites.
    pub binom: BinomFn,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: DEFAULT_SEED,
            cases: DEFAULT_CASES,
            binom: binom_mod,
        }
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_CASES: u64 = 500;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseFailure {
    pub suite: Suite,
    pub seed: u64,
    pub case: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Cases run, including a failing one.
    pub cases: u64,
    pub failure: Option<CaseFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn case_rng(suite: Suite, seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite.index() << 32) | case);
    rng
}

/// Runs one case.
pub fn run_case(suite: Suite, seed: u64, case: u64, binom: BinomFn) -> Check {
    let rng = &mut case_rng(suite, seed, case);
    match suite {
        Suite::DerivativeSum => derivative_sum(rng, binom),
        Suite::DerivativeLeibniz => derivative_leibniz(rng, binom),
        Suite::DerivativeShift => derivative_shift(rng, binom),
        Suite::TaylorCompleteness => taylor_completeness(rng, binom),
        Suite::FieldAxioms => field_axioms(rng),
        Suite::Gcd => gcd(rng),
        Suite::Squarefree => squarefree(rng),
        Suite::Factorization => factorization(rng),
        Suite::EvalAt => eval_at(rng),
        Suite::Permanent => permanent(rng),
        Suite::DegreeLaw => degree_law(rng),
    }
}

/// Runs cases `0..opts.cases`, stopping at the first failure.
pub fn run_suite(suite: Suite, opts: &SelftestOptions) -> SuiteReport {
    for case in 0..opts.cases {
        if let Err(message) = run_case(suite, opts.seed, case, opts.binom) {
            return SuiteReport {
                suite,
                cases: case + 1,
                failure: Some(CaseFailure {
                    suite,
                    seed: opts.seed,
                    case,
                    message,
                }),
            };
        }
    }
    SuiteReport {
        suite,
        cases: opts.cases,
        failure: None,
    }
}

pub fn run_all(opts: &SelftestOptions) -> Vec<SuiteReport> {
    Suite::ALL.par_iter().map(|&s| run_suite(s, opts)).collect()
}

fn rand_exp<R: Rng>(rng: &mut R, max_order: usize, max: u32) -> SigmaExp {
    SigmaExp::from_coeffs((0..=max_order).map(|_| rng.gen_range(0..=max)).collect())
}

fn rand_diffpoly<R: Rng>(rng: &mut R, char: u64, nvars: usize, max_order: usize, max_deg: u32, max_terms: usize) -> DiffPoly {
    let k = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..k)
        .map(|_| {
            let e = (0..nvars).map(|_| rand_exp(rng, max_order, max_deg)).collect();
            (e, BigInt::from(rng.gen_range(-20i64..20)))
        })
        .collect();
    DiffPoly::from_terms(char, nvars, terms)
}

fn rand_char<R: Rng>(rng: &mut R) -> u64 {
    [2u64, 3, 5, 7][rng.gen_range(0..4)]
}

fn derivative_sum<R: Rng>(rng: &mut R, binom: BinomFn) -> Check {
    let c = rand_char(rng);
    let f = rand_diffpoly(rng, c, 2, 2, 3, 5);
    let g = rand_diffpoly(rng, c, 2, 2, 3, 5);
    let mu = rand_exp(rng, 2, 2);
    let j = rng.gen_range(0..2);
    let lhs = f.add(&g).unwrap().transformal_derivative_with(j, &mu, binom);
    let rhs = f
        .transformal_derivative_with(j, &mu, binom)
        .add(&g.transformal_derivative_with(j, &mu, binom))
        .unwrap();
    ensure!(lhs == rhs, "sum rule fails: f = {f}, g = {g}, mu = {mu}, j = {j}");
    Ok(())
}

fn derivative_leibniz<R: Rng>(rng: &mut R, binom: BinomFn) -> Check {
    let c = rand_char(rng);
    let f = rand_diffpoly(rng, c, 2, 2, 2, 4);
    let g = rand_diffpoly(rng, c, 2, 2, 2, 4);
    let mu = rand_exp(rng, 2, 2);
    let j = rng.gen_range(0..2);
    let lhs = f.mul(&g).unwrap().transformal_derivative_with(j, &mu, binom);
    let mut rhs = DiffPoly::zero(c, 2);
    for m1 in mu.divisors() {
        let m2 = mu.checked_sub(&m1).unwrap();
        let t = f
            .transformal_derivative_with(j, &m1, binom)
            .mul(&g.transformal_derivative_with(j, &m2, binom))
            .unwrap();
        rhs = rhs.add(&t).unwrap();
    }
    ensure!(lhs == rhs, "Leibniz rule fails: f = {f}, g = {g}, mu = {mu}, j = {j}");
    Ok(())
}

fn derivative_shift<R: Rng>(rng: &mut R, binom: BinomFn) -> Check {
    let c = rand_char(rng);
    let f = rand_diffpoly(rng, c, 2, 2, 3, 5);
    let mu = rand_exp(rng, 2, 3);
    let j = rng.gen_range(0..2);
    let lhs = f.sigma_shift().transformal_derivative_with(j, &mu.shift(), binom);
    let rhs = f.transformal_derivative_with(j, &mu, binom).sigma_shift();
    ensure!(lhs == rhs, "shift rule fails: f = {f}, mu = {mu}, j = {j}");
    Ok(())
}

/// `F(X + U) = Σ_ν ∂_ν F(X) U^ν`, coefficient by coefficient.
fn taylor_completeness<R: Rng>(rng: &mut R, binom: BinomFn) -> Check {
    let c = [2u64, 3, 5][rng.gen_range(0..3)];
    let f = rand_diffpoly(rng, c, 1, 2, 3, 5);
    let big = f.extend_vars(1);
    let sum = DiffPoly::var(c, 2, 0, 0).add(&DiffPoly::var(c, 2, 1, 0)).unwrap();
    let expanded = big.substitute(0, &sum).unwrap();
    let mut rebuilt = DiffPoly::zero(c, 2);
    for nu in expanded.exponents_in(1) {
        let coeff = expanded.coefficient_of(1, &nu);
        let derivative = big.transformal_derivative_with(0, &nu, binom);
        ensure!(coeff == derivative, "coefficient of U^{nu} in F(X+U) is not the derivative, F = {f}");
        let mut e = vec![SigmaExp::zero(); 2];
        e[1] = nu;
        rebuilt = rebuilt.add(&coeff.mul(&DiffPoly::from_terms(c, 2, [(e, BigInt::one())])).unwrap()).unwrap();
    }
    ensure!(rebuilt == expanded, "expansion does not rebuild, F = {f}");
    for (e, _) in big.terms() {
        for mu in e[0].divisors() {
            let d = big.transformal_derivative_with(0, &mu, binom);
            ensure!(
                d.is_zero() || expanded.coefficient_of(1, &mu) == d,
                "derivative {mu} missing from the expansion, F = {f}"
            );
        }
    }
    Ok(())
}

fn field_axioms<R: Rng>(rng: &mut R) -> Check {
    let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
    let m = rng.gen_range(1..=4);
    let k = make_field(p, m, rng.gen()).map_err(|e| e.to_string())?;
    let (a, b, c) = (k.random(rng), k.random(rng), k.random(rng));
    let ctx = format!("F_{{{p}^{m}}}, a = {a:?}, b = {b:?}, c = {c:?}");
    ensure!(k.add(&k.add(&a, &b), &c) == k.add(&a, &k.add(&b, &c)), "additive associativity, {ctx}");
    ensure!(k.mul(&k.mul(&a, &b), &c) == k.mul(&a, &k.mul(&b, &c)), "multiplicative associativity, {ctx}");
    ensure!(k.add(&a, &b) == k.add(&b, &a) && k.mul(&a, &b) == k.mul(&b, &a), "commutativity, {ctx}");
    ensure!(
        k.mul(&a, &k.add(&b, &c)) == k.add(&k.mul(&a, &b), &k.mul(&a, &c)),
        "distributivity, {ctx}"
    );
    ensure!(k.is_zero(&k.add(&a, &k.neg(&a))), "additive inverse, {ctx}");
    ensure!(k.sub(&a, &b) == k.add(&a, &k.neg(&b)), "subtraction, {ctx}");
    ensure!(k.mul(&a, &k.one()) == a && k.add(&a, &k.zero()) == a, "identities, {ctx}");
    if !k.is_zero(&a) {
        let inv = k.inv(&a).ok_or(format!("missing inverse, {ctx}"))?;
        ensure!(k.is_one(&k.mul(&a, &inv)), "a·a⁻¹ ≠ 1, {ctx}");
    }
    ensure!(
        k.pow(&k.add(&a, &b), p) == k.add(&k.pow(&a, p), &k.pow(&b, p)),
        "Frobenius is not additive, {ctx}"
    );
    ensure!(k.pow(&a, p.pow(m as u32)) == a, "a^|F| ≠ a, {ctx}");
    Ok(())
}

fn rand_poly<R: Rng>(rng: &mut R, ring: &PolyRing<PrimeField>, max_deg: usize) -> UniPoly<PrimeField> {
    let p = ring.field().p();
    let d = rng.gen_range(0..=max_deg);
    ring.poly((0..=d).map(|_| rng.gen_range(0..p)).collect())
}

fn rand_prime_ring<R: Rng>(rng: &mut R) -> PolyRing<PrimeField> {
    PolyRing::new(PrimeField::new([2u64, 3, 5, 7, 13][rng.gen_range(0..5)]).unwrap())
}

fn divides(ring: &PolyRing<PrimeField>, a: &UniPoly<PrimeField>, b: &UniPoly<PrimeField>) -> bool {
    !a.is_zero() && ring.rem(b, a).is_zero()
}

fn gcd<R: Rng>(rng: &mut R) -> Check {
    let ring = rand_prime_ring(rng);
    let (a, b, c) = (rand_poly(rng, &ring, 6), rand_poly(rng, &ring, 6), rand_poly(rng, &ring, 4));
    let (ac, bc) = (ring.mul(&a, &c), ring.mul(&b, &c));
    let g = ring.gcd(&ac, &bc);
    let ctx = format!("p = {}, a = {a:?}, b = {b:?}, c = {c:?}", ring.field().p());
    if ac.is_zero() && bc.is_zero() {
        ensure!(g.is_zero(), "gcd(0, 0) ≠ 0, {ctx}");
        return Ok(());
    }
    ensure!(g.lc().is_some_and(|l| *l == 1), "gcd not monic, {ctx}");
    ensure!(divides(&ring, &g, &ac) && divides(&ring, &g, &bc), "gcd does not divide, {ctx}");
    ensure!(c.is_zero() || divides(&ring, &c, &g), "common factor lost, {ctx}");
    let (h, s, t) = ring.ext_gcd(&ac, &bc);
    ensure!(h == g, "extended gcd disagrees, {ctx}");
    ensure!(ring.add(&ring.mul(&s, &ac), &ring.mul(&t, &bc)) == g, "Bezout identity fails, {ctx}");
    let (a1, b1) = (ring.div_exact(&ac, &g), ring.div_exact(&bc, &g));
    ensure!(ring.gcd(&a1, &b1).deg() == 0, "cofactors not coprime, {ctx}");
    Ok(())
}

fn squarefree<R: Rng>(rng: &mut R) -> Check {
    let ring = rand_prime_ring(rng);
    let p = ring.field().p();
    let mut f = ring.constant(rng.gen_range(1..p));
    for k in 1..=3u64 {
        f = ring.mul(&f, &ring.pow(&rand_poly(rng, &ring, 3), k));
    }
    if rng.gen_bool(0.3) {
        f = ring.mul(&f, &ring.pow(&rand_poly(rng, &ring, 2), p));
    }
    if f.is_zero() {
        return Ok(());
    }
    let ctx = format!("p = {p}, f = {f:?}");
    let parts = squarefree_decomposition(&ring, &f);
    let mut prod = ring.one();
    for (i, (g, m)) in parts.iter().enumerate() {
        ensure!(g.deg() > 0 && is_squarefree(&ring, g), "factor {g:?} not squarefree, {ctx}");
        prod = ring.mul(&prod, &ring.pow(g, *m));
        for (h, _) in &parts[i + 1..] {
            ensure!(ring.gcd(g, h).deg() == 0, "factors share a root, {ctx}");
        }
    }
    ensure!(prod == ring.monic(&f), "decomposition does not multiply back, {ctx}");
    let rad = radical(&ring, &f);
    ensure!(is_squarefree(&ring, &rad), "radical not squarefree, {ctx}");
    ensure!(
        parts.iter().all(|(g, _)| divides(&ring, g, &rad)),
        "radical misses a factor, {ctx}"
    );
    Ok(())
}

fn factorization<R: Rng>(rng: &mut R) -> Check {
    let ring = rand_prime_ring(rng);
    let p = ring.field().p();
    let f = rand_poly(rng, &ring, 10);
    if f.deg() == 0 {
        return Ok(());
    }
    let rad = radical(&ring, &f);
    let ctx = format!("p = {p}, f = {f:?}");
    let factors = factor_squarefree(&ring, &rad, rng.gen()).map_err(|e| format!("{e}, {ctx}"))?;
    let mut prod = ring.one();
    for (g, d) in &factors {
        ensure!(g.deg() == *d, "degree label wrong, {ctx}");
        ensure!(is_irreducible_over(&ring, g), "factor {g:?} reducible, {ctx}");
        prod = ring.mul(&prod, g);
    }
    ensure!(prod == rad, "factors do not multiply back, {ctx}");
    // linear factors are exactly the roots in F_p
    let roots = (0..p).filter(|x| ring.eval(&f, x) == 0).count();
    let linear = factors.iter().filter(|(_, d)| *d == 1).count();
    ensure!(roots == linear, "{roots} roots but {linear} linear factors, {ctx}");
    Ok(())
}

/// `ν ↦ ν(q)` is a semiring map sending `σ` to `q`, and `M_q` is a ring map.
fn eval_at<R: Rng>(rng: &mut R) -> Check {
    let (a, b) = (rand_exp(rng, 4, 6), rand_exp(rng, 4, 6));
    let q = rng.gen_range(2u64..60);
    ensure!(
        (&a + &b).eval_at(q) == a.eval_at(q) + b.eval_at(q),
        "eval_at not additive: {a} + {b} at {q}"
    );
    ensure!(a.shift().eval_at(q) == a.eval_at(q) * BigUint::from(q), "σν(q) ≠ q·ν(q): {a} at {q}");
    ensure!(SigmaExp::one().eval_at(q) == BigUint::one(), "1(q) ≠ 1");

    let p = [2u64, 3, 5][rng.gen_range(0..3)];
    let q = p.pow(rng.gen_range(1..=2));
    let f = rand_diffpoly(rng, p, 2, 2, 2, 4);
    let g = rand_diffpoly(rng, p, 2, 2, 2, 4);
    let m = |u: &DiffPoly| mq_reduce(u, q).map_err(|e| format!("{e}: {u}"));
    let ctx = format!("f = {f}, g = {g}, q = {q}");
    ensure!(m(&f.add(&g).unwrap())? == m(&f)?.add(&m(&g)?), "M_q not additive, {ctx}");
    ensure!(m(&f.mul(&g).unwrap())? == m(&f)?.mul(&m(&g)?), "M_q not multiplicative, {ctx}");
    Ok(())
}

fn permanent<R: Rng>(rng: &mut R) -> Check {
    let n = rng.gen_range(1..=6);
    let h: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..10)).collect()).collect();
    let fast = algebraic_jacobi(&h).map_err(|e| e.to_string())?;
    let slow = permanent_naive(&h).map_err(|e| e.to_string())?;
    ensure!(fast == slow, "Ryser {fast} ≠ naive {slow} for {h:?}");
    Ok(())
}

/// Above the collision threshold `deg_{x_j} M_q(u) = max_ν ν(q)`.
fn degree_law<R: Rng>(rng: &mut R) -> Check {
    let p = [2u64, 3, 5][rng.gen_range(0..3)];
    let u = rand_diffpoly(rng, p, 2, 3, 3, 5);
    let mut q = p;
    while q <= collision_threshold(&u) {
        q *= p;
    }
    q *= p.pow(rng.gen_range(0..=1));
    let reduced = mq_reduce(&u, q).map_err(|e| format!("{e}: {u}"))?;
    for j in 0..2 {
        let predicted = u.terms().map(|(e, _)| e[j].eval_at(q)).max().unwrap_or_default();
        ensure!(
            BigUint::from(reduced.degree_in(j)) == predicted,
            "deg in x{} is {} but ν_max(q) = {predicted}, u = {u}, q = {q}",
            j + 1,
            reduced.degree_in(j)
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corrupted(n: u64, k: u64, p: u64) -> u64 {
        (binom_mod(n, k, p) + u64::from(k == 1 && n >= 2)) % p
    }

    #[test]
    fn suites_pass_with_fewer_cases() {
        let opts = SelftestOptions {
            cases: 60,
            ..Default::default()
        };
        for r in run_all(&opts) {
            assert!(r.passed(), "{:?}", r.failure);
        }
    }

    #[test]
    fn corrupted_binomial_is_caught_and_replays() {
        let opts = SelftestOptions {
            cases: 100,
            binom: corrupted,
            ..Default::default()
        };
        let r = run_suite(Suite::DerivativeLeibniz, &opts);
        let f = r.failure.expect("fault not detected");
        assert!(run_case(f.suite, f.seed, f.case, corrupted).is_err());
        assert!(run_case(f.suite, f.seed, f.case, binom_mod).is_ok());
        assert!(!run_suite(Suite::TaylorCompleteness, &opts).passed());
    }

    #[test]
    fn verdicts_do_not_depend_on_seed() {
        for seed in [1u64, 2, 3] {
            let opts = SelftestOptions { seed, cases: 30, ..Default::default() };
            assert!(run_all(&opts).iter().all(SuiteReport::passed));
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
    }
}
