//! The Frobenius reduction `M_q`: `σ^i(x_j) ↦ x_j^{q^i}`, coefficients mod `p`.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::diff_poly::{DiffPoly, Exponents, Order};
use crate::ffield::{as_prime_power, MultiPoly, PrimeField};
use crate::sigma_exp::SigmaExp;
use crate::{Error, Result};

/// What the reduction threw away or merged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionLog {
    /// Terms whose integer coefficient vanished mod `p`.
    pub dropped: Vec<Exponents>,
    /// Groups of distinct exponent vectors that landed on the same monomial.
    pub collisions: Vec<Vec<Exponents>>,
}

impl ReductionLog {
    pub fn is_clean(&self) -> bool {
        self.dropped.is_empty() && self.collisions.is_empty()
    }
}

fn check_q(f: &DiffPoly, q: u64) -> Result<(PrimeField, u32)> {
    let (p, e) = as_prime_power(q).ok_or(Error::NotPrimePower { q, p: f.char() })?;
    if f.char() != 0 && f.char() != p {
        return Err(Error::CharMismatch(f.char(), p));
    }
    Ok((PrimeField::new(p)?, e))
}

fn eval_exponents(e: &Exponents, q: u64) -> Result<Vec<u64>> {
    e.iter()
        .map(|nu| nu.eval_u64(q).ok_or(Error::ExponentOverflow(q)))
        .collect()
}

/// `M_q(F)` as an ordinary polynomial over `F_p`, `q = p^e`.
pub fn mq_reduce(f: &DiffPoly, q: u64) -> Result<MultiPoly> {
    mq_reduce_logged(f, q).map(|(m, _)| m)
}

/// [`mq_reduce`] together with its [`ReductionLog`].
pub fn mq_reduce_logged(f: &DiffPoly, q: u64) -> Result<(MultiPoly, ReductionLog)> {
    let (field, _) = check_q(f, q)?;
    let p = BigInt::from(field.p());
    let mut log = ReductionLog::default();
    let mut images: std::collections::BTreeMap<Vec<u64>, Vec<Exponents>> = Default::default();
    let mut out = MultiPoly::zero(field, f.nvars());
    for (e, c) in f.terms() {
        let c = ((c % &p) + &p) % &p;
        let c = c.to_u64().unwrap();
        if c == 0 {
            log.dropped.push(e.clone());
            continue;
        }
        let image = eval_exponents(e, q)?;
        images.entry(image.clone()).or_default().push(e.clone());
        out.add_term(image, c);
    }
    log.collisions = images.into_values().filter(|v| v.len() > 1).collect();
    Ok((out, log))
}

/// Smallest `q` bound above which distinct exponents of `f` have distinct
/// images: the largest coefficient of any stored [`SigmaExp`]. For `q`
/// strictly greater, `ν ↦ ν(q)` is injective on the exponents of `f`.
pub fn collision_threshold(f: &DiffPoly) -> u64 {
    f.terms()
        .flat_map(|(e, _)| e.iter().map(|nu| nu.max_coeff() as u64))
        .max()
        .unwrap_or(0)
}

/// A system reduced at one `q`, with its degree matrix `H[i][j] = deg_{x_j} U_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSystem {
    pub p: u64,
    pub q: u64,
    pub polys: Vec<MultiPoly>,
    pub degree_table: Vec<Vec<u64>>,
    pub logs: Vec<ReductionLog>,
}

impl ReducedSystem {
    pub fn new(system: &[DiffPoly], q: u64) -> Result<Self> {
        let mut polys = Vec::with_capacity(system.len());
        let mut logs = Vec::with_capacity(system.len());
        for f in system {
            let (m, log) = mq_reduce_logged(f, q)?;
            polys.push(m);
            logs.push(log);
        }
        let nvars = system.first().map_or(0, |f| f.nvars());
        let degree_table = polys
            .iter()
            .map(|u| (0..nvars).map(|j| u.degree_in(j)).collect())
            .collect();
        let p = as_prime_power(q).map(|(p, _)| p).unwrap();
        Ok(ReducedSystem {
            p,
            q,
            polys,
            degree_table,
            logs,
        })
    }
}

/// One grid cell of [`degree_asymptotics`].
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeRow {
    pub q: u64,
    /// `H = deg_{x_j} M_q(u)` as computed from the reduced polynomial.
    pub degree: u64,
    /// The order `h` of `u` in `x_j`.
    pub order: i64,
    /// Exponent of `x_j` maximizing `ν(q)` among surviving terms.
    pub nu_max: SigmaExp,
    /// `ν_max(q)` by exact evaluation.
    pub predicted: BigUint,
    pub log_q_degree: f64,
    /// `q` exceeds the collision threshold, so `degree == predicted` must hold.
    pub above_threshold: bool,
}

impl DegreeRow {
    pub fn exact(&self) -> bool {
        BigUint::from(self.degree) == self.predicted
    }
}

/// `H = deg_{x_j} M_q(u)` against `ν_max(q)` and `log_q H` against the order.
pub fn degree_asymptotics(u: &DiffPoly, j: usize, q_grid: &[u64]) -> Result<Vec<DegreeRow>> {
    let order = match u.order_in(j) {
        Order::NegInf => return Err(Error::AbsentVariable(j)),
        Order::Finite(h) => h,
    };
    let threshold = collision_threshold(u);
    q_grid
        .par_iter()
        .map(|&q| {
            let (field, _) = check_q(u, q)?;
            let surviving = u.reduced_mod(field.p())?;
            let nu_max = surviving
                .exponents_in(j)
                .into_iter()
                .max_by(|a, b| a.eval_at(q).cmp(&b.eval_at(q)).then(a.cmp(b)))
                .ok_or(Error::AbsentVariable(j))?;
            if surviving.order_in(j) == Order::NegInf {
                return Err(Error::AbsentVariable(j));
            }
            let reduced = mq_reduce(&surviving, q)?;
            let degree = reduced.degree_in(j);
            let log_q_degree = if degree == 0 {
                f64::NEG_INFINITY
            } else {
                (degree as f64).ln() / (q as f64).ln()
            };
            Ok(DegreeRow {
                q,
                degree,
                order,
                predicted: nu_max.eval_at(q),
                nu_max,
                log_q_degree,
                above_threshold: q > threshold,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::Field;
    use proptest::prelude::*;

    fn dp(text: &str, char: u64, nvars: usize) -> DiffPoly {
        DiffPoly::parse(text, char, nvars).unwrap()
    }

    fn mp(field: PrimeField, nvars: usize, terms: &[(&[u64], i64)]) -> MultiPoly {
        MultiPoly::from_terms(field, nvars, terms.iter().map(|(e, c)| (e.to_vec(), field.from_i64(*c))))
    }

    #[test]
    fn reduction_examples() {
        for q in [2u64, 3, 4, 8, 9, 25] {
            let p = as_prime_power(q).unwrap().0;
            let f = PrimeField::new(p).unwrap();
            let got = mq_reduce(&dp("x1@1 - x1", 0, 1), q).unwrap();
            assert_eq!(got, mp(f, 1, &[(&[q], 1), (&[1], -1)]));
        }
        let f3 = PrimeField::new(3).unwrap();
        let got = mq_reduce(&dp("x1@1 - x1^2 - 1", 0, 1), 3).unwrap();
        assert_eq!(got, mp(f3, 1, &[(&[3], 1), (&[2], -1), (&[0], -1)]));
        let f5 = PrimeField::new(5).unwrap();
        let got = mq_reduce(&dp("x1*x1@1 - 2", 5, 1), 5).unwrap();
        assert_eq!(got, mp(f5, 1, &[(&[6], 1), (&[0], 3)]));
        assert_eq!(got.to_string(), "x1^6 + 3");
    }

    #[test]
    fn reduction_errors() {
        let f = dp("x1@1 - x1", 0, 1);
        assert!(matches!(mq_reduce(&f, 6), Err(Error::NotPrimePower { q: 6, .. })));
        assert_eq!(mq_reduce(&dp("x1", 5, 1), 9), Err(Error::CharMismatch(5, 3)));
        assert_eq!(mq_reduce(&dp("x1@9", 0, 1), 1 << 13), Err(Error::ExponentOverflow(1 << 13)));
    }

    #[test]
    fn log_records_drops_and_collisions() {
        // 5*x drops at p = 5; x^2 and x@1 collide at q = 2
        let (_, log) = mq_reduce_logged(&dp("5*x1 + x1@1 + 1", 0, 1), 5).unwrap();
        assert_eq!(log.dropped.len(), 1);
        let (m, log) = mq_reduce_logged(&dp("x1^2 + x1@1", 0, 1), 2).unwrap();
        assert_eq!(log.collisions.len(), 1);
        assert!(m.is_zero());
        assert_eq!(collision_threshold(&dp("x1^2 + x1@1", 0, 1)), 2);
        let (_, log) = mq_reduce_logged(&dp("x1^2 + x1@1", 0, 1), 3).unwrap();
        assert!(log.is_clean());
    }

    #[test]
    fn degree_asymptotics_examples() {
        let u = dp("x1@2*x1 + x1^3", 0, 1);
        let rows = degree_asymptotics(&u, 0, &[4, 8, 16]).unwrap();
        for r in &rows {
            assert_eq!(r.degree, r.q * r.q + 1);
            assert!(r.exact() && r.above_threshold);
            assert_eq!(r.order, 2);
        }
        assert!(rows.windows(2).all(|w| (w[1].log_q_degree - 2.0).abs() < (w[0].log_q_degree - 2.0).abs()));

        for r in degree_asymptotics(&dp("x1@1 - x1", 0, 1), 0, &[3, 5, 7]).unwrap() {
            assert_eq!((r.degree, r.order), (r.q, 1));
            assert!((r.log_q_degree - 1.0).abs() < 1e-12);
        }
        for r in degree_asymptotics(&dp("x1^3", 0, 1), 0, &[2, 4, 5]).unwrap() {
            assert_eq!((r.degree, r.order), (3, 0));
        }
        assert_eq!(
            degree_asymptotics(&dp("x2@1", 0, 2), 0, &[5]),
            Err(Error::AbsentVariable(0))
        );
    }

    fn arb_system_poly(char: u64) -> impl Strategy<Value = DiffPoly> {
        let exps = prop::collection::vec(
            prop::collection::vec(0u32..3, 3).prop_map(SigmaExp::from_coeffs),
            2,
        );
        prop::collection::vec((exps, -6i64..6), 0..5).prop_map(move |ts| {
            DiffPoly::from_terms(char, 2, ts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        })
    }

    fn q_strategy() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 16, 25])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn functorial_on_sums_and_products(f in arb_system_poly(0), g in arb_system_poly(0), q in q_strategy()) {
            let (mf, mg) = (mq_reduce(&f, q).unwrap(), mq_reduce(&g, q).unwrap());
            prop_assert_eq!(mq_reduce(&f.mul(&g).unwrap(), q).unwrap(), mf.mul(&mg));
            prop_assert_eq!(mq_reduce(&f.add(&g).unwrap(), q).unwrap(), mf.add(&mg));
        }

        #[test]
        fn shift_law(f in arb_system_poly(0), q in q_strategy()) {
            let shifted = mq_reduce(&f.sigma_shift(), q).unwrap();
            let scaled = mq_reduce(&f, q).unwrap().map_exponents(|_, e| e * q);
            prop_assert_eq!(shifted, scaled);
        }

        #[test]
        fn degree_law_above_threshold(f in arb_system_poly(0), q in q_strategy()) {
            let threshold = collision_threshold(&f);
            let p = as_prime_power(q).unwrap().0;
            let surviving = f.reduced_mod(p).unwrap();
            let m = mq_reduce(&f, q).unwrap();
            for j in 0..2 {
                let predicted = surviving.exponents_in(j).iter().map(|nu| nu.eval_u64(q).unwrap()).max();
                if q > threshold {
                    prop_assert_eq!(m.degree_in(j), predicted.unwrap_or(0));
                } else {
                    prop_assert!(m.degree_in(j) <= predicted.unwrap_or(0));
                }
            }
        }
    }
}
