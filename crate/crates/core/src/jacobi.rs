//! Jacobi-type bounds: the difference bound `j = max_θ Σ h_k^{θ(k)}` on
//! orders, the algebraic bound `J = perm(H)` on degrees, and their checks
//! against exact counts of Frobenius reductions.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::counting::{count_affine_system, reduction_census};
use crate::diff_poly::{DiffPoly, Order};
use crate::ffield::{is_prime, MultiPoly};
use crate::frob_reduce::ReducedSystem;
use crate::stats::fit_line;
use crate::{Error, Result};

/// `h[i][j]`: order of `u_i` in `x_j`, `−∞` when absent.
pub type OrderMatrix = Vec<Vec<Order>>;

/// `H[i][j]`: degree of `U_i` in `x_j`.
pub type DegreeMatrix = Vec<Vec<u64>>;

pub const MAX_JACOBI_N: usize = 10;
pub const MAX_PERMANENT_N: usize = 14;

fn check_square<T>(m: &[Vec<T>]) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::NonSquare);
    }
    Ok(n)
}

/// Order matrix of a system of `n` difference polynomials in `n` variables.
pub fn order_matrix(system: &[DiffPoly]) -> OrderMatrix {
    system
        .iter()
        .map(|u| (0..u.nvars()).map(|j| u.order_in(j)).collect())
        .collect()
}

/// `max_θ Σ_k h[k][θ(k)]` over all permutations, `−∞` summands absorbing.
pub fn jacobi_bound(h: &[Vec<Order>]) -> Result<Order> {
    let n = check_square(h)?;
    if n > MAX_JACOBI_N {
        return Err(Error::Invalid(format!("jacobi_bound supports n <= {MAX_JACOBI_N}, got {n}")));
    }
    fn go(h: &[Vec<Order>], row: usize, used: &mut [bool], acc: Order, best: &mut Order) {
        if row == h.len() {
            *best = (*best).max(acc);
            return;
        }
        for col in 0..h.len() {
            if !used[col] {
                used[col] = true;
                go(h, row + 1, used, acc.plus(h[row][col]), best);
                used[col] = false;
            }
        }
    }
    let mut best = Order::NegInf;
    go(h, 0, &mut vec![false; n], Order::Finite(0), &mut best);
    Ok(best)
}

/// `perm(H)` by Ryser's formula
/// `perm = (−1)^n Σ_{S ⊆ cols} (−1)^{|S|} Π_i Σ_{j∈S} H[i][j]`,
/// walking subsets in Gray-code order so each step updates one column.
pub fn algebraic_jacobi(h: &[Vec<u64>]) -> Result<BigUint> {
    let n = check_square(h)?;
    if n > MAX_PERMANENT_N {
        return Err(Error::Invalid(format!("algebraic_jacobi supports n <= {MAX_PERMANENT_N}, got {n}")));
    }
    if n == 0 {
        return Ok(BigUint::one());
    }
    let mut row_sums = vec![0u128; n];
    let mut total = BigInt::zero();
    let mut gray = 0u32;
    for k in 1u32..(1 << n) {
        let col = k.trailing_zeros() as usize;
        let adding = gray & (1 << col) == 0;
        gray ^= 1 << col;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += h[i][col] as u128;
            } else {
                *s -= h[i][col] as u128;
            }
        }
        let prod = row_sums.iter().fold(BigInt::one(), |acc, &s| acc * BigInt::from(s));
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    match total.sign() {
        Sign::Minus => unreachable!("permanent of a nonnegative matrix"),
        _ => Ok(total.magnitude().clone()),
    }
}

/// `Σ_θ Π_k H[k][θ(k)]` summed permutation by permutation.
pub fn permanent_naive(h: &[Vec<u64>]) -> Result<BigUint> {
    let n = check_square(h)?;
    fn go(h: &[Vec<u64>], row: usize, used: &mut [bool], acc: &BigUint, total: &mut BigUint) {
        if row == h.len() {
            *total += acc;
            return;
        }
        for col in 0..h.len() {
            if !used[col] && h[row][col] != 0 {
                used[col] = true;
                go(h, row + 1, used, &(acc * h[row][col]), total);
                used[col] = false;
            }
        }
    }
    let mut total = BigUint::zero();
    go(h, 0, &mut vec![false; n], &BigUint::one(), &mut total);
    Ok(total)
}

/// Degree matrix `H[i][j] = deg_{x_j} U_i`.
pub fn degree_matrix(polys: &[MultiPoly]) -> DegreeMatrix {
    polys
        .iter()
        .map(|u| (0..u.nvars()).map(|j| u.degree_in(j)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutReport {
    /// Closure count of the common zeros, `None` when skipped.
    pub count: Option<u64>,
    pub bound: BigUint,
    pub ok: bool,
    pub skipped: Option<String>,
}

/// Checks `count ≤ perm(H)` for two plane polynomials. A positive-dimensional
/// common locus is skipped, not failed: the bound concerns isolated points.
pub fn verify_bezout(polys: &[MultiPoly]) -> Result<BezoutReport> {
    let bound = algebraic_jacobi(&degree_matrix(polys))?;
    match count_affine_system(polys) {
        Ok(n) => Ok(BezoutReport {
            count: Some(n),
            ok: BigUint::from(n) <= bound,
            bound,
            skipped: None,
        }),
        Err(e @ Error::PositiveDimensional) => Ok(BezoutReport {
            count: None,
            bound,
            ok: true,
            skipped: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

/// One `q` of [`verify_jacobi_dimension`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiRow {
    pub q: u64,
    pub count: u64,
    /// `perm` of the reduced degree matrix at this `q`.
    pub bound: BigUint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport {
    pub j: Order,
    pub rows: Vec<JacobiRow>,
    /// `q` left out of the fit, with the reason.
    pub excluded: Vec<(u64, String)>,
    /// Least-squares slope of `log N_q` against `log q`.
    pub w_hat: f64,
    pub ok: bool,
}

/// Fewest usable grid points for a slope.
pub const MIN_FIT_POINTS: usize = 4;

/// Exact counts `N_q` of the reduced system on `q = p^e`, `e ∈ e_grid`, and
/// the fitted growth exponent `ŵ` compared with the difference bound `j`.
pub fn verify_jacobi_dimension(
    system: &[DiffPoly],
    p: u64,
    e_grid: &[u32],
    tolerance: f64,
) -> Result<JacobiReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = system.len();
    if !(1..=2).contains(&n) {
        return Err(Error::Invalid(format!("systems of 1 or 2 equations only, got {n}")));
    }
    if let Some(u) = system.iter().find(|u| u.nvars() != n) {
        return Err(Error::VarMismatch(u.nvars(), n));
    }
    let j = jacobi_bound(&order_matrix(system))?;
    let cells: Vec<(u64, Result<JacobiRow>)> = e_grid
        .par_iter()
        .map(|&e| {
            let q = p.pow(e);
            (q, count_cell(system, q))
        })
        .collect();
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for (q, cell) in cells {
        match cell {
            Ok(row) if row.count == 0 => excluded.push((q, "no points: log N undefined".to_string())),
            Ok(row) => rows.push(row),
            Err(e @ (Error::PositiveDimensional | Error::ZeroPolynomial | Error::Degenerate(_))) => {
                excluded.push((q, e.to_string()))
            }
            Err(e) => return Err(e),
        }
    }
    if rows.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} usable grid points, need {MIN_FIT_POINTS}",
            rows.len()
        )));
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.q as f64).ln(), (r.count as f64).ln()))
        .collect();
    let w_hat = fit_line(&points)?.slope;
    let ok = match j {
        Order::NegInf => false,
        Order::Finite(j) => w_hat <= j as f64 + tolerance,
    };
    Ok(JacobiReport {
        j,
        rows,
        excluded,
        w_hat,
        ok,
    })
}

fn count_cell(system: &[DiffPoly], q: u64) -> Result<JacobiRow> {
    let reduced = ReducedSystem::new(system, q)?;
    let bound = algebraic_jacobi(&reduced.degree_table)?;
    let count = if system.len() == 1 {
        reduction_census(&system[0], q)?.distinct()
    } else {
        count_affine_system(&reduced.polys)?
    };
    Ok(JacobiRow { q, count, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::{Field, PrimeField};
    use crate::frob_reduce::degree_asymptotics;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const NI: Order = Order::NegInf;
    fn f(h: i64) -> Order {
        Order::Finite(h)
    }

    #[test]
    fn jacobi_bound_examples() {
        assert_eq!(jacobi_bound(&[vec![f(1), f(0)], vec![f(0), f(1)]]).unwrap(), f(2));
        assert_eq!(jacobi_bound(&[vec![f(2), NI], vec![f(0), f(1)]]).unwrap(), f(3));
        assert_eq!(jacobi_bound(&[vec![f(4)]]).unwrap(), f(4));
        assert_eq!(jacobi_bound(&[vec![NI, NI], vec![f(0), f(1)]]).unwrap(), NI);
        assert_eq!(jacobi_bound(&[vec![f(1), f(0)]]), Err(Error::NonSquare));
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(algebraic_jacobi(&[vec![1, 1], vec![1, 1]]).unwrap(), BigUint::from(2u32));
        assert_eq!(algebraic_jacobi(&[vec![2, 3], vec![1, 4]]).unwrap(), BigUint::from(11u32));
        assert_eq!(algebraic_jacobi(&[vec![5, 0], vec![0, 7]]).unwrap(), BigUint::from(35u32));
        assert_eq!(algebraic_jacobi(&[vec![1, 2]]), Err(Error::NonSquare));
        // all-ones n×n has permanent n!
        let ones = vec![vec![1u64; 8]; 8];
        assert_eq!(algebraic_jacobi(&ones).unwrap(), BigUint::from(40320u32));
        let big = vec![vec![1u64 << 40; 3]; 3];
        assert_eq!(algebraic_jacobi(&big).unwrap(), BigUint::from(6u32) * (BigUint::one() << 120));
    }

    fn mp(p: u64, terms: &[((u64, u64), i64)]) -> MultiPoly {
        let fl = PrimeField::new(p).unwrap();
        MultiPoly::from_terms(fl, 2, terms.iter().map(|((a, b), c)| (vec![*a, *b], fl.from_i64(*c))))
    }

    #[test]
    fn bezout_examples() {
        let sys = [mp(5, &[((0, 1), 1), ((2, 0), -1)]), mp(5, &[((0, 1), 1), ((0, 0), -1)])];
        let r = verify_bezout(&sys).unwrap();
        assert_eq!((r.count, r.bound.clone(), r.ok), (Some(2), BigUint::from(2u32), true));
        let sys = [mp(5, &[((1, 0), 1), ((0, 0), -1)]), mp(5, &[((0, 1), 1), ((0, 0), -2)])];
        let r = verify_bezout(&sys).unwrap();
        assert_eq!((r.count, r.bound, r.ok), (Some(1), BigUint::one(), true));
        let line = mp(5, &[((0, 1), 1), ((1, 0), -1)]);
        let r = verify_bezout(&[line.clone(), line]).unwrap();
        assert!(r.ok && r.skipped.is_some());
    }

    #[test]
    fn random_bezout_pairs_over_f5() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let fl = PrimeField::new(5).unwrap();
        let mut done = 0;
        while done < 30 {
            let mut gen = || {
                MultiPoly::from_terms(
                    fl,
                    2,
                    (0..4).map(|_| {
                        let a = rng.gen_range(0..=3);
                        (vec![a, rng.gen_range(0..=3 - a)], rng.gen_range(0..5))
                    }),
                )
            };
            let sys = [gen(), gen()];
            let r = verify_bezout(&sys).unwrap();
            if r.skipped.is_none() {
                assert!(r.ok, "{sys:?}");
                done += 1;
            }
        }
    }

    fn sys(texts: &[&str]) -> Vec<DiffPoly> {
        texts.iter().map(|t| DiffPoly::parse(t, 0, texts.len()).unwrap()).collect()
    }

    #[test]
    fn jacobi_dimension_examples() {
        let r = verify_jacobi_dimension(&sys(&["x1@1 - x1 - 1"]), 3, &[1, 2, 3, 4, 5, 6], 0.3).unwrap();
        assert_eq!(r.j, f(1));
        assert!(r.rows.iter().all(|row| row.count == row.q));
        assert!((r.w_hat - 1.0).abs() < 1e-9 && r.ok);

        let r = verify_jacobi_dimension(&sys(&["x1^2 - 1"]), 5, &[1, 2, 3, 4], 0.3).unwrap();
        assert_eq!(r.j, f(0));
        assert!(r.rows.iter().all(|row| row.count == 2));
        assert!(r.w_hat.abs() < 1e-9 && r.ok);

        let r = verify_jacobi_dimension(&sys(&["x1@1 - x2^2", "x2@1 - x1^2"]), 2, &[1, 2, 3, 4, 5], 0.3).unwrap();
        assert_eq!(r.j, f(2));
        // at q = 2 both equations are (x - y)^2
        assert_eq!(r.excluded.len(), 1);
        assert!(r.ok, "{r:?}");

        assert!(matches!(
            verify_jacobi_dimension(&sys(&["x1@1 - x1"]), 3, &[1, 2], 0.3),
            Err(Error::InsufficientData(_))
        ));
        assert_eq!(
            verify_jacobi_dimension(&sys(&["x1"]), 4, &[1], 0.3).unwrap_err(),
            Error::NotPrime(4)
        );
    }

    #[test]
    fn coupled_system_total_matches_breakdown() {
        let s = sys(&["x1@1 - x2^2", "x2@1 - x1^2"]);
        let reduced = ReducedSystem::new(&s, 4).unwrap();
        let by_deg = crate::counting::solutions_by_degree(&reduced.polys).unwrap();
        assert_eq!(count_affine_system(&reduced.polys).unwrap(), by_deg.values().sum::<u64>());
    }

    #[test]
    fn bridge_law_on_degree_matrices() {
        let s = sys(&["x1@2*x2 + x1^3 - 1", "x2@1^2 - x1@1*x1 + x2"]);
        for (i, u) in s.iter().enumerate() {
            for j in 0..2 {
                let Some(h) = u.order_in(j).finite() else { continue };
                let grid = [4u64, 8, 16, 32, 64];
                let rows = degree_asymptotics(u, j, &grid).unwrap();
                for r in &rows {
                    let c = 3.0;
                    assert!((r.degree as f64) <= c * (r.q as f64).powi(h as i32), "u{i} x{j}");
                }
                let last = rows.last().unwrap();
                assert!((last.log_q_degree - h as f64).abs() <= 2.0 / (last.q as f64).log2());
            }
        }
    }

    fn arb_orders(n: usize) -> impl Strategy<Value = Vec<Vec<Order>>> {
        prop::collection::vec(
            prop::collection::vec(
                prop_oneof![1 => Just(Order::NegInf), 4 => (0i64..6).prop_map(Order::Finite)],
                n,
            ),
            n,
        )
    }

    fn arb_degrees(n: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
        prop::collection::vec(prop::collection::vec(0u64..9, n), n)
    }

    fn permute<T: Clone>(m: &[Vec<T>], rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
        rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect()
    }

    /// Subset DP over columns, an independent route to the assignment optimum.
    fn jacobi_dp(h: &[Vec<Order>]) -> Order {
        let n = h.len();
        let mut best = vec![Order::NegInf; 1 << n];
        best[0] = Order::Finite(0);
        for mask in 0usize..(1 << n) {
            let row = mask.count_ones() as usize;
            if row == n || best[mask] == Order::NegInf {
                continue;
            }
            for c in 0..n {
                if mask & (1 << c) == 0 {
                    let next = mask | (1 << c);
                    best[next] = best[next].max(best[mask].plus(h[row][c]));
                }
            }
        }
        best[(1 << n) - 1]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ryser_matches_naive(h in (1usize..=6).prop_flat_map(arb_degrees)) {
            prop_assert_eq!(algebraic_jacobi(&h).unwrap(), permanent_naive(&h).unwrap());
        }

        #[test]
        fn jacobi_matches_subset_dp(h in (1usize..=6).prop_flat_map(arb_orders)) {
            prop_assert_eq!(jacobi_bound(&h).unwrap(), jacobi_dp(&h));
        }

        #[test]
        fn bounds_are_permutation_invariant(
            (h, big, rows, cols) in (1usize..=5).prop_flat_map(|n| (
                arb_orders(n),
                arb_degrees(n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            ))
        ) {
            prop_assert_eq!(jacobi_bound(&permute(&h, &rows, &cols)).unwrap(), jacobi_bound(&h).unwrap());
            prop_assert_eq!(
                algebraic_jacobi(&permute(&big, &rows, &cols)).unwrap(),
                algebraic_jacobi(&big).unwrap()
            );
        }

        #[test]
        fn bounds_are_monotone(
            (h, big, i, j) in (1usize..=5).prop_flat_map(|n| (arb_orders(n), arb_degrees(n), 0..n, 0..n))
        ) {
            let mut h2 = h.clone();
            if let Order::Finite(v) = h2[i][j] {
                h2[i][j] = Order::Finite(v + 1);
            }
            prop_assert!(jacobi_bound(&h2).unwrap() >= jacobi_bound(&h).unwrap());
            let mut big2 = big.clone();
            big2[i][j] += 1;
            prop_assert!(algebraic_jacobi(&big2).unwrap() >= algebraic_jacobi(&big).unwrap());
        }
    }
}
