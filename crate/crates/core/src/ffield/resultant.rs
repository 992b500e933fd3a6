//! Resultants of polynomials in `y` with coefficients in `F[x]`, via the
//! subresultant pseudo-remainder sequence (exact divisions in `F[x]`).

use super::field::{Field, PrimeField};
use super::multi::MultiPoly;
use super::uni::{PolyRing, UniPoly};
use crate::{Error, Result};

/// Polynomial in `y`, coefficients in `F[x]`, lowest `y`-degree first.
pub type BiPoly<F> = Vec<UniPoly<F>>;

fn trim<F: Field>(mut a: BiPoly<F>) -> BiPoly<F> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn ydeg<F: Field>(a: &BiPoly<F>) -> usize {
    a.len() - 1
}

/// `lc(b)^{δ+1} · a mod b` in `y`, `δ = deg a − deg b`.
fn prem<F: Field>(ring: &PolyRing<F>, a: &BiPoly<F>, b: &BiPoly<F>) -> BiPoly<F> {
    let db = ydeg(b);
    let lb = b[db].clone();
    let delta = ydeg(a) - db;
    let mut r = a.clone();
    let mut steps = 0u64;
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = ring.mul(c, &lb);
        }
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = ring.sub(&r[shift + j], &ring.mul(&lr, bj));
        }
        r = trim(r);
        steps += 1;
    }
    let extra = delta as u64 + 1 - steps;
    if extra > 0 {
        let factor = ring.pow(&lb, extra);
        for c in r.iter_mut() {
            *c = ring.mul(c, &factor);
        }
    }
    r
}

/// `Res_y(a, b)` as a polynomial in `x`. Both inputs must be nonzero.
pub fn resultant<F: Field>(ring: &PolyRing<F>, a: &BiPoly<F>, b: &BiPoly<F>) -> UniPoly<F> {
    let mut a = trim(a.clone());
    let mut b = trim(b.clone());
    if a.is_empty() || b.is_empty() {
        return UniPoly::zero();
    }
    let minus_one = ring.constant(ring.field().from_i64(-1));
    let mut sign_neg = false;
    if ydeg(&a) < ydeg(&b) {
        if ydeg(&a) % 2 == 1 && ydeg(&b) % 2 == 1 {
            sign_neg = true;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let finish = |h: UniPoly<F>, neg: bool| if neg { ring.mul(&h, &minus_one) } else { h };
    if ydeg(&b) == 0 {
        return finish(ring.pow(&b[0], ydeg(&a) as u64), sign_neg);
    }
    let mut g = ring.one();
    let mut h = ring.one();
    loop {
        let delta = ydeg(&a) - ydeg(&b);
        if ydeg(&a) % 2 == 1 && ydeg(&b) % 2 == 1 {
            sign_neg = !sign_neg;
        }
        let r = prem(ring, &a, &b);
        a = b;
        if r.is_empty() {
            return UniPoly::zero();
        }
        let divisor = ring.mul(&g, &ring.pow(&h, delta as u64));
        b = r.iter().map(|c| ring.div_exact(c, &divisor)).collect();
        g = a[ydeg(&a)].clone();
        // h ← g^δ / h^{δ−1}
        h = if delta == 0 {
            h
        } else {
            ring.div_exact(&ring.pow(&g, delta as u64), &ring.pow(&h, delta as u64 - 1))
        };
        if ydeg(&b) == 0 {
            break;
        }
    }
    let da = ydeg(&a) as u64;
    let lb = b[0].clone();
    let h = if da == 0 {
        h
    } else {
        ring.div_exact(&ring.pow(&lb, da), &ring.pow(&h, da - 1))
    };
    finish(h, sign_neg)
}

/// `Res_y(f, g)` for bivariate `f, g ∈ F_p[x, y]` with `x = x_{xvar}`, `y = x_{yvar}`.
pub fn resultant_y(f: &MultiPoly, g: &MultiPoly, xvar: usize, yvar: usize) -> Result<UniPoly<PrimeField>> {
    if f.p() != g.p() {
        return Err(Error::CharMismatch(f.p(), g.p()));
    }
    if f.degree_in(yvar) == 0 && g.degree_in(yvar) == 0 {
        return Err(Error::ConstantInVariable);
    }
    let ring = PolyRing::new(f.field());
    Ok(resultant(&ring, &f.as_bivariate(yvar, xvar), &g.as_bivariate(yvar, xvar)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::field::FieldCtx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vars(p: u64) -> (MultiPoly, MultiPoly, PrimeField) {
        let f = PrimeField::new(p).unwrap();
        (MultiPoly::var(f, 2, 0), MultiPoly::var(f, 2, 1), f)
    }

    #[test]
    fn resultant_examples() {
        let (x, y, f) = vars(5);
        let ring = PolyRing::new(f);
        let one = MultiPoly::constant(f, 2, 1);
        let r = resultant_y(&y.sub(&x.mul(&x)), &y.sub(&one), 0, 1).unwrap();
        let expected = ring.from_ints(&[1, 0, -1]);
        assert!(r == expected || r == ring.neg(&expected), "{r:?}");

        let r = resultant_y(&y, &y.sub(&one), 0, 1).unwrap();
        assert_eq!(r.degree(), Some(0));

        let c = MultiPoly::constant(f, 2, 2);
        assert_eq!(resultant_y(&x, &c, 0, 1), Err(Error::ConstantInVariable));
    }

    /// Determinant of the Sylvester matrix by cofactor-free Gaussian
    /// elimination over F_p at sample points, compared pointwise.
    fn sylvester_det_at(a: &[u64], b: &[u64], p: u64) -> u64 {
        let fp = PrimeField::new(p).unwrap();
        let (m, n) = (a.len() - 1, b.len() - 1);
        let size = m + n;
        if size == 0 {
            return 1;
        }
        let mut mat = vec![vec![0u64; size]; size];
        for i in 0..n {
            for (j, &c) in a.iter().rev().enumerate() {
                mat[i][i + j] = c;
            }
        }
        for i in 0..m {
            for (j, &c) in b.iter().rev().enumerate() {
                mat[n + i][i + j] = c;
            }
        }
        let mut det = 1u64;
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| mat[r][col] != 0) else {
                return 0;
            };
            if piv != col {
                mat.swap(piv, col);
                det = fp.neg(&det);
            }
            det = fp.mul(&det, &mat[col][col]);
            let inv = fp.inv(&mat[col][col]).unwrap();
            for r in col + 1..size {
                let factor = fp.mul(&mat[r][col], &inv);
                for c in col..size {
                    let sub = fp.mul(&factor, &mat[col][c]);
                    mat[r][c] = fp.sub(&mat[r][c], &sub);
                }
            }
        }
        det
    }

    #[test]
    fn matches_sylvester_determinant_pointwise() {
        let p = 7;
        let f = PrimeField::new(p).unwrap();
        let ring = PolyRing::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let da = rng.gen_range(1..5);
            let db = rng.gen_range(1..5);
            let mk = |rng: &mut ChaCha8Rng, d: usize| -> BiPoly<PrimeField> {
                let mut rows: Vec<UniPoly<PrimeField>> = (0..=d)
                    .map(|_| ring.poly((0..3).map(|_| rng.gen_range(0..p)).collect()))
                    .collect();
                if rows[d].is_zero() {
                    rows[d] = ring.from_ints(&[1, 1]);
                }
                rows
            };
            let a = mk(&mut rng, da);
            let b = mk(&mut rng, db);
            let r = resultant(&ring, &a, &b);
            for x0 in 0..p {
                let sa: Vec<u64> = a.iter().map(|c| ring.eval(c, &x0)).collect();
                let sb: Vec<u64> = b.iter().map(|c| ring.eval(c, &x0)).collect();
                if sa[da] == 0 || sb[db] == 0 {
                    continue;
                }
                assert_eq!(ring.eval(&r, &x0), sylvester_det_at(&sa, &sb, p));
            }
        }
    }

    #[test]
    fn vanishes_iff_common_factor() {
        let ctx = FieldCtx::make_field(3, 1, 0).unwrap();
        let ring = PolyRing::new(ctx.prime_field());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rand_bi = |rng: &mut ChaCha8Rng, d: usize| -> BiPoly<PrimeField> {
            (0..=d).map(|_| ring.poly((0..2).map(|_| rng.gen_range(0..3)).collect())).collect()
        };
        let mul_bi = |a: &BiPoly<PrimeField>, b: &BiPoly<PrimeField>| -> BiPoly<PrimeField> {
            let mut out = vec![UniPoly::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] = ring.add(&out[i + j], &ring.mul(x, y));
                }
            }
            out
        };
        for _ in 0..40 {
            let mut common = rand_bi(&mut rng, 1);
            common[1] = ring.one();
            let a = mul_bi(&rand_bi(&mut rng, 2), &common);
            let b = mul_bi(&rand_bi(&mut rng, 1), &common);
            if trim(a.clone()).len() < 2 || trim(b.clone()).len() < 2 {
                continue;
            }
            assert!(resultant(&ring, &a, &b).is_zero());
        }
    }
}
