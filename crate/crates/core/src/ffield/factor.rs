//! Factorization of squarefree polynomials: distinct-degree splitting
//! followed by Cantor–Zassenhaus equal-degree splitting.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::Field;
use super::sqfree::is_squarefree;
use super::uni::{PolyRing, UniPoly};
use crate::{Error, Result};

/// `(g_d, d)`: `g_d` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> Vec<(UniPoly<F>, usize)> {
    let mut out = Vec::new();
    let mut rest = ring.monic(f);
    let x = ring.x();
    let mut h = ring.rem(&x, &rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = ring.frobenius_mod(&h, &rest);
        let g = ring.gcd(&ring.sub(&h, &x), &rest);
        if g.deg() > 0 {
            rest = ring.div_exact(&rest, &g);
            h = ring.rem(&h, &rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

/// Splits a product of distinct irreducibles of common degree `d`.
pub fn equal_degree<F: Field, R: Rng>(
    ring: &PolyRing<F>,
    f: &UniPoly<F>,
    d: usize,
    rng: &mut R,
) -> Vec<UniPoly<F>> {
    let f = ring.monic(f);
    if f.deg() <= d {
        return vec![f];
    }
    let field = ring.field();
    let p = field.characteristic();
    let exponent = (p != 2).then(|| (field.order().pow(d as u32) - BigUint::one()) / 2u32);
    let trace_len = field.degree() as usize * d;
    loop {
        let a = ring.poly((0..f.deg()).map(|_| field.random(rng)).collect());
        if a.deg() == 0 {
            continue;
        }
        let g = ring.gcd(&a, &f);
        let candidate = if g.deg() > 0 {
            g
        } else if let Some(e) = &exponent {
            let b = ring.pow_mod_big(&a, e, &f);
            ring.gcd(&ring.sub(&b, &ring.one()), &f)
        } else {
            // absolute trace to F_2: a + a^2 + ... + a^{2^{md-1}}
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..trace_len {
                t = ring.mul_mod(&t, &t, &f);
                acc = ring.add(&acc, &t);
            }
            ring.gcd(&acc, &f)
        };
        if candidate.deg() > 0 && candidate.deg() < f.deg() {
            let other = ring.div_exact(&f, &candidate);
            let mut out = equal_degree(ring, &candidate, d, rng);
            out.extend(equal_degree(ring, &other, d, rng));
            return out;
        }
    }
}

/// Monic irreducible factors `(π, deg π)` of a squarefree `f`, sorted by
/// degree then coefficients' debug form for determinism.
pub fn factor_squarefree<F: Field>(
    ring: &PolyRing<F>,
    f: &UniPoly<F>,
    seed: u64,
) -> Result<Vec<(UniPoly<F>, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !is_squarefree(ring, f) {
        return Err(Error::NotSquarefree);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(ring, f) {
        for h in equal_degree(ring, &g, d, &mut rng) {
            out.push((h, d));
        }
    }
    out.sort_by_cached_key(|(h, d)| (*d, format!("{:?}", h.coeffs())));
    Ok(out)
}

/// Irreducibility over the coefficient field (`|F| = Q`): `x^{Q^m} ≡ x` and
/// `gcd(x^{Q^{m/ℓ}} − x, f) = 1` for each prime `ℓ | m`.
pub fn is_irreducible_over<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> bool {
    let m = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(m) => m,
    };
    let f = ring.monic(f);
    let x = ring.x();
    let mut powers = Vec::with_capacity(m + 1);
    let mut h = ring.rem(&x, &f);
    powers.push(h.clone());
    for _ in 0..m {
        h = ring.frobenius_mod(&h, &f);
        powers.push(h.clone());
    }
    if powers[m] != ring.rem(&x, &f) {
        return false;
    }
    let mut n = m;
    let mut l = 2;
    while n > 1 {
        if n % l == 0 {
            while n % l == 0 {
                n /= l;
            }
            let g = ring.gcd(&ring.sub(&powers[m / l], &x), &f);
            if g.deg() > 0 {
                return false;
            }
        }
        l += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::field::{FieldCtx, PrimeField};

    fn fp(p: u64) -> PolyRing<PrimeField> {
        PolyRing::new(PrimeField::new(p).unwrap())
    }

    #[test]
    fn factor_examples() {
        let r5 = fp(5);
        let f = r5.from_ints(&[-1, 0, 1]);
        let fs = factor_squarefree(&r5, &f, 0).unwrap();
        assert_eq!(fs, vec![(r5.from_ints(&[1, 1]), 1), (r5.from_ints(&[-1, 1]), 1)]);

        let r3 = fp(3);
        let g = r3.from_ints(&[1, 0, 1]);
        assert_eq!(factor_squarefree(&r3, &g, 0).unwrap(), vec![(g.clone(), 2)]);

        for (p, m) in [(2u64, 4usize), (3, 3), (5, 2), (7, 1)] {
            let ctx = FieldCtx::make_field(p, m, 0).unwrap();
            let ring = PolyRing::new(ctx.clone());
            let q = p.pow(m as u32) as usize;
            let mut c = vec![ctx.zero(); q + 1];
            c[q] = ctx.one();
            c[1] = ctx.from_i64(-1);
            let fs = factor_squarefree(&ring, &ring.poly(c), 1).unwrap();
            assert_eq!(fs.len(), q);
            assert!(fs.iter().all(|(h, d)| *d == 1 && h.deg() == 1));
        }
        // over F_2 the same polynomial x^16 - x splits by degrees dividing 4
        let r2 = fp(2);
        let mut c = vec![0i64; 17];
        c[16] = 1;
        c[1] = -1;
        let fs = factor_squarefree(&r2, &r2.from_ints(&c), 1).unwrap();
        let degs: Vec<usize> = fs.iter().map(|(_, d)| *d).collect();
        assert_eq!(degs, vec![1, 1, 2, 4, 4, 4]);
    }

    #[test]
    fn rejects_non_squarefree() {
        let r3 = fp(3);
        let f = r3.from_ints(&[1, 2, 1]);
        assert_eq!(factor_squarefree(&r3, &f, 0), Err(Error::NotSquarefree));
    }

    #[test]
    fn factors_multiply_back_over_extension_fields() {
        for (p, m) in [(2u64, 2usize), (3, 2), (5, 1)] {
            let ctx = FieldCtx::make_field(p, m, 4).unwrap();
            let ring = PolyRing::new(ctx.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(p * 10 + m as u64);
            let mut done = 0;
            while done < 10 {
                let mut c: Vec<_> = (0..9).map(|_| ctx.random(&mut rng)).collect();
                c.push(ctx.one());
                let f = ring.poly(c);
                if !is_squarefree(&ring, &f) {
                    continue;
                }
                let fs = factor_squarefree(&ring, &f, done).unwrap();
                let prod = fs.iter().fold(ring.one(), |acc, (h, _)| ring.mul(&acc, h));
                assert_eq!(prod, ring.monic(&f));
                assert_eq!(fs.iter().map(|(_, d)| d).sum::<usize>(), 9);
                assert!(fs.iter().all(|(h, d)| h.deg() == *d && is_irreducible_over(&ring, h)));
                done += 1;
            }
        }
    }
}
