//! Sparse univariate polynomials of huge degree over `F_p` and a root census
//! that never materializes them.
//!
//! Frobenius reductions produce things like `x^{q^2} + x^{q+1} - x^2` with
//! `q` in the thousands. If every multiple root of `U` is known to be a root
//! of a small witness `W`, put `H = rad(W)`. Then `gcd(U, H^k)` for `k`
//! large enough carries all multiple roots with their exact multiplicities,
//! and every other root is simple. `U mod H^k` only needs `x^e mod H^k` for
//! the few exponents in `U`.

use super::field::{Field, PrimeField};
use super::multi::MultiPoly;
use super::sqfree::{multiplicity_census, radical, Census};
use super::uni::{PolyRing, UniPoly};
use crate::{Error, Result};

/// Above this degree a polynomial is never expanded densely.
pub const DENSE_LIMIT: u64 = 4096;

/// Witnesses of larger degree than this are rejected.
pub const WITNESS_LIMIT: u64 = 4096;

/// `Σ c·x^e`, exponents strictly increasing, coefficients nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    field: PrimeField,
    terms: Vec<(u64, u64)>,
}

impl SparsePoly {
    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut v: Vec<(u64, u64)> = terms.into_iter().map(|(e, c)| (e, c % field.p())).collect();
        v.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = field.add(&last.1, &c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        SparsePoly { field, terms: out }
    }

    /// Univariate view of a [`MultiPoly`] in which only `x_var` occurs.
    pub fn from_multi(f: &MultiPoly, var: usize) -> Self {
        Self::from_terms(f.field(), f.terms().map(|(e, &c)| (e[var], c)))
    }

    pub fn from_dense(f: &UniPoly<PrimeField>, field: PrimeField) -> Self {
        Self::from_terms(
            field,
            f.coeffs().iter().enumerate().map(|(i, &c)| (i as u64, c)),
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn terms(&self) -> &[(u64, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.last().map(|t| t.0)
    }

    /// Lowest exponent present.
    pub fn valuation(&self) -> Option<u64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn derivative(&self) -> SparsePoly {
        let f = self.field;
        SparsePoly::from_terms(
            f,
            self.terms
                .iter()
                .filter(|t| t.0 > 0)
                .map(|&(e, c)| (e - 1, f.mul(&c, &(e % f.p())))),
        )
    }

    /// `g` with `self = g(x^p)`; every exponent must be divisible by `p`.
    fn decimate(&self) -> SparsePoly {
        let p = self.field.p();
        debug_assert!(self.terms.iter().all(|t| t.0 % p == 0));
        SparsePoly {
            field: self.field,
            terms: self.terms.iter().map(|&(e, c)| (e / p, c)).collect(),
        }
    }

    /// `self / x^k`, dropping nothing (requires `k ≤ valuation`).
    fn shift_down(&self, k: u64) -> SparsePoly {
        SparsePoly {
            field: self.field,
            terms: self.terms.iter().map(|&(e, c)| (e - k, c)).collect(),
        }
    }

    pub fn to_dense(&self) -> UniPoly<PrimeField> {
        let d = self.degree().map_or(0, |d| d as usize + 1);
        let mut c = vec![0u64; d];
        for &(e, v) in &self.terms {
            c[e as usize] = v;
        }
        UniPoly::from_coeffs(&self.field, c)
    }

    /// `self mod m` for a small dense `m ≠ 0`.
    pub fn rem(&self, ring: &PolyRing<PrimeField>, m: &UniPoly<PrimeField>) -> UniPoly<PrimeField> {
        let x = ring.x();
        let mut acc = UniPoly::zero();
        let mut pos = 0u64;
        let mut power = ring.rem(&ring.one(), m);
        for &(e, c) in &self.terms {
            let step = ring.pow_mod(&x, e - pos, m);
            power = ring.mul_mod(&power, &step, m);
            pos = e;
            acc = ring.add(&acc, &ring.scale(&power, &c));
        }
        acc
    }
}

/// Census of `u` given a witness: every multiple root of `u` must be a root
/// of `witness ≠ 0`.
pub fn census_with_witness(u: &SparsePoly, witness: &UniPoly<PrimeField>) -> Result<Census> {
    let deg_u = u.degree().ok_or(Error::ZeroPolynomial)?;
    if witness.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let ring = PolyRing::new(u.field());
    let h = radical(&ring, witness);
    let mut census = Census::new();
    if h.deg() == 0 {
        census.add(1, deg_u);
        return Ok(census);
    }
    let mut hk = h.clone();
    let mut prev: Option<UniPoly<PrimeField>> = None;
    loop {
        let r = u.rem(&ring, &hk);
        let g = if r.is_zero() { ring.monic(&hk) } else { ring.gcd(&hk, &r) };
        let done = g.deg() == 0 || prev.as_ref().is_some_and(|pg| pg.deg() == g.deg());
        if done {
            let local = if g.deg() == 0 {
                Census::new()
            } else {
                multiplicity_census(&ring, &g)?
            };
            census.merge(&local);
            census.add(1, deg_u - g.deg() as u64);
            return Ok(census);
        }
        prev = Some(g);
        hk = ring.mul(&hk, &h);
    }
}

/// Exact multiplicity census of a sparse polynomial over the closure.
///
/// Small inputs go through the dense squarefree decomposition. Large ones
/// need a witness for their multiple roots: the caller's, or the derivative
/// when it is a monomial times a small polynomial. `u' = 0` descends to
/// `u = g(x^p) = g(x)^p`. Anything else is [`Error::Infeasible`].
pub fn sparse_census(u: &SparsePoly, witness: Option<&UniPoly<PrimeField>>) -> Result<Census> {
    let deg = u.degree().ok_or(Error::ZeroPolynomial)?;
    if deg <= DENSE_LIMIT {
        return multiplicity_census(&PolyRing::new(u.field()), &u.to_dense());
    }
    if let Some(w) = witness.filter(|w| !w.is_zero()) {
        return census_with_witness(u, w);
    }
    let d = u.derivative();
    if d.is_zero() {
        let p = u.field().p();
        return Ok(sparse_census(&u.decimate(), None)?.scaled(p));
    }
    let v = d.valuation().unwrap();
    let core = d.shift_down(v);
    if core.degree().unwrap() <= WITNESS_LIMIT {
        let ring = PolyRing::new(u.field());
        let mut w = core.to_dense();
        if v > 0 {
            w = ring.mul(&w, &ring.x());
        }
        return census_with_witness(u, &w);
    }
    Err(Error::Infeasible(format!(
        "degree {deg} polynomial without a small witness for its multiple roots"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rem_matches_dense() {
        let f = fp(7);
        let ring = PolyRing::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = SparsePoly::from_terms(f, (0..5).map(|_| (rng.gen_range(0..300), rng.gen_range(1..7))));
            let m = ring.poly((0..6).map(|_| rng.gen_range(0..7)).chain([1]).collect());
            assert_eq!(u.rem(&ring, &m), ring.rem(&u.to_dense(), &m));
        }
    }

    /// The localized census agrees with the dense squarefree decomposition on
    /// twisted polynomials `s(x, x^q)` small enough to expand, with the
    /// witness `Res_y(s, ∂s/∂x)`.
    #[test]
    fn witness_census_matches_dense() {
        use crate::ffield::resultant::resultant_y;
        for p in [2u64, 3, 5] {
            let f = fp(p);
            let ring = PolyRing::new(f);
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            let mut checked = 0;
            while checked < 40 {
                let q = p.pow(rng.gen_range(1..4));
                let terms: Vec<(Vec<u64>, u64)> = (0..4)
                    .map(|_| (vec![rng.gen_range(0..4), rng.gen_range(0..3)], rng.gen_range(1..p.max(2))))
                    .collect();
                let s = MultiPoly::from_terms(f, 2, terms);
                let sx = s.partial(0);
                if s.degree_in(1) == 0 || sx.is_zero() {
                    continue;
                }
                let w = resultant_y(&s, &sx, 0, 1).unwrap();
                let t = SparsePoly::from_terms(f, s.terms().map(|(e, &c)| (e[0] + q * e[1], c)));
                if w.is_zero() || t.is_zero() {
                    continue;
                }
                let dense = multiplicity_census(&ring, &t.to_dense()).unwrap();
                assert_eq!(census_with_witness(&t, &w).unwrap(), dense, "{s}, q = {q}");
                checked += 1;
            }
        }
    }

    #[test]
    fn large_degree_examples() {
        // x^{q^2} - x has q^2 simple roots
        let f = fp(5);
        let q2 = 5u64.pow(8);
        let u = SparsePoly::from_terms(f, [(q2, 1), (1, 4)]);
        let c = sparse_census(&u, None).unwrap();
        assert_eq!(c, [(1, q2)].into_iter().collect());

        // x^{q} - x^2 = x^2 (x^{q-2} - 1)
        let q = 3u64.pow(10);
        let u = SparsePoly::from_terms(fp(3), [(q, 1), (2, 2)]);
        let c = sparse_census(&u, None).unwrap();
        assert_eq!(c, [(2, 1), (1, q - 2)].into_iter().collect());

        // (x^{q/2} - x)^2 over F_2
        let q = 2u64.pow(16);
        let u = SparsePoly::from_terms(fp(2), [(q, 1), (2, 1)]);
        let c = sparse_census(&u, None).unwrap();
        assert_eq!(c, [(2, q / 2)].into_iter().collect());
    }

    #[test]
    fn infeasible_without_witness() {
        let f = fp(5);
        let q = 5u64.pow(6);
        let u = SparsePoly::from_terms(f, [(q * q, 1), (q + 1, 1), (2, 1), (0, 1)]);
        assert!(matches!(sparse_census(&u, None), Err(Error::Infeasible(_))));
    }
}
