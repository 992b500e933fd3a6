//! Squarefree decomposition and root-multiplicity censuses.
//!
//! Roots are counted over the algebraic closure purely through degree
//! arithmetic: no extension field is ever enumerated.

use std::collections::BTreeMap;

use super::field::Field;
use super::uni::{PolyRing, UniPoly};
use crate::{Error, Result};

/// Histogram `multiplicity → number of distinct roots` of a polynomial over
/// the algebraic closure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Census(BTreeMap<u64, u64>);

impl Census {
    pub fn new() -> Self {
        Census(BTreeMap::new())
    }

    pub fn add(&mut self, multiplicity: u64, count: u64) {
        if count > 0 {
            *self.0.entry(multiplicity).or_insert(0) += count;
        }
    }

    pub fn merge(&mut self, other: &Census) {
        for (&m, &c) in &other.0 {
            self.add(m, c);
        }
    }

    /// Every multiplicity multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Census {
        Census(self.0.iter().map(|(&m, &c)| (m * k, c)).collect())
    }

    /// Number of distinct roots.
    pub fn distinct(&self) -> u64 {
        self.0.values().sum()
    }

    /// Number of roots counted with multiplicity.
    pub fn weighted(&self) -> u64 {
        self.0.iter().map(|(m, c)| m * c).sum()
    }

    /// Total multiplicity carried by roots of multiplicity at least `min`.
    pub fn weight_at_least(&self, min: u64) -> u64 {
        self.0.range(min..).map(|(m, c)| m * c).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.0.iter().map(|(&m, &c)| (m, c))
    }

    pub fn as_map(&self) -> &BTreeMap<u64, u64> {
        &self.0
    }
}

impl FromIterator<(u64, u64)> for Census {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        let mut c = Census::new();
        for (m, n) in iter {
            c.add(m, n);
        }
        c
    }
}

/// How a p-th-power descent `f(x) = g(x^p)` is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Descent {
    /// Take genuine p-th roots of the coefficients so factors are true factors.
    TrueRoot,
    /// Only decimate exponents. Root multiplicities are preserved (the roots
    /// are Frobenius-twisted), which is all a census needs.
    Decimate,
}

/// Musser's squarefree decomposition: pairwise coprime monic squarefree
/// `(g_i, m_i)` with `f = lc · Π g_i^{m_i}`.
pub fn squarefree_decomposition<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> Vec<(UniPoly<F>, u64)> {
    decompose(ring, &ring.monic(f), Descent::TrueRoot)
}

fn decompose<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>, descent: Descent) -> Vec<(UniPoly<F>, u64)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let p = ring.field().characteristic();
    let d = ring.derivative(f);
    if d.is_zero() {
        let g = pth_root(ring, f, descent);
        return decompose(ring, &g, descent)
            .into_iter()
            .map(|(h, m)| (h, m * p))
            .collect();
    }
    let mut c = ring.gcd(f, &d);
    let mut w = ring.div_exact(f, &c);
    let mut i = 1;
    while w.deg() > 0 {
        let y = ring.gcd(&w, &c);
        let fac = ring.div_exact(&w, &y);
        if fac.deg() > 0 {
            out.push((ring.monic(&fac), i));
        }
        i += 1;
        c = ring.div_exact(&c, &y);
        w = y;
    }
    if c.deg() > 0 {
        let g = pth_root(ring, &ring.monic(&c), descent);
        out.extend(decompose(ring, &g, descent).into_iter().map(|(h, m)| (h, m * p)));
    }
    out
}

fn pth_root<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>, descent: Descent) -> UniPoly<F> {
    let g = ring.decimate(f);
    match descent {
        Descent::Decimate => g,
        Descent::TrueRoot => {
            let field = ring.field();
            let k = field.degree() as u64 - 1;
            if k == 0 {
                return g;
            }
            let coeffs = g.coeffs().iter().map(|c| field.frobenius_iter(c, k)).collect();
            ring.poly(coeffs)
        }
    }
}

/// Product of the distinct monic irreducible factors of `f`.
pub fn radical<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> UniPoly<F> {
    squarefree_decomposition(ring, f)
        .iter()
        .fold(ring.one(), |acc, (g, _)| ring.mul(&acc, g))
}

/// Exact histogram of root multiplicities of `f ≠ 0` over the closure.
pub fn multiplicity_census<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> Result<Census> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(decompose(ring, &ring.monic(f), Descent::Decimate)
        .into_iter()
        .map(|(g, m)| (m, g.deg() as u64))
        .collect())
}

/// Number of distinct roots of `f ≠ 0` in the algebraic closure.
pub fn distinct_root_count<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> Result<u64> {
    multiplicity_census(ring, f).map(|c| c.distinct())
}

pub fn is_squarefree<F: Field>(ring: &PolyRing<F>, f: &UniPoly<F>) -> bool {
    multiplicity_census(ring, f).is_ok_and(|c| c.iter().all(|(m, _)| m == 1))
}
