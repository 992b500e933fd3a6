//! Dense univariate polynomials over a [`Field`].

use std::fmt;

use num_bigint::BigUint;

use super::field::Field;

/// A polynomial with coefficients lowest degree first; the top coefficient is
/// nonzero unless the polynomial is zero (empty coefficient vector).
pub struct UniPoly<F: Field> {
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Clone for UniPoly<F> {
    fn clone(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.clone(),
        }
    }
}

impl<F: Field> PartialEq for UniPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: Field> Eq for UniPoly<F> {}

impl<F: Field> std::hash::Hash for UniPoly<F> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<F: Field> UniPoly<F> {
    pub fn from_coeffs(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F::Elem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, field: &F, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
}

impl<F: Field> fmt::Debug for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly{:?}", self.coeffs)
    }
}

/// Polynomial arithmetic over a fixed field.
#[derive(Clone, Debug)]
pub struct PolyRing<F: Field> {
    field: F,
}

impl<F: Field> PolyRing<F> {
    pub fn new(field: F) -> Self {
        PolyRing { field }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn poly(&self, coeffs: Vec<F::Elem>) -> UniPoly<F> {
        UniPoly::from_coeffs(&self.field, coeffs)
    }

    /// Polynomial from integer coefficients mapped into the prime field.
    pub fn from_ints(&self, coeffs: &[i64]) -> UniPoly<F> {
        self.poly(coeffs.iter().map(|&c| self.field.from_i64(c)).collect())
    }

    pub fn one(&self) -> UniPoly<F> {
        self.constant(self.field.one())
    }

    pub fn x(&self) -> UniPoly<F> {
        self.monomial(self.field.one(), 1)
    }

    pub fn constant(&self, c: F::Elem) -> UniPoly<F> {
        self.poly(vec![c])
    }

    pub fn monomial(&self, c: F::Elem, k: usize) -> UniPoly<F> {
        let mut v = vec![self.field.zero(); k + 1];
        v[k] = c;
        self.poly(v)
    }

    pub fn add(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        let f = &self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        let v = (0..n)
            .map(|i| match (a.coeffs.get(i), b.coeffs.get(i)) {
                (Some(x), Some(y)) => f.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.poly(v)
    }

    pub fn neg(&self, a: &UniPoly<F>) -> UniPoly<F> {
        UniPoly {
            coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &UniPoly<F>, c: &F::Elem) -> UniPoly<F> {
        self.poly(a.coeffs.iter().map(|x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        if a.is_zero() || b.is_zero() {
            return UniPoly::zero();
        }
        let f = &self.field;
        let mut out = vec![f.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        self.poly(out)
    }

    pub fn pow(&self, a: &UniPoly<F>, mut e: u64) -> UniPoly<F> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> (UniPoly<F>, UniPoly<F>) {
        let f = &self.field;
        let db = b.degree().expect("division by zero polynomial");
        if a.coeffs.len() <= db {
            return (UniPoly::zero(), a.clone());
        }
        let lc_inv = f.inv(b.lc().unwrap()).unwrap();
        let mut r = a.coeffs.clone();
        let mut q = vec![f.zero(); r.len() - db];
        for k in (0..q.len()).rev() {
            let top = &r[k + db];
            if f.is_zero(top) {
                continue;
            }
            let c = f.mul(top, &lc_inv);
            for (j, bj) in b.coeffs.iter().enumerate() {
                if !f.is_zero(bj) {
                    r[k + j] = f.sub(&r[k + j], &f.mul(&c, bj));
                }
            }
            q[k] = c;
        }
        r.truncate(db);
        (self.poly(q), self.poly(r))
    }

    pub fn rem(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        let f = &self.field;
        let db = b.degree().expect("division by zero polynomial");
        if a.coeffs.len() <= db {
            return a.clone();
        }
        let lc_inv = f.inv(b.lc().unwrap()).unwrap();
        let mut r = a.coeffs.clone();
        // only the nonzero entries of b take part in the row updates
        let support: Vec<(usize, F::Elem)> = b.coeffs[..db]
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(j, c)| (j, c.clone()))
            .collect();
        for k in (0..r.len() - db).rev() {
            let top = std::mem::replace(&mut r[k + db], f.zero());
            if f.is_zero(&top) {
                continue;
            }
            let c = f.mul(&top, &lc_inv);
            for (j, bj) in &support {
                r[k + j] = f.sub(&r[k + j], &f.mul(&c, bj));
            }
        }
        r.truncate(db);
        self.poly(r)
    }

    /// `a / b` when `b` divides `a`.
    pub fn div_exact(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        let (q, r) = self.divrem(a, b);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn monic(&self, a: &UniPoly<F>) -> UniPoly<F> {
        match a.lc() {
            None => UniPoly::zero(),
            Some(lc) => {
                let inv = self.field.inv(lc).unwrap();
                self.scale(a, &inv)
            }
        }
    }

    /// Monic greatest common divisor (zero only for `gcd(0, 0)`).
    pub fn gcd(&self, a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
        let (mut a, mut b) = if a.deg() >= b.deg() {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        while !b.is_zero() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// `(g, s, t)` with `s·a + t·b = g = gcd(a, b)` monic.
    pub fn ext_gcd(
        &self,
        a: &UniPoly<F>,
        b: &UniPoly<F>,
    ) -> (UniPoly<F>, UniPoly<F>, UniPoly<F>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lc().cloned() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = self.field.inv(&lc).unwrap();
                (self.scale(&r0, &inv), self.scale(&s0, &inv), self.scale(&t0, &inv))
            }
        }
    }

    pub fn derivative(&self, a: &UniPoly<F>) -> UniPoly<F> {
        let f = &self.field;
        let p = f.characteristic();
        let v = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_i64((i as u64 % p) as i64)))
            .collect();
        self.poly(v)
    }

    /// `g` with `a(x) = g(x^p)`; only meaningful when `a' = 0`.
    pub fn decimate(&self, a: &UniPoly<F>) -> UniPoly<F> {
        let p = self.field.characteristic() as usize;
        self.poly(a.coeffs.iter().step_by(p).cloned().collect())
    }

    pub fn mul_mod(&self, a: &UniPoly<F>, b: &UniPoly<F>, m: &UniPoly<F>) -> UniPoly<F> {
        self.rem(&self.mul(a, b), m)
    }

    pub fn pow_mod(&self, a: &UniPoly<F>, mut e: u64, m: &UniPoly<F>) -> UniPoly<F> {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&self.one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_mod(&acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_mod(&base, &base, m);
            }
        }
        acc
    }

    pub fn pow_mod_big(&self, a: &UniPoly<F>, e: &BigUint, m: &UniPoly<F>) -> UniPoly<F> {
        let base = self.rem(a, m);
        let mut acc = self.rem(&self.one(), m);
        for i in (0..e.bits()).rev() {
            acc = self.mul_mod(&acc, &acc, m);
            if e.bit(i) {
                acc = self.mul_mod(&acc, &base, m);
            }
        }
        acc
    }

    /// `a^{|F|} mod m`, computed as `degree(F)` successive p-th powers.
    pub fn frobenius_mod(&self, a: &UniPoly<F>, m: &UniPoly<F>) -> UniPoly<F> {
        let p = self.field.characteristic();
        (0..self.field.degree()).fold(self.rem(a, m), |x, _| self.pow_mod(&x, p, m))
    }

    pub fn eval(&self, a: &UniPoly<F>, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        a.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }
}
