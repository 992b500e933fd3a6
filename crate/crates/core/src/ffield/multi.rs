//! Sparse multivariate polynomials over a prime field.

use std::collections::BTreeMap;
use std::fmt;

use super::field::{Field, PrimeField};
use super::uni::{PolyRing, UniPoly};

/// `Σ c · x_1^{e_1} ⋯ x_n^{e_n}` with coefficients in `F_p` and `u64` exponents.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Vec<u64>, u64>,
}

impl MultiPoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: i64) -> Self {
        let mut m = Self::zero(field, nvars);
        m.add_term(vec![0; nvars], field.from_i64(c));
        m
    }

    /// `x_i` (0-based).
    pub fn var(field: PrimeField, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(field, nvars, [(e, 1)])
    }

    pub fn from_terms(
        field: PrimeField,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u64>, u64)>,
    ) -> Self {
        let mut m = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            m.add_term(e, c % field.p());
        }
        m
    }

    /// Adds `c · x^e`, merging with an existing monomial.
    pub fn add_term(&mut self, e: Vec<u64>, c: u64) {
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(o.get(), &c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &u64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `deg_{x_i}`; 0 for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> u64 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Whether `x_i` occurs in some term.
    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn is_constant(&self) -> bool {
        (0..self.nvars).all(|i| !self.uses_var(i))
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let f = self.field;
        MultiPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f.neg(c))).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let f = self.field;
        let mut out = MultiPoly::zero(f, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, f.mul(c1, c2));
            }
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> MultiPoly {
        let f = self.field;
        let mut out = MultiPoly::zero(f, self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let k = f.from_i64((e[i] % f.p()) as i64);
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, f.mul(c, &k));
        }
        out
    }

    /// Replaces every exponent `e_i` by `map(i, e_i)`, merging collisions.
    pub fn map_exponents(&self, map: impl Fn(usize, u64) -> u64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.iter().enumerate().map(|(i, &x)| map(i, x)).collect(), *c);
        }
        out
    }

    /// Value at a point of an extension field of `F_p`.
    pub fn eval<F: Field>(&self, field: &F, point: &[F::Elem]) -> F::Elem {
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut t = field.from_i64(*c as i64);
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = field.mul(&t, &field.pow(x, k));
                }
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    /// View as a polynomial in `x_var` whose coefficients are univariate
    /// polynomials in `x_other` (requires the other variables to be absent).
    pub fn as_bivariate(&self, var: usize, other: usize) -> Vec<UniPoly<PrimeField>> {
        let f = self.field;
        let dy = self.degree_in(var) as usize;
        let mut rows: Vec<Vec<u64>> = vec![Vec::new(); dy + 1];
        for (e, c) in &self.terms {
            debug_assert!(e.iter().enumerate().all(|(i, &k)| k == 0 || i == var || i == other));
            let row = &mut rows[e[var] as usize];
            let k = e[other] as usize;
            if row.len() <= k {
                row.resize(k + 1, 0);
            }
            row[k] = f.add(&row[k], c);
        }
        rows.into_iter().map(|r| UniPoly::from_coeffs(&f, r)).collect()
    }

    /// Dense univariate form in `x_var` (other variables must be absent).
    pub fn as_univariate(&self, var: usize) -> UniPoly<PrimeField> {
        let ring = PolyRing::new(self.field);
        let d = self.degree_in(var) as usize;
        let mut c = vec![0u64; d + 1];
        for (e, v) in &self.terms {
            c[e[var] as usize] = *v;
        }
        ring.poly(c)
    }
}

impl fmt::Display for MultiPoly {
    /// Rendered in the difference-polynomial grammar with σ-order 0.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| if d == 1 { format!("x{}", i + 1) } else { format!("x{}^{d}", i + 1) })
                .collect();
            match (*c, factors.is_empty()) {
                (c, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", factors.join("*"))?,
                (c, false) => write!(f, "{c}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[F_{}]({self})", self.p())
    }
}
