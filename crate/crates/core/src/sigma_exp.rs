//! The exponent monoid `N[σ]` of difference monomials.
//!
//! A value `m_0 + m_1 σ + … + m_k σ^k` records the exponent of a single
//! variable in a difference monomial: `x^ν = Π_i σ^i(x)^{m_i}`. Under the
//! Frobenius reduction `σ ↦ q` the exponent becomes the ordinary integer
//! `ν(q)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// An element of `N[σ]` in canonical (top-trimmed) dense form.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SigmaExp {
    coeffs: Vec<u32>,
}

impl SigmaExp {
    pub fn zero() -> Self {
        SigmaExp { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        SigmaExp { coeffs: vec![1] }
    }

    /// `m σ^i`.
    pub fn monomial(i: usize, m: u32) -> Self {
        let mut coeffs = vec![0; i + 1];
        coeffs[i] = m;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        SigmaExp { coeffs }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest `i` with `m_i ≠ 0`; `None` for the zero exponent.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Total degree `Σ m_i` (the value at `σ = 1`).
    pub fn total_degree(&self) -> u64 {
        self.coeffs.iter().map(|&m| m as u64).sum()
    }

    pub fn max_coeff(&self) -> u32 {
        self.coeffs.iter().copied().max().unwrap_or(0)
    }

    /// `ν ↦ σν`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0);
        coeffs.extend_from_slice(&self.coeffs);
        SigmaExp { coeffs }
    }

    /// `ν ↦ σ^k ν`.
    pub fn shift_by(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        SigmaExp { coeffs }
    }

    /// The grading homomorphism `σ ↦ q`, in exact arithmetic.
    pub fn eval_at(&self, q: u64) -> BigUint {
        assert!(q >= 1, "eval_at requires q >= 1");
        let q = BigUint::from(q);
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &m| acc * &q + BigUint::from(m))
    }

    /// `eval_at` when the result fits in a `u64`.
    pub fn eval_u64(&self, q: u64) -> Option<u64> {
        self.coeffs.iter().rev().try_fold(0u64, |acc, &m| {
            acc.checked_mul(q)?.checked_add(m as u64)
        })
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &SigmaExp) -> bool {
        self.coeffs.len() <= other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    /// Componentwise difference; `None` unless `other ≤ self`.
    pub fn checked_sub(&self, other: &SigmaExp) -> Option<SigmaExp> {
        if !other.divides(self) {
            return None;
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &m)| m - other.coeff(i))
            .collect();
        Some(Self::from_coeffs(coeffs))
    }

    /// Every `μ` with `0 ≤ μ ≤ self` componentwise.
    pub fn divisors(&self) -> Vec<SigmaExp> {
        let mut out = vec![Vec::new()];
        for &m in &self.coeffs {
            let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
            for prefix in &out {
                for k in 0..=m {
                    let mut v: Vec<u32> = prefix.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(Self::from_coeffs).collect()
    }
}

impl Add for &SigmaExp {
    type Output = SigmaExp;

    fn add(self, rhs: &SigmaExp) -> SigmaExp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        SigmaExp::from_coeffs(coeffs)
    }
}

impl Add for SigmaExp {
    type Output = SigmaExp;

    fn add(self, rhs: SigmaExp) -> SigmaExp {
        &self + &rhs
    }
}

impl Ord for SigmaExp {
    // Value at σ = 2 first, then the coefficient sequence from the top.
    fn cmp(&self, other: &Self) -> Ordering {
        self.eval_at(2).cmp(&other.eval_at(2)).then_with(|| {
            self.coeffs
                .len()
                .cmp(&other.coeffs.len())
                .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
        })
    }
}

impl PartialOrd for SigmaExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SigmaExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &m) in self.coeffs.iter().enumerate() {
            if m == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, m) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "s")?,
                (1, m) => write!(f, "{m}*s")?,
                (i, 1) => write!(f, "s^{i}")?,
                (i, m) => write!(f, "{m}*s^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SigmaExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaExp({self})")
    }
}

impl std::str::FromStr for SigmaExp {
    type Err = crate::Error;

    /// Parses `m0 + m1*s + m2*s^2` (terms in any order, repeated terms add).
    fn from_str(text: &str) -> crate::Result<Self> {
        let syntax = |pos: usize, msg: &str| crate::Error::Syntax {
            pos,
            msg: msg.to_string(),
        };
        let mut coeffs: Vec<u32> = Vec::new();
        let mut pos = 0;
        for term in text.split('+') {
            let trimmed = term.trim();
            if trimmed.is_empty() {
                return Err(syntax(pos, "empty term"));
            }
            let (m, i) = if let Some(idx) = trimmed.find('s') {
                let (c, rest) = trimmed.split_at(idx);
                let c = c.trim().trim_end_matches('*').trim();
                let m: u32 = if c.is_empty() {
                    1
                } else {
                    c.parse().map_err(|_| syntax(pos, "bad coefficient"))?
                };
                let rest = rest[1..].trim();
                let i: usize = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.trim().parse().map_err(|_| syntax(pos, "bad power of s"))?
                } else {
                    return Err(syntax(pos, "unexpected text after s"));
                };
                (m, i)
            } else {
                let m: u32 = trimmed.parse().map_err(|_| syntax(pos, "bad constant"))?;
                (m, 0)
            };
            if coeffs.len() <= i {
                coeffs.resize(i + 1, 0);
            }
            coeffs[i] += m;
            pos += term.len() + 1;
        }
        Ok(SigmaExp::from_coeffs(coeffs))
    }
}

/// `binom(n, k) mod p` by Lucas' theorem.
pub fn binom_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        acc = acc * small_binom_mod(nd, kd, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    // n < p, so the factorials are invertible
    let k = k.min(n - k);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * crate::ffield::inv_mod(den, p) % p
}

/// The coefficient of `U^μ` in `(X + U)^ν`, reduced mod `p`: `Π_i binom(m_i, k_i)`.
pub fn deriv_coefficient(nu: &SigmaExp, mu: &SigmaExp, p: u64) -> u64 {
    deriv_coefficient_with(nu, mu, p, binom_mod)
}

/// [`deriv_coefficient`] with a caller-supplied binomial routine.
pub fn deriv_coefficient_with(
    nu: &SigmaExp,
    mu: &SigmaExp,
    p: u64,
    binom: fn(u64, u64, u64) -> u64,
) -> u64 {
    if !mu.divides(nu) {
        return 0;
    }
    nu.coeffs()
        .iter()
        .enumerate()
        .fold(1 % p, |acc, (i, &m)| acc * binom(m as u64, mu.coeff(i) as u64, p) % p)
}

/// Exact `Π_i binom(m_i, k_i)` over the integers (characteristic 0).
pub fn deriv_coefficient_int(nu: &SigmaExp, mu: &SigmaExp) -> BigUint {
    if !mu.divides(nu) {
        return BigUint::zero();
    }
    let mut acc = BigUint::from(1u32);
    for (i, &m) in nu.coeffs().iter().enumerate() {
        acc *= binom_exact(m as u64, mu.coeff(i) as u64);
    }
    acc
}

fn binom_exact(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub(crate) fn biguint_to_u64(v: &BigUint) -> Option<u64> {
    v.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn se(c: &[u32]) -> SigmaExp {
        SigmaExp::from_coeffs(c.to_vec())
    }

    #[test]
    fn add_examples() {
        assert_eq!(se(&[1, 1]) + se(&[0, 1]), se(&[1, 2]));
        assert_eq!(SigmaExp::zero() + se(&[3, 0, 2]), se(&[3, 0, 2]));
        assert_eq!(se(&[2, 3]) + se(&[1, 0, 1]), se(&[3, 3, 1]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(SigmaExp::one().shift(), se(&[0, 1]));
        assert_eq!(se(&[2, 1]).shift(), se(&[0, 2, 1]));
        assert_eq!(SigmaExp::zero().shift(), SigmaExp::zero());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(se(&[3, 2]).eval_at(5), BigUint::from(13u32));
        assert_eq!(se(&[0, 0, 1]).eval_at(4), BigUint::from(16u32));
        assert_eq!(SigmaExp::zero().eval_at(7), BigUint::zero());
    }

    #[test]
    fn eval_does_not_overflow() {
        let nu = se(&[1, 1, 1, 1, 1, 1]);
        let q = 1u64 << 13;
        let expected: BigUint = (0..6).map(|i| BigUint::from(q).pow(i)).sum();
        assert_eq!(nu.eval_at(q), expected);
        assert_eq!(nu.eval_u64(q), None);
    }

    #[test]
    fn deriv_coefficient_examples() {
        assert_eq!(deriv_coefficient(&se(&[1, 1]), &se(&[0, 1]), 5), 1);
        assert_eq!(deriv_coefficient(&se(&[0, 2]), &se(&[0, 1]), 5), 2);
        assert_eq!(deriv_coefficient(&se(&[2, 3]), &se(&[1, 1]), 7), 6);
        assert_eq!(deriv_coefficient(&se(&[2]), &se(&[0, 1]), 7), 0);
    }

    #[test]
    fn lucas_matches_exact_binomials() {
        for p in [2u64, 3, 5, 7] {
            for n in 0..40u64 {
                for k in 0..=n {
                    let exact = binom_exact(n, k) % BigUint::from(p);
                    assert_eq!(BigUint::from(binom_mod(n, k, p)), exact, "C({n},{k}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn order_is_lex_after_value() {
        assert!(se(&[3]) > se(&[0, 1]));
        assert!(se(&[2]) < se(&[0, 1]));
        assert!(se(&[0, 1]) > se(&[2]));
        assert_eq!(se(&[2]).cmp(&se(&[0, 1])), Ordering::Less);
    }

    #[test]
    fn text_round_trip() {
        for c in [&[2u32, 0, 0, 1][..], &[0, 1], &[5], &[1, 2, 3]] {
            let nu = se(c);
            assert_eq!(nu.to_string().parse::<SigmaExp>().unwrap(), nu);
        }
        assert_eq!(se(&[2, 0, 0, 1]).to_string(), "2 + s^3");
        assert_eq!("0".parse::<SigmaExp>().unwrap(), SigmaExp::zero());
    }

    #[test]
    fn divisors_enumerate_box() {
        let nu = se(&[2, 1]);
        let ds = nu.divisors();
        assert_eq!(ds.len(), 6);
        assert!(ds.iter().all(|d| d.divides(&nu)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_exp() -> impl Strategy<Value = SigmaExp> {
            prop::collection::vec(0u32..6, 0..5).prop_map(SigmaExp::from_coeffs)
        }

        proptest! {
            #[test]
            fn eval_is_homomorphism(a in arb_exp(), b in arb_exp(), q in 1u64..50) {
                prop_assert_eq!((&a + &b).eval_at(q), a.eval_at(q) + b.eval_at(q));
                prop_assert_eq!(a.shift().eval_at(q), a.eval_at(q) * BigUint::from(q));
            }

            #[test]
            fn derivative_unit_cases(nu in arb_exp(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
                prop_assert_eq!(deriv_coefficient(&nu, &SigmaExp::zero(), p), 1);
                prop_assert_eq!(deriv_coefficient(&nu, &nu, p), 1);
            }

            #[test]
            fn vandermonde(a in arb_exp(), b in arb_exp(), p in prop::sample::select(vec![2u64, 3, 5])) {
                let sum = &a + &b;
                for mu in sum.divisors() {
                    let mut acc = 0u64;
                    for mu1 in mu.divisors() {
                        let mu2 = mu.checked_sub(&mu1).unwrap();
                        acc += deriv_coefficient(&a, &mu1, p) * deriv_coefficient(&b, &mu2, p);
                    }
                    prop_assert_eq!(acc % p, deriv_coefficient(&sum, &mu, p));
                }
            }
        }
    }
}
