//! Difference polynomials `Σ c · Π_j x_j^{ν_j}` with `ν_j ∈ N[σ]`, over the
//! integers or a prime field.
//!
//! Text form: variables `x1..xN`, `xj@k` for `σ^k(x_j)`, integer
//! coefficients and `+ - * ^`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ffield::is_prime;
use crate::sigma_exp::{binom_mod, deriv_coefficient_int, deriv_coefficient_with, SigmaExp};
use crate::{Error, Result};

/// Order of a polynomial in a variable, with Cohn's `−∞` for absence.
/// `NegInf` sorts below every finite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    NegInf,
    Finite(i64),
}

impl Order {
    pub fn finite(self) -> Option<i64> {
        match self {
            Order::NegInf => None,
            Order::Finite(h) => Some(h),
        }
    }

    /// Sum with `−∞` absorbing.
    pub fn plus(self, other: Order) -> Order {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::NegInf,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::NegInf => write!(f, "-inf"),
            Order::Finite(h) => write!(f, "{h}"),
        }
    }
}

/// Exponent vector of a difference monomial: one [`SigmaExp`] per variable.
pub type Exponents = Vec<SigmaExp>;

/// A difference polynomial in `nvars` variables. `char` is 0 (integer
/// coefficients) or a prime `p` (coefficients kept in `[0, p)`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    char: u64,
    nvars: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl DiffPoly {
    pub fn zero(char: u64, nvars: usize) -> Self {
        DiffPoly {
            char,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(char: u64, nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut f = Self::zero(char, nvars);
        f.add_term(vec![SigmaExp::zero(); nvars], c.into());
        f
    }

    /// `σ^k(x_j)`, `j` 0-based.
    pub fn var(char: u64, nvars: usize, j: usize, k: usize) -> Self {
        assert!(j < nvars, "variable index out of range");
        let mut e = vec![SigmaExp::zero(); nvars];
        e[j] = SigmaExp::monomial(k, 1);
        let mut f = Self::zero(char, nvars);
        f.add_term(e, BigInt::one());
        f
    }

    pub fn from_terms(
        char: u64,
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, BigInt)>,
    ) -> Self {
        let mut f = Self::zero(char, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            f.add_term(e, c);
        }
        f
    }

    fn reduce(&self, c: BigInt) -> BigInt {
        if self.char == 0 {
            c
        } else {
            c.mod_floor(&BigInt::from(self.char))
        }
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        use std::collections::btree_map::Entry;
        let c = self.reduce(c);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                let sum = if self.char == 0 { sum } else { sum.mod_floor(&BigInt::from(self.char)) };
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn char(&self) -> u64 {
        self.char
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    /// Same polynomial viewed in characteristic `p` (coefficients reduced).
    pub fn reduced_mod(&self, p: u64) -> Result<DiffPoly> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if self.char != 0 && self.char != p {
            return Err(Error::CharMismatch(self.char, p));
        }
        Ok(DiffPoly::from_terms(p, self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c.clone()))))
    }

    fn check(&self, other: &DiffPoly) -> Result<()> {
        if self.char != other.char {
            return Err(Error::CharMismatch(self.char, other.char));
        }
        if self.nvars != other.nvars {
            return Err(Error::VarMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly::from_terms(self.char, self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), -c)))
    }

    pub fn sub(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check(other)?;
        let mut out = DiffPoly::zero(self.char, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> DiffPoly {
        let c = c.into();
        DiffPoly::from_terms(self.char, self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), v * &c)))
    }

    pub fn pow(&self, mut k: u32) -> DiffPoly {
        let mut base = self.clone();
        let mut acc = DiffPoly::constant(self.char, self.nvars, 1);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            k >>= 1;
        }
        acc
    }

    /// `σ(F)`: every exponent `ν ↦ σν`; prime-field constants are fixed.
    pub fn sigma_shift(&self) -> DiffPoly {
        DiffPoly::from_terms(
            self.char,
            self.nvars,
            self.terms
                .iter()
                .map(|(e, c)| (e.iter().map(SigmaExp::shift).collect(), c.clone())),
        )
    }

    /// Largest `i` with `σ^i(x_j)` occurring; `−∞` if `x_j` does not occur.
    pub fn order_in(&self, j: usize) -> Order {
        self.terms
            .keys()
            .filter_map(|e| e[j].order())
            .max()
            .map_or(Order::NegInf, |h| Order::Finite(h as i64))
    }

    /// Largest order over all variables (`None` for constants).
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().flat_map(|e| e.iter().filter_map(|n| n.order())).max()
    }

    /// Total degree: `Σ_j ν_j(1)` maximized over terms.
    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(SigmaExp::total_degree).sum())
            .max()
            .unwrap_or(0)
    }

    /// `∂_μ F` with respect to `x_j`.
    pub fn transformal_derivative(&self, j: usize, mu: &SigmaExp) -> DiffPoly {
        self.transformal_derivative_with(j, mu, binom_mod)
    }

    /// [`Self::transformal_derivative`] with a caller-supplied binomial
    /// routine for positive characteristic (fault injection in self-tests).
    pub fn transformal_derivative_with(
        &self,
        j: usize,
        mu: &SigmaExp,
        binom: fn(u64, u64, u64) -> u64,
    ) -> DiffPoly {
        let mut out = DiffPoly::zero(self.char, self.nvars);
        for (e, c) in &self.terms {
            let Some(rest) = e[j].checked_sub(mu) else {
                continue;
            };
            let k: BigInt = if self.char == 0 {
                BigInt::from(deriv_coefficient_int(&e[j], mu))
            } else {
                BigInt::from(deriv_coefficient_with(&e[j], mu, self.char, binom))
            };
            let mut e2 = e.clone();
            e2[j] = rest;
            out.add_term(e2, c * k);
        }
        out
    }

    /// Substitutes `σ^i(x_j) ↦ σ^i(r)` for every `i`. `r` must live in the
    /// same ring.
    pub fn substitute(&self, j: usize, r: &DiffPoly) -> Result<DiffPoly> {
        self.check(r)?;
        let mut shifts: Vec<DiffPoly> = vec![r.clone()];
        let mut out = DiffPoly::zero(self.char, self.nvars);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[j] = SigmaExp::zero();
            let mut t = DiffPoly::from_terms(self.char, self.nvars, [(rest, c.clone())]);
            for (i, &m) in e[j].coeffs().iter().enumerate() {
                if m == 0 {
                    continue;
                }
                while shifts.len() <= i {
                    let next = shifts.last().unwrap().sigma_shift();
                    shifts.push(next);
                }
                t = t.mul(&shifts[i].pow(m))?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Same polynomial with `extra` additional (unused) variables appended.
    pub fn extend_vars(&self, extra: usize) -> DiffPoly {
        DiffPoly::from_terms(
            self.char,
            self.nvars + extra,
            self.terms.iter().map(|(e, c)| {
                let mut e = e.clone();
                e.resize(self.nvars + extra, SigmaExp::zero());
                (e, c.clone())
            }),
        )
    }

    /// Coefficient of `x_j^ν` when `F` is viewed as a polynomial in `x_j`;
    /// the result keeps `x_j` as an (absent) variable.
    pub fn coefficient_of(&self, j: usize, nu: &SigmaExp) -> DiffPoly {
        DiffPoly::from_terms(
            self.char,
            self.nvars,
            self.terms.iter().filter(|(e, _)| &e[j] == nu).map(|(e, c)| {
                let mut e = e.clone();
                e[j] = SigmaExp::zero();
                (e, c.clone())
            }),
        )
    }

    /// Distinct exponents of `x_j` occurring in `F`.
    pub fn exponents_in(&self, j: usize) -> Vec<SigmaExp> {
        let mut v: Vec<SigmaExp> = self.terms.keys().map(|e| e[j].clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Parses the text form. `nvars` bounds the admissible variable indices.
    pub fn parse(text: &str, char: u64, nvars: usize) -> Result<DiffPoly> {
        if char != 0 && !is_prime(char) {
            return Err(Error::NotPrime(char));
        }
        Parser::new(text, char, nvars).parse()
    }

    /// Parses with `nvars` taken as the largest variable index used.
    pub fn parse_infer(text: &str, char: u64) -> Result<DiffPoly> {
        let nvars = max_var_index(text);
        Self::parse(text, char, nvars)
    }
}

/// Largest `j` among `xj` tokens (0 if none); malformed input is left for
/// the parser to reject.
pub fn max_var_index(text: &str) -> usize {
    let b = text.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'x' && (i == 0 || !b[i - 1].is_ascii_alphanumeric()) {
            let start = i + 1;
            let mut k = start;
            while k < b.len() && b[k].is_ascii_digit() {
                k += 1;
            }
            if let Ok(j) = text[start..k].parse::<usize>() {
                best = best.max(j);
            }
            i = k;
        } else {
            i += 1;
        }
    }
    best
}

fn render_monomial(e: &Exponents) -> Vec<String> {
    let mut factors = Vec::new();
    for (j, nu) in e.iter().enumerate() {
        for (i, &m) in nu.coeffs().iter().enumerate() {
            if m == 0 {
                continue;
            }
            let base = if i == 0 { format!("x{}", j + 1) } else { format!("x{}@{i}", j + 1) };
            factors.push(if m == 1 { base } else { format!("{base}^{m}") });
        }
    }
    factors
}

impl fmt::Display for DiffPoly {
    /// Highest term first; parses back to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors = render_monomial(e);
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffPoly[char {}, {} vars]({self})", self.char, self.nvars)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigUint),
    Var { j: usize, k: usize },
    Plus,
    Minus,
    Star,
    Caret,
}

struct Parser<'a> {
    text: &'a str,
    char: u64,
    nvars: usize,
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, char: u64, nvars: usize) -> Self {
        Parser {
            text,
            char,
            nvars,
            toks: Vec::new(),
            at: 0,
        }
    }

    fn digits(&self, from: usize) -> usize {
        let b = self.text.as_bytes();
        let mut k = from;
        while k < b.len() && b[k].is_ascii_digit() {
            k += 1;
        }
        k
    }

    fn skip_ws(&self, mut i: usize) -> usize {
        let b = self.text.as_bytes();
        while i < b.len() && b[i].is_ascii_whitespace() {
            i += 1;
        }
        i
    }

    fn lex(&mut self) -> Result<()> {
        let b = self.text.as_bytes();
        let mut i = 0;
        loop {
            i = self.skip_ws(i);
            if i >= b.len() {
                return Ok(());
            }
            let c = b[i];
            match c {
                b'+' => self.toks.push((Tok::Plus, i)),
                b'-' => self.toks.push((Tok::Minus, i)),
                b'*' => self.toks.push((Tok::Star, i)),
                b'^' => self.toks.push((Tok::Caret, i)),
                b'0'..=b'9' => {
                    let end = self.digits(i);
                    let n: BigUint = self.text[i..end].parse().unwrap();
                    self.toks.push((Tok::Num(n), i));
                    i = end;
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut end = i;
                    while end < b.len() && (b[end].is_ascii_alphanumeric() || b[end] == b'_') {
                        end += 1;
                    }
                    let name = &self.text[i..end];
                    let j = name
                        .strip_prefix('x')
                        .filter(|d| !d.is_empty() && d.bytes().all(|c| c.is_ascii_digit()))
                        .and_then(|d| d.parse::<usize>().ok())
                        .filter(|&j| j >= 1 && j <= self.nvars)
                        .ok_or_else(|| Error::UnknownVariable {
                            name: name.to_string(),
                            pos: i,
                        })?;
                    let mut k = 0;
                    let after = self.skip_ws(end);
                    end = if after < b.len() && b[after] == b'@' {
                        let ds = self.skip_ws(after + 1);
                        if ds < b.len() && b[ds] == b'-' {
                            return Err(Error::NegativeExponent { pos: ds });
                        }
                        let de = self.digits(ds);
                        if de == ds {
                            return Err(Error::Syntax {
                                pos: ds,
                                msg: "expected shift count after `@`".into(),
                            });
                        }
                        k = self.text[ds..de].parse().map_err(|_| Error::Syntax {
                            pos: ds,
                            msg: "shift count too large".into(),
                        })?;
                        de
                    } else {
                        end
                    };
                    self.toks.push((Tok::Var { j: j - 1, k }, i));
                    i = end;
                    continue;
                }
                _ => {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: format!("unexpected character `{}`", self.text[i..].chars().next().unwrap()),
                    })
                }
            }
            i += 1;
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.text.len(), |t| t.1)
    }

    fn parse(mut self) -> Result<DiffPoly> {
        self.lex()?;
        if self.toks.is_empty() {
            return Err(Error::Syntax {
                pos: 0,
                msg: "empty polynomial".into(),
            });
        }
        let mut out = DiffPoly::zero(self.char, self.nvars);
        let mut first = true;
        while self.at < self.toks.len() {
            let sign = match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    1
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    -1
                }
                _ if first => 1,
                _ => {
                    return Err(Error::Syntax {
                        pos: self.pos(),
                        msg: "expected `+` or `-`".into(),
                    })
                }
            };
            first = false;
            let (e, c) = self.term()?;
            out.add_term(e, c * sign);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Exponents, BigInt)> {
        let mut e = vec![SigmaExp::zero(); self.nvars];
        let mut c = BigInt::one();
        loop {
            let pos = self.pos();
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.at += 1;
                    c *= BigInt::from(n);
                    if self.peek() == Some(&Tok::Caret) {
                        return Err(Error::Syntax {
                            pos: self.pos(),
                            msg: "`^` applies only to variables".into(),
                        });
                    }
                }
                Some(Tok::Var { j, k }) => {
                    self.at += 1;
                    let mut m = 1u32;
                    if self.peek() == Some(&Tok::Caret) {
                        self.at += 1;
                        let epos = self.pos();
                        match self.peek().cloned() {
                            Some(Tok::Num(n)) => {
                                self.at += 1;
                                m = n.to_u32().ok_or(Error::Syntax {
                                    pos: epos,
                                    msg: "exponent too large".into(),
                                })?;
                            }
                            Some(Tok::Minus) => return Err(Error::NegativeExponent { pos: epos }),
                            _ => {
                                return Err(Error::Syntax {
                                    pos: epos,
                                    msg: "expected exponent after `^`".into(),
                                })
                            }
                        }
                    }
                    e[j] = &e[j] + &SigmaExp::monomial(k, m);
                }
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "expected a coefficient or variable".into(),
                    })
                }
            }
            if self.peek() == Some(&Tok::Star) {
                self.at += 1;
            } else {
                return Ok((e, c));
            }
        }
    }
}
