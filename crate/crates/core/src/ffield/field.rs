//! Finite fields: the prime field `F_p`, general extensions `F_{p^m}` given by
//! an irreducible modulus, and small table-driven fields for enumeration.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::primes::{inv_mod, is_prime, prime_power_exponent};
use crate::{Error, Result};

/// Arithmetic in a finite field. Elements are plain values; the field value
/// carries whatever context (modulus, tables) the arithmetic needs.
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> u32;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under `Z → F_p ⊂ F`.
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn pow_big(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// `a^(p^k)` by `k` successive p-th powers.
    fn frobenius_iter(&self, a: &Self::Elem, k: u64) -> Self::Elem {
        let p = self.characteristic();
        (0..k).fold(a.clone(), |x, _| self.pow(&x, p))
    }

    /// `|F| = p^m`.
    fn order(&self) -> BigUint {
        BigUint::from(self.characteristic()).pow(self.degree())
    }
}

/// `F_p` with elements stored as residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce(n)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.p < 1 << 32 {
            a * b % self.p
        } else {
            ((*a as u128 * *b as u128) % self.p as u128) as u64
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| inv_mod(*a, self.p))
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn frobenius_iter(&self, a: &u64, _k: u64) -> u64 {
        *a
    }
}

/// Element of `F_{p^m}`: coefficients of a residue class mod the field's
/// modulus, lowest degree first, exactly `m` entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElement(pub Vec<u64>);

/// `F_{p^m} = F_p[t]/(modulus)` for a monic irreducible modulus of degree `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    base: PrimeField,
    m: usize,
    /// Monic, lowest degree first, length `m + 1`.
    modulus: Arc<Vec<u64>>,
}

impl FieldCtx {
    /// Deterministic seeded search for a monic irreducible of degree `m`.
    pub fn make_field(p: u64, m: usize, seed: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if m == 0 {
            return Err(Error::Invalid("extension degree must be at least 1".into()));
        }
        if m == 1 {
            return Ok(FieldCtx {
                base,
                m,
                modulus: Arc::new(vec![0, 1]),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut c: Vec<u64> = (0..m).map(|_| rng.gen_range(0..p)).collect();
            c.push(1);
            if c[0] != 0 && is_irreducible(&base, &c) {
                return Ok(FieldCtx {
                    base,
                    m,
                    modulus: Arc::new(c),
                });
            }
        }
    }

    /// The field `F_p[t]/(modulus)`; the modulus is normalized to be monic and
    /// must pass the irreducibility test.
    pub fn from_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let mut c: Vec<u64> = modulus.iter().map(|&x| x % p).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        if c.len() < 2 {
            return Err(Error::Invalid("modulus must have positive degree".into()));
        }
        let lc_inv = inv_mod(*c.last().unwrap(), p);
        for x in c.iter_mut() {
            *x = *x * lc_inv % p;
        }
        if !is_irreducible(&base, &c) {
            return Err(Error::Invalid("modulus is reducible".into()));
        }
        Ok(FieldCtx {
            base,
            m: c.len() - 1,
            modulus: Arc::new(c),
        })
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn prime_field(&self) -> PrimeField {
        self.base
    }

    /// The class of `t`, a generator of the extension over `F_p`.
    pub fn generator(&self) -> FqElement {
        let mut c = vec![0; self.m];
        if self.m == 1 {
            // F_p[t]/(t): t is zero
            return FqElement(c);
        }
        c[1] = 1;
        FqElement(c)
    }

    pub fn element(&self, coeffs: &[u64]) -> FqElement {
        let mut c = vec![0; self.m];
        for (i, &x) in coeffs.iter().enumerate() {
            if i < self.m {
                c[i] = x % self.p();
            } else {
                // reduce higher terms through the modulus
                let mono = self.mono_reduce(i);
                for (j, &y) in mono.iter().enumerate() {
                    c[j] = (c[j] + x % self.p() * y) % self.p();
                }
            }
        }
        FqElement(c)
    }

    fn mono_reduce(&self, i: usize) -> Vec<u64> {
        let mut acc = vec![0u64; self.m];
        acc[0] = 1;
        let t = self.generator();
        let mut acc = FqElement(acc);
        for _ in 0..i {
            acc = self.mul(&acc, &t);
        }
        acc.0
    }

    /// `a^q` for `q` a power of `p`.
    pub fn frobenius(&self, a: &FqElement, q: u64) -> Result<FqElement> {
        let e = prime_power_exponent(q, self.p()).ok_or(Error::NotPrimePower { q, p: self.p() })?;
        Ok(self.frobenius_iter(a, e as u64 % self.m as u64))
    }

    /// Integer encoding `Σ c_i p^i`, handy for enumeration.
    pub fn to_index(&self, a: &FqElement) -> u64 {
        a.0.iter().rev().fold(0, |acc, &c| acc * self.p() + c)
    }

    pub fn from_index(&self, mut n: u64) -> FqElement {
        let mut c = vec![0; self.m];
        for x in c.iter_mut() {
            *x = n % self.p();
            n /= self.p();
        }
        FqElement(c)
    }
}

impl Field for FieldCtx {
    type Elem = FqElement;

    fn characteristic(&self) -> u64 {
        self.p()
    }
    fn degree(&self) -> u32 {
        self.m as u32
    }
    fn zero(&self) -> FqElement {
        FqElement(vec![0; self.m])
    }
    fn one(&self) -> FqElement {
        let mut c = vec![0; self.m];
        c[0] = 1;
        FqElement(c)
    }
    fn from_i64(&self, n: i64) -> FqElement {
        let mut c = vec![0; self.m];
        c[0] = self.base.reduce(n);
        FqElement(c)
    }
    fn is_zero(&self, a: &FqElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
    fn add(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement(a.0.iter().zip(&b.0).map(|(x, y)| self.base.add(x, y)).collect())
    }
    fn sub(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement(a.0.iter().zip(&b.0).map(|(x, y)| self.base.sub(x, y)).collect())
    }
    fn neg(&self, a: &FqElement) -> FqElement {
        FqElement(a.0.iter().map(|x| self.base.neg(x)).collect())
    }
    fn mul(&self, a: &FqElement, b: &FqElement) -> FqElement {
        let m = self.m;
        if m == 1 {
            return FqElement(vec![self.base.mul(&a.0[0], &b.0[0])]);
        }
        let p = self.p() as u128;
        let mut prod = vec![0u128; 2 * m - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] += x as u128 * y as u128;
            }
            if i % 64 == 63 {
                for v in prod.iter_mut() {
                    *v %= p;
                }
            }
        }
        let mut prod: Vec<u64> = prod.into_iter().map(|v| (v % p) as u64).collect();
        // modulus is monic: t^m = -Σ_{k<m} c_k t^k
        for d in (m..prod.len()).rev() {
            let top = prod[d];
            if top == 0 {
                continue;
            }
            prod[d] = 0;
            for k in 0..m {
                let c = self.modulus[k];
                if c != 0 {
                    let sub = self.base.mul(&top, &c);
                    prod[d - m + k] = self.base.sub(&prod[d - m + k], &sub);
                }
            }
        }
        prod.truncate(m);
        FqElement(prod)
    }
    fn inv(&self, a: &FqElement) -> Option<FqElement> {
        if self.is_zero(a) {
            return None;
        }
        if self.m == 1 {
            return self.base.inv(&a.0[0]).map(|x| FqElement(vec![x]));
        }
        // extended Euclid in F_p[t] between a and the modulus
        let ring = super::uni::PolyRing::new(self.base);
        let av = super::uni::UniPoly::from_coeffs(&self.base, a.0.clone());
        let mv = super::uni::UniPoly::from_coeffs(&self.base, self.modulus.to_vec());
        let (g, s, _) = ring.ext_gcd(&av, &mv);
        debug_assert_eq!(g.degree(), Some(0));
        let ginv = self.base.inv(&g.coeffs()[0]).unwrap();
        let s = ring.scale(&s, &ginv);
        Some(self.element(s.coeffs()))
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElement {
        FqElement((0..self.m).map(|_| rng.gen_range(0..self.p())).collect())
    }
}

/// Irreducibility of a monic polynomial over `F_p` of degree `m`:
/// `t^{p^m} ≡ t` and `gcd(t^{p^k} − t, f) = 1` for every maximal proper divisor `k = m/ℓ`.
pub fn is_irreducible(base: &PrimeField, monic: &[u64]) -> bool {
    use super::uni::{PolyRing, UniPoly};
    let m = monic.len() - 1;
    if m == 1 {
        return true;
    }
    let ring = PolyRing::new(*base);
    let f = UniPoly::from_coeffs(base, monic.to_vec());
    let t = UniPoly::from_coeffs(base, vec![0, 1]);
    let p = base.p();
    let frob_k = |k: usize| -> UniPoly<PrimeField> {
        let mut x = t.clone();
        for _ in 0..k {
            x = ring.pow_mod(&x, p, &f);
        }
        x
    };
    if frob_k(m) != ring.rem(&t, &f) {
        return false;
    }
    for l in prime_divisors(m as u64) {
        let k = m / l as usize;
        let h = ring.sub(&frob_k(k), &t);
        if ring.gcd(&h, &f).degree() != Some(0) {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A small field `F_{p^m}` (order at most [`TableField::MAX_ORDER`]) with
/// elements encoded as integers `Σ c_i p^i` and log/antilog plus addition
/// tables. Used by the enumeration engines.
#[derive(Clone, Debug)]
pub struct TableField {
    p: u64,
    m: u32,
    order: u32,
    add: Arc<Vec<u16>>,
    neg: Arc<Vec<u16>>,
    log: Arc<Vec<u32>>,
    exp: Arc<Vec<u16>>,
}

impl TableField {
    pub const MAX_ORDER: u64 = 4096;

    pub fn new(ctx: &FieldCtx) -> Result<Self> {
        let order = BigUint::from(ctx.p()).pow(ctx.m() as u32);
        let order: u64 = super::super::sigma_exp::biguint_to_u64(&order)
            .filter(|&o| o <= Self::MAX_ORDER)
            .ok_or_else(|| Error::Invalid("field too large for tables".into()))?;
        let n = order as usize;
        let mut add = vec![0u16; n * n];
        let elems: Vec<FqElement> = (0..order).map(|i| ctx.from_index(i)).collect();
        for a in 0..n {
            for b in a..n {
                let s = ctx.to_index(&ctx.add(&elems[a], &elems[b])) as u16;
                add[a * n + b] = s;
                add[b * n + a] = s;
            }
        }
        let neg = (0..n).map(|a| ctx.to_index(&ctx.neg(&elems[a])) as u16).collect();
        // find a primitive element by brute force
        let mut log = vec![u32::MAX; n];
        let mut exp = vec![0u16; n - 1];
        'search: for g in 1..order {
            let ge = &elems[g as usize];
            let mut x = ctx.one();
            log.iter_mut().for_each(|l| *l = u32::MAX);
            for k in 0..(n - 1) {
                let idx = ctx.to_index(&x) as usize;
                if log[idx] != u32::MAX {
                    continue 'search;
                }
                log[idx] = k as u32;
                exp[k] = idx as u16;
                x = ctx.mul(&x, ge);
            }
            break;
        }
        Ok(TableField {
            p: ctx.p(),
            m: ctx.m() as u32,
            order: order as u32,
            add: Arc::new(add),
            neg: Arc::new(neg),
            log: Arc::new(log),
            exp: Arc::new(exp),
        })
    }

    pub fn order_u32(&self) -> u32 {
        self.order
    }

    /// `a^e` through the log table.
    #[inline]
    pub fn pow_idx(&self, a: u16, e: u64) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % (self.order as u64 - 1))) % (self.order as u64 - 1)) as usize]
    }
}

impl Field for TableField {
    type Elem = u16;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        self.m
    }
    fn zero(&self) -> u16 {
        0
    }
    fn one(&self) -> u16 {
        1
    }
    fn from_i64(&self, n: i64) -> u16 {
        n.rem_euclid(self.p as i64) as u16
    }
    fn is_zero(&self, a: &u16) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u16, b: &u16) -> u16 {
        self.add[*a as usize * self.order as usize + *b as usize]
    }
    #[inline]
    fn sub(&self, a: &u16, b: &u16) -> u16 {
        self.add(a, &self.neg[*b as usize])
    }
    #[inline]
    fn neg(&self, a: &u16) -> u16 {
        self.neg[*a as usize]
    }
    #[inline]
    fn mul(&self, a: &u16, b: &u16) -> u16 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let s = self.log[*a as usize] + self.log[*b as usize];
        let n = self.order - 1;
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }
    fn inv(&self, a: &u16) -> Option<u16> {
        if *a == 0 {
            return None;
        }
        let n = self.order - 1;
        let l = self.log[*a as usize];
        Some(self.exp[((n - l) % n) as usize])
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.gen_range(0..self.order) as u16
    }
    fn pow(&self, a: &u16, e: u64) -> u16 {
        self.pow_idx(*a, e)
    }
}
