//! Finite fields `F_{p^m}` and ordinary polynomial machinery over them.

mod factor;
mod field;
mod multi;
mod primes;
mod resultant;
mod sparse;
mod sqfree;
mod uni;

pub use factor::{distinct_degree, equal_degree, factor_squarefree, is_irreducible_over};
pub use field::{is_irreducible, Field, FieldCtx, FqElement, PrimeField, TableField};
pub use multi::MultiPoly;
pub use primes::{as_prime_power, inv_mod, is_prime, prime_power_exponent};
pub use resultant::{resultant, resultant_y, BiPoly};
pub use sparse::{census_with_witness, sparse_census, SparsePoly, DENSE_LIMIT, WITNESS_LIMIT};
pub use sqfree::{
    distinct_root_count, is_squarefree, multiplicity_census, radical, squarefree_decomposition, Census,
};
pub use uni::{PolyRing, UniPoly};

use crate::Result;

/// `F_{p^m}` with a seeded, verified irreducible modulus.
pub fn make_field(p: u64, m: usize, seed: u64) -> Result<FieldCtx> {
    FieldCtx::make_field(p, m, seed)
}

/// `a^q` in `ctx`, `q` a power of the characteristic.
pub fn frobenius(ctx: &FieldCtx, a: &FqElement, q: u64) -> Result<FqElement> {
    ctx.frobenius(a, q)
}
