//! Difference polynomials over prime fields, the Frobenius reduction
//! `σ^i(x) ↦ x^{q^i}`, and exact counting engines over finite fields.

pub mod error;
pub mod counting;
pub mod diff_poly;
pub mod ffield;
pub mod jacobi;
pub mod frob_reduce;
pub mod growth;
pub mod selftest;
pub mod sigma_exp;
pub mod stats;

pub use error::{Error, Result};
pub use sigma_exp::SigmaExp;
pub use diff_poly::{DiffPoly, Order};
