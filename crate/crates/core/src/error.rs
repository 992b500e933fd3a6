use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{q} is not a power of {p}")]
    NotPrimePower { q: u64, p: u64 },
    #[error("characteristic mismatch: {0} vs {1}")]
    CharMismatch(u64, u64),
    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("negative exponent at position {pos}")]
    NegativeExponent { pos: usize },
    #[error("zero polynomial has no roots to count")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("matrix is not square")]
    NonSquare,
    #[error("variable x{0} does not occur")]
    AbsentVariable(usize),
    #[error("both polynomials are constant in the elimination variable")]
    ConstantInVariable,
    #[error("resultant vanishes: the common locus is positive-dimensional")]
    PositiveDimensional,
    #[error("degenerate correspondence at q = {0}: substituted polynomial vanishes")]
    Degenerate(u64),
    #[error("exponent overflow while evaluating at q = {0}")]
    ExponentOverflow(u64),
    #[error("search space {size} exceeds enumeration budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("exact count infeasible: {0}")]
    Infeasible(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
