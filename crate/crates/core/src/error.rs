use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-invertible element: {0} mod {1}")]
    NonInvertible(u64, u8),
    #[error("modulus {0} is not a supported prime (need a prime in 2..=13)")]
    InvalidModulus(u64),
    #[error("mismatched moduli: {0} vs {1}")]
    ModulusMismatch(u8, u8),
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },
    #[error("{what} too large; use implicit evaluation (needs {needed}, cap {cap})")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("work budget exceeded: estimated {estimate} ops, budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("degenerate modulus p = 2: both signs map to residue 1")]
    DegenerateModulus,
    #[error("sigma_1 = q, no valid c1 (matrix has rank 1)")]
    RankOne,
    #[error("no c1 of the form k/64 satisfies c^c1 * sigma1 / q < 1 (c = {c:.6e})")]
    NoFeasibleExponent { c: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
