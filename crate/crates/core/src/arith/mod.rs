//! Finite fields, truncated Witt vectors, the ring `Z_n` and Galois descent.

mod field;
pub mod galois;
pub mod moduli;
pub mod padic;
mod witt;
pub mod zn;

pub use field::{FieldCtx, FieldElt};
pub use galois::{galois_descent_check, DescentReport, TwistedGalModule};
pub use witt::{WittCtx, WittElt, MAX_DEGREE};
pub use zn::{zn_canonical, zn_reduce, ZnCanonical, ZnElt};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("no residue-field modulus available for p = {p}, n = {n}")]
    UnsupportedField { p: u64, n: usize },
    #[error("modulus for p = {p}, n = {n} is reducible")]
    ReducibleModulus { p: u64, n: usize },
    #[error("malformed moduli table at line {line}")]
    ModuliTable { line: usize },
    #[error("invalid precision {0}")]
    InvalidPrecision(u32),
    #[error("precision {p}^{k} exceeds the 40-bit working range")]
    PrecisionTooLarge { p: u64, k: u32 },
    #[error("requested precision {requested} exceeds working precision {available}")]
    PrecisionExceeded { requested: u32, available: u32 },
    #[error("Frobenius operator is not semilinear of order n: {0}")]
    NotSemilinear(String),
    #[error("mismatched contexts: {0}")]
    ContextMismatch(String),
}
