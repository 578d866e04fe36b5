//! Engine-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("numerator not divisible by psi' + psi'': first offending coefficient at psi'^{row} psi''^{col}")]
    NotDivisible { row: usize, col: usize },
    #[error("unstable pair (g, n) = ({g}, {n})")]
    Unstable { g: u32, n: u32 },
    #[error("ambient space mismatch: ({0}, {1}) vs ({2}, {3})")]
    AmbientMismatch(u32, u32, u32, u32),
    #[error("degree mismatch: {0} + {1} != {2}")]
    DegreeMismatch(u32, u32, u32),
    #[error("vertex factor slot mismatch: expected {expected} markings, got {got}")]
    SlotMismatch { expected: u32, got: u32 },
    #[error("degree bound violated: 3d > g - 1 + sum(a) requires d > {min}, got {got}")]
    DegreeBound { min: i64, got: i64 },
    #[error("marking weight must be 0 or 1, got {0}")]
    BadMarkingWeight(u32),
    #[error("element of the coefficient ring is not invertible")]
    NotInvertible,
    #[error("symplectic condition fails at order {order}, entry ({row}, {col})")]
    SymplecticViolation { order: usize, row: usize, col: usize },
    #[error("tail series has a nonzero linear coefficient")]
    TailContract,
    #[error("residual half-integral power remains after parity cancellation")]
    HalfPowerResidue,
    #[error("positive power of lambda survives the limit")]
    LambdaResidue,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
