//! Error type shared by every module, plus the exit-code contract used
//! by the command-line frontend.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("series has an empty known window (prec {prec} <= lo {lo})")]
    EmptyWindow { lo: i64, prec: i64 },
    #[error("series is indistinguishable from zero at the current precision")]
    ZeroAtPrecision,
    #[error("operation requires a nonzero input")]
    ZeroInput,
    #[error("skew-polynomial operands live over different algebra contexts")]
    ContextMismatch,
    #[error("q is a root of unity of order {0}")]
    RootOfUnity(u32),
    #[error("context is root-of-unity tolerant: only plain skew arithmetic is allowed")]
    RootOfUnityTolerant,
    #[error("no ramification root of index {0} is attached to this context")]
    MissingRamRoot(u32),
    #[error("valuation undecidable at current precision")]
    UndecidableValuation,
    #[error("linear dependence undecidable at current precision")]
    UndecidableRank,
    #[error("expected a single Newton slope, found {0}")]
    MultipleSlopes(usize),
    #[error("field extension required: characteristic polynomial {0} does not split")]
    FieldExtensionRequired(String),
    #[error("resonance detected: eigenvalue pair (a, q^{0} a) on the residue")]
    ResonanceDetected(i64),
    #[error("lattice improvement iteration cap exceeded after {0} steps")]
    IterationCap(usize),
    #[error("cyclic-vector retry budget exhausted (seed {0})")]
    RetryBudget(u64),
    #[error("orbit identification undecidable within bound {0}")]
    OrbitUndecidable(i64),
    #[error("coefficient height cap exceeded ({0} bits)")]
    HeightCap(u64),
    #[error("root relation fails: s^{0} != q")]
    RootRelation(u32),
    #[error("moduli regimes do not match: {0}")]
    RegimeMismatch(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code contract: 0 ok, 2 parse, 3 math, 4 precision, 5 resource caps.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Parse { .. } | Io(_) => 2,
            PrecisionExhausted(_)
            | EmptyWindow { .. }
            | ZeroAtPrecision
            | UndecidableValuation
            | UndecidableRank
            | OrbitUndecidable(_) => 4,
            HeightCap(_) | IterationCap(_) | RetryBudget(_) => 5,
            _ => 3,
        }
    }

    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}
