use thiserror::Error;

use crate::formula::Ratio;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("b = {b} is too small for c = {c}: require b >= c - 1")]
    SidesOutOfRange { b: u32, c: u32 },
    #[error("expected {expected} dents, got {got}")]
    WrongDentCount { expected: usize, got: usize },
    #[error("dents must be strictly increasing: {0:?}")]
    DentsNotIncreasing(Vec<u32>),
    #[error("dent position {pos} outside 1..={max}")]
    DentOutOfRange { pos: u32, max: u32 },
    #[error("staircase requires b >= c (got b = {b}, c = {c})")]
    StaircaseSides { b: u32, c: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("parity mismatch: b - c = {diff} does not fit the {expected} case")]
    Parity { diff: i64, expected: &'static str },
    #[error("closed form evaluated to non-integer {0}")]
    NonInteger(Ratio),
    #[error("closed form evaluated to negative value {0}")]
    Negative(Ratio),
    #[error("sequence must be strictly increasing: {0:?}")]
    NotIncreasing(Vec<i64>),
    #[error("{0}")]
    Params(#[from] ParamError),
    #[error("membership violation: {0}")]
    Membership(String),
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KuoError {
    #[error("marked vertices must be distinct, got {0:?}")]
    NotDistinct([usize; 4]),
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("class counts violate |V1| = |V2| + 1 (|V1| = {up}, |V2| = {down})")]
    ClassCount { up: usize, down: usize },
    #[error("class pattern violated: expected x, y, t in class 1 and z in class 2")]
    ClassPattern,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing header")]
    MissingHeader,
}
