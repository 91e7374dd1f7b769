use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(usize),

    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },

    #[error("word is not admissible at position {0}")]
    NotAdmissible(usize),

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap { what: &'static str, needed: u128, cap: u128 },

    #[error("matrix is not loxodromic (trace^2 = {trace_sq})")]
    NotLoxodromic { trace_sq: String },

    #[error("determinant {0} is too far from 1")]
    BadDeterminant(String),

    #[error("point is not in upper half-space (t = {0})")]
    NotInUpperHalfSpace(String),

    #[error("numerical overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid weight window [{p_min}, {p_max}]")]
    InvalidWindow { p_min: i64, p_max: i64 },

    #[error("no graded piece (q = {q}, p = {p}, source = {source_label})")]
    NoSuchPiece { q: u8, p: i64, source_label: &'static str },

    #[error("operator leaves the weight window: target (q = {q}, p = {p})")]
    OutsideWindow { q: u8, p: i64 },

    #[error("weight {0} out of range for this map")]
    WeightOutOfRange(i64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pole of {0}")]
    Pole(&'static str),

    #[error("Hurwitz shift must have positive real part, got {0}")]
    InvalidShift(String),

    #[error("window too small to stabilize the spectral trace")]
    Unstabilized,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
