use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("empty universe: cannot form degree-{degree} multisets over zero points")]
    EmptyUniverse { degree: usize },

    #[error("multiplicity must be positive")]
    ZeroMultiplicity,

    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("unsupported prime {0}: compiled field types cover 2, 3, 5, 7")]
    UnsupportedPrime(u32),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("arity mismatch: form has arity {expected}, got {got} arguments")]
    ArityMismatch { expected: usize, got: usize },

    #[error("zero form")]
    ZeroForm,

    #[error("form is not symplectic")]
    NotSymplectic,

    #[error("form is degenerate")]
    Degenerate,

    #[error("odd characteristic required, got p = {0}")]
    EvenCharacteristic(u32),

    #[error("not a partial linear space: {0}")]
    NotPartialLinear(String),

    #[error("line {line} has {size} points, below the floor of {floor}")]
    LineFloor {
        line: usize,
        size: usize,
        floor: usize,
    },

    #[error("point index {index} out of range for {count} points")]
    PointOutOfRange { index: usize, count: usize },

    #[error("not a polar space: {0}")]
    NotPolarSpace(String),

    #[error("not a hyperplane: {0}")]
    NotHyperplane(String),

    #[error("not a block of the space")]
    NotABlock,

    #[error("not a triangle: {0}")]
    NotATriangle(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("malformed leaf trace for {0}: neither full nor a base hyperplane")]
    MalformedTrace(String),

    #[error("mismatched ambient: {0}")]
    MismatchedAmbient(String),

    #[error("claim falsified: {0}")]
    Falsified(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
