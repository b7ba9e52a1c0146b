use thiserror::Error;

/// Everything that can go wrong between parameter parsing and report output.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in F_{p}")]
    DivisionByZero { p: u64 },
    #[error("0^0 is undefined")]
    UndefinedPower,
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("invalid prime {p}: {reason}")]
    InvalidPrime { p: u64, reason: String },
    #[error("characteristic 2 is not supported")]
    EvenCharacteristicUnsupported,
    #[error("modulus polynomial is not irreducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parameters overflow 64-bit exponent arithmetic: {0}")]
    ParameterOverflow(String),
    #[error("curve has genus 0; no holomorphic differentials")]
    ZeroGenus,
    #[error("hypothesis violated in strict mode: {0}")]
    HypothesisViolated(String),
    #[error("exponent {exponent} is not divisible by p = {p}")]
    NonDivisibleExponent { exponent: u64, p: u64 },
    #[error("basis has {found} elements but genus is {genus}")]
    BasisCountMismatch { found: usize, genus: u64 },
    #[error("Cartier image monomial x^{ex}*y^{ey} is not a basis element")]
    ImageOutsideBasis { ex: u64, ey: u64 },
    #[error("maximal curve has p-rank {p_rank}, expected 0")]
    SupersingularityViolation { p_rank: usize },
    #[error("field of size {size} exceeds brute-force limit {limit}")]
    FieldTooLarge { size: u64, limit: u64 },
    #[error("genus {genus} exceeds cap {cap}")]
    GenusCapExceeded { genus: u64, cap: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o failure: {0}")]
    IoFailure(String),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BasisCountMismatch { .. }
            | Error::ImageOutsideBasis { .. }
            | Error::NonDivisibleExponent { .. }
            | Error::SupersingularityViolation { .. } => 2,
            Error::FieldTooLarge { .. } | Error::GenusCapExceeded { .. } => 3,
            _ => 1,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero { .. } => "DivisionByZero",
            Error::UndefinedPower => "UndefinedPower",
            Error::ModulusMismatch { .. } => "ModulusMismatch",
            Error::InvalidPrime { .. } => "InvalidPrime",
            Error::EvenCharacteristicUnsupported => "EvenCharacteristicUnsupported",
            Error::ReducibleModulus { .. } => "ReducibleModulus",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ParameterOverflow(_) => "ParameterOverflow",
            Error::ZeroGenus => "ZeroGenus",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NonDivisibleExponent { .. } => "NonDivisibleExponent",
            Error::BasisCountMismatch { .. } => "BasisCountMismatch",
            Error::ImageOutsideBasis { .. } => "ImageOutsideBasis",
            Error::SupersingularityViolation { .. } => "SupersingularityViolation",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::GenusCapExceeded { .. } => "GenusCapExceeded",
            Error::Parse(_) => "Parse",
            Error::IoFailure(_) => "IoFailure",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoFailure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
