use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("iteration limit reached: {0}")]
    IterationLimit(String),
    #[error("module is not unit; cokernel elementary divisors t^{0:?}")]
    NotUnit(Vec<i64>),
    #[error("structure map does not preserve the module: {0}")]
    NotClosed(String),
    #[error("presentation is not in block shape K^m + A^s: {0}")]
    NotNormalized(String),
    #[error("generation undetermined: {0}")]
    Undetermined(String),
    #[error("search box too large: {0} candidates")]
    BoxTooLarge(u128),
    #[error("minimal root touches the search box boundary; enlarge the box")]
    BoxBoundaryHit,
    #[error("no unique inclusion-minimal root in the search box")]
    NoUniqueMinimum,
    #[error("wild ramification: p divides {0}")]
    WildRamification(u64),
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),
    #[error("root degree {degree} differs from the index sum {sum}")]
    NonIntegralDegree { degree: i64, sum: String },
    #[error("Frobenius action on cohomology is ill-defined: {0}")]
    RepresentativeMismatch(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

impl Error {
    /// The module an error is attributed to in reports.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "input",
            Error::InsufficientPrecision(_) => "arith",
            Error::IterationLimit(_) => "semilin",
            Error::NotUnit(_)
            | Error::NotClosed(_)
            | Error::NotNormalized(_)
            | Error::Undetermined(_)
            | Error::WildRamification(_) => "local",
            Error::BoxTooLarge(_) | Error::BoxBoundaryHit | Error::NoUniqueMinimum => "oracle",
            Error::UnsupportedVariant(_) => "catalog",
            Error::NonIntegralDegree { .. } | Error::RepresentativeMismatch(_) => "global",
            Error::Degenerate(_) => "oracle",
            Error::Schema(_) => "cli",
            Error::OracleMismatch(_) => "oracle",
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 3,
            Error::OracleMismatch(_) => 2,
            _ => 1,
        }
    }
}
