use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p^0 part of the class is zero; not invertible")]
    ZeroLeading,
    #[error("p^0 part has {0} hbar-terms; only monomial leading parts are invertible")]
    NonMonomialLeading(usize),
    #[error("exponential argument has a nonzero q^0 p^0 part")]
    NonNilpotentConstant,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("invalid shift series: {0}")]
    BadShift(String),
    #[error("t-degree {degree} exceeds the bound {bound}")]
    TDegreeOverflow { degree: usize, bound: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("invalid insertion: {0}")]
    InvalidInsertion(String),
    #[error("dimension mismatch: insertions carry weight {actual}, critical dimension needs {required}")]
    DimensionMismatch { required: i64, actual: i64 },
    #[error("precision budget exceeded: {requested} needs p-order {needed}, only {budget} available")]
    PrecisionBudget {
        requested: String,
        needed: usize,
        budget: usize,
    },
    #[error("operation needs a {expected} bundle, got {got}")]
    WrongBundleClass { expected: String, got: String },
    #[error("gauge factor is not a unit")]
    NonUnit,
    #[error("series belong to different bundles or forms")]
    MixedBundles,
    #[error("height extension needs an untransformed height-0 series")]
    NotBaseSeries,
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("closed formula inapplicable: {0}")]
    Inapplicable(String),
    #[error("missing degrees for {signature}: {missing:?}")]
    MissingDegrees { signature: String, missing: Vec<usize> },
    #[error("weights are not generic: a fixed-locus denominator vanished")]
    NonGenericWeights,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that signal a convention bug upstream rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::ShapeViolation(_) | Error::TDegreeOverflow { .. } | Error::NotBaseSeries
        )
    }
}
