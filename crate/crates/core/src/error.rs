use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("missing binding for `{0}`")]
    MissingBinding(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("illegal dependence: {0}")]
    IllegalDependence(String),
    #[error("jet sampling exhausted after {0} rejections")]
    SamplingExhausted(usize),
    #[error("basis is not closed under the bracket: {0}")]
    NotClosed(String),
    #[error("basis is linearly dependent")]
    DependentBasis,
    #[error("field is not of conformal form: offending term {0}")]
    NotConformalForm(String),
    #[error("transformation is not invertible: {0}")]
    NotInvertible(String),
    #[error("unknown reduction `{0}`")]
    UnknownReduction(String),
    #[error("missing parameter: {0}")]
    MissingParameter(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("right-hand side is not quadratic in ut: {0}")]
    NotPolynomial(String),
    #[error("no rational fit of the logarithmic derivative")]
    NoFit,
    #[error("no template matches")]
    NoTemplate,
    #[error("normalization unavailable: {0}")]
    NormalizationUnavailable(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
