use std::fmt;

/// Errors surfaced by the library. Variants that mention "bug" indicate a
/// broken internal invariant rather than bad input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Division by a zero polynomial or zero field element.
    DivisionByZero,
    /// A tracked series ran out of certified digits.
    InsufficientPrecision(String),
    /// Exact division left a remainder where none was possible.
    InexactDivision(String),
    /// A square root was requested that does not exist in the ground field.
    NotASquare,
    /// The element is not in the image of the q-power Frobenius.
    NotAQthPower,
    /// A prime dividing the conductor was passed where it is not allowed.
    RamifiedPrime(String),
    /// Valuation of zero requested.
    ZeroElement,
    /// Evaluation at a point where the function has a pole.
    PoleAtPoint(String),
    /// Pi(x) has a pole at negative monic arguments.
    PoleAtNegativeMonic,
    /// Numeric-to-exact reconstruction did not produce a candidate.
    ReconstructionFailed(String),
    /// A reconstructed candidate failed its exact verification (bug).
    VerificationFailed(String),
    /// Coefficients expected to descend to F_q did not (bug).
    DescentFailure(String),
    /// Euler product parameters outside the convergence range.
    DivergentParameters(String),
    /// Ratio recognition as an algebraic number failed; value is numeric only.
    RecognitionFailed(String),
    /// The Vandermonde frame matrix is singular.
    SingularDelta,
    /// Riemann-Roch oracle dimension disagrees with genus-0 expectation.
    OracleDimensionMismatch(String),
    /// Sigma-expansion exceeded its provable degree cap (bug).
    NonterminatingSigmaExpansion,
    /// A q-th root inside K was required but missing (bug).
    QthRootFailure(String),
    /// Invalid run configuration.
    ConfigError(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::InsufficientPrecision(m) => write!(f, "insufficient precision: {m}"),
            Error::InexactDivision(m) => write!(f, "inexact division: {m}"),
            Error::NotASquare => write!(f, "element is not a square"),
            Error::NotAQthPower => write!(f, "element is not a q-th power"),
            Error::RamifiedPrime(m) => write!(f, "ramified prime: {m}"),
            Error::ZeroElement => write!(f, "valuation of zero"),
            Error::PoleAtPoint(m) => write!(f, "pole at point: {m}"),
            Error::PoleAtNegativeMonic => write!(f, "Pi has a pole at negative monic arguments"),
            Error::ReconstructionFailed(m) => write!(f, "reconstruction failed: {m}"),
            Error::VerificationFailed(m) => write!(f, "verification failed: {m}"),
            Error::DescentFailure(m) => write!(f, "descent to F_q failed: {m}"),
            Error::DivergentParameters(m) => write!(f, "divergent parameters: {m}"),
            Error::RecognitionFailed(m) => write!(f, "recognition failed: {m}"),
            Error::SingularDelta => write!(f, "singular Vandermonde frame"),
            Error::OracleDimensionMismatch(m) => write!(f, "Riemann-Roch dimension mismatch: {m}"),
            Error::NonterminatingSigmaExpansion => write!(f, "sigma expansion exceeded degree cap"),
            Error::QthRootFailure(m) => write!(f, "q-th root extraction failed: {m}"),
            Error::ConfigError(m) => write!(f, "config error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
