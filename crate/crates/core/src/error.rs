use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented domain.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A Gaussian integral whose quadratic exponent coefficient is not negative.
    ///
    /// `ratio` is the dimensionless quantity that must stay below one, e.g.
    /// `beta hbar^2 / (4 m sigma^2)`.
    DivergentIntegral { ratio: f64 },
    /// Adaptive quadrature could not reach the requested tolerance.
    QuadratureFailure {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    /// The adaptive ODE controller shrank the step below its floor.
    StepFailure { t: f64, step: f64 },
    /// A spectral projection captured less than the required norm.
    TruncationInsufficient { captured_norm: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::DivergentIntegral { ratio } => write!(
                f,
                "divergent Gaussian integral (criterion ratio {ratio} is not below 1)"
            ),
            Error::QuadratureFailure {
                estimate,
                error,
                subdivisions,
            } => write!(
                f,
                "quadrature did not converge after {subdivisions} subdivisions \
                 (estimate {estimate}, error {error})"
            ),
            Error::StepFailure { t, step } => {
                write!(f, "step size underflow at t = {t} (h = {step})")
            }
            Error::TruncationInsufficient { captured_norm } => write!(
                f,
                "spectral basis too small: captured norm {captured_norm} < 1 - 1e-8"
            ),
        }
    }
}

impl core::error::Error for Error {}
