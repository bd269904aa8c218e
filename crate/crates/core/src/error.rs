use thiserror::Error;

/// Errors raised by the analysis, assembly, energy and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("density must be positive, got {0} kg/m^3")]
    NonPositiveDensity(f64),
    #[error("Poisson ratio must lie in (0, 0.5), got {0}")]
    PoissonOutOfRange(f64),
    #[error("elastic modulus must be positive, got {0} Pa")]
    NonPositiveModulus(f64),
    #[error("{field} must be positive, got {value} Pa")]
    NonPositiveStrength { field: &'static str, value: f64 },
    #[error("tensile strength {tensile} Pa is below yield strength {yield_strength} Pa")]
    TensileBelowYield { tensile: f64, yield_strength: f64 },
    #[error("cost per kg must be positive, got {0}")]
    NonPositiveCost(f64),
    #[error("safety factor must be at least 1, got {0}")]
    InvalidSafetyFactor(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid load: {0}")]
    InvalidLoad(String),
    #[error("speed must be non-negative and finite, got {0}")]
    InvalidSpeed(f64),
    #[error("radius {r} m lies outside [{lo}, {hi}] m")]
    RadiusOutOfDomain { r: f64, lo: f64, hi: f64 },
    #[error("annulus solution requires an inner radius > 0; use the solid-disk solution")]
    AnnulusRequired,
    #[error("solid-disk solution requires inner radius 0 and no inner pressure")]
    SolidDiskRequired,
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("profile radii must be strictly increasing")]
    NonMonotoneProfile,
    #[error("shrink-fit stress {shrink} Pa leaves no admissible speed below the allowable {allowable} Pa")]
    InfeasibleShrink { shrink: f64, allowable: f64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("rings are not nested: {0}")]
    NonNestedRings(String),
    #[error("interference must be non-negative, got {0} m")]
    NegativeInterference(f64),
    #[error("singular linear system at row {0}")]
    SingularSystem(usize),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("profile domains differ: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(f64, f64, f64, f64),
    #[error("refinement did not converge: {0}")]
    NonConvergent(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no feasible design found after {0} evaluations")]
    NoFeasiblePoint(usize),
    #[error("grid of {0} points exceeds the limit of {1}")]
    OversizeGrid(usize, usize),
    #[error("csv output failed: {0}")]
    Csv(String),
}

impl Error {
    /// True for errors caused by invalid user input, as opposed to failures
    /// inside an otherwise well-posed analysis.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::SingularSystem(_)
                | Error::NonConvergent(_)
                | Error::NoFeasiblePoint(_)
                | Error::InfeasibleShrink { .. }
                | Error::DegenerateFit(_)
                | Error::Csv(_)
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
