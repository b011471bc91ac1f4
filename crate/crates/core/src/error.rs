use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Breakpoints are not a strictly increasing finite sequence, or the
    /// number of branches does not match the number of elements.
    NotAPartition(&'static str),
    /// The image of `branch` cuts through the interior of `element`.
    NotMarkov { branch: usize, element: usize },
    /// The image of `branch` leaves the domain interval.
    ImageOutsideDomain { branch: usize },
    NotExpanding { branch: usize, slope: f64 },
    OutOfDomain { x: f64 },
    /// Inverse branch requested for a transition that does not exist.
    NoSuchBranch { element: usize, branch: usize },
    ParameterOutOfRange { name: &'static str, value: f64 },
    InvalidArgument(&'static str),
    DegreeOrder { m: usize, n: usize },
    DimensionMismatch { expected: usize, found: usize },
    NoConvergence { iterations: usize },
    NotConverged { iterations: usize },
    NonPositiveVector,
    NotMixing,
    LevelTooDeep { cylinders: u128, cap: usize },
    InverseBranchFailure { branch: usize, y: f64 },
    BudgetExceeded { work: u128, cap: u128 },
    WindowTooNoisy { usable: usize },
    DerivativeUndefined { x: f64 },
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to
    /// invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotConverged { .. }
                | Error::NonPositiveVector
                | Error::InverseBranchFailure { .. }
                | Error::DerivativeUndefined { .. }
                | Error::WindowTooNoisy { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotAPartition(why) => write!(f, "NotAPartition: {why}"),
            Error::NotMarkov { branch, element } => write!(
                f,
                "NotMarkov: image of branch {branch} partially covers element {element}"
            ),
            Error::ImageOutsideDomain { branch } => {
                write!(f, "NotMarkov: image of branch {branch} leaves the domain")
            }
            Error::NotExpanding { branch, slope } => {
                write!(f, "NotExpanding: branch {branch} has slope {slope}")
            }
            Error::OutOfDomain { x } => write!(f, "OutOfDomain: {x}"),
            Error::NoSuchBranch { element, branch } => write!(
                f,
                "NoSuchBranch: branch {branch} does not map onto element {element}"
            ),
            Error::ParameterOutOfRange { name, value } => {
                write!(f, "ParameterOutOfRange: {name} = {value}")
            }
            Error::InvalidArgument(why) => write!(f, "InvalidArgument: {why}"),
            Error::DegreeOrder { m, n } => {
                write!(f, "DegreeOrder: block ({m},{n}) lies below the diagonal")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "DimensionMismatch: expected {expected}, found {found}")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "NoConvergence: QR iteration cap {iterations} reached")
            }
            Error::NotConverged { iterations } => {
                write!(f, "NotConverged: power iteration stalled after {iterations} steps")
            }
            Error::NonPositiveVector => write!(f, "NonPositiveVector: Perron vector has a non-positive entry"),
            Error::NotMixing => write!(f, "NotMixing: transition matrix is not primitive"),
            Error::LevelTooDeep { cylinders, cap } => {
                write!(f, "LevelTooDeep: {cylinders} cylinders exceed the cap {cap}")
            }
            Error::InverseBranchFailure { branch, y } => {
                write!(f, "InverseBranchFailure: branch {branch} at {y}")
            }
            Error::BudgetExceeded { work, cap } => {
                write!(f, "BudgetExceeded: {work} map evaluations exceed the cap {cap}")
            }
            Error::WindowTooNoisy { usable } => {
                write!(f, "WindowTooNoisy: only {usable} lags above the noise floor")
            }
            Error::DerivativeUndefined { x } => write!(f, "DerivativeUndefined at {x}"),
        }
    }
}

impl core::error::Error for Error {}
