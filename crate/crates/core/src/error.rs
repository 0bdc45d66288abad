use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate {value} outside [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("flow profile has nonzero mean {mean:e}")]
    NonZeroMean { mean: f64 },

    #[error("trivial flow: velocity vanishes identically")]
    TrivialFlow,

    #[error("flow file: {0}")]
    FlowFile(String),

    #[error("reaction violates KPP conditions: {0}")]
    NotKpp(String),

    #[error("shooting bracket failure: {0}")]
    Bracket(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("eigenfunction is not positive (min {min:e}); cannot take logarithm")]
    NonPositiveEigenfunction { min: f64 },

    #[error("evaluation point {xi} outside the stored profile range (left end {left})")]
    Extrapolation { xi: f64, left: f64 },

    #[error("CFL violation: dt {dt:e} exceeds stable limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("interface extraction failed: {missing} of {rows} rows have no crossing")]
    Interface { missing: usize, rows: usize },

    #[error("insufficient samples: need {need}, have {have}")]
    InsufficientSamples { need: usize, have: usize },

    #[error("front touches the window edge")]
    WindowEdge,

    #[error("no asymptotic regime covers A={a}, B={b}, u_c={u_c}")]
    NoRegime { a: f64, b: f64, u_c: f64 },
}

impl Error {
    /// Short machine-readable tag used in structured CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::NonZeroMean { .. } => "nonzero_mean",
            Error::TrivialFlow => "trivial_flow",
            Error::FlowFile(_) => "flow_file",
            Error::NotKpp(_) => "not_kpp",
            Error::Bracket(_) => "bracket",
            Error::Solver(_) => "solver",
            Error::NonPositiveEigenfunction { .. } => "nonpositive_eigenfunction",
            Error::Extrapolation { .. } => "extrapolation",
            Error::Cfl { .. } => "cfl",
            Error::Interface { .. } => "interface",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::WindowEdge => "window_edge",
            Error::NoRegime { .. } => "no_regime",
        }
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
