//! Error type shared by all modules.

/// Errors produced by chart, cover, collection, lift, verify and optimize
/// operations. Hypothesis failures of theorem checks are reported through
/// [`Error::HypothesesUnmet`] so callers can distinguish them from bugs.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("charts do not match ({context})")]
    ChartMismatch { context: &'static str },

    #[error("field is not theta-constant on the pole band at node {node} (deviation {deviation:.3e})")]
    PoleBandViolation { node: usize, deviation: f64 },

    #[error("non-finite sample ({context})")]
    NonFinite { context: String },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("disc violates chart constraints: {0}")]
    DiscOutOfBounds(String),

    #[error("mollifier width {width:.3e} below resolution (need at least {min_width:.3e})")]
    WidthBelowResolution { width: f64, min_width: f64 },

    #[error("flattening radii must satisfy 0 < sigma < delta, got sigma={sigma}, delta={delta}")]
    BadSurgeryRadii { sigma: f64, delta: f64 },

    #[error("region is not a disc: {0}")]
    NotADisc(String),

    #[error("discs do not cover the surface (node {uncovered_node} uncovered)")]
    NotACover { uncovered_node: usize },

    #[error("support winds a non-contractible cycle: {0}")]
    NonContractible(String),

    #[error("exact pb invariant supports at most {max} fields, got {n}")]
    FieldCount { n: usize, max: usize },

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("operation requires a partition of unity (mode partition)")]
    NotPartitionMode,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),

    #[error("collection does not vanish on a branch disc: {0}")]
    BranchDiscViolation(String),

    #[error("argument within {distance:.3e} of a lattice point")]
    LatticePointSingularity { distance: f64 },

    #[error("Moser rescaling is implemented on the torus chart only")]
    MoserRequiresTorus,

    #[error("field must be strictly positive ({context}, min {min:.3e})")]
    NonPositiveField { context: String, min: f64 },

    #[error("infeasible optimizer state: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
