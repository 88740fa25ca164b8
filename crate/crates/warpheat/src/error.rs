use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),

    #[error("warping function nonpositive at r = {r}: psi = {psi}")]
    NonpositiveWarp { r: f64, psi: f64 },

    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("grid must have at least 8 cells, got {0}")]
    GridTooCoarse(usize),

    #[error("truncation radius {r_max} must exceed lower bound {r}")]
    BadTruncation { r: f64, r_max: f64 },

    #[error("potential sample not finite at r = {0}")]
    NonFinitePotential(f64),

    #[error("potential under-resolved: jump of {jump:.3e} between nodes {r_lo} and {r_hi}")]
    UnresolvedPotential { r_lo: f64, r_hi: f64, jump: f64 },

    #[error("profile nonpositive at r = {r}: value {value}")]
    NonpositiveProfile { r: f64, value: f64 },

    #[error("profile underflows the gauge guard (< 1e-300) at r = {0}")]
    GaugeUnderflow(f64),

    #[error("drift negative at r = {r}: m = {m} (violates the nonnegative-drift hypothesis)")]
    NegativeDrift { r: f64, m: f64 },

    #[error("gluing inequality C·eta <= z violated at r = {r}: C*eta = {c_eta}, z = {z}")]
    GlueBoundViolated { r: f64, c_eta: f64, z: f64 },

    #[error("inner extension of the power profile fails positivity at r = {0}")]
    BlendNotPositive(f64),

    #[error("eigen iteration cap {cap} exceeded; best estimate {estimate}")]
    EigenNotConverged { cap: usize, estimate: f64 },

    #[error("singular tridiagonal system: |pivot| = {pivot:.3e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("eigenvalue table not monotone: lambda({r_prev}) = {prev} < lambda({r_next}) = {next}")]
    NonMonotoneSweep {
        r_prev: f64,
        prev: f64,
        r_next: f64,
        next: f64,
    },

    #[error("no feasible barrier parameters after {halvings} halvings; binding constraint: {binding}")]
    BarrierInfeasible { halvings: usize, binding: &'static str },

    #[error("barrier evaluated outside its time window: t = {t}, t_max = {t_max}")]
    BarrierTimeRange { t: f64, t_max: f64 },

    #[error("comparison violated at r = {r}, t = {t}: {lhs} > {rhs} beyond tolerance")]
    ComparisonViolated { r: f64, t: f64, lhs: f64, rhs: f64 },

    #[error("h-function not increasing at r = {0}")]
    HNotMonotone(f64),

    #[error("condition {condition} requires a stationary weight profile")]
    MissingWeightProfile { condition: &'static str },

    #[error("zero mass norm in Rayleigh quotient")]
    ZeroMassNorm,

    #[error("scenario config invalid: {0}")]
    BadConfig(String),

    #[error("unknown example id: {0}")]
    UnknownExample(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
