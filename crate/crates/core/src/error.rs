use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent vector is empty")]
    Empty,
    #[error("orders are not strictly increasing: {0:?}")]
    NotStrictlyIncreasing(Vec<u32>),
    #[error("order {order} exceeds r = {r}")]
    OrderExceedsR { order: u32, r: u32 },
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("value {0} is negative or not finite")]
    InvalidValue(f64),
    #[error("point {0} is negative")]
    NegativePoint(f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid spline: {0}")]
    InvalidSpline(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("atom reduction failed: residual {0:e} exceeds the feasibility tolerance")]
    ReductionFailed(f64),
    #[error("moment vector is not an interior point of the moment cone")]
    NotInterior,
    #[error("representations with prescribed structure need the first order to be 0")]
    FirstOrderNotZero,
    #[error("Newton iteration did not converge (residual {0:e})")]
    NewtonDiverged(f64),
    #[error("prescribed root {0} coincides with a principal root")]
    DegenerateRoot(f64),
    #[error("no finite representation has root {t_star}: mass {mass:e} escapes to infinity in the top order")]
    RootBeyondSupport { t_star: f64, mass: f64 },

    #[error("derivative {derivative} exceeds spline order {r}")]
    DerivativeExceedsOrder { derivative: u32, r: u32 },
    #[error("evaluation point t = {0} is positive")]
    PositiveT(f64),
    #[error("spline order {spline} does not match exponent order {exponents}")]
    OrderMismatch { spline: u32, exponents: u32 },

    #[error("norm vector is not admissible")]
    NotAdmissible,
    #[error("witness spline is not unique within tolerance")]
    NonUniqueWithinTolerance,
    #[error("interior witness for an odd number of orders needs k_1 = 0")]
    OddInteriorNeedsZeroOrder,
    #[error("recursive check needs the top order to equal r")]
    RequiresTopOrderR,
    #[error("recursive check needs at least 3 orders, got {0}")]
    DRequiresAtLeast3(usize),

    #[error("an even number of orders is required, got {0}")]
    OddOrderCount(usize),
    #[error("top order must be below r")]
    TopOrderMustBeBelowR,
    #[error("p = {0} is not an intermediate order")]
    PNotIntermediate(u32),
    #[error("invalid distribution problem: {0}")]
    InvalidDistribution(String),
    #[error("no distribution function satisfies the constraints")]
    EmptyFamily,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
