use thiserror::Error;

/// Every domain error raised by the library.
///
/// [`Error::code`] gives the stable snake_case identifier used on the wire.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot parse number `{0}`")]
    Parse(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("bridge interval is not contained in the union of the family")]
    BridgeNotSubset,
    #[error("system has no points")]
    EmptySystem,
    #[error("masses must be strictly positive")]
    NonPositiveMass,
    #[error("total mass must be 1, got {0}")]
    NotNormalized(String),
    #[error("targets do not average to the pair mean")]
    InconsistentMean,
    #[error("target {0} is not strictly inside the pair span")]
    TargetOutOfRange(String),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("outer and inner barycenters differ")]
    BarycenterMismatch,
    #[error("outer position {0} lies strictly inside the inner span")]
    InnerNotNested(String),
    #[error("no value supplied at position {0}")]
    MissingValue(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {0} is not in the domain")]
    CNotInDomain(String),
    #[error("point {0} is outside the convex hull of the domain")]
    COutOfHull(String),
    #[error("the constraint set B is empty")]
    EmptyB,
    #[error("B is not a subset of the domain: {0}")]
    BNotInDomain(String),
    #[error("g is not defined at the barycenter {0}")]
    MissingG(String),
    #[error("invalid tabulated function: {0}")]
    InvalidFunction(String),
    #[error("derivative is not monotone on the interval (violation near x = {0})")]
    NotMonotoneDerivative(f64),
    #[error("r must be positive, got {0}")]
    NonpositiveR(f64),
    #[error("interval must satisfy a < b")]
    EmptyInterval,
    #[error("density is negative near x = {0}")]
    NegativeDensity(String),
    #[error("density has total mass {0}, expected 1")]
    MassNotOne(String),
    #[error("invalid piecewise polynomial: {0}")]
    InvalidPoly(String),
    #[error("partition must be strictly increasing with at least two nodes")]
    InvalidPartition,
    #[error("point {point} lies outside cell {cell}")]
    PointOutsideCell { point: usize, cell: usize },
    #[error("assignment is not a partition of the point indices: {0}")]
    NotAPartition(String),
    #[error("intervals are not nested: {0}")]
    NotNested(String),
    #[error("c must lie strictly inside the inner interval")]
    CNotInterior,
    #[error("p must lie in (0, 1), got {0}")]
    POutOfRange(String),
    #[error("integration domain has zero measure")]
    ZeroMeasure,
    #[error("integration domain has infinite measure")]
    InfiniteMeasure,
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse_error",
            Error::InvalidInterval(_) => "invalid_interval",
            Error::BridgeNotSubset => "bridge_not_subset",
            Error::EmptySystem => "empty_system",
            Error::NonPositiveMass => "nonpositive_mass",
            Error::NotNormalized(_) => "not_normalized",
            Error::InconsistentMean => "inconsistent_mean",
            Error::TargetOutOfRange(_) => "target_out_of_range",
            Error::InvalidPair(_) => "invalid_pair",
            Error::BarycenterMismatch => "barycenter_mismatch",
            Error::InnerNotNested(_) => "inner_not_nested",
            Error::MissingValue(_) => "missing_value",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::CNotInDomain(_) => "c_not_in_domain",
            Error::COutOfHull(_) => "c_out_of_hull",
            Error::EmptyB => "empty_B",
            Error::BNotInDomain(_) => "b_not_in_domain",
            Error::MissingG(_) => "missing_g",
            Error::InvalidFunction(_) => "invalid_function",
            Error::NotMonotoneDerivative(_) => "not_monotone_derivative",
            Error::NonpositiveR(_) => "nonpositive_r",
            Error::EmptyInterval => "empty_interval",
            Error::NegativeDensity(_) => "negative_density",
            Error::MassNotOne(_) => "mass_not_one",
            Error::InvalidPoly(_) => "invalid_poly",
            Error::InvalidPartition => "invalid_partition",
            Error::PointOutsideCell { .. } => "point_outside_cell",
            Error::NotAPartition(_) => "not_a_partition",
            Error::NotNested(_) => "not_nested",
            Error::CNotInterior => "c_not_interior",
            Error::POutOfRange(_) => "p_out_of_range",
            Error::ZeroMeasure => "zero_measure",
            Error::InfiniteMeasure => "infinite_measure",
            Error::UnknownFunction(_) => "unknown_function",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
