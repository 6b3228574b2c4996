use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a space needs at least one point")]
    EmptySpace,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("{count} points requested, at most {max} are supported")]
    TooManyPoints { count: usize, max: usize },
    #[error("subset mask {mask:#b} has bits outside a {len}-point space")]
    MaskOutOfRange { mask: u64, len: usize },
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("operands live on different spaces ({0})")]
    SpaceMismatch(&'static str),
    #[error("expected {expected} values, found {found}")]
    Length { expected: usize, found: usize },
    #[error("non-finite value `{0}`")]
    NonFinite(String),
    #[error("capacity not normalized: u(empty) = {empty}, u(full) = {full}")]
    Normalization { empty: String, full: String },
    #[error("capacity not monotone: u({smaller:#b}) = {smaller_value} > u({larger:#b}) = {larger_value}")]
    Monotonicity {
        smaller: u64,
        larger: u64,
        smaller_value: String,
        larger_value: String,
    },
    #[error("distortion must fix 0 and 1, got h(0) = {at_zero}, h(1) = {at_one}")]
    DistortionEndpoint { at_zero: String, at_one: String },
    #[error("distortion decreases between attained values {lower} and {upper}")]
    DistortionNotMonotone { lower: String, upper: String },
    #[error("map sends point {point} to {target}, outside a {len}-point codomain")]
    MapOutOfRange {
        point: usize,
        target: usize,
        len: usize,
    },
    #[error("acts are not comonotonic at points {0} and {1}")]
    NotComonotonic(usize, usize),
    #[error("an uncertainty space needs at least one capacity")]
    EmptyCapacityList,
    #[error("capacities `{0}` and `{1}` have identical tables")]
    DuplicateCapacity(String, String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("level {level} is out of range (sequence has {len} levels)")]
    LevelOutOfRange { level: usize, len: usize },
    #[error("level {0} does not link to the previous level's capacities")]
    Linkage(usize),
    #[error("{0}")]
    InvalidSequence(String),
    #[error("value leaves the representable range: {0}")]
    Overflow(String),
    #[error("quadrature did not settle: {coarse} vs {fine}")]
    Quadrature { coarse: f64, fine: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("backend cannot represent {0}")]
    Backend(String),
    #[error("tower size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("capacity is not a point of tower level {0}")]
    OffGrid(usize),
    #[error("cannot parse number `{0}`")]
    Parse(String),
    #[error("space file: {0}")]
    SpaceFile(String),
}
