use thiserror::Error;

/// Errors raised while parsing a URDF document.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum UrdfError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("document has no <robot> root element")]
    NotARobot,
    #[error("element <{element}> is missing attribute `{attribute}`")]
    MissingAttribute { element: String, attribute: String },
    #[error("could not parse `{value}` as a number in {context}")]
    BadNumber { value: String, context: String },
    #[error("joint `{joint}` has unsupported type `{kind}`")]
    UnsupportedJoint { joint: String, kind: String },
    #[error("joint `{0}` requires a <limit> element with lower and upper bounds")]
    MissingLimits(String),
    #[error("joint `{joint}` has lower limit {lower} above upper limit {upper}")]
    InvertedLimits {
        joint: String,
        lower: f64,
        upper: f64,
    },
    #[error("joint `{0}` has a zero-length axis")]
    ZeroAxis(String),
    #[error("duplicate link name `{0}`")]
    DuplicateLink(String),
    #[error("duplicate joint name `{0}`")]
    DuplicateJoint(String),
    #[error("joint `{joint}` references unknown link `{link}`")]
    UnknownLink { joint: String, link: String },
    #[error("kinematic loop detected at link `{0}`")]
    KinematicLoop(String),
    #[error("robot has {0} root links; exactly one is required")]
    RootCount(usize),
    #[error("robot has no links")]
    NoLinks,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Urdf(#[from] UrdfError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("{count} configurations do not fit in a block of {width} lanes")]
    TooManyConfigurations { count: usize, width: usize },
    #[error("non-finite value in configuration")]
    NonFinite,
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("sphere on link `{link}` has non-positive radius {radius}")]
    NonPositiveRadius { link: String, radius: f64 },
    #[error("invalid primitive `{0}`")]
    InvalidPrimitive(String),
    #[error("resolution must be positive, got {0}")]
    NonPositiveResolution(f32),
    #[error("nearest-neighbor index is empty")]
    EmptyIndex,
    #[error("payload id {0} is already present in the index")]
    DuplicatePayload(usize),
    #[error("k must be positive")]
    ZeroK,
    #[error("path needs at least two waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("{which} configuration is outside the joint limits")]
    OutOfLimits { which: &'static str },
    #[error("{which} configuration is in collision")]
    InvalidEndpoint { which: &'static str },
    #[error("invalid planner settings: {0}")]
    InvalidSettings(String),
    #[error("failed to parse {what}: {message}")]
    Parse { what: &'static str, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
