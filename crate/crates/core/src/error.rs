use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported dimension {0} (expected {1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("negative or non-finite sample {value} at cell {index}")]
    InvalidSample { index: usize, value: f64 },

    #[error("support touches boundary: value {value} on the boundary layer at cell {index}")]
    SupportTouchesBoundary { index: usize, value: f64 },

    #[error("level set not a ball at height {height} (shape ratio {ratio:.4} > {limit})")]
    NotABall { height: f64, ratio: f64, limit: f64 },

    #[error("center jump without plateau at height {0}")]
    CenterJumpWithoutPlateau(f64),

    #[error("level balls not nested between heights {lower} and {upper}: center distance {distance} exceeds radius drop {drop}")]
    NotNested {
        lower: f64,
        upper: f64,
        distance: f64,
        drop: f64,
    },

    #[error("radius profile increasing at height {0}")]
    ProfileIncreasing(f64),

    #[error("not convex: slope decreases at t = {0}")]
    NotConvex(f64),

    #[error("not a Young function: {0}")]
    NotYoung(String),

    #[error("functional infinite: {0}")]
    FunctionalInfinite(&'static str),

    #[error("layer-cake mismatch: direct {direct}, layer-cake {layer_cake}")]
    LayerCakeMismatch { direct: f64, layer_cake: f64 },

    #[error("jump at height {height} cannot be separated from absolutely continuous mass (jump_tol {jump_tol}, interval mass {mass})")]
    UnresolvedJump {
        height: f64,
        jump_tol: f64,
        mass: f64,
    },

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("not a Sobolev function: {0}")]
    NotSobolev(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
