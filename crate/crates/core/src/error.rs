use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The request is well formed but exceeds what the dense engine supports.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// All abscissae of a least-squares fit coincide.
    #[error("degenerate design: all {count} abscissae equal {value}")]
    DegenerateDesign { count: usize, value: f64 },

    /// The mean insertion energy coincides with the noiseless energy.
    #[error("degenerate denominator: A - E0 = {0:e}")]
    DegenerateDenominator(f64),

    #[error("bootstrap failed: {0}")]
    Bootstrap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
