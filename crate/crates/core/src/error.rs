use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown pattern id {0}")]
    UnknownPattern(u32),

    #[error("statistic is undefined for zero samples")]
    UndefinedStatistic,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("degenerate variance (beta = {0})")]
    DegenerateVariance(f64),

    #[error("pattern `{0}` has no outgoing long-range transitions")]
    IsolatedPattern(String),

    #[error("chain is not ergodic; states outside the communicating class: {0:?}")]
    Reducible(Vec<usize>),

    #[error("QR iteration did not converge on an active {size}x{size} block")]
    NoConvergence { size: usize },

    #[error("similarity undefined: both vectors are zero")]
    UndefinedSimilarity,

    #[error("question has no usable pattern in the reference document")]
    EmptyQuery,

    #[error("invalid size {got}: {what}")]
    InvalidSize { what: &'static str, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state subset must be non-empty and proper")]
    InvalidSubset,

    #[error("chapter counts differ: {source_chapters} vs {target_chapters}")]
    ChapterMismatch {
        source_chapters: usize,
        target_chapters: usize,
    },
}

impl Error {
    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Reducible(_)
                | Error::IsolatedPattern(_)
                | Error::DegenerateVariance(_)
        )
    }
}
