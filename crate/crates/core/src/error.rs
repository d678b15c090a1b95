use thiserror::Error;

use crate::hypergroup::Element;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The exact result needs carrier points outside the truncation window.
    #[error("window overflow at {element}: exact result leaves the window [{lo}, {hi}]; enlarge the truncation")]
    WindowOverflow { element: Element, lo: i64, hi: i64 },

    #[error("{0} is not in the center of the hypergroup")]
    NotCentral(Element),

    #[error("sequence index {0} is outside the tabulated range")]
    EtaOutOfRange(i64),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("integrand is infinite for every finite scale")]
    NonFiniteIntegrand,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
