//! Young functions and Orlicz-space norms over a hypergroup's Haar measure.

mod norm;
mod young;

pub use norm::{
    derivative_at_zero, l1_embedding_check, luxemburg_norm, luxemburg_norm_with, orlicz_norm, EmbeddingCheck,
    EmbeddingRoute, NormResult, NORM_RTOL,
};
pub use young::{default_delta2_grid, Conjugate, Delta2, YoungFunction, YoungKind};
