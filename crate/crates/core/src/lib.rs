//! Discrete hypergroups, Orlicz norms over their Haar measure, and sequences
//! of weighted translation operators, with horizon-bounded probes of
//! aperiodicity and hypercyclicity conditions.
//!
//! Infinite carriers are truncated to a finite window. Anything whose exact
//! value needs points outside the window fails with
//! [`Error::WindowOverflow`] instead of being silently truncated.

pub mod dynamics;
pub mod error;
pub mod function;
pub mod hypergroup;
pub mod orlicz;
pub mod weighted;

pub use error::{Error, Result};
pub use function::SparseFunction;
pub use hypergroup::{Element, HypergroupModel, SparseMeasure};
pub use orlicz::{NormResult, YoungFunction};
pub use weighted::{EtaSequence, ProductConvention, Weight, WeightedTranslation};
