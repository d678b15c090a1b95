//! Horizon-bounded checks of aperiodicity and of the hypercyclicity
//! criteria for weighted translation sequences.
//!
//! A verdict that holds here holds for the probed instance up to the stated
//! horizon and window. It is evidence, not a proof.

mod aperiodic;
mod probes;
mod witness;

pub use aperiodic::{
    aperiodic_center_check, aperiodic_sequence_check, strongly_aperiodic_check, AperiodicityVerdict,
    CenterAperiodicity, Counterexample,
};
pub use probes::{
    probe_center_conditions, probe_hereditary, probe_series, probe_sufficiency, probe_weight_products, CriterionReport,
    CriterionRow, ProbeConfig, TheoremId, Verdict, NO_FULL_SET, SERIES_TRUNCATED,
};
pub use witness::{
    build_transitivity_witness, orbit_density_probe, periodic_point_check, OrbitResult, WitnessReport, WitnessRow,
};
