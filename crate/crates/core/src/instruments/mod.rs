//! Simulated characterization experiments.
//!
//! [`simulate_spdc`] models the fiber-spectrometer coincidence measurement,
//! [`simulate_dfg`] the seeded difference-frequency sweep recorded on an
//! optical spectrum analyzer, and [`end_to_end_recovery`] runs both through
//! the analysis chain.

mod config;
mod dfg;
mod fringe;
mod recovery;
mod spdc;

pub use config::InstrumentConfig;
pub use dfg::simulate_dfg;
pub use fringe::{fringe_analysis, peak_slices, FringeAnalysis};
pub use recovery::{dfg_stages, end_to_end_recovery, facet_fsr_nm, window_coverage, FringeSummary, RecoveryReport, StageResult};
pub use spdc::{simulate_spdc, spdc_resolution, CoincidenceHistogram};
