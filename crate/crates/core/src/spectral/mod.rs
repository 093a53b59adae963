//! Theoretical joint spectral amplitude of the counterpropagating source.

mod factors;
mod grid;
mod jsa;
mod source;
mod tuning;

pub use factors::{effective_mirror_amplitude, finesse_coefficient};
pub use grid::{Axis, SpectralGrid};
pub use jsa::{assemble_jsa, sum_row_major as jsa_sum, JointAmplitude, PhaseMode};
pub use source::{Polarization, SourceModel};
pub use tuning::{tuning_curve, tuning_table, TuningPoint};
