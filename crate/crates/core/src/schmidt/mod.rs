//! Schmidt number, its intensity-only lower bound, and the conditioning of
//! measured intensity matrices.

mod conditioning;
mod decompose;
mod record;

pub use conditioning::{
    analyze_record, bin_matrix, crop_frame, measured_coverage, measurement_to_amplitude, total_intensity,
    AmplitudeMatrix, AnalysisReport, PipelineStep, COVERAGE_THRESHOLD,
};
pub use decompose::{k_min, k_trace, schmidt_decompose, SchmidtResult};
pub use record::MeasurementRecord;
