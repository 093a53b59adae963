//! On-disk formats: CSV matrices with `#` metadata headers, filter vectors,
//! 16-bit PGM heatmaps and JSON configuration/report files.

mod config;
mod matrix;
mod pgm;
mod report;

pub use config::{Format, RunConfig};
pub use matrix::{
    read_matrix, read_record, write_complex_matrix, write_count_matrix, write_filter, write_matrix, write_record,
    MatrixFile,
};
pub use pgm::write_pgm;
pub use report::{write_report, KeyValue};
pub(crate) use report::render_text;

use serde::{Deserialize, Serialize};

/// Identifies the run that produced a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_sha256: impl Into<String>, seed: u64) -> Self {
        Self {
            tool: format!("biphoton {}", env!("CARGO_PKG_VERSION")),
            config_sha256: config_sha256.into(),
            seed,
        }
    }

    pub(crate) fn header_lines(&self) -> Vec<String> {
        vec![
            format!("tool: {}", self.tool),
            format!("config_sha256: {}", self.config_sha256),
            format!("seed: {}", self.seed),
        ]
    }
}
