use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instruments::InstrumentConfig;
use crate::schmidt::PipelineStep;
use crate::spectral::{SourceModel, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Pgm,
    Json,
}

/// Everything a run depends on. Missing sections fall back to the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceModel,
    pub grid: SpectralGrid,
    pub instrument: InstrumentConfig,
    pub pipeline: Vec<PipelineStep>,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: SourceModel::default(),
            grid: SpectralGrid::dfg_window(),
            instrument: InstrumentConfig::default(),
            pipeline: vec![PipelineStep::Crop { frame_nm: 0.14 }, PipelineStep::Bin { bx: 2, by: 7 }],
            output_dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.grid.validate()?;
        self.instrument.validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON of everything that affects results
    /// (output location and formats excluded), hex encoded.
    pub fn sha256(&self) -> String {
        let physics = (&self.source, &self.grid, &self.instrument, &self.pipeline);
        let compact = serde_json::to_string(&physics).expect("config serializes");
        Sha256::digest(compact.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"instrument": {"rng_seed": 5}}"#).unwrap();
        assert_eq!(cfg.instrument.rng_seed, 5);
        assert_eq!(cfg.source, SourceModel::default());
        assert_eq!(cfg.grid, SpectralGrid::dfg_window());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sauce": {}}"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.sha256(), b.sha256());
        b.instrument.rng_seed += 1;
        assert_ne!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
        let c = RunConfig {
            output_dir: PathBuf::from("elsewhere"),
            formats: vec![Format::Pgm],
            ..a.clone()
        };
        assert_eq!(a.sha256(), c.sha256());
    }

    #[test]
    fn json_round_trip() {
        let a = RunConfig::default();
        let b: RunConfig = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(a, b);
    }
}
