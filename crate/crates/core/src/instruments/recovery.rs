use serde::{Deserialize, Serialize};

use super::config::InstrumentConfig;
use super::dfg::simulate_dfg;
use super::fringe::{fringe_analysis, peak_slices, FringeAnalysis};
use super::spdc::{simulate_spdc, spdc_resolution};
use crate::error::Result;
use crate::schmidt::{
    analyze_record, k_min, AmplitudeMatrix, MeasurementRecord, PipelineStep, COVERAGE_THRESHOLD,
};
use crate::spectral::{assemble_jsa, Axis, JointAmplitude, PhaseMode, SourceModel, SpectralGrid};

/// `K_min` after one stage of the conditioning pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub label: String,
    pub k_min: f64,
    pub coverage: f64,
    pub shape: (usize, usize),
    pub pitch_nm: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeSummary {
    pub along_signal: FringeAnalysis,
    pub along_idler: FringeAnalysis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub k_theory: f64,
    pub k_min_theory: f64,
    /// Share of the emission inside the window, from an enlarged grid.
    pub window_coverage: f64,
    pub dfg_stages: Vec<StageResult>,
    pub spdc_k_min: f64,
    pub spdc_coincidences: u64,
    pub spdc_resolution_nm: f64,
    pub spdc_pitch_nm: f64,
    /// Facet free spectral ranges `λ²/(2nL)` at the TE/TM peaks, nm.
    pub fsr_nm: (f64, f64),
    pub fringes_theory: FringeSummary,
    pub fringes_dfg: FringeSummary,
    pub fringes_spdc: FringeSummary,
    pub max_count_rate: Option<f64>,
    pub warnings: Vec<String>,
}

/// Free spectral range of the facet cavity in wavelength, `λ²/(2·n·L)`.
pub fn facet_fsr_nm(model: &SourceModel) -> (f64, f64) {
    let l = model.waveguide_length_mm * 1e6; // nm
    (
        model.facet_peak_te_nm.powi(2) / (2.0 * model.n_te * l),
        model.facet_peak_tm_nm.powi(2) / (2.0 * model.n_tm * l),
    )
}

/// Fraction of `|φ|²` that falls inside `grid`, estimated on a window three
/// times wider per axis (same pitch, every second sample).
pub fn window_coverage(model: &SourceModel, grid: &SpectralGrid) -> Result<f64> {
    let widen = |a: &Axis| {
        let pitch = 2.0 * a.pitch_nm;
        let pad = (a.span_nm() / pitch).ceil() as usize;
        Axis::new(a.start_nm - pad as f64 * pitch, pitch, (a.count - 1) / 2 + 1 + 2 * pad)
    };
    let big = SpectralGrid {
        signal: widen(&grid.signal),
        idler: widen(&grid.idler),
        linearized: false,
    };
    let amp = assemble_jsa(model, &big, PhaseMode::ModulusOnly)?;
    let inside = |a: &Axis, lam: f64| lam >= a.start_nm - 1e-9 && lam <= a.end_nm() + 1e-9;
    let jsd = amp.jsd();
    let (mut total, mut within) = (0.0, 0.0);
    for i in 0..jsd.nrows() {
        for j in 0..jsd.ncols() {
            let v = jsd[(i, j)];
            total += v;
            if inside(&grid.signal, big.signal.wavelength(i)) && inside(&grid.idler, big.idler.wavelength(j)) {
                within += v;
            }
        }
    }
    Ok(within / total)
}

fn fringes(intensity: &nalgebra::DMatrix<f64>, grid: &SpectralGrid, fsr: (f64, f64)) -> Result<FringeSummary> {
    let (along_signal, along_idler) = peak_slices(intensity);
    Ok(FringeSummary {
        along_signal: fringe_analysis(&along_signal, grid.signal.pitch_nm, fsr.0, 0.1, 0.3)?,
        along_idler: fringe_analysis(&along_idler, grid.idler.pitch_nm, fsr.1, 0.1, 0.3)?,
    })
}

/// Stage-by-stage `K_min` of a seed-sweep record under `steps`.
pub fn dfg_stages(rec: &MeasurementRecord, steps: &[PipelineStep]) -> Result<Vec<StageResult>> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    for k in 0..=steps.len() {
        let rep = analyze_record(rec, &steps[..k])?;
        let label = if k == 0 {
            "raw".to_string()
        } else {
            steps[..k]
                .iter()
                .map(|s| match s {
                    PipelineStep::Crop { frame_nm } => format!("crop {:.0} pm", frame_nm * 1e3),
                    PipelineStep::Bin { bx, by } => format!("bin {bx}x{by}"),
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        out.push(StageResult {
            label,
            k_min: rep.k_min,
            coverage: rep.coverage,
            shape: rep.grid.shape(),
            pitch_nm: (rep.grid.signal.pitch_nm, rep.grid.idler.pitch_nm),
        });
    }
    Ok(out)
}

/// Theory, seed-sweep and coincidence routes side by side.
pub fn end_to_end_recovery(
    model: &SourceModel,
    grid: &SpectralGrid,
    cfg: &InstrumentConfig,
    steps: &[PipelineStep],
) -> Result<RecoveryReport> {
    let amp: JointAmplitude = assemble_jsa(model, grid, PhaseMode::FullPhase)?;
    let k_theory = amp.schmidt()?.k;
    let k_min_theory = amp.k_min()?;
    let coverage = window_coverage(model, grid)?;
    let fsr = facet_fsr_nm(model);
    let mut warnings = Vec::new();
    if coverage < COVERAGE_THRESHOLD {
        warnings.push(format!(
            "window holds {:.3} of the emission (< {COVERAGE_THRESHOLD}); K_min bounds refer to the windowed state",
            coverage
        ));
    }

    let record = simulate_dfg(&amp, cfg)?;
    let dfg_stages = dfg_stages(&record, steps)?;
    let normalized = record.normalized_intensity()?;

    let histogram = simulate_spdc(&amp, cfg, cfg.spdc_pulses)?;
    let counts = histogram.as_f64();
    let spdc_k_min = match AmplitudeMatrix::from_intensity(&counts, histogram.grid) {
        Ok(a) => k_min(&a)?,
        Err(_) => {
            warnings.push("coincidence histogram is empty".into());
            f64::NAN
        }
    };

    Ok(RecoveryReport {
        k_theory,
        k_min_theory,
        window_coverage: coverage,
        dfg_stages,
        spdc_k_min,
        spdc_coincidences: histogram.total(),
        spdc_resolution_nm: spdc_resolution(cfg),
        spdc_pitch_nm: cfg.spdc_pitch_nm(),
        fsr_nm: fsr,
        fringes_theory: fringes(&amp.jsd(), grid, fsr)?,
        fringes_dfg: fringes(&normalized, &record.grid, fsr)?,
        fringes_spdc: fringes(&counts, &histogram.grid, fsr)?,
        max_count_rate: cfg.max_count_rate(),
        warnings,
    })
}
