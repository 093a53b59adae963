//! Command-line front end.
//!
//! Every subcommand prints a `key: value` report on stdout and writes its
//! artifacts into the output directory. Failures print a single
//! `error: <kind>: <message>` line on stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instruments::{
    dfg_stages, end_to_end_recovery, simulate_dfg, simulate_spdc, spdc_resolution, window_coverage, StageResult,
};
use crate::io::{
    read_record, render_text, write_complex_matrix, write_count_matrix, write_matrix, write_pgm, write_record,
    write_report, Format, Provenance, RunConfig,
};
use crate::schmidt::{analyze_record, k_min, measured_coverage, AmplitudeMatrix, PipelineStep};
use crate::spectral::{assemble_jsa, tuning_curve, tuning_table, PhaseMode};
use crate::units::deg_to_rad;

/// Exit status for runtime failures; argument errors use 2.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "biphoton", version, about = "Photon-pair spectral model, virtual instruments and Schmidt analysis")]
struct Cli {
    /// JSON run configuration; omitted sections use the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the instrument RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output formats, comma separated or repeated.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assemble the joint spectral amplitude and report its Schmidt number.
    Model,
    /// Central wavelengths against pump incidence angle.
    Tune {
        #[arg(long, default_value_t = 0.5)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.5)]
        theta_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Simulated time-of-flight coincidence histogram.
    Spdc {
        /// Pump pulses; defaults to the configured acquisition.
        #[arg(long)]
        pulses: Option<u64>,
    },
    /// Simulated seeded difference-frequency sweep.
    Dfg,
    /// Condition a measured seed-sweep record and estimate K_min.
    Analyze {
        /// Intensity matrix CSV.
        #[arg(long)]
        r: PathBuf,
        /// Filter transmittance / reference power CSV.
        #[arg(long)]
        t: PathBuf,
        /// Frame width removed from every edge, nm.
        #[arg(long)]
        crop_nm: Option<f64>,
        /// Bin factors as SIGNALxIDLER, e.g. 2x7.
        #[arg(long, value_parser = parse_bin)]
        bin: Option<(usize, usize)>,
        /// Ignore the configured pipeline.
        #[arg(long)]
        raw: bool,
    },
    /// Theory, DFG and SPDC routes end to end.
    Replicate,
}

fn parse_bin(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X', ','])
        .ok_or_else(|| format!("expected SIGNALxIDLER, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("bad bin factor '{v}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    configure_threads();
    match execute(cli) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), single_line(&e.to_string()));
            EXIT_FAILURE
        }
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn configure_threads() {
    if let Some(n) = std::env::var("BIPHOTON_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Already initialized when run twice in one process.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    prov: Provenance,
    out: PathBuf,
}

impl Ctx {
    fn report<T: Serialize>(&self, stem: &str, report: &T) -> Result<String> {
        write_report(&self.out, stem, report, &self.prov, true, self.cfg.wants(Format::Json))?;
        Ok(render_text(report, &self.prov))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn execute(cli: Cli) -> Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.instrument.rng_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if !cli.format.is_empty() {
        cfg.formats = cli.format.clone();
    }
    cfg.validate()?;
    let prov = Provenance::new(cfg.sha256(), cfg.instrument.rng_seed);
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let ctx = Ctx { cfg, prov, out };
    match cli.command {
        Command::Model => model(&ctx),
        Command::Tune { theta_min, theta_max, steps } => tune(&ctx, theta_min, theta_max, steps),
        Command::Spdc { pulses } => spdc(&ctx, pulses),
        Command::Dfg => dfg(&ctx),
        Command::Analyze { r, t, crop_nm, bin, raw } => analyze(&ctx, &r, &t, crop_nm, bin, raw),
        Command::Replicate => replicate(&ctx),
    }
}

#[derive(Serialize)]
struct ModelReport {
    k: f64,
    k_min: f64,
    schmidt_modes: usize,
    coefficients: Vec<f64>,
    window_coverage: f64,
    measured_coverage: f64,
    signal_center_nm: f64,
    idler_center_nm: f64,
    grid: crate::spectral::SpectralGrid,
}

fn model(ctx: &Ctx) -> Result<String> {
    let cfg = &ctx.cfg;
    let amp = assemble_jsa(&cfg.source, &cfg.grid, PhaseMode::FullPhase)?;
    let schmidt = amp.schmidt()?;
    let jsd = amp.jsd();
    let tuning = tuning_curve(&cfg.source, cfg.source.incidence_angle_rad)?;
    let report = ModelReport {
        k: schmidt.k,
        k_min: amp.k_min()?,
        schmidt_modes: schmidt.mode_count,
        coefficients: schmidt.coefficients.iter().take(10).copied().collect(),
        window_coverage: window_coverage(&cfg.source, &cfg.grid)?,
        measured_coverage: measured_coverage(&jsd)?,
        signal_center_nm: tuning.signal_nm,
        idler_center_nm: tuning.idler_nm,
        grid: cfg.grid,
    };
    if cfg.wants(Format::Csv) {
        write_complex_matrix(&ctx.out, "jsa", &amp.values, &cfg.grid, &ctx.prov)?;
        write_matrix(ctx.path("jsd.csv"), &jsd, &cfg.grid, "joint spectral density", &ctx.prov)?;
    }
    if cfg.wants(Format::Pgm) {
        write_pgm(ctx.path("jsd.pgm"), &jsd, &ctx.prov)?;
    }
    ctx.report("model_report", &report)
}

#[derive(Serialize)]
struct TuneReport {
    incidence_deg: Vec<f64>,
    signal_nm: Vec<f64>,
    idler_nm: Vec<f64>,
}

fn tune(ctx: &Ctx, theta_min: f64, theta_max: f64, steps: usize) -> Result<String> {
    let table = tuning_table(&ctx.cfg.source, deg_to_rad(theta_min), deg_to_rad(theta_max), steps)?;
    let report = TuneReport {
        incidence_deg: table.iter().map(|p| p.theta_rad.to_degrees()).collect(),
        signal_nm: table.iter().map(|p| p.signal_nm).collect(),
        idler_nm: table.iter().map(|p| p.idler_nm).collect(),
    };
    if ctx.cfg.wants(Format::Csv) {
        let mut text = String::new();
        for l in ctx.prov.header_lines() {
            text.push_str(&format!("# {l}\n"));
        }
        text.push_str("# columns: incidence_deg,signal_nm,idler_nm\n");
        for p in &table {
            text.push_str(&format!("{},{:.16e},{:.16e}\n", p.theta_rad.to_degrees(), p.signal_nm, p.idler_nm));
        }
        let p = ctx.path("tuning.csv");
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    ctx.report("tuning_report", &report)
}

#[derive(Serialize)]
struct SpdcReport {
    pulses: u64,
    pairs_emitted: u64,
    pairs_detected: u64,
    coincidences: u64,
    out_of_window: u64,
    resolution_nm: f64,
    pitch_nm: f64,
    k_min: Option<f64>,
    max_count_rate: Option<f64>,
}

fn spdc(ctx: &Ctx, pulses: Option<u64>) -> Result<String> {
    let cfg = &ctx.cfg;
    let amp = assemble_jsa(&cfg.source, &cfg.grid, PhaseMode::FullPhase)?;
    let hist = simulate_spdc(&amp, &cfg.instrument, pulses.unwrap_or(cfg.instrument.spdc_pulses))?;
    let counts = hist.as_f64();
    let k = match AmplitudeMatrix::from_intensity(&counts, hist.grid) {
        Ok(a) => Some(k_min(&a)?),
        Err(_) => None,
    };
    let report = SpdcReport {
        pulses: hist.pulses_simulated,
        pairs_emitted: hist.pairs_emitted,
        pairs_detected: hist.pairs_detected,
        coincidences: hist.total(),
        out_of_window: hist.out_of_window,
        resolution_nm: spdc_resolution(&cfg.instrument),
        pitch_nm: cfg.instrument.spdc_pitch_nm(),
        k_min: k,
        max_count_rate: cfg.instrument.max_count_rate(),
    };
    if cfg.wants(Format::Csv) {
        write_count_matrix(ctx.path("spdc_counts.csv"), &hist.counts, &hist.grid, "coincidence counts", &ctx.prov)?;
    }
    if cfg.wants(Format::Pgm) {
        write_pgm(ctx.path("spdc_counts.pgm"), &counts, &ctx.prov)?;
    }
    ctx.report("spdc_report", &report)
}

#[derive(Serialize)]
struct DfgReport {
    flagged_columns: Vec<usize>,
    stages: Vec<StageResult>,
}

fn dfg(ctx: &Ctx) -> Result<String> {
    let cfg = &ctx.cfg;
    let amp = assemble_jsa(&cfg.source, &cfg.grid, PhaseMode::FullPhase)?;
    let record = simulate_dfg(&amp, &cfg.instrument)?;
    let report = DfgReport {
        flagged_columns: record.flagged.clone(),
        stages: dfg_stages(&record, &cfg.pipeline)?,
    };
    if cfg.wants(Format::Csv) {
        write_record(ctx.path("dfg_R.csv"), ctx.path("dfg_T.csv"), &record, &ctx.prov)?;
    }
    if cfg.wants(Format::Pgm) {
        write_pgm(ctx.path("dfg_R.pgm"), &record.intensity, &ctx.prov)?;
    }
    ctx.report("dfg_report", &report)
}

fn analyze(ctx: &Ctx, r: &Path, t: &Path, crop_nm: Option<f64>, bin: Option<(usize, usize)>, raw: bool) -> Result<String> {
    let record = read_record(r, t)?;
    let steps: Vec<PipelineStep> = if crop_nm.is_some() || bin.is_some() {
        crop_nm
            .map(|frame_nm| PipelineStep::Crop { frame_nm })
            .into_iter()
            .chain(bin.map(|(bx, by)| PipelineStep::Bin { bx, by }))
            .collect()
    } else if raw {
        Vec::new()
    } else {
        ctx.cfg.pipeline.clone()
    };
    let report = analyze_record(&record, &steps)?;
    ctx.report("analysis_report", &report)
}

fn replicate(ctx: &Ctx) -> Result<String> {
    let cfg = &ctx.cfg;
    let report = end_to_end_recovery(&cfg.source, &cfg.grid, &cfg.instrument, &cfg.pipeline)?;
    ctx.report("replicate_report", &report)
}
