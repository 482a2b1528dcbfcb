//! Command drivers shared by the binary and the test suites.

use std::fs;
use std::path::{Path, PathBuf};

use chiral_scatter::analysis::{phase_map, spectrum_scan, AnalysisError, ScatterModel};
use chiral_scatter::closed_form::reduced_giant_model;
use chiral_scatter::model::GiantAtomParams;

use crate::config::{ConfigError, RunConfig};
use crate::figures;
use crate::output::{write_effective_csv, write_map_csv, write_spectrum_csv};
use crate::verify::{run_verification, ALL_MODELS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MASKED_CELLS: u8 = 3;

/// Errors that terminate a command with a usage/configuration exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Options resolved from the command line.
#[derive(Debug, Clone, Default)]
pub struct GlobalOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub seed: Option<u64>,
}

impl GlobalOptions {
    fn load_config(&self) -> Result<RunConfig, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Usage("--config <path> is required for this command".into()))?;
        Ok(RunConfig::load(path)?)
    }

    fn out_dir(&self, config: Option<&RunConfig>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| config.and_then(|c| c.output.dir.clone()))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_manifest(dir: &Path, name: &str, config: &RunConfig) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, config.to_toml_string())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn masked_exit(masked: usize, file: &Path) -> u8 {
    if masked > 0 {
        eprintln!(
            "warning: {masked} singular cell(s) masked as nan in {}",
            file.display()
        );
        EXIT_MASKED_CELLS
    } else {
        EXIT_OK
    }
}

/// `spectrum`: detuning scan of all channels, written as CSV plus a manifest
/// echoing the configuration.
pub fn cmd_spectrum(opts: &GlobalOptions) -> Result<u8, CliError> {
    let config = opts.load_config()?;
    let model = config.model.to_model()?;
    let scan = config.scan()?;
    let range = scan.delta_range()?;
    let points = scan.spectrum_points()?;
    let grid = spectrum_scan(&model, range, points, opts.jobs)?;
    let dir = opts.out_dir(Some(&config));
    ensure_dir(&dir)?;
    let csv = dir.join("spectrum.csv");
    let masked = write_spectrum_csv(&csv, &grid)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", csv.display())))?;
    write_manifest(&dir, "spectrum_manifest.toml", &config)?;
    println!("wrote {}", csv.display());
    Ok(masked_exit(masked, &csv))
}

/// `map`: phase–detuning lattice in long format, phi-major rows.
pub fn cmd_map(opts: &GlobalOptions) -> Result<u8, CliError> {
    let config = opts.load_config()?;
    let model = config.model.to_model()?;
    let scan = config.scan()?;
    let range = scan.delta_range()?;
    let (mode, phi_range, phi_points) = scan.phase_axis()?;
    if scan.delta_points == 0 {
        return Err(CliError::Config("scan.delta_points must be at least 1".into()));
    }
    let grid = phase_map(
        &model,
        range,
        phi_range,
        mode,
        scan.delta_points,
        phi_points,
        opts.jobs,
    )?;
    let dir = opts.out_dir(Some(&config));
    ensure_dir(&dir)?;
    let csv = dir.join("map.csv");
    let masked = write_map_csv(&csv, &grid, config.output.map_channels)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", csv.display())))?;
    write_manifest(&dir, "map_manifest.toml", &config)?;
    println!("wrote {}", csv.display());
    Ok(masked_exit(masked, &csv))
}

/// `effective`: effective detuning and decay of the two-point model over
/// the configured detuning axis.
pub fn cmd_effective(opts: &GlobalOptions) -> Result<u8, CliError> {
    let config = opts.load_config()?;
    let model = config.model.to_model()?;
    let scan = config.scan()?;
    let (lo, hi) = scan.delta_range()?;
    let points = scan.spectrum_points()?;
    let params: GiantAtomParams = match &model {
        ScatterModel::GiantLambda(p) => *p,
        ScatterModel::DualVelocity(p) => {
            reduced_giant_model(p).map_err(|e| CliError::Config(e.to_string()))?
        }
        _ => {
            return Err(CliError::Config(
                "effective parameters require a giant_lambda or dual_velocity model".into(),
            ))
        }
    };
    let step = (hi - lo) / (points - 1) as f64;
    let axis: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
    let dir = opts.out_dir(Some(&config));
    ensure_dir(&dir)?;
    let csv = dir.join("effective.csv");
    write_effective_csv(&csv, &params, &axis)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", csv.display())))?;
    write_manifest(&dir, "effective_manifest.toml", &config)?;
    println!("wrote {}", csv.display());
    Ok(EXIT_OK)
}

/// `verify`: randomized cross-validation of closed forms against the
/// boundary-matching solver; prints the report and returns 0 only if every
/// check passes.
pub fn cmd_verify(opts: &GlobalOptions) -> Result<u8, CliError> {
    let config = match &opts.config {
        Some(path) => Some(RunConfig::load(path)?),
        None => None,
    };
    let settings = config
        .as_ref()
        .and_then(|c| c.verify.clone())
        .unwrap_or_default();
    if settings.sample_count == 0 {
        return Err(CliError::Usage("verify.sample_count must be at least 1".into()));
    }
    let seed = opts.seed.unwrap_or(settings.seed);
    let models = match &config {
        Some(c) => vec![c.model.kind()],
        None => ALL_MODELS.to_vec(),
    };
    let (report, passed) = run_verification(&models, settings.sample_count, seed);
    print!("{report}");
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// `figure <name>`: runs a preset scan and writes data, plot script, and
/// manifest.
pub fn cmd_figure(opts: &GlobalOptions, name: &str) -> Result<u8, CliError> {
    let dir = opts.out_dir(None);
    ensure_dir(&dir)?;
    let result = figures::run_figure(name, &dir, opts.jobs)?;
    for file in &result.files {
        println!("wrote {}", file.display());
    }
    if result.masked_cells > 0 {
        eprintln!("warning: {} singular cell(s) masked as nan", result.masked_cells);
        return Ok(EXIT_MASKED_CELLS);
    }
    Ok(EXIT_OK)
}
