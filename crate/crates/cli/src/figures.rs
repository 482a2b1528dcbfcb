//! Preset scans: each named figure runs a fixed parameter set, writes its
//! data as CSV, a gnuplot-compatible plot script, and a manifest embedding
//! every parameter for provenance.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use chiral_scatter::analysis::{phase_map, spectrum_scan, PhaseMode, ScatterModel};
use chiral_scatter::model::{DualVelocityParams, GiantAtomParams, SmallAtomParams};

use crate::config::{
    DualVelocityConfig, GiantAtomConfig, MapChannels, ModelKind, PhaseModeConfig, ScanConfig,
    SmallAtomConfig,
};
use crate::output::{format_float, write_map_csv, write_spectrum_csv};
use crate::run::CliError;

pub const FIGURE_NAMES: [&str; 16] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b",
    "fig4c", "fig4d", "fig5a", "fig5b", "fig6a", "fig6b",
];

pub struct FigureResult {
    pub files: Vec<PathBuf>,
    pub masked_cells: usize,
}

#[derive(Serialize)]
struct SweepAxis {
    min: f64,
    max: f64,
    points: usize,
}

#[derive(Serialize)]
struct RunEntry {
    file: String,
    command: &'static str,
    model: ModelKind,
    params: toml::Value,
    scan: ScanConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_ratio_axis: Option<SweepAxis>,
}

#[derive(Serialize)]
struct FigureManifest {
    figure: String,
    description: &'static str,
    runs: Vec<RunEntry>,
}

/// Swept static-phase values for profile presets, with filename labels.
const PHI_PROFILES_SINGLE: [(f64, &str); 4] =
    [(0.0, "0"), (0.5, "0.5pi"), (0.9, "0.9pi"), (1.0, "pi")];
const PHI_PROFILES_ANTISYM_MARKOV: [(f64, &str); 4] =
    [(0.0, "0"), (0.5, "0.5pi"), (0.9, "0.9pi"), (0.99, "0.99pi")];
const PHI_PROFILES_SINGLE_RETARDED: [(f64, &str); 3] =
    [(0.0, "0"), (0.5, "0.5pi"), (1.0, "pi")];
const PHI_PROFILES_ANTISYM_RETARDED: [(f64, &str); 3] =
    [(0.0, "0"), (0.5, "0.5pi"), (0.9, "0.9pi")];

const MARKOVIAN_DELAY: f64 = 0.03;
const RETARDED_DELAY: f64 = 3.0;

fn markovian_scan() -> ScanConfig {
    ScanConfig {
        delta_min: -6.0,
        delta_max: 6.0,
        delta_points: 2001,
        phase_mode: None,
        phi_min: None,
        phi_max: None,
        phi_points: None,
    }
}

fn retarded_scan() -> ScanConfig {
    ScanConfig { delta_min: -10.0, delta_max: 10.0, ..markovian_scan() }
}

fn with_phase_axis(scan: ScanConfig, mode: PhaseModeConfig) -> ScanConfig {
    ScanConfig {
        phase_mode: Some(mode),
        phi_min: Some(0.0),
        phi_max: Some(2.0 * PI),
        phi_points: Some(201),
        ..scan
    }
}

fn ideal_chiral_config(mode: PhaseMode, phi: f64, tau: f64) -> GiantAtomConfig {
    let (phi_1_0, phi_2_0) = mode.static_phases(phi);
    GiantAtomConfig {
        gamma_1r: 1.0,
        gamma_2r: 1.0,
        gamma_1l: 0.0,
        gamma_2l: 0.0,
        phi_1_0,
        phi_2_0,
        tau,
        tau_2: None,
    }
}

fn giant_model(config: &GiantAtomConfig) -> ScatterModel {
    ScatterModel::GiantLambda(
        GiantAtomParams::new(
            config.gamma_1r,
            config.gamma_2r,
            config.gamma_1l,
            config.gamma_2l,
            config.phi_1_0,
            config.phi_2_0,
            config.tau,
        )
        .expect("preset parameters are valid"),
    )
}

fn params_value<T: Serialize>(params: &T) -> toml::Value {
    toml::Value::try_from(params).expect("parameter blocks serialize")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("cannot write {}: {e}", path.display()))
}

struct FigureWriter {
    out_dir: PathBuf,
    files: Vec<PathBuf>,
    masked_cells: usize,
    runs: Vec<RunEntry>,
    jobs: usize,
}

impl FigureWriter {
    fn new(out_dir: &Path, jobs: usize) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
            masked_cells: 0,
            runs: Vec::new(),
            jobs,
        }
    }

    fn spectrum(
        &mut self,
        file: &str,
        model: &ScatterModel,
        model_kind: ModelKind,
        params: toml::Value,
        scan: ScanConfig,
    ) -> Result<(), CliError> {
        let grid = spectrum_scan(
            model,
            (scan.delta_min, scan.delta_max),
            scan.delta_points,
            self.jobs,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let path = self.out_dir.join(file);
        self.masked_cells += write_spectrum_csv(&path, &grid).map_err(io_err(&path))?;
        self.files.push(path);
        self.runs.push(RunEntry {
            file: file.to_string(),
            command: "spectrum",
            model: model_kind,
            params,
            scan,
            rate_ratio_axis: None,
        });
        Ok(())
    }

    fn map(
        &mut self,
        file: &str,
        config: &GiantAtomConfig,
        scan: ScanConfig,
    ) -> Result<(), CliError> {
        let (mode, phi_range, phi_points) =
            scan.phase_axis().map_err(|e| CliError::Config(e.to_string()))?;
        let grid = phase_map(
            &giant_model(config),
            (scan.delta_min, scan.delta_max),
            phi_range,
            mode,
            scan.delta_points,
            phi_points,
            self.jobs,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let path = self.out_dir.join(file);
        self.masked_cells += write_map_csv(&path, &grid, MapChannels::T2).map_err(io_err(&path))?;
        self.files.push(path);
        self.runs.push(RunEntry {
            file: file.to_string(),
            command: "map",
            model: ModelKind::GiantLambda,
            params: params_value(config),
            scan,
            rate_ratio_axis: None,
        });
        Ok(())
    }

    /// Small-atom contrast over a (rate ratio, detuning) lattice; the left
    /// rate sweeps as `gamma_l = ratio` with `gamma_r = 1`.
    fn contrast_ratio_map(
        &mut self,
        file: &str,
        contrast_column: &str,
        elastic: bool,
        scan: ScanConfig,
        ratio_axis: SweepAxis,
    ) -> Result<(), CliError> {
        let mut text = String::new();
        let _ = writeln!(text, "gamma_ratio,delta,{contrast_column}");
        for i in 0..ratio_axis.points {
            let ratio = if ratio_axis.points == 1 {
                ratio_axis.min
            } else {
                ratio_axis.min
                    + (ratio_axis.max - ratio_axis.min) * i as f64
                        / (ratio_axis.points - 1) as f64
            };
            let model =
                ScatterModel::SmallLambda(SmallAtomParams::new(1.0, ratio).expect("valid rates"));
            let grid = spectrum_scan(
                &model,
                (scan.delta_min, scan.delta_max),
                scan.delta_points,
                self.jobs,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            for (j, &delta) in grid.delta_axis.iter().enumerate() {
                let c = &grid.channels[j];
                let value = if elastic { c.i1 } else { c.i2 };
                let _ = writeln!(
                    text,
                    "{},{},{}",
                    format_float(ratio),
                    format_float(delta),
                    format_float(value)
                );
            }
        }
        let path = self.out_dir.join(file);
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(path);
        self.runs.push(RunEntry {
            file: file.to_string(),
            command: "contrast_ratio_map",
            model: ModelKind::SmallLambda,
            params: params_value(&SmallAtomConfig { gamma_r: 1.0, gamma_l: 0.0 }),
            scan,
            rate_ratio_axis: Some(ratio_axis),
        });
        Ok(())
    }

    fn plot_script(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.out_dir.join(format!("{name}.gp"));
        let text = format!(
            "# {name}: generated plot script; run with `gnuplot -p {name}.gp`\nset datafile separator ','\n{body}"
        );
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(path);
        Ok(())
    }

    fn finish(mut self, name: &str, description: &'static str) -> Result<FigureResult, CliError> {
        let manifest = FigureManifest {
            figure: name.to_string(),
            description,
            runs: std::mem::take(&mut self.runs),
        };
        let path = self.out_dir.join(format!("{name}_manifest.toml"));
        let text = toml::to_string(&manifest)
            .map_err(|e| CliError::Io(format!("manifest serialization: {e}")))?;
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(path);
        Ok(FigureResult { files: self.files, masked_cells: self.masked_cells })
    }
}

fn lines_plot(files: &[(String, String)], ylabel: &str, column: usize) -> String {
    let mut body = format!("set xlabel 'delta'\nset ylabel '{ylabel}'\nplot ");
    for (i, (file, label)) in files.iter().enumerate() {
        if i > 0 {
            body.push_str(", ");
        }
        let _ = write!(body, "'{file}' using 1:{column} with lines title '{label}'");
    }
    body.push('\n');
    body
}

fn image_plot(file: &str, value_label: &str, y_label: &str) -> String {
    format!(
        "set xlabel 'delta'\nset ylabel '{y_label}'\nset cblabel '{value_label}'\nset view map\nplot '{file}' using 2:1:3 with image notitle\n"
    )
}

/// One conversion-rate profile per swept phase value.
fn profile_figure(
    writer: &mut FigureWriter,
    name: &str,
    mode: PhaseMode,
    phi_values: &[(f64, &str)],
    tau: f64,
    scan: &ScanConfig,
) -> Result<(), CliError> {
    let mut plotted = Vec::new();
    for &(phi_over_pi, label) in phi_values {
        let config = ideal_chiral_config(mode, phi_over_pi * PI, tau);
        let file = format!("{name}_phi_{label}.csv");
        writer.spectrum(
            &file,
            &giant_model(&config),
            ModelKind::GiantLambda,
            params_value(&config),
            scan.clone(),
        )?;
        plotted.push((file, format!("phi={label}")));
    }
    writer.plot_script(name, &lines_plot(&plotted, "T2", 3))
}

fn delay_contrast_figure(
    writer: &mut FigureWriter,
    name: &str,
    mode: PhaseMode,
    phi: f64,
    scan: &ScanConfig,
) -> Result<(), CliError> {
    let mut plotted = Vec::new();
    for (tau, label) in [(MARKOVIAN_DELAY, "0.03"), (RETARDED_DELAY, "3")] {
        let config = ideal_chiral_config(mode, phi, tau);
        let file = format!("{name}_tau_{label}.csv");
        writer.spectrum(
            &file,
            &giant_model(&config),
            ModelKind::GiantLambda,
            params_value(&config),
            scan.clone(),
        )?;
        plotted.push((file, format!("tau={label}")));
    }
    writer.plot_script(name, &lines_plot(&plotted, "I1", 6))
}

fn dual_velocity_figure(
    writer: &mut FigureWriter,
    name: &str,
    phi: f64,
    scan: &ScanConfig,
) -> Result<(), CliError> {
    let mut plotted = Vec::new();
    for (ratio, label) in [(1.0, "3"), (1.1, "3.3"), (1.2, "3.6")] {
        let tau_2 = RETARDED_DELAY * ratio;
        let params = DualVelocityParams::from_reduced_model(
            [1.0, 1.0, 0.0, 0.0],
            phi,
            -phi,
            RETARDED_DELAY,
            tau_2,
        )
        .expect("preset parameters are valid");
        let config = DualVelocityConfig {
            v1: params.v1,
            v2: params.v2,
            d: params.d,
            omega_1: params.omega_1,
            omega_2: params.omega_2,
            omega_e: params.omega_e,
            omega_f: params.omega_f,
            g_1r: params.g_1r,
            g_2r: params.g_2r,
            g_1l: params.g_1l,
            g_2l: params.g_2l,
            xi_1r: params.xi_1r,
            xi_2r: params.xi_2r,
            xi_1l: params.xi_1l,
            xi_2l: params.xi_2l,
        };
        let file = format!("{name}_tau2_{label}.csv");
        writer.spectrum(
            &file,
            &ScatterModel::DualVelocity(params),
            ModelKind::DualVelocity,
            params_value(&config),
            scan.clone(),
        )?;
        plotted.push((file, format!("tau2={label}")));
    }
    writer.plot_script(name, &lines_plot(&plotted, "T2", 3))
}

/// Runs one named preset; writes data, plot script, and manifest into
/// `out_dir`.
pub fn run_figure(name: &str, out_dir: &Path, jobs: usize) -> Result<FigureResult, CliError> {
    let mut writer = FigureWriter::new(out_dir, jobs);
    let ratio_axis = || SweepAxis { min: 0.0, max: 3.0, points: 201 };
    match name {
        "fig2a" => {
            writer.contrast_ratio_map("fig2a.csv", "I1", true, markovian_scan(), ratio_axis())?;
            writer.plot_script("fig2a", &image_plot("fig2a.csv", "I1", "gamma_L/gamma_R"))?;
            writer.finish(
                name,
                "elastic transmission contrast of the single-point emitter over detuning and rate ratio",
            )
        }
        "fig2b" => {
            writer.contrast_ratio_map("fig2b.csv", "I2", false, markovian_scan(), ratio_axis())?;
            writer.plot_script("fig2b", &image_plot("fig2b.csv", "I2", "gamma_L/gamma_R"))?;
            writer.finish(
                name,
                "conversion contrast of the single-point emitter over detuning and rate ratio",
            )
        }
        "fig2c" | "fig2d" => {
            let mut plotted = Vec::new();
            for (ratio, label) in [(0.0, "0"), (2.0, "2")] {
                let config = SmallAtomConfig { gamma_r: 1.0, gamma_l: ratio };
                let model = ScatterModel::SmallLambda(
                    SmallAtomParams::new(config.gamma_r, config.gamma_l).expect("valid rates"),
                );
                let file = format!("{name}_ratio_{label}.csv");
                writer.spectrum(
                    &file,
                    &model,
                    ModelKind::SmallLambda,
                    params_value(&config),
                    markovian_scan(),
                )?;
                plotted.push((file, format!("gamma_L/gamma_R={label}")));
            }
            let (column, rev_column, label) =
                if name == "fig2c" { (2, 4, "T1") } else { (3, 5, "T2") };
            let mut body = format!("set xlabel 'delta'\nset ylabel '{label}'\nplot ");
            for (i, (file, title)) in plotted.iter().enumerate() {
                if i > 0 {
                    body.push_str(", ");
                }
                let _ = write!(
                    body,
                    "'{file}' using 1:{column} with lines title '{title}', '{file}' using 1:{rev_column} with lines dashtype 2 title '{title} (reverse)'"
                );
            }
            body.push('\n');
            writer.plot_script(name, &body)?;
            writer.finish(
                name,
                "transmission profiles of the single-point emitter for both incidence directions",
            )
        }
        "fig3a" => {
            let config = ideal_chiral_config(PhaseMode::Phi1Only, 0.0, MARKOVIAN_DELAY);
            let scan = with_phase_axis(markovian_scan(), PhaseModeConfig::Phi1Only);
            writer.map("fig3a.csv", &config, scan)?;
            writer.plot_script("fig3a", &image_plot("fig3a.csv", "T2", "phi"))?;
            writer.finish(name, "conversion map over detuning and a single swept static phase, short delay")
        }
        "fig3b" => {
            let config = ideal_chiral_config(PhaseMode::Antisymmetric, 0.0, MARKOVIAN_DELAY);
            let scan = with_phase_axis(markovian_scan(), PhaseModeConfig::Antisymmetric);
            writer.map("fig3b.csv", &config, scan)?;
            writer.plot_script("fig3b", &image_plot("fig3b.csv", "T2", "phi"))?;
            writer.finish(name, "conversion map over detuning and antisymmetric static phases, short delay")
        }
        "fig3c" => {
            profile_figure(
                &mut writer,
                name,
                PhaseMode::Phi1Only,
                &PHI_PROFILES_SINGLE,
                MARKOVIAN_DELAY,
                &markovian_scan(),
            )?;
            writer.finish(name, "conversion profiles for a single swept static phase, short delay")
        }
        "fig3d" => {
            profile_figure(
                &mut writer,
                name,
                PhaseMode::Antisymmetric,
                &PHI_PROFILES_ANTISYM_MARKOV,
                MARKOVIAN_DELAY,
                &markovian_scan(),
            )?;
            writer.finish(name, "narrowing conversion windows for antisymmetric static phases, short delay")
        }
        "fig4a" => {
            let config = ideal_chiral_config(PhaseMode::Phi1Only, 0.0, RETARDED_DELAY);
            let scan = with_phase_axis(retarded_scan(), PhaseModeConfig::Phi1Only);
            writer.map("fig4a.csv", &config, scan)?;
            writer.plot_script("fig4a", &image_plot("fig4a.csv", "T2", "phi"))?;
            writer.finish(name, "conversion map over detuning and a single swept static phase, long delay")
        }
        "fig4b" => {
            let config = ideal_chiral_config(PhaseMode::Antisymmetric, 0.0, RETARDED_DELAY);
            let scan = with_phase_axis(retarded_scan(), PhaseModeConfig::Antisymmetric);
            writer.map("fig4b.csv", &config, scan)?;
            writer.plot_script("fig4b", &image_plot("fig4b.csv", "T2", "phi"))?;
            writer.finish(name, "conversion map over detuning and antisymmetric static phases, long delay")
        }
        "fig4c" => {
            profile_figure(
                &mut writer,
                name,
                PhaseMode::Phi1Only,
                &PHI_PROFILES_SINGLE_RETARDED,
                RETARDED_DELAY,
                &retarded_scan(),
            )?;
            writer.finish(name, "conversion profiles for a single swept static phase, long delay")
        }
        "fig4d" => {
            profile_figure(
                &mut writer,
                name,
                PhaseMode::Antisymmetric,
                &PHI_PROFILES_ANTISYM_RETARDED,
                RETARDED_DELAY,
                &retarded_scan(),
            )?;
            writer.finish(name, "conversion profiles for antisymmetric static phases, long delay")
        }
        "fig5a" => {
            delay_contrast_figure(&mut writer, name, PhaseMode::Phi1Only, PI, &retarded_scan())?;
            writer.finish(
                name,
                "elastic contrast at the decoupling phase: reciprocal for short delay, nonreciprocal for long delay",
            )
        }
        "fig5b" => {
            delay_contrast_figure(
                &mut writer,
                name,
                PhaseMode::Antisymmetric,
                0.9 * PI,
                &retarded_scan(),
            )?;
            writer.finish(
                name,
                "elastic contrast for antisymmetric phases near the closing window",
            )
        }
        "fig6a" => {
            dual_velocity_figure(&mut writer, name, 0.0, &retarded_scan())?;
            writer.finish(name, "conversion profiles with distinct channel delays, zero static phase")
        }
        "fig6b" => {
            dual_velocity_figure(&mut writer, name, 0.9 * PI, &retarded_scan())?;
            writer.finish(name, "conversion profiles with distinct channel delays, antisymmetric static phases")
        }
        other => Err(CliError::Usage(format!(
            "unknown figure '{other}'; known figures: {}",
            FIGURE_NAMES.join(", ")
        ))),
    }
}
