//! Deterministic CSV and manifest writers.
//!
//! CSV files are RFC-4180 style: comma separated, LF line endings, mandatory
//! header row. Floats carry 17 significant digits so every value round-trips
//! to the exact binary double; masked cells are written as the literal
//! `nan`.

use std::fs;
use std::io;
use std::path::Path;

use chiral_scatter::analysis::SpectrumGrid;
use chiral_scatter::closed_form::effective_parameters;
use chiral_scatter::model::GiantAtomParams;

use crate::config::MapChannels;

/// 17 significant digits, or the `nan` literal for masked values.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub const SPECTRUM_HEADER: &str = "delta,T1,T2,T1_rev,T2_rev,I1,I2";

/// Writes a detuning scan; returns the number of masked cells.
pub fn write_spectrum_csv(path: &Path, grid: &SpectrumGrid) -> io::Result<usize> {
    let mut text = String::with_capacity(64 * (grid.n_delta() + 1));
    text.push_str(SPECTRUM_HEADER);
    text.push('\n');
    for (i, &delta) in grid.delta_axis.iter().enumerate() {
        let c = &grid.channels[i];
        text.push_str(&format_float(delta));
        for value in [c.t1, c.t2, c.t1_rev, c.t2_rev, c.i1, c.i2] {
            text.push(',');
            text.push_str(&format_float(value));
        }
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(grid.masked_cells())
}

/// Writes a phase–detuning map in long format, phi-major; returns the number
/// of masked cells.
pub fn write_map_csv(path: &Path, grid: &SpectrumGrid, channels: MapChannels) -> io::Result<usize> {
    let phi_axis = grid
        .phi_axis
        .as_deref()
        .expect("map grids carry a phase axis");
    let header = match channels {
        MapChannels::T2 => "phi,delta,T2",
        MapChannels::Full => "phi,delta,T1,T2,T1_rev,T2_rev,I1,I2",
    };
    let mut text = String::with_capacity(32 * (grid.channels.len() + 1));
    text.push_str(header);
    text.push('\n');
    for (pi, &phi) in phi_axis.iter().enumerate() {
        for (di, &delta) in grid.delta_axis.iter().enumerate() {
            let c = grid.cell(pi, di);
            text.push_str(&format_float(phi));
            text.push(',');
            text.push_str(&format_float(delta));
            match channels {
                MapChannels::T2 => {
                    text.push(',');
                    text.push_str(&format_float(c.t2));
                }
                MapChannels::Full => {
                    for value in [c.t1, c.t2, c.t1_rev, c.t2_rev, c.i1, c.i2] {
                        text.push(',');
                        text.push_str(&format_float(value));
                    }
                }
            }
            text.push('\n');
        }
    }
    fs::write(path, text)?;
    Ok(grid.masked_cells())
}

/// Writes effective detuning and decay over a detuning axis.
pub fn write_effective_csv(
    path: &Path,
    params: &GiantAtomParams,
    delta_axis: &[f64],
) -> io::Result<()> {
    let mut text = String::with_capacity(48 * (delta_axis.len() + 1));
    text.push_str("delta,delta_eff,gamma_eff\n");
    for &delta in delta_axis {
        let eff = effective_parameters(params, delta)
            .expect("finite grid detunings evaluate");
        text.push_str(&format_float(delta));
        text.push(',');
        text.push_str(&format_float(eff.delta_eff));
        text.push(',');
        text.push_str(&format_float(eff.gamma_eff));
        text.push('\n');
    }
    fs::write(path, text)
}
