//! Spectra, phase maps, transmission contrasts, window widths, and roots of
//! the full-conversion condition.
//!
//! Grid evaluation is data parallel over cells; every cell is an independent
//! pure-function evaluation, so results are bit-identical for any worker
//! count.

use rayon::prelude::*;
use thiserror::Error;

use crate::closed_form::{
    giant_lambda_coefficients, reduced_giant_model, small_lambda_coefficients,
    two_level_coefficients, unit_conversion_condition, ClosedFormError,
};
use crate::model::{
    DualVelocityParams, GiantAtomParams, ScatteringCoefficients, SmallAtomParams, TwoLevelParams,
};

/// Grid cells with a conversion rate below this value carry no usable peak.
const PEAK_FLOOR: f64 = 1e-12;

/// Grid resolution used to bracket roots of the full-conversion residual.
const ROOT_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{0} is not supported for this model")]
    UnsupportedModel(&'static str),
    #[error("no conversion peak found near the requested detuning")]
    NoPeak,
    #[error("half-maximum crossing not found within the search range")]
    CrossingNotFound,
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}

/// Static-phase convention for phase sweeps: either only the elastic phase
/// is swept (`φ₁,₀ = φ`, `φ₂,₀ = 0`) or the two are swept antisymmetrically
/// (`φ₁,₀ = −φ₂,₀ = φ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Phi1Only,
    Antisymmetric,
}

impl PhaseMode {
    pub fn static_phases(&self, phi: f64) -> (f64, f64) {
        match self {
            PhaseMode::Phi1Only => (phi, 0.0),
            PhaseMode::Antisymmetric => (phi, -phi),
        }
    }
}

/// Any of the supported emitter configurations, for uniform grid evaluation.
///
/// The two-level model has no conversion channel; its grids carry `T₂ = 0`.
/// The two-velocity model is evaluated through its equal-velocity reduction,
/// with the grid detuning axis understood as `Δ′`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScatterModel {
    SmallLambda(SmallAtomParams),
    TwoLevel(TwoLevelParams),
    GiantLambda(GiantAtomParams),
    DualVelocity(DualVelocityParams),
}

impl ScatterModel {
    /// Transmission amplitudes at one detuning.
    pub fn coefficients(&self, delta: f64) -> Result<ScatteringCoefficients, ClosedFormError> {
        self.compile()?.coefficients(delta)
    }

    /// Retardation index of the underlying two-point model, if any.
    pub fn markovianity_index(&self) -> Option<f64> {
        match self {
            ScatterModel::SmallLambda(_) | ScatterModel::TwoLevel(_) => None,
            ScatterModel::GiantLambda(p) => Some(p.markovianity_index()),
            ScatterModel::DualVelocity(p) => {
                reduced_giant_model(p).ok().map(|g| g.markovianity_index())
            }
        }
    }

    fn compile(&self) -> Result<CompiledModel, ClosedFormError> {
        Ok(match self {
            ScatterModel::SmallLambda(p) => CompiledModel::Small(*p),
            ScatterModel::TwoLevel(p) => CompiledModel::TwoLevel(*p),
            ScatterModel::GiantLambda(p) => CompiledModel::Giant(*p),
            ScatterModel::DualVelocity(p) => CompiledModel::Giant(reduced_giant_model(p)?),
        })
    }
}

/// Model with any reduction already applied, cheap to evaluate per cell.
#[derive(Clone, Copy)]
enum CompiledModel {
    Small(SmallAtomParams),
    TwoLevel(TwoLevelParams),
    Giant(GiantAtomParams),
}

impl CompiledModel {
    fn coefficients(&self, delta: f64) -> Result<ScatteringCoefficients, ClosedFormError> {
        match self {
            CompiledModel::Small(p) => small_lambda_coefficients(p, delta),
            CompiledModel::TwoLevel(p) => {
                let (t, t_rev) = two_level_coefficients(p, delta)?;
                Ok(ScatteringCoefficients::new(
                    t,
                    num_complex::Complex64::new(0.0, 0.0),
                    t_rev,
                    num_complex::Complex64::new(0.0, 0.0),
                ))
            }
            CompiledModel::Giant(p) => giant_lambda_coefficients(p, delta),
        }
    }

    fn with_static_phases(&self, mode: PhaseMode, phi: f64) -> Self {
        match self {
            CompiledModel::Giant(p) => {
                let (phi_1_0, phi_2_0) = mode.static_phases(phi);
                CompiledModel::Giant(p.with_static_phases(phi_1_0, phi_2_0))
            }
            other => *other,
        }
    }

    fn evaluate(&self, delta: f64) -> ChannelPoint {
        match self.coefficients(delta) {
            Ok(c) if !c.singular => {
                let point = ChannelPoint {
                    t1: c.t1_rate(),
                    t2: c.t2_rate(),
                    t1_rev: c.t1_rev_rate(),
                    t2_rev: c.t2_rev_rate(),
                    i1: c.elastic_contrast(),
                    i2: c.inelastic_contrast(),
                    masked: false,
                };
                debug_assert!(point.t1 <= 1.0 + 1e-12 && point.t2 <= 1.0 + 1e-12);
                debug_assert!(point.t1_rev <= 1.0 + 1e-12 && point.t2_rev <= 1.0 + 1e-12);
                point
            }
            _ => ChannelPoint::masked(),
        }
    }

    /// Conversion rate, or `None` at masked points.
    fn t2_rate(&self, delta: f64) -> Option<f64> {
        match self.coefficients(delta) {
            Ok(c) if !c.singular => Some(c.t2_rate()),
            _ => None,
        }
    }
}

/// Transmission rates and contrasts at one grid cell. Masked cells mark
/// singular parameter points and carry NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPoint {
    pub t1: f64,
    pub t2: f64,
    pub t1_rev: f64,
    pub t2_rev: f64,
    pub i1: f64,
    pub i2: f64,
    pub masked: bool,
}

impl ChannelPoint {
    fn masked() -> Self {
        Self {
            t1: f64::NAN,
            t2: f64::NAN,
            t1_rev: f64::NAN,
            t2_rev: f64::NAN,
            i1: f64::NAN,
            i2: f64::NAN,
            masked: true,
        }
    }
}

/// Run parameters attached to a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMetadata {
    /// The scanned model; for phase maps the static phases of the stored
    /// model are superseded row by row according to `phase_mode`.
    pub model: ScatterModel,
    pub phase_mode: Option<PhaseMode>,
    pub markovianity_index: Option<f64>,
}

/// A detuning scan (`phi_axis` empty) or a phase–detuning lattice
/// (`phi_axis` populated, cells stored phi-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub delta_axis: Vec<f64>,
    pub phi_axis: Option<Vec<f64>>,
    pub channels: Vec<ChannelPoint>,
    pub metadata: GridMetadata,
}

impl SpectrumGrid {
    pub fn n_delta(&self) -> usize {
        self.delta_axis.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi_axis.as_ref().map_or(1, Vec::len)
    }

    /// Cell at (phase row, detuning column); row 0 for plain scans.
    pub fn cell(&self, phi_index: usize, delta_index: usize) -> &ChannelPoint {
        &self.channels[phi_index * self.n_delta() + delta_index]
    }

    pub fn masked_cells(&self) -> usize {
        self.channels.iter().filter(|c| c.masked).count()
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, AnalysisError> {
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(AnalysisError::InvalidGrid(format!("bad range [{lo}, {hi}]")));
    }
    if n == 0 {
        return Err(AnalysisError::InvalidGrid("axis needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Maps grid cells to values on `jobs` workers (0 = library default pool).
/// Collection preserves index order, so output is independent of `jobs`.
fn parallel_cells<F>(n: usize, jobs: usize, f: F) -> Result<Vec<ChannelPoint>, AnalysisError>
where
    F: Fn(usize) -> ChannelPoint + Sync,
{
    if jobs == 1 {
        return Ok((0..n).map(f).collect());
    }
    let run = || (0..n).into_par_iter().map(&f).collect();
    if jobs == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| AnalysisError::WorkerPool(e.to_string()))?;
    Ok(pool.install(run))
}

/// Uniform detuning scan of all transmission channels.
pub fn spectrum_scan(
    model: &ScatterModel,
    delta_range: (f64, f64),
    n_points: usize,
    jobs: usize,
) -> Result<SpectrumGrid, AnalysisError> {
    if n_points < 2 {
        return Err(AnalysisError::InvalidGrid("spectrum scan needs at least two points".into()));
    }
    let delta_axis = axis(delta_range.0, delta_range.1, n_points)?;
    let compiled = model.compile()?;
    let channels = parallel_cells(n_points, jobs, |i| compiled.evaluate(delta_axis[i]))?;
    Ok(SpectrumGrid {
        delta_axis,
        phi_axis: None,
        channels,
        metadata: GridMetadata {
            model: model.clone(),
            phase_mode: None,
            markovianity_index: model.markovianity_index(),
        },
    })
}

/// Phase–detuning lattice of all transmission channels, phi-major.
///
/// The swept phase replaces the static phases of the two-point model
/// according to `mode`; delays and rates are taken from `model`.
pub fn phase_map(
    model: &ScatterModel,
    delta_range: (f64, f64),
    phi_range: (f64, f64),
    mode: PhaseMode,
    n_delta: usize,
    n_phi: usize,
    jobs: usize,
) -> Result<SpectrumGrid, AnalysisError> {
    let compiled = model.compile()?;
    if !matches!(compiled, CompiledModel::Giant(_)) {
        return Err(AnalysisError::UnsupportedModel("phase map"));
    }
    let delta_axis = axis(delta_range.0, delta_range.1, n_delta)?;
    let phi_axis = axis(phi_range.0, phi_range.1, n_phi)?;
    let channels = parallel_cells(n_delta * n_phi, jobs, |idx| {
        let phi = phi_axis[idx / n_delta];
        let delta = delta_axis[idx % n_delta];
        compiled.with_static_phases(mode, phi).evaluate(delta)
    })?;
    Ok(SpectrumGrid {
        delta_axis,
        phi_axis: Some(phi_axis),
        channels,
        metadata: GridMetadata {
            model: model.clone(),
            phase_mode: Some(mode),
            markovianity_index: model.markovianity_index(),
        },
    })
}

/// How a reported window was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMethod {
    GridBracket,
    RefinedBisection,
}

/// A local conversion maximum and its full width at half maximum.
///
/// The width is measured at half of the local peak value (not half of one),
/// so it remains meaningful when the peak itself is below unity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReport {
    pub center: f64,
    pub peak_value: f64,
    pub fwhm: f64,
    pub method: WindowMethod,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization on a bracket; assumes a single interior
/// maximum. Returns (argmax, max).
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
fn bisect_zero<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Walks outward from the peak until the conversion rate falls below the
/// half level, then bisects the crossing.
fn half_crossing<F: Fn(f64) -> f64>(
    f: &F,
    start: f64,
    step: f64,
    half: f64,
) -> Result<f64, AnalysisError> {
    let mut inside = start;
    let mut outside = start + step;
    let mut iterations = 0usize;
    while f(outside) > half {
        inside = outside;
        outside += step;
        iterations += 1;
        if iterations > 1_000_000 {
            return Err(AnalysisError::CrossingNotFound);
        }
    }
    let g = |x: f64| f(x) - half;
    Ok(bisect_zero(&g, inside, outside))
}

/// Locates the conversion window nearest `around` on a detuning scan and
/// refines its center and half-maximum crossings on the continuous model
/// underlying the grid (grid interpolation cannot resolve windows narrower
/// than the pitch).
pub fn window_report(grid: &SpectrumGrid, around: f64) -> Result<WindowReport, AnalysisError> {
    if grid.phi_axis.is_some() {
        return Err(AnalysisError::InvalidGrid(
            "window report requires a one-dimensional detuning scan".into(),
        ));
    }
    let n = grid.n_delta();
    if n < 3 {
        return Err(AnalysisError::InvalidGrid("window report needs at least three points".into()));
    }
    let value = |i: usize| {
        let c = &grid.channels[i];
        if c.masked {
            -1.0
        } else {
            c.t2
        }
    };

    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        let v = value(i);
        if v < PEAK_FLOOR {
            continue;
        }
        let left_ok = i == 0 || v >= value(i - 1);
        let right_ok = i == n - 1 || v >= value(i + 1);
        if left_ok && right_ok {
            let dist = (grid.delta_axis[i] - around).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((i, dist));
            }
        }
    }
    let Some((peak_index, _)) = best else {
        return Err(AnalysisError::NoPeak);
    };

    let compiled = grid.metadata.model.compile()?;
    let t2 = move |delta: f64| compiled.t2_rate(delta).unwrap_or(-1.0);

    let lo = grid.delta_axis[peak_index.saturating_sub(1)];
    let hi = grid.delta_axis[(peak_index + 1).min(n - 1)];
    let (mut center, mut peak_value) = golden_max(&t2, lo, hi);
    let mut method = WindowMethod::RefinedBisection;
    if peak_value < value(peak_index) {
        center = grid.delta_axis[peak_index];
        peak_value = value(peak_index);
        method = WindowMethod::GridBracket;
    }

    let pitch = if n > 1 {
        (grid.delta_axis[n - 1] - grid.delta_axis[0]) / (n - 1) as f64
    } else {
        1.0
    };
    let half = 0.5 * peak_value;
    let right = half_crossing(&t2, center, pitch, half)?;
    let left = half_crossing(&t2, center, -pitch, half)?;
    Ok(WindowReport { center, peak_value, fwhm: right - left, method })
}

/// Detunings where the full-conversion residual vanishes, i.e. where
/// `T₂ = 1` is reached.
///
/// The residual is nonnegative in the supported regime, so its zeros are
/// typically touching zeros; they are located as local minima of the
/// residual on a fine grid, refined on the continuous residual, and each
/// candidate is verified against the conversion rate itself. An empty
/// result is legal (no detuning reaches full conversion).
pub fn find_unit_conversion_detunings(
    params: &GiantAtomParams,
    delta_range: (f64, f64),
) -> Result<Vec<f64>, AnalysisError> {
    let (lo, hi) = delta_range;
    let xs = axis(lo, hi, ROOT_GRID_POINTS)?;
    let residual_at = |delta: f64| unit_conversion_condition(params, delta);
    // Surface UnsupportedRegime before scanning.
    residual_at(xs[0])?;
    let residual = |delta: f64| residual_at(delta).unwrap_or(f64::INFINITY);
    let rs: Vec<f64> = xs.iter().map(|&x| residual(x)).collect();

    let mut candidates = Vec::new();
    for i in 0..xs.len() - 1 {
        if rs[i] == 0.0 {
            candidates.push(xs[i]);
        }
        if rs[i] * rs[i + 1] < 0.0 {
            candidates.push(bisect_zero(&residual, xs[i], xs[i + 1]));
        }
    }
    if *rs.last().unwrap() == 0.0 {
        candidates.push(*xs.last().unwrap());
    }
    for i in 1..xs.len() - 1 {
        if rs[i] <= rs[i - 1] && rs[i] <= rs[i + 1] && rs[i].abs() > 0.0 {
            let neg = |x: f64| -residual(x);
            let (x_min, neg_min) = golden_max(&neg, xs[i - 1], xs[i + 1]);
            if (-neg_min).abs() < 1e-10 {
                candidates.push(x_min);
            }
        }
    }

    // Verify each candidate on the conversion rate and drop duplicates.
    let mut roots: Vec<f64> = candidates
        .into_iter()
        .filter(|&delta| {
            giant_lambda_coefficients(params, delta)
                .map(|c| !c.singular && c.t2_rate() >= 1.0 - 1e-8)
                .unwrap_or(false)
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    let merge_tol = (hi - lo).abs() * 1e-8 + 1e-12;
    roots.dedup_by(|a, b| (*a - *b).abs() <= merge_tol);
    Ok(roots)
}

/// Grid-refined extrema of the two transmission contrasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastExtrema {
    pub max_abs_i1: f64,
    pub i1_delta: f64,
    pub max_abs_i2: f64,
    pub i2_delta: f64,
}

/// Finds the largest `|I₁|` and `|I₂|` on a detuning scan, refined on the
/// continuous model around the best grid cell.
pub fn contrast_extrema(grid: &SpectrumGrid) -> Result<ContrastExtrema, AnalysisError> {
    if grid.phi_axis.is_some() {
        return Err(AnalysisError::InvalidGrid(
            "contrast extrema require a one-dimensional detuning scan".into(),
        ));
    }
    let n = grid.n_delta();
    if n == 0 {
        return Err(AnalysisError::InvalidGrid("empty grid".into()));
    }
    let compiled = grid.metadata.model.compile()?;
    let contrast = |elastic: bool| {
        move |delta: f64| match compiled.coefficients(delta) {
            Ok(c) if !c.singular => {
                if elastic {
                    c.elastic_contrast().abs()
                } else {
                    c.inelastic_contrast().abs()
                }
            }
            _ => -1.0,
        }
    };

    let refine = |elastic: bool| -> (f64, f64) {
        let cell_value = |i: usize| {
            let c = &grid.channels[i];
            if c.masked {
                -1.0
            } else if elastic {
                c.i1.abs()
            } else {
                c.i2.abs()
            }
        };
        let mut best = 0usize;
        for i in 1..n {
            if cell_value(i) > cell_value(best) {
                best = i;
            }
        }
        let f = contrast(elastic);
        let lo = grid.delta_axis[best.saturating_sub(1)];
        let hi = grid.delta_axis[(best + 1).min(n - 1)];
        if lo == hi {
            return (cell_value(best), grid.delta_axis[best]);
        }
        let (x, v) = golden_max(&f, lo, hi);
        if v >= cell_value(best) {
            (v, x)
        } else {
            (cell_value(best), grid.delta_axis[best])
        }
    };

    let (max_abs_i1, i1_delta) = refine(true);
    let (max_abs_i2, i2_delta) = refine(false);
    Ok(ContrastExtrema { max_abs_i1, i1_delta, max_abs_i2, i2_delta })
}
