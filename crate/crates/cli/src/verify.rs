//! Seeded random verification of the closed forms against the
//! boundary-matching solver.
//!
//! Each suite draws parameters from fixed distributions (rates log-uniform
//! on [0.01, 10], static phases uniform on [-2pi, 2pi], delay zero in one
//! draw out of ten and otherwise log-uniform on [0.01, 10], detuning uniform
//! on [-20, 20]), compares amplitudes, audits matching residuals, and checks
//! flux conservation. Reports are plain text and byte-identical for a given
//! seed.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use chiral_scatter::closed_form::{
    dual_velocity_reduction, giant_lambda_coefficients, small_lambda_coefficients,
    two_level_coefficients,
};
use chiral_scatter::model::{
    DualVelocityParams, GiantAtomParams, SmallAtomParams, TwoLevelParams,
};
use chiral_scatter::oracle::{
    solve_dual_velocity, solve_giant_lambda, solve_small_lambda, solve_two_level, Direction,
};

use crate::config::ModelKind;

pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
pub const FLUX_TOLERANCE: f64 = 1e-10;

/// Deterministic sampler over the verification distributions.
struct Sampler(ChaCha12Rng);

impl Sampler {
    fn new(seed: u64) -> Self {
        Self(ChaCha12Rng::seed_from_u64(seed))
    }

    fn uniform01(&mut self) -> f64 {
        // 53 uniform mantissa bits, independent of RNG-crate distribution
        // internals.
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform01()
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo.ln(), hi.ln()).exp()
    }

    fn rate(&mut self) -> f64 {
        self.log_uniform(0.01, 10.0)
    }

    fn phase(&mut self) -> f64 {
        self.uniform(-2.0 * PI, 2.0 * PI)
    }

    fn delay(&mut self) -> f64 {
        if self.uniform01() < 0.1 {
            0.0
        } else {
            self.log_uniform(0.01, 10.0)
        }
    }

    fn detuning(&mut self) -> f64 {
        self.uniform(-20.0, 20.0)
    }

    fn direction(&mut self) -> Direction {
        if self.uniform01() < 0.5 {
            Direction::LeftIncident
        } else {
            Direction::RightIncident
        }
    }
}

/// One named check with its worst observed value and threshold.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub model: ModelKind,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn verify_small(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = Sampler::new(seed);
    let mut deviation = 0.0_f64;
    let mut residual = 0.0_f64;
    let mut flux = 0.0_f64;
    for _ in 0..samples {
        let params = SmallAtomParams::new(rng.rate(), rng.rate()).unwrap();
        let delta = rng.detuning();
        let closed = small_lambda_coefficients(&params, delta).unwrap();
        let left = solve_small_lambda(&params, delta, Direction::LeftIncident).unwrap();
        let right = solve_small_lambda(&params, delta, Direction::RightIncident).unwrap();
        deviation = deviation
            .max((closed.t1 - left.t1).norm())
            .max((closed.t2 - left.t2).norm())
            .max((closed.t1_rev - right.t1).norm())
            .max((closed.t2_rev - right.t2).norm());
        residual = residual.max(left.residual).max(right.residual);
        flux = flux
            .max((left.outgoing_flux() - 1.0).abs())
            .max((right.outgoing_flux() - 1.0).abs());
    }
    SuiteReport {
        model: ModelKind::SmallLambda,
        checks: vec![
            Check { label: "max transmission deviation", worst: deviation, tolerance: AMPLITUDE_TOLERANCE },
            Check { label: "max matching residual", worst: residual, tolerance: RESIDUAL_TOLERANCE },
            Check { label: "max flux violation", worst: flux, tolerance: FLUX_TOLERANCE },
        ],
    }
}

fn verify_giant(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = Sampler::new(seed);
    let mut deviation = 0.0_f64;
    let mut residual = 0.0_f64;
    let mut flux = 0.0_f64;
    for _ in 0..samples {
        let params = GiantAtomParams::new(
            rng.rate(),
            rng.rate(),
            rng.rate(),
            rng.rate(),
            rng.phase(),
            rng.phase(),
            rng.delay(),
        )
        .unwrap();
        let delta = rng.detuning();
        let closed = giant_lambda_coefficients(&params, delta).unwrap();
        let left = solve_giant_lambda(&params, delta, Direction::LeftIncident).unwrap();
        let right = solve_giant_lambda(&params, delta, Direction::RightIncident).unwrap();
        deviation = deviation
            .max((closed.t1 - left.t1).norm())
            .max((closed.t2 - left.t2).norm())
            .max((closed.t1_rev - right.t1).norm())
            .max((closed.t2_rev - right.t2).norm());
        residual = residual.max(left.residual).max(right.residual);
        flux = flux
            .max((left.outgoing_flux() - 1.0).abs())
            .max((right.outgoing_flux() - 1.0).abs());
    }
    SuiteReport {
        model: ModelKind::GiantLambda,
        checks: vec![
            Check { label: "max transmission deviation", worst: deviation, tolerance: AMPLITUDE_TOLERANCE },
            Check { label: "max matching residual", worst: residual, tolerance: RESIDUAL_TOLERANCE },
            Check { label: "max flux violation", worst: flux, tolerance: FLUX_TOLERANCE },
        ],
    }
}

fn verify_two_level(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = Sampler::new(seed);
    let mut deviation = 0.0_f64;
    let mut residual = 0.0_f64;
    let mut flux = 0.0_f64;
    let mut reciprocity = 0.0_f64;
    let mut deficit_mismatch = 0.0_f64;
    for i in 0..samples {
        // Alternate lossless draws (flux + reciprocity checks) with lossy
        // ones (absorbed-flux bookkeeping).
        let kappa = if i % 2 == 0 { 0.0 } else { rng.log_uniform(0.01, 10.0) };
        let params = TwoLevelParams::new(rng.rate(), rng.rate(), kappa).unwrap();
        let delta = rng.detuning();
        let (t, t_rev) = two_level_coefficients(&params, delta).unwrap();
        let left = solve_two_level(&params, delta, Direction::LeftIncident).unwrap();
        let right = solve_two_level(&params, delta, Direction::RightIncident).unwrap();
        deviation = deviation.max((t - left.t1).norm()).max((t_rev - right.t1).norm());
        residual = residual.max(left.residual).max(right.residual);
        if kappa == 0.0 {
            flux = flux
                .max((left.outgoing_flux() - 1.0).abs())
                .max((right.outgoing_flux() - 1.0).abs());
            reciprocity = reciprocity.max((t.norm() - t_rev.norm()).abs());
        } else {
            for s in [&left, &right] {
                let expected = 2.0 * kappa * s.u_e.norm_sqr();
                deficit_mismatch = deficit_mismatch.max((s.flux_deficit() - expected).abs());
            }
        }
    }
    SuiteReport {
        model: ModelKind::TwoLevel,
        checks: vec![
            Check { label: "max transmission deviation", worst: deviation, tolerance: AMPLITUDE_TOLERANCE },
            Check { label: "max matching residual", worst: residual, tolerance: RESIDUAL_TOLERANCE },
            Check { label: "max flux violation", worst: flux, tolerance: FLUX_TOLERANCE },
            Check { label: "max lossless reciprocity violation", worst: reciprocity, tolerance: RESIDUAL_TOLERANCE },
            Check { label: "max absorbed-flux mismatch", worst: deficit_mismatch, tolerance: FLUX_TOLERANCE },
        ],
    }
}

fn verify_dual_velocity(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = Sampler::new(seed);
    let mut deviation = 0.0_f64;
    let mut residual = 0.0_f64;
    let mut flux = 0.0_f64;
    for _ in 0..samples {
        let rates = [rng.rate(), rng.rate(), rng.rate(), rng.rate()];
        let tau_1 = rng.log_uniform(0.1, 5.0);
        let tau_2 = tau_1 * rng.uniform(0.7, 1.4);
        let params = DualVelocityParams::from_reduced_model(
            rates,
            rng.phase(),
            rng.phase(),
            tau_1,
            tau_2,
        )
        .unwrap();
        let k = params.wavevector_for(rng.uniform(-10.0, 10.0));
        let (reduced, delta) = dual_velocity_reduction(&params, k).unwrap();
        let closed = giant_lambda_coefficients(&reduced, delta).unwrap();
        let raw = solve_dual_velocity(&params, k, rng.direction()).unwrap();
        residual = residual.max(raw.residual);
        flux = flux.max((raw.outgoing_flux() - 1.0).abs());
        let weight = raw.inelastic_flux_weight.sqrt();
        let (t1_closed, t2_closed) = match raw.direction {
            Direction::LeftIncident => (closed.t1, closed.t2),
            Direction::RightIncident => (closed.t1_rev, closed.t2_rev),
        };
        deviation = deviation
            .max((raw.t1 - t1_closed).norm())
            .max((weight * raw.t2 - t2_closed).norm());
    }
    SuiteReport {
        model: ModelKind::DualVelocity,
        checks: vec![
            Check { label: "max reduction deviation", worst: deviation, tolerance: AMPLITUDE_TOLERANCE },
            Check { label: "max matching residual", worst: residual, tolerance: RESIDUAL_TOLERANCE },
            Check { label: "max weighted-flux violation", worst: flux, tolerance: FLUX_TOLERANCE },
        ],
    }
}

pub fn run_suite(model: ModelKind, samples: usize, seed: u64) -> SuiteReport {
    match model {
        ModelKind::SmallLambda => verify_small(samples, seed),
        ModelKind::GiantLambda => verify_giant(samples, seed),
        ModelKind::TwoLevel => verify_two_level(samples, seed),
        ModelKind::DualVelocity => verify_dual_velocity(samples, seed),
    }
}

pub const ALL_MODELS: [ModelKind; 4] = [
    ModelKind::SmallLambda,
    ModelKind::GiantLambda,
    ModelKind::TwoLevel,
    ModelKind::DualVelocity,
];

/// Runs the requested suites and renders the deterministic report.
/// Returns the report text and whether every check passed.
pub fn run_verification(models: &[ModelKind], samples: usize, seed: u64) -> (String, bool) {
    let mut text = String::new();
    let _ = writeln!(text, "verify samples={samples} seed={seed}");
    let mut all_passed = true;
    for &model in models {
        let report = run_suite(model, samples, seed);
        let _ = writeln!(text, "model={}", model.name());
        for check in &report.checks {
            let status = if check.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                text,
                "  {:<36} {:>10.3e}  tol {:.1e}  {status}",
                check.label, check.worst, check.tolerance
            );
        }
        all_passed &= report.passed();
    }
    let _ = writeln!(text, "overall {}", if all_passed { "PASS" } else { "FAIL" });
    (text, all_passed)
}
