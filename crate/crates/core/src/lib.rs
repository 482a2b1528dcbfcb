//! Single-photon scattering for chiral Λ-type emitters in a one-dimensional
//! waveguide.
//!
//! The crate models a three-level emitter (lower states `g`, `f`, excited
//! state `e`) whose two transitions couple to the right- and left-moving
//! waveguide modes with independent strengths, either at a single point
//! (small atom) or at two separated points (giant atom). Elastic scattering
//! leaves the photon wave vector unchanged; inelastic scattering converts it
//! while the emitter drops into `f`.
//!
//! Functionality is split into four modules:
//!
//! * [`model`]: parameter types, unit conventions, and the phase rule
//!   `φⱼ = φⱼ,₀ + τⱼΔ` shared by everything else.
//! * [`closed_form`]: analytic transmission coefficients and effective
//!   emitter parameters for all supported configurations.
//! * [`oracle`]: an independent boundary-matching solver that derives every
//!   amplitude (including reflections) from the stationary Schrödinger
//!   equation without reusing the closed forms.
//! * [`analysis`]: detuning/phase scans, transmission contrasts, window
//!   widths, and root finding for the full-conversion condition.
//!
//! All rates and detunings are expressed in units of a reference decay rate
//! (conventionally `Γ₁,ᵣ = 1`) and delays in units of its inverse; see
//! [`model::RateUnits`].

pub mod analysis;
pub mod closed_form;
pub mod model;
pub mod oracle;

pub use analysis::{
    contrast_extrema, find_unit_conversion_detunings, phase_map, spectrum_scan, window_report,
    AnalysisError, ContrastExtrema, PhaseMode, ScatterModel, SpectrumGrid, WindowReport,
};
pub use closed_form::{
    dual_velocity_reduction, effective_parameters, giant_lambda_coefficients,
    small_lambda_coefficients, two_level_coefficients, unit_conversion_condition, ClosedFormError,
    EffectiveParams,
};
pub use model::{
    DualVelocityParams, GiantAtomParams, ModelError, PhasePair, RateUnits, ScatteringCoefficients,
    SmallAtomParams, TwoLevelParams,
};
pub use oracle::{
    solve_dual_velocity, solve_giant_lambda, solve_small_lambda, solve_two_level, Direction,
    OracleError, OracleSolution,
};
