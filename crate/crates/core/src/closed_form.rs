//! Analytic scattering coefficients and effective emitter parameters.
//!
//! Everything here is a literal evaluation of a closed-form expression; the
//! independent boundary-matching path that certifies these expressions lives
//! in [`crate::oracle`].

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{
    DualVelocityParams, GiantAtomParams, ScatteringCoefficients, SmallAtomParams, TwoLevelParams,
};

/// Denominator magnitudes below this are treated as singular parameter
/// points and flagged instead of divided through.
pub const SINGULAR_DENOMINATOR_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("detuning must be finite, got {0}")]
    NonFiniteDetuning(f64),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("coupling rates violate the matching assumption: {0}")]
    RateMismatch(String),
}

fn require_finite(delta: f64) -> Result<(), ClosedFormError> {
    if delta.is_finite() {
        Ok(())
    } else {
        Err(ClosedFormError::NonFiniteDetuning(delta))
    }
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Transmission amplitudes of the single-point Λ emitter.
///
/// For a left-incident photon `t₁ = (Δ+iΓ_L)/(Δ+i(Γ_L+Γ_R))` and
/// `t₂ = −iΓ_R/(Δ+i(Γ_R+Γ_L))`; the right-incident amplitudes follow by
/// swapping the roles of the two rates.
pub fn small_lambda_coefficients(
    params: &SmallAtomParams,
    delta: f64,
) -> Result<ScatteringCoefficients, ClosedFormError> {
    require_finite(delta)?;
    let gr = params.gamma_r;
    let gl = params.gamma_l;
    let den = Complex64::new(delta, gl + gr);
    Ok(ScatteringCoefficients::new(
        Complex64::new(delta, gl) / den,
        -I * gr / den,
        Complex64::new(delta, gr) / den,
        -I * gl / den,
    ))
}

/// Transmission amplitudes `(t, t̃)` of the chiral two-level emitter.
///
/// Intrinsic dissipation enters through the complex detuning `δ + iκ`; with
/// `κ = 0` the two magnitudes coincide for any couplings, so nonreciprocal
/// transmission requires loss here.
pub fn two_level_coefficients(
    params: &TwoLevelParams,
    delta: f64,
) -> Result<(Complex64, Complex64), ClosedFormError> {
    require_finite(delta)?;
    let two_delta = 2.0 * params.complex_detuning(delta);
    let diff = params.gamma_l - params.gamma_r;
    let sum = params.gamma_l + params.gamma_r;
    let den = two_delta + I * sum;
    let t = (two_delta + I * diff) / den;
    let t_rev = (two_delta - I * diff) / den;
    Ok((t, t_rev))
}

/// The common scattering denominator `Δ + i(ΣΓ + F₊)` of the two-point
/// emitter, with `F₊ = (Γ₁₂,ᵣ+Γ₁₂,ₗ)(e^{iφ₁}+e^{iφ₂})`.
///
/// Its real and imaginary parts are the effective detuning and decay rate;
/// see [`effective_parameters`].
pub fn scattering_denominator(params: &GiantAtomParams, delta: f64) -> Complex64 {
    let phases = params.evaluate_phases(delta);
    let e1 = phases.elastic_factor();
    let e2 = phases.inelastic_factor();
    let f_plus = (params.gamma_12r() + params.gamma_12l()) * (e1 + e2);
    delta + I * (params.total_rate() + f_plus)
}

/// Transmission amplitudes of the two-point Λ emitter.
///
/// Interference between the coupling points enters through the accumulated
/// phases; at isolated parameter points the numerator and denominator vanish
/// together and a flagged singular result is returned.
pub fn giant_lambda_coefficients(
    params: &GiantAtomParams,
    delta: f64,
) -> Result<ScatteringCoefficients, ClosedFormError> {
    require_finite(delta)?;
    let phases = params.evaluate_phases(delta);
    let e1 = phases.elastic_factor();
    let e2 = phases.inelastic_factor();
    let e1c = e1.conj();
    let e2c = e2.conj();
    let g12r = params.gamma_12r();
    let g12l = params.gamma_12l();
    let sum_l = params.gamma_1l + params.gamma_2l;
    let sum_r = params.gamma_1r + params.gamma_2r;

    let den = scattering_denominator(params, delta);
    if den.norm() < SINGULAR_DENOMINATOR_TOLERANCE {
        return Ok(ScatteringCoefficients::singular());
    }

    let f_minus = g12r * (e2 - e1c) + g12l * (e1 + e2);
    let f_minus_rev = g12r * (e1 + e2) + g12l * (e2 - e1c);

    let t1 = (delta + I * (sum_l + f_minus)) / den;
    let t2 = -I * (params.gamma_1r + params.gamma_2r * e1 * e2c + g12r * (e1 + e2c)) / den;
    let t1_rev = (delta + I * (sum_r + f_minus_rev)) / den;
    let t2_rev = -I * (params.gamma_1l + params.gamma_2l * e2 * e1c + g12l * (e1c + e2)) / den;
    Ok(ScatteringCoefficients::new(t1, t2, t1_rev, t2_rev))
}

/// Effective detuning and decay rate of the two-point emitter.
///
/// These are the real and imaginary parts of the scattering denominator:
/// `Δ_eff = Δ − (Γ₁₂,ᵣ+Γ₁₂,ₗ)(sinφ₁+sinφ₂)` and
/// `Γ_eff = ΣΓ + (Γ₁₂,ᵣ+Γ₁₂,ₗ)(cosφ₁+cosφ₂)`. `Γ_eff` sets the width of the
/// central scattering window and `Δ_eff` its position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub delta_eff: f64,
    pub gamma_eff: f64,
}

pub fn effective_parameters(
    params: &GiantAtomParams,
    delta: f64,
) -> Result<EffectiveParams, ClosedFormError> {
    require_finite(delta)?;
    let phases = params.evaluate_phases(delta);
    let cross = params.gamma_12r() + params.gamma_12l();
    Ok(EffectiveParams {
        delta_eff: delta - cross * (phases.phi_1.sin() + phases.phi_2.sin()),
        gamma_eff: params.total_rate() + cross * (phases.phi_1.cos() + phases.phi_2.cos()),
    })
}

/// Residual of the full-conversion condition in the ideal chiral regime with
/// equal point rates `Γ₁,ᵣ = Γ₂,ᵣ = Γ`:
///
/// `Δ² + 2[Γ² − Γ²cos(φ₁+φ₂) − ΓΔ(sinφ₁+sinφ₂)]`
///
/// The residual equals `|den|² − |num(t₂)|²`, so a zero implies `T₂ = 1` at
/// that detuning. It is exposed as a residual for root finding rather than a
/// solved formula; see [`crate::analysis::find_unit_conversion_detunings`].
pub fn unit_conversion_condition(
    params: &GiantAtomParams,
    delta: f64,
) -> Result<f64, ClosedFormError> {
    require_finite(delta)?;
    if !params.is_ideal_chiral() {
        return Err(ClosedFormError::UnsupportedRegime(
            "full-conversion condition requires gamma_1l = gamma_2l = 0".into(),
        ));
    }
    if params.gamma_1r != params.gamma_2r {
        return Err(ClosedFormError::UnsupportedRegime(format!(
            "full-conversion condition requires gamma_1r = gamma_2r, got {} and {}",
            params.gamma_1r, params.gamma_2r
        )));
    }
    let gamma = params.gamma_1r;
    let phases = params.evaluate_phases(delta);
    let phase_sum = phases.phi_1 + phases.phi_2;
    let sin_sum = phases.phi_1.sin() + phases.phi_2.sin();
    Ok(delta * delta
        + 2.0 * (gamma * gamma - gamma * gamma * phase_sum.cos() - gamma * delta * sin_sum))
}

fn matched_rate(
    label: &str,
    g: f64,
    v1: f64,
    xi: f64,
    v2: f64,
) -> Result<f64, ClosedFormError> {
    let from_g = g * g / v1;
    let from_xi = xi * xi / v2;
    if (from_g - from_xi).abs() > 1e-12 {
        return Err(ClosedFormError::RateMismatch(format!(
            "{label}: |g|^2/v1 = {from_g} but |xi|^2/v2 = {from_xi}"
        )));
    }
    Ok(from_g)
}

/// Reduces the two-velocity model to the single-channel form.
///
/// Requires the rate matching `|g_{j,β}|²/v₁ = |ξ_{j,β}|²/v₂` (within 1e-12),
/// under which the transmission coefficients coincide with the equal-velocity
/// expressions once the detuning is replaced by `Δ′ = ω₁ − ω_e + v₁k` and the
/// two phases evolve with their own delays `τ₁ = d/v₁` and `τ₂ = d/v₂`.
///
/// Returns the reduced parameters and the detuning `Δ′` for the given `k`.
/// Note the reduced amplitudes are flux-normalized: the raw two-velocity
/// amplitude of the converted component carries an extra factor `√(v₁/v₂)`
/// relative to them (see [`crate::oracle::solve_dual_velocity`]).
pub fn dual_velocity_reduction(
    params: &DualVelocityParams,
    k: f64,
) -> Result<(GiantAtomParams, f64), ClosedFormError> {
    require_finite(k)?;
    let reduced = reduced_giant_model(params)?;
    Ok((reduced, params.delta_prime(k)))
}

/// The `k`-independent part of [`dual_velocity_reduction`].
pub fn reduced_giant_model(
    params: &DualVelocityParams,
) -> Result<GiantAtomParams, ClosedFormError> {
    let gamma_1r = matched_rate("point 1, right", params.g_1r, params.v1, params.xi_1r, params.v2)?;
    let gamma_2r = matched_rate("point 2, right", params.g_2r, params.v1, params.xi_2r, params.v2)?;
    let gamma_1l = matched_rate("point 1, left", params.g_1l, params.v1, params.xi_1l, params.v2)?;
    let gamma_2l = matched_rate("point 2, left", params.g_2l, params.v1, params.xi_2l, params.v2)?;
    let tau_1 = params.tau_1();
    let tau_2 = params.tau_2();
    let phi_1_0 = (params.omega_e - params.omega_1) * tau_1;
    let phi_2_0 = (params.omega_e - params.omega_f - params.omega_2) * tau_2;
    GiantAtomParams::with_delays(
        gamma_1r, gamma_2r, gamma_1l, gamma_2l, phi_1_0, phi_2_0, tau_1, tau_2,
    )
    .map_err(|e| ClosedFormError::UnsupportedRegime(e.to_string()))
}
