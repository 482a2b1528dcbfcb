//! Parameter types and unit/phase conventions shared by all solvers.
//!
//! Every rate (decay rates, detunings) is expressed in units of a reference
//! rate and every delay in units of its inverse, so the numbers fed to the
//! solvers are dimensionless. Phases are carried as unwrapped radians; only
//! `exp(iφ)` is consumed downstream, so wrapping policy cannot change any
//! result.

use num_complex::Complex64;
use thiserror::Error;

/// Index `τ·ΣΓ` below this value is conventionally called Markovian.
///
/// Advisory metadata only: the classification never branches the physics.
pub const DEFAULT_MARKOVIAN_THRESHOLD: f64 = 0.1;

/// Validation errors raised by parameter constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("at least one coupling rate must be positive")]
    FullyDecoupled,
}

fn check_finite(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite { name, value })
    }
}

fn check_nonneg(name: &'static str, value: f64) -> Result<f64, ModelError> {
    check_finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Negative { name, value })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

/// The unit system: a reference decay rate and the waveguide group velocity.
///
/// All solver inputs are dimensionless in these units (rates and detunings
/// divided by `reference_rate`, delays multiplied by it). Scattering
/// amplitudes at fixed dimensionless rates are independent of
/// `group_velocity`; it is kept so that laboratory parameters can be
/// converted consistently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateUnits {
    reference_rate: f64,
    group_velocity: f64,
}

impl Default for RateUnits {
    fn default() -> Self {
        Self { reference_rate: 1.0, group_velocity: 1.0 }
    }
}

impl RateUnits {
    pub fn new(reference_rate: f64, group_velocity: f64) -> Result<Self, ModelError> {
        check_positive("reference_rate", reference_rate)?;
        check_positive("group_velocity", group_velocity)?;
        Ok(Self { reference_rate, group_velocity })
    }

    pub fn reference_rate(&self) -> f64 {
        self.reference_rate
    }

    pub fn group_velocity(&self) -> f64 {
        self.group_velocity
    }

    /// A physical rate or detuning expressed in these units.
    pub fn rate(&self, physical_rate: f64) -> f64 {
        physical_rate / self.reference_rate
    }

    /// A physical time expressed in these units (multiples of `1/Γ_ref`).
    pub fn time(&self, physical_time: f64) -> f64 {
        physical_time * self.reference_rate
    }

    /// The dimensionless propagation delay `τ = d/v_g` for a coupling-point
    /// separation `d`.
    pub fn delay_for_separation(&self, separation: f64) -> f64 {
        self.time(separation / self.group_velocity)
    }

    /// The decay rate `g²/v_g` induced by a coupling strength `g`, in these
    /// units.
    pub fn rate_from_coupling(&self, coupling: f64) -> f64 {
        self.rate(coupling * coupling / self.group_velocity)
    }
}

/// Λ-type emitter coupled to the waveguide at a single point.
///
/// `gamma_r` and `gamma_l` are the decay rates into the right- and
/// left-moving modes; both transitions share them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAtomParams {
    pub gamma_r: f64,
    pub gamma_l: f64,
}

impl SmallAtomParams {
    pub fn new(gamma_r: f64, gamma_l: f64) -> Result<Self, ModelError> {
        check_nonneg("gamma_r", gamma_r)?;
        check_nonneg("gamma_l", gamma_l)?;
        if gamma_r + gamma_l == 0.0 {
            return Err(ModelError::FullyDecoupled);
        }
        Ok(Self { gamma_r, gamma_l })
    }

    pub fn total_rate(&self) -> f64 {
        self.gamma_r + self.gamma_l
    }
}

/// Two-level emitter with chiral couplings and an intrinsic dissipation
/// rate `kappa` into channels outside the waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub gamma_r: f64,
    pub gamma_l: f64,
    pub kappa: f64,
}

impl TwoLevelParams {
    pub fn new(gamma_r: f64, gamma_l: f64, kappa: f64) -> Result<Self, ModelError> {
        check_nonneg("gamma_r", gamma_r)?;
        check_nonneg("gamma_l", gamma_l)?;
        check_nonneg("kappa", kappa)?;
        if gamma_r + gamma_l == 0.0 {
            return Err(ModelError::FullyDecoupled);
        }
        Ok(Self { gamma_r, gamma_l, kappa })
    }

    /// The complex detuning seen by the excited state, `δ + iκ`.
    pub fn complex_detuning(&self, delta: f64) -> Complex64 {
        Complex64::new(delta, self.kappa)
    }
}

/// Accumulated propagation phases `(φ₁, φ₂)` of the elastic and inelastic
/// photon components between the two coupling points, at one detuning.
///
/// Values are unwrapped; `exp(iφ)` is invariant under adding multiples of
/// `2π`, so consumers never need the wrapped representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub phi_1: f64,
    pub phi_2: f64,
}

impl PhasePair {
    /// `e^{iφ₁}`.
    pub fn elastic_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi_1)
    }

    /// `e^{iφ₂}`.
    pub fn inelastic_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi_2)
    }
}

/// Λ-type emitter coupled to the waveguide at two points separated by a
/// propagation delay.
///
/// The four decay rates are per coupling point and direction. The phases
/// accumulated between the points split into static parts `phi_j_0` and
/// detuning-dependent parts `τⱼΔ`; the base model has a common delay
/// (`tau_1 == tau_2`), while the two-velocity reduction produces distinct
/// delays for the elastic and inelastic components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiantAtomParams {
    pub gamma_1r: f64,
    pub gamma_2r: f64,
    pub gamma_1l: f64,
    pub gamma_2l: f64,
    pub phi_1_0: f64,
    pub phi_2_0: f64,
    pub tau_1: f64,
    pub tau_2: f64,
}

impl GiantAtomParams {
    /// Base model: both photon components experience the same delay `tau`.
    pub fn new(
        gamma_1r: f64,
        gamma_2r: f64,
        gamma_1l: f64,
        gamma_2l: f64,
        phi_1_0: f64,
        phi_2_0: f64,
        tau: f64,
    ) -> Result<Self, ModelError> {
        Self::with_delays(gamma_1r, gamma_2r, gamma_1l, gamma_2l, phi_1_0, phi_2_0, tau, tau)
    }

    /// Generalized model with independent delays for the two components.
    #[allow(clippy::too_many_arguments)]
    pub fn with_delays(
        gamma_1r: f64,
        gamma_2r: f64,
        gamma_1l: f64,
        gamma_2l: f64,
        phi_1_0: f64,
        phi_2_0: f64,
        tau_1: f64,
        tau_2: f64,
    ) -> Result<Self, ModelError> {
        check_nonneg("gamma_1r", gamma_1r)?;
        check_nonneg("gamma_2r", gamma_2r)?;
        check_nonneg("gamma_1l", gamma_1l)?;
        check_nonneg("gamma_2l", gamma_2l)?;
        if gamma_1r + gamma_2r + gamma_1l + gamma_2l == 0.0 {
            return Err(ModelError::FullyDecoupled);
        }
        check_finite("phi_1_0", phi_1_0)?;
        check_finite("phi_2_0", phi_2_0)?;
        check_nonneg("tau_1", tau_1)?;
        check_nonneg("tau_2", tau_2)?;
        Ok(Self { gamma_1r, gamma_2r, gamma_1l, gamma_2l, phi_1_0, phi_2_0, tau_1, tau_2 })
    }

    /// Returns a copy with the static phases replaced.
    pub fn with_static_phases(&self, phi_1_0: f64, phi_2_0: f64) -> Self {
        Self { phi_1_0, phi_2_0, ..*self }
    }

    /// Cross rate `Γ₁₂,ᵣ = √(Γ₁,ᵣΓ₂,ᵣ)`.
    pub fn gamma_12r(&self) -> f64 {
        (self.gamma_1r * self.gamma_2r).sqrt()
    }

    /// Cross rate `Γ₁₂,ₗ = √(Γ₁,ₗΓ₂,ₗ)`.
    pub fn gamma_12l(&self) -> f64 {
        (self.gamma_1l * self.gamma_2l).sqrt()
    }

    /// Sum of all four decay rates.
    pub fn total_rate(&self) -> f64 {
        self.gamma_1r + self.gamma_2r + self.gamma_1l + self.gamma_2l
    }

    /// True when the left-moving mode is fully decoupled (`Γⱼ,ₗ = 0`).
    pub fn is_ideal_chiral(&self) -> bool {
        self.gamma_1l == 0.0 && self.gamma_2l == 0.0
    }

    /// Evaluates the phase rule `φⱼ = φⱼ,₀ + τⱼΔ` at a detuning.
    pub fn evaluate_phases(&self, delta: f64) -> PhasePair {
        PhasePair {
            phi_1: self.phi_1_0 + self.tau_1 * delta,
            phi_2: self.phi_2_0 + self.tau_2 * delta,
        }
    }

    /// Retardation index `τ·ΣΓ` with `τ = max(τ₁, τ₂)`.
    ///
    /// Values well below [`DEFAULT_MARKOVIAN_THRESHOLD`] mean the accumulated
    /// phases are effectively detuning independent.
    pub fn markovianity_index(&self) -> f64 {
        self.tau_1.max(self.tau_2) * self.total_rate()
    }

    pub fn is_markovian(&self, threshold: f64) -> bool {
        self.markovianity_index() < threshold
    }
}

/// Giant-atom parameters before the equal-velocity reduction: two waveguide
/// channels with their own group velocities, linearization frequencies, and
/// coupling strengths.
///
/// Channel 1 (velocity `v1`, reference frequency `omega_1`) carries the
/// elastic component via the `g_*` couplings of the `g↔e` transition;
/// channel 2 (`v2`, `omega_2`) carries the converted component via the
/// `xi_*` couplings of the `f↔e` transition. `omega_e` and `omega_f` are the
/// emitter level energies relative to `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVelocityParams {
    pub v1: f64,
    pub v2: f64,
    pub d: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_e: f64,
    pub omega_f: f64,
    pub g_1r: f64,
    pub g_2r: f64,
    pub g_1l: f64,
    pub g_2l: f64,
    pub xi_1r: f64,
    pub xi_2r: f64,
    pub xi_1l: f64,
    pub xi_2l: f64,
}

impl DualVelocityParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v1: f64,
        v2: f64,
        d: f64,
        omega_1: f64,
        omega_2: f64,
        omega_e: f64,
        omega_f: f64,
        couplings_g: [f64; 4],
        couplings_xi: [f64; 4],
    ) -> Result<Self, ModelError> {
        check_positive("v1", v1)?;
        check_positive("v2", v2)?;
        check_positive("d", d)?;
        check_finite("omega_1", omega_1)?;
        check_finite("omega_2", omega_2)?;
        check_finite("omega_e", omega_e)?;
        check_finite("omega_f", omega_f)?;
        let [g_1r, g_2r, g_1l, g_2l] = couplings_g;
        let [xi_1r, xi_2r, xi_1l, xi_2l] = couplings_xi;
        for (name, value) in [
            ("g_1r", g_1r),
            ("g_2r", g_2r),
            ("g_1l", g_1l),
            ("g_2l", g_2l),
            ("xi_1r", xi_1r),
            ("xi_2r", xi_2r),
            ("xi_1l", xi_1l),
            ("xi_2l", xi_2l),
        ] {
            check_finite(name, value)?;
        }
        Ok(Self {
            v1,
            v2,
            d,
            omega_1,
            omega_2,
            omega_e,
            omega_f,
            g_1r,
            g_2r,
            g_1l,
            g_2l,
            xi_1r,
            xi_2r,
            xi_1l,
            xi_2l,
        })
    }

    /// Builds a rate-matched parameter set that reduces to the given rates,
    /// static phases, and delays (`v1 = 1`, `ω₁ = ω₂ = 0` convention).
    ///
    /// `rates` are `[Γ₁,ᵣ, Γ₂,ᵣ, Γ₁,ₗ, Γ₂,ₗ]`; the couplings are chosen as
    /// `g = √(Γ v₁)` and `ξ = √(Γ v₂)` so the matching assumption holds
    /// exactly.
    pub fn from_reduced_model(
        rates: [f64; 4],
        phi_1_0: f64,
        phi_2_0: f64,
        tau_1: f64,
        tau_2: f64,
    ) -> Result<Self, ModelError> {
        check_positive("tau_1", tau_1)?;
        check_positive("tau_2", tau_2)?;
        for (name, value) in [
            ("gamma_1r", rates[0]),
            ("gamma_2r", rates[1]),
            ("gamma_1l", rates[2]),
            ("gamma_2l", rates[3]),
        ] {
            check_nonneg(name, value)?;
        }
        check_finite("phi_1_0", phi_1_0)?;
        check_finite("phi_2_0", phi_2_0)?;
        let v1 = 1.0;
        let d = tau_1 * v1;
        let v2 = d / tau_2;
        let omega_e = phi_1_0 / tau_1;
        let omega_f = omega_e - phi_2_0 / tau_2;
        let couplings_g = rates.map(|g| (g * v1).sqrt());
        let couplings_xi = rates.map(|g| (g * v2).sqrt());
        Self::new(v1, v2, d, 0.0, 0.0, omega_e, omega_f, couplings_g, couplings_xi)
    }

    /// Delay of the elastic component, `τ₁ = d/v₁`.
    pub fn tau_1(&self) -> f64 {
        self.d / self.v1
    }

    /// Delay of the converted component, `τ₂ = d/v₂`.
    pub fn tau_2(&self) -> f64 {
        self.d / self.v2
    }

    /// Total energy of an incident photon with wave vector `k` in channel 1.
    pub fn energy(&self, k: f64) -> f64 {
        self.omega_1 + self.v1 * k
    }

    /// Detuning `Δ′ = ω₁ − ω_e + v₁k` of the incident photon from the `g↔e`
    /// transition.
    pub fn delta_prime(&self, k: f64) -> f64 {
        self.energy(k) - self.omega_e
    }

    /// Wave vector in channel 1 that realizes a given detuning.
    pub fn wavevector_for(&self, delta_prime: f64) -> f64 {
        (delta_prime + self.omega_e - self.omega_1) / self.v1
    }

    /// Converted wave vector fixed by energy conservation,
    /// `ω₁ + v₁k = ω₂ + v₂q + ω_f`.
    pub fn converted_wavevector(&self, k: f64) -> f64 {
        (self.energy(k) - self.omega_f - self.omega_2) / self.v2
    }
}

/// The four transmission amplitudes of one configuration at one detuning:
/// elastic and inelastic for a left-incident photon (`t1`, `t2`) and for a
/// right-incident photon (`t1_rev`, `t2_rev`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t1_rev: Complex64,
    pub t2_rev: Complex64,
    /// Set when numerator and denominator both vanish (isolated parameter
    /// points such as exactly antisymmetric phases `±π` at `Δ = 0`); the
    /// amplitudes are NaN there.
    pub singular: bool,
}

impl ScatteringCoefficients {
    pub fn new(t1: Complex64, t2: Complex64, t1_rev: Complex64, t2_rev: Complex64) -> Self {
        Self { t1, t2, t1_rev, t2_rev, singular: false }
    }

    /// The flagged result at a singular parameter point.
    pub fn singular() -> Self {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Self { t1: nan, t2: nan, t1_rev: nan, t2_rev: nan, singular: true }
    }

    /// Elastic transmission rate `T₁ = |t₁|²`.
    pub fn t1_rate(&self) -> f64 {
        self.t1.norm_sqr()
    }

    /// Inelastic transmission rate `T₂ = |t₂|²`.
    pub fn t2_rate(&self) -> f64 {
        self.t2.norm_sqr()
    }

    pub fn t1_rev_rate(&self) -> f64 {
        self.t1_rev.norm_sqr()
    }

    pub fn t2_rev_rate(&self) -> f64 {
        self.t2_rev.norm_sqr()
    }

    /// Elastic transmission contrast `I₁ = T₁ − T̃₁`.
    pub fn elastic_contrast(&self) -> f64 {
        self.t1_rate() - self.t1_rev_rate()
    }

    /// Inelastic transmission contrast `I₂ = T₂ − T̃₂`.
    pub fn inelastic_contrast(&self) -> f64 {
        self.t2_rate() - self.t2_rev_rate()
    }
}
