//! Constitutive laws of the inelastic hinge.
//!
//! Damage follows a Griffith criterion: the energy release rate
//! `G = L·m² / (6·EI·(1-d)²)` may not exceed the cracking resistance
//! `R(d) = R0 + q·ln(1-d)/(1-d)`. Plastic rotation follows a yield function
//! on the effective moment with kinematic hardening,
//! `f = |m/(1-d) - c_plast·φp| - k0`.
//!
//! The functions here are the stress-driven forms of both laws. The
//! strain-driven corrector used inside a frame element lives in
//! [`crate::frame::ElementResponse`].

use crate::numerics;
use crate::section::{self, SectionCapacities};
use crate::{Error, Result};

/// Damage at which a hinge counts as fully collapsed.
pub const COLLAPSE_DAMAGE: f64 = 1.0 - 1e-12;
/// Upper end of the damage search interval.
pub(crate) const MAX_DAMAGE: f64 = 1.0 - 1e-9;
pub(crate) const DAMAGE_TOL: f64 = 1e-13;

/// Internal variables of one hinge.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HingeState {
    pub damage: f64,
    pub plastic_rotation: f64,
    pub corrosion: f64,
}

/// Law parameters of one hinge, rebuilt whenever the corrosion state changes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HingeParams {
    /// `R0` (kN·m).
    pub initial_resistance: f64,
    /// `q` (kN·m).
    pub resistance_growth: f64,
    /// `k0` (kN·m).
    pub effective_yield_moment: f64,
    /// `c_plast` (kN·m/rad).
    pub hardening_modulus: f64,
    /// `EI(c)` (kN·m²).
    pub flexural_stiffness: f64,
    /// Element length (m).
    pub length: f64,
}

impl HingeParams {
    pub fn from_capacities(caps: &SectionCapacities, length: f64) -> Self {
        HingeParams {
            initial_resistance: caps.initial_resistance(length),
            resistance_growth: caps.resistance_growth(length),
            effective_yield_moment: caps.effective_yield_moment,
            hardening_modulus: caps.hardening_modulus,
            flexural_stiffness: caps.flexural_stiffness,
            length,
        }
    }

    /// `L / (3·EI)`, the bending flexibility of the intact element end.
    pub(crate) fn end_flexibility(&self) -> f64 {
        self.length / (3.0 * self.flexural_stiffness)
    }

    /// Energy release rate as a function of the effective moment `m/(1-d)`.
    pub(crate) fn release_rate_effective(&self, effective_moment: f64) -> f64 {
        0.5 * self.end_flexibility() * effective_moment * effective_moment
    }
}

/// `G = L·m² / (6·EI·(1-d)²)`.
pub fn energy_release_rate(moment: f64, length: f64, flexural_stiffness: f64, damage: f64) -> Result<f64> {
    check_damage(damage)?;
    let intact = 1.0 - damage;
    Ok(length * moment * moment / (6.0 * flexural_stiffness * intact * intact))
}

/// `R(d) = R0 + q·ln(1-d)/(1-d)`.
pub fn crack_resistance(damage: f64, initial_resistance: f64, growth: f64) -> f64 {
    let intact = 1.0 - damage;
    initial_resistance + growth * libm::log(intact) / intact
}

/// `dR/dd = q·(ln(1-d) - 1)/(1-d)²`.
pub(crate) fn crack_resistance_slope(damage: f64, growth: f64) -> f64 {
    let intact = 1.0 - damage;
    growth * (libm::log(intact) - 1.0) / (intact * intact)
}

/// Moment at which the hinge sits on the crack-propagation curve at damage `d`:
/// `m² = 6·EI·(1-d)²·R0/L + 6·q·EI·(1-d)·ln(1-d)/L`.
pub fn moment_at_damage(damage: f64, params: &HingeParams) -> Result<f64> {
    check_damage(damage)?;
    let radicand = moment_radicand(damage, params);
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand);
    }
    Ok(libm::sqrt(radicand))
}

fn moment_radicand(damage: f64, params: &HingeParams) -> f64 {
    let intact = 1.0 - damage;
    let scale = 6.0 * params.flexural_stiffness / params.length;
    scale * (intact * intact * params.initial_resistance + params.resistance_growth * intact * libm::log(intact))
}

fn check_damage(damage: f64) -> Result<()> {
    if !(damage >= 0.0) {
        return Err(Error::Domain("damage must be non-negative"));
    }
    if damage >= COLLAPSE_DAMAGE {
        return Err(Error::HingeCollapsed);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DamageStep {
    pub damage: f64,
    pub moment: f64,
}

/// Stress-driven damage corrector.
///
/// Keeps `d` when `G(m, d) < R(d)`. Otherwise returns the damage on the rising
/// branch of the moment-damage curve that carries `m_trial`; the moment is
/// unchanged because it is prescribed. Fails with [`Error::HingeCollapsed`]
/// when `|m_trial|` exceeds the peak of the curve.
pub fn damage_update(trial_moment: f64, state: &HingeState, params: &HingeParams) -> Result<DamageStep> {
    let d = state.damage;
    let release = energy_release_rate(trial_moment, params.length, params.flexural_stiffness, d)?;
    let resistance = crack_resistance(d, params.initial_resistance, params.resistance_growth);
    if release <= resistance {
        return Ok(DamageStep { damage: d, moment: trial_moment });
    }
    let peak = section::ultimate_damage(params.initial_resistance, params.resistance_growth)?;
    if d >= peak {
        return Err(Error::HingeCollapsed);
    }
    let target = trial_moment * trial_moment;
    if target >= moment_radicand(peak, params) {
        return Err(Error::HingeCollapsed);
    }
    let scale = 6.0 * params.flexural_stiffness / params.length;
    let excess = |x: f64| {
        let intact = 1.0 - x;
        let slope =
            scale * (2.0 * intact * params.initial_resistance + params.resistance_growth * (1.0 + libm::log(intact)));
        (target - moment_radicand(x, params), slope)
    };
    let damage = numerics::safeguarded_newton(excess, d, peak, DAMAGE_TOL).ok_or(Error::HingeCollapsed)?;
    Ok(DamageStep { damage: damage.max(d), moment: trial_moment })
}

/// `f = |m/(1-d) - c_plast·φp| - k0`.
pub fn yield_function(moment: f64, damage: f64, plastic_rotation: f64, hardening: f64, effective_yield: f64) -> f64 {
    libm::fabs(moment / (1.0 - damage) - hardening * plastic_rotation) - effective_yield
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlasticStep {
    pub plastic_rotation: f64,
    pub moment: f64,
}

/// One-step return mapping of the plastic rotation.
///
/// `stiffness` is the elastic rotational stiffness that converts a plastic
/// rotation increment into a moment drop (`∂m/∂φp = -stiffness`). With `f ≤ 0`
/// the state is returned unchanged; otherwise `f = 0` holds after the step.
pub fn plastic_update(trial_moment: f64, state: &HingeState, params: &HingeParams, stiffness: f64) -> PlasticStep {
    let intact = 1.0 - state.damage;
    let hardening = params.hardening_modulus;
    let relative = trial_moment / intact - hardening * state.plastic_rotation;
    let excess = libm::fabs(relative) - params.effective_yield_moment;
    if excess <= 0.0 {
        return PlasticStep { plastic_rotation: state.plastic_rotation, moment: trial_moment };
    }
    let direction = relative.signum();
    let increment = excess / (stiffness / intact + hardening);
    PlasticStep {
        plastic_rotation: state.plastic_rotation + direction * increment,
        moment: trial_moment - direction * stiffness * increment,
    }
}
