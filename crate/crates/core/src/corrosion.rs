//! Corrosion initiation and propagation.
//!
//! Initiation times come from closed-form diffusion models of the concrete
//! cover; after initiation the rebar section is consumed either uniformly
//! (carbonation) or by a single hemispherical pit per bar (chlorides). The
//! resulting loss is expressed through the corrosion state
//! `c = (A0 - A(t)) / A0`.
//!
//! Carbonation front (square-root-of-time mass balance):
//!
//! ```text
//! t_ini = x² · a / (2 · De · [CO2])
//! De    = 1.64e-6 · εp^1.8 · (1 - RH/100)^2.2                       [m²/s]
//! εp    = ε_air + (ρc/ρw)(w/c - 0.3) / (1 + (ρc/ρw)(w/c) + (ρc/ρa)(a/c))
//! a     = 0.75 · C · 0.65 · 44/56     (CO2 bound by the hydrated CaO, kg/m³)
//! C     = 1 / (1/ρc + (a/c)/ρa + (w/c)/ρw)                        [kg/m³]
//! ```
//!
//! Chloride front (error-function solution of Fick's second law):
//!
//! ```text
//! C_lim = C0 · (1 - erf(x / (2·√(D·t))))
//! D     = 0.15 · (1 + ρc·w/c) / (1 + ρc·w/c + (ρc/ρa)(a/c))
//!       · ((ρc·w/c - 0.85) / (1 + ρc·w/c))³ · 1.6e-9               [m²/s]
//! ```
//!
//! with densities in g/cm³ in the chloride expression.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::numerics;
use crate::section::CrossSection;
use crate::{Error, Result};

/// Initiation time of an environment that never depassivates the rebar.
pub const NEVER_INITIATES: f64 = f64::INFINITY;
/// Ratio between maximum and mean pit depth.
pub const DEFAULT_PIT_FACTOR: f64 = 5.08;

const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;
const GAS_CONSTANT: f64 = 8.314_462_618;
const ATMOSPHERIC_PRESSURE: f64 = 101_325.0;
const CO2_MOLAR_MASS: f64 = 0.044;
const CAO_IN_CEMENT: f64 = 0.65;
const HYDRATION_DEGREE: f64 = 0.75;
const CO2_PER_CAO: f64 = 44.0 / 56.0;
/// Diameter loss per unit current density and year (mm per μA/cm² per year).
const UNIFORM_LOSS_RATE: f64 = 0.0232;
const PIT_DEPTH_RATE: f64 = 0.0116;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Environment {
    pub water_cement: f64,
    /// Relative humidity (%).
    pub moisture: f64,
    /// °C.
    pub temperature: f64,
    /// Corrosion current density (μA/cm²).
    pub corrosion_rate: f64,
    /// Chloride threshold at the rebar.
    pub chloride_threshold: f64,
    /// Surface chloride content, same unit as the threshold.
    pub surface_chloride: f64,
    /// Ambient CO2 (% by volume).
    pub co2: f64,
    pub aggregate_cement: f64,
    /// kg/m³.
    pub aggregate_density: f64,
    pub cement_density: f64,
    pub water_density: f64,
    /// Entrapped air volume fraction.
    pub air_content: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            water_cement: 0.5,
            moisture: 75.0,
            temperature: 20.0,
            corrosion_rate: 0.431,
            chloride_threshold: 0.5,
            surface_chloride: 75.0,
            co2: 2.0,
            aggregate_cement: 5.0,
            aggregate_density: 2560.0,
            cement_density: 2500.0,
            water_density: 1000.0,
            air_content: 0.02,
        }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.water_cement, "water/cement ratio must be positive"),
            (self.aggregate_cement, "aggregate/cement ratio must be positive"),
            (self.aggregate_density, "aggregate density must be positive"),
            (self.cement_density, "cement density must be positive"),
            (self.water_density, "water density must be positive"),
        ];
        for (value, what) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain(what));
            }
        }
        let non_negative = [
            (self.corrosion_rate, "corrosion rate must be non-negative"),
            (self.chloride_threshold, "chloride threshold must be non-negative"),
            (self.surface_chloride, "surface chloride must be non-negative"),
            (self.co2, "CO2 concentration must be non-negative"),
            (self.air_content, "air content must be non-negative"),
        ];
        for (value, what) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::Domain(what));
            }
        }
        if !(self.moisture >= 0.0 && self.moisture <= 100.0) {
            return Err(Error::Domain("moisture must lie in [0, 100]"));
        }
        if !(self.temperature > -273.15) {
            return Err(Error::Domain("temperature below absolute zero"));
        }
        Ok(())
    }

    /// Cement content of the mix (kg/m³).
    pub fn cement_content(&self) -> f64 {
        1.0 / (1.0 / self.cement_density
            + self.aggregate_cement / self.aggregate_density
            + self.water_cement / self.water_density)
    }

    /// CO2 bound per unit concrete volume at full carbonation (kg/m³).
    pub fn co2_binding_capacity(&self) -> f64 {
        HYDRATION_DEGREE * self.cement_content() * CAO_IN_CEMENT * CO2_PER_CAO
    }

    /// Porosity of the carbonated paste.
    pub fn carbonated_porosity(&self) -> f64 {
        let cw = self.cement_density / self.water_density;
        let ca = self.cement_density / self.aggregate_density;
        let capillary = cw * (self.water_cement - 0.3) / (1.0 + cw * self.water_cement + ca * self.aggregate_cement);
        self.air_content + capillary.max(0.0)
    }

    /// Effective CO2 diffusivity (m²/s).
    pub fn co2_diffusivity(&self) -> f64 {
        let dryness = 1.0 - self.moisture / 100.0;
        if dryness <= 0.0 {
            return 0.0;
        }
        1.64e-6 * libm::pow(self.carbonated_porosity(), 1.8) * libm::pow(dryness, 2.2)
    }

    /// Ambient CO2 mass concentration (kg/m³).
    pub fn co2_concentration(&self) -> f64 {
        let kelvin = self.temperature + 273.15;
        self.co2 / 100.0 * ATMOSPHERIC_PRESSURE * CO2_MOLAR_MASS / (GAS_CONSTANT * kelvin)
    }

    /// Effective chloride diffusivity (m²/s); non-positive for dense mixes.
    pub fn chloride_diffusivity(&self) -> f64 {
        let rho_c = self.cement_density / 1000.0;
        let rho_a = self.aggregate_density / 1000.0;
        let paste = rho_c * self.water_cement;
        let ratio = (paste - 0.85) / (1.0 + paste);
        0.15 * (1.0 + paste) / (1.0 + paste + rho_c / rho_a * self.aggregate_cement) * ratio * ratio * ratio * 1.6e-9
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrosionMode {
    #[default]
    None,
    Carbonation,
    Chloride,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrosionState {
    pub mode: CorrosionMode,
    /// Years; [`NEVER_INITIATES`] when the front never reaches the rebar.
    pub initiation_time: f64,
    pub corrosion: f64,
    pub pit_factor: f64,
}

impl Default for CorrosionState {
    fn default() -> Self {
        CorrosionState {
            mode: CorrosionMode::None,
            initiation_time: NEVER_INITIATES,
            corrosion: 0.0,
            pit_factor: DEFAULT_PIT_FACTOR,
        }
    }
}

/// Years for the carbonation front to cross `cover` (m).
pub fn initiation_time_carbonation(env: &Environment, cover: f64) -> f64 {
    let concentration = env.co2_concentration();
    let diffusivity = env.co2_diffusivity();
    if !(concentration > 0.0) || !(diffusivity > 0.0) {
        return NEVER_INITIATES;
    }
    cover * cover * env.co2_binding_capacity() / (2.0 * diffusivity * concentration) / SECONDS_PER_YEAR
}

/// Years for the chloride content at depth `cover` (m) to reach the threshold.
pub fn initiation_time_chloride(env: &Environment, cover: f64) -> f64 {
    if env.chloride_threshold >= env.surface_chloride {
        return NEVER_INITIATES;
    }
    if cover <= 0.0 {
        return 0.0;
    }
    let diffusivity = env.chloride_diffusivity();
    if !(diffusivity > 0.0) {
        return NEVER_INITIATES;
    }
    // erf(z) = 1 - C_lim/C0
    let target = 1.0 - env.chloride_threshold / env.surface_chloride;
    let z = match numerics::bisect(|z| libm::erf(z) - target, 0.0, 10.0, 1e-14) {
        Some(z) if z > 0.0 => z,
        _ => return 0.0,
    };
    cover * cover / (4.0 * diffusivity * z * z) / SECONDS_PER_YEAR
}

/// Uniform diameter loss (mm) after `t - t_ini` years, capped at `diameter`.
pub fn uniform_diameter_loss(corrosion_rate: f64, t: f64, initiation_time: f64, diameter: f64) -> f64 {
    if !(t > initiation_time) {
        return 0.0;
    }
    (UNIFORM_LOSS_RATE * corrosion_rate * (t - initiation_time)).min(diameter)
}

/// Maximum pit depth (mm) after `t - t_ini` years.
pub fn pit_depth(corrosion_rate: f64, pit_factor: f64, t: f64, initiation_time: f64) -> f64 {
    if !(t > initiation_time) {
        return 0.0;
    }
    PIT_DEPTH_RATE * corrosion_rate * pit_factor * (t - initiation_time)
}

/// Bar area (mm²) left by a pit of depth `p` in a bar of diameter `φ` (mm).
///
/// The pit is a circle of radius `p` centred on the bar surface. With the chord
/// `a = 2p·√(1 - (p/φ)²)` and the angles `θ1 = 2·asin(a/φ)`, `θ2 = 2·asin(a/2p)`:
///
/// ```text
/// A1 = ½·(θ1·(φ/2)² - a·|φ/2 - p²/φ|)
/// A2 = ½·(θ2·p² - a·p²/φ)
/// A_pit = A1 + A2                     p ≤ φ/√2
///       = π·φ²/4 - A1 + A2            φ/√2 < p ≤ φ
///       = π·φ²/4                      p > φ
/// ```
pub fn pit_remaining_area(diameter: f64, depth: f64) -> f64 {
    let full = PI * diameter * diameter / 4.0;
    if depth <= 0.0 {
        return full;
    }
    if depth >= diameter {
        return 0.0;
    }
    let ratio = depth / diameter;
    let chord = 2.0 * depth * libm::sqrt((1.0 - ratio * ratio).max(0.0));
    let theta1 = 2.0 * libm::asin((chord / diameter).min(1.0));
    let theta2 = 2.0 * libm::asin((chord / (2.0 * depth)).min(1.0));
    let radius = 0.5 * diameter;
    let a1 = 0.5 * (theta1 * radius * radius - chord * libm::fabs(radius - depth * depth / diameter));
    let a2 = 0.5 * (theta2 * depth * depth - chord * depth * depth / diameter);
    let pit = if depth <= FRAC_1_SQRT_2 * diameter { a1 + a2 } else { full - a1 + a2 };
    (full - pit).clamp(0.0, full)
}

/// Corrosion state of the bars of `section` at time `t` (years).
pub fn corrosion_state(
    mode: CorrosionMode,
    section: &CrossSection,
    env: &Environment,
    t: f64,
    initiation_time: f64,
    pit_factor: f64,
) -> f64 {
    let diameter = section.bar_diameter;
    let full = PI * diameter * diameter / 4.0;
    let remaining = match mode {
        CorrosionMode::None => return 0.0,
        CorrosionMode::Carbonation => {
            let left = diameter - uniform_diameter_loss(env.corrosion_rate, t, initiation_time, diameter);
            PI * left * left / 4.0
        }
        CorrosionMode::Chloride => {
            pit_remaining_area(diameter, pit_depth(env.corrosion_rate, pit_factor, t, initiation_time))
        }
    };
    ((full - remaining) / full).clamp(0.0, 1.0)
}

impl CorrosionState {
    /// Initiation time for `mode` at the given cover.
    pub fn initiate(mode: CorrosionMode, env: &Environment, cover: f64, pit_factor: f64) -> Self {
        let initiation_time = match mode {
            CorrosionMode::None => NEVER_INITIATES,
            CorrosionMode::Carbonation => initiation_time_carbonation(env, cover),
            CorrosionMode::Chloride => initiation_time_chloride(env, cover),
        };
        CorrosionState { mode, initiation_time, corrosion: 0.0, pit_factor }
    }

    /// Advances to time `t`; the state never decreases.
    pub fn advance(&mut self, section: &CrossSection, env: &Environment, t: f64) {
        let c = corrosion_state(self.mode, section, env, t, self.initiation_time, self.pit_factor);
        self.corrosion = self.corrosion.max(c);
    }
}
