//! Reinforced-concrete cross-section capacities and their corrosion degradation.
//!
//! Units: geometry in metres except the bar diameter (mm); stresses in MPa;
//! moments in kN·m; stiffnesses in kN·m² (flexural) and kN (axial).
//!
//! The cracking moment uses the gross concrete section with tensile strength
//! `0.3·fc^(2/3)`. Plastic and ultimate moments come from an equivalent
//! rectangular stress block with the tension steel at the (degraded) yield and
//! ultimate stresses. The hinge-law parameters follow from the moment-damage
//! curve `m(d)² = Mcr²·[(1-d)² + (q/R0)·(1-d)·ln(1-d)]`.

use core::f64::consts::PI;

use crate::numerics;
use crate::{Error, Result};

/// Depth factor of the rectangular stress block (`0.85·fc` over `a`).
const STRESS_BLOCK_INTENSITY: f64 = 0.85;
/// Ratio of the stress-block depth to the neutral-axis depth.
const STRESS_BLOCK_DEPTH: f64 = 0.8;
/// Concrete crushing strain used for the ultimate curvature.
const CONCRETE_ULTIMATE_STRAIN: f64 = 0.0035;
/// Plastic hinge length as a fraction of the section height.
const HINGE_LENGTH_RATIO: f64 = 0.5;
/// Lower bound for the ultimate plastic rotation (rad).
const MIN_ULTIMATE_PLASTIC_ROTATION: f64 = 1e-4;

const BRACKET_EPS: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CrossSection {
    /// Width `b` (m).
    pub width: f64,
    /// Height `h` (m).
    pub height: f64,
    /// Clear concrete cover to the bar surface (m).
    pub cover: f64,
    /// Bars on each face; the layout is symmetric.
    pub bars_per_face: u32,
    /// Initial bar diameter (mm).
    pub bar_diameter: f64,
    /// Concrete compressive strength (MPa).
    pub fc: f64,
    /// Steel yield stress (MPa).
    pub fy: f64,
    /// Steel ultimate stress (MPa).
    pub fsu: f64,
    /// Concrete modulus (MPa).
    pub ec: f64,
    /// Steel modulus (MPa).
    pub es: f64,
}

impl CrossSection {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.width, "section width must be positive"),
            (self.height, "section height must be positive"),
            (self.bar_diameter, "bar diameter must be positive"),
            (self.fc, "fc must be positive"),
            (self.fy, "fy must be positive"),
            (self.ec, "Ec must be positive"),
            (self.es, "Es must be positive"),
        ];
        for (value, what) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain(what));
            }
        }
        if self.bars_per_face == 0 {
            return Err(Error::Domain("at least one bar per face is required"));
        }
        if !(self.fsu >= self.fy) {
            return Err(Error::Domain("fsu must not be below fy"));
        }
        if !(self.cover > 0.0 && self.cover < 0.5 * self.height) {
            return Err(Error::Domain("cover must lie in (0, h/2)"));
        }
        if self.effective_depth() <= 0.5 * self.height {
            return Err(Error::Domain("bars do not fit inside the section"));
        }
        Ok(())
    }

    /// Area of one pristine bar (mm²).
    pub fn bar_area(&self) -> f64 {
        0.25 * PI * self.bar_diameter * self.bar_diameter
    }

    /// Pristine steel area on one face (mm²).
    pub fn face_steel_area(&self) -> f64 {
        f64::from(self.bars_per_face) * self.bar_area()
    }

    /// Distance from the compression fibre to the tension bar centroid (m).
    pub fn effective_depth(&self) -> f64 {
        self.height - self.cover - 0.5e-3 * self.bar_diameter
    }

    fn gross_area(&self) -> f64 {
        self.width * self.height
    }

    fn gross_inertia(&self) -> f64 {
        self.width * self.height * self.height * self.height / 12.0
    }

    /// Second moment of both steel faces about the centroid (m⁴), pristine.
    fn steel_inertia(&self) -> f64 {
        let arm = 0.5 * self.height - self.cover - 0.5e-3 * self.bar_diameter;
        2.0 * self.face_steel_area() * 1e-6 * arm * arm
    }
}

/// Linear loss of yield (and ultimate) stress with the corrosion state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteelDegradation {
    /// `α_y`: relative stress loss at full section loss.
    pub yield_stress_loss: f64,
}

impl Default for SteelDegradation {
    fn default() -> Self {
        SteelDegradation { yield_stress_loss: 0.5 }
    }
}

/// Resistance parameters of a section at a given corrosion state.
///
/// `R0` and `q` scale with the element length, so they are stored per unit
/// length; use [`SectionCapacities::initial_resistance`] and
/// [`SectionCapacities::resistance_growth`] to get the hinge values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionCapacities {
    pub cracking_moment: f64,
    pub plastic_moment: f64,
    pub ultimate_moment: f64,
    pub yield_damage: f64,
    pub ultimate_damage: f64,
    pub ultimate_plastic_rotation: f64,
    /// `R0 / L` (kN·m per m).
    pub resistance_per_length: f64,
    /// `q / L` (kN·m per m). Negative: the resistance grows with damage.
    pub growth_per_length: f64,
    /// `k0`, the effective yield moment (kN·m).
    pub effective_yield_moment: f64,
    /// `c_plast`, kinematic hardening modulus (kN·m/rad).
    pub hardening_modulus: f64,
    /// `EI(c)` (kN·m²).
    pub flexural_stiffness: f64,
    /// `AE(c)` (kN).
    pub axial_stiffness: f64,
}

impl SectionCapacities {
    /// `R0 = Mcr²·L / (6·EI)`.
    pub fn initial_resistance(&self, length: f64) -> f64 {
        self.resistance_per_length * length
    }

    pub fn resistance_growth(&self, length: f64) -> f64 {
        self.growth_per_length * length
    }
}

/// `A_s = (1 - c)·A0`.
pub fn degraded_steel_area(initial_area: f64, corrosion: f64) -> Result<f64> {
    if !(initial_area > 0.0) {
        return Err(Error::Domain("initial steel area must be positive"));
    }
    check_corrosion(corrosion)?;
    Ok((1.0 - corrosion) * initial_area)
}

/// `fy(c) = max(0, fy0·(1 - α_y·c))`.
pub fn degraded_yield_stress(initial_yield: f64, corrosion: f64, yield_stress_loss: f64) -> Result<f64> {
    if !(initial_yield > 0.0) {
        return Err(Error::Domain("yield stress must be positive"));
    }
    check_corrosion(corrosion)?;
    if !(yield_stress_loss >= 0.0) {
        return Err(Error::Domain("yield stress loss coefficient must be non-negative"));
    }
    Ok((initial_yield * (1.0 - yield_stress_loss * corrosion)).max(0.0))
}

fn check_corrosion(corrosion: f64) -> Result<()> {
    if (0.0..=1.0).contains(&corrosion) {
        Ok(())
    } else {
        Err(Error::Domain("corrosion state must lie in [0, 1]"))
    }
}

/// Concrete tensile strength (MPa) from the compressive strength.
pub fn tensile_strength(fc: f64) -> f64 {
    0.3 * libm::pow(fc, 2.0 / 3.0)
}

/// Stationary point of the moment-damage curve: the root in (0, 1) of
/// `2·R0·(1-d) + q·(1 + ln(1-d)) = 0`.
pub fn ultimate_damage(initial_resistance: f64, growth: f64) -> Result<f64> {
    if !(initial_resistance > 0.0) {
        return Err(Error::Domain("R0 must be positive"));
    }
    if growth == 0.0 || !growth.is_finite() {
        return Err(Error::NoInflexion);
    }
    let slope = |d: f64| 2.0 * initial_resistance * (1.0 - d) + growth * (1.0 + libm::log(1.0 - d));
    numerics::bisect(slope, BRACKET_EPS, 1.0 - BRACKET_EPS, ROOT_TOL).ok_or(Error::NoInflexion)
}

/// `(m(d) / Mcr)²` for a resistance ratio `q / R0`.
pub(crate) fn moment_ratio_squared(damage: f64, growth_ratio: f64) -> f64 {
    let intact = 1.0 - damage;
    intact * intact + growth_ratio * intact * libm::log(intact)
}

/// `q / R0` that places the curve maximum at `du`.
fn growth_ratio_for(ultimate_damage: f64) -> f64 {
    let intact = 1.0 - ultimate_damage;
    -2.0 * intact / (1.0 + libm::log(intact))
}

/// Ultimate damage that makes the curve peak at `(Mu/Mcr)²`.
fn ultimate_damage_for_ratio(ratio_squared: f64) -> Result<f64> {
    // (1-du)²·(1 - ln(1-du)) / (1 + ln(1-du)) increases from 1 to +∞ on (0, 1 - 1/e).
    let upper = 1.0 - libm::exp(-1.0) - 1e-12;
    let peak = |d: f64| {
        let x = libm::log(1.0 - d);
        (1.0 - d) * (1.0 - d) * (1.0 - x) / (1.0 + x) - ratio_squared
    };
    numerics::bisect(peak, 1e-12, upper, 1e-14).ok_or(Error::SectionExhausted)
}

fn stress_block_moment(force_kn: f64, section: &CrossSection) -> (f64, f64) {
    let depth = section.effective_depth();
    let block = (force_kn / (STRESS_BLOCK_INTENSITY * section.fc * 1e3 * section.width)).min(depth);
    (force_kn * (depth - 0.5 * block), block / STRESS_BLOCK_DEPTH)
}

/// Capacities of `section` at corrosion state `corrosion` (∈ [0, 1)).
pub fn compute_capacities(
    section: &CrossSection,
    corrosion: f64,
    degradation: SteelDegradation,
) -> Result<SectionCapacities> {
    section.validate()?;
    if !(0.0..1.0).contains(&corrosion) {
        return Err(Error::Domain("corrosion state must lie in [0, 1)"));
    }
    let loss = degradation.yield_stress_loss;
    let steel = degraded_steel_area(section.face_steel_area(), corrosion)?;
    let fy = degraded_yield_stress(section.fy, corrosion, loss)?;
    let fsu = degraded_yield_stress(section.fsu, corrosion, loss)?;

    let cracking = tensile_strength(section.fc) * 1e3 * section.width * section.height * section.height / 6.0;
    let (plastic, yield_axis) = stress_block_moment(steel * fy * 1e-3, section);
    let (ultimate, ultimate_axis) = stress_block_moment(steel * fsu * 1e-3, section);

    let ratio = ultimate / cracking;
    if !(ratio > 1.0 + 1e-6) {
        return Err(Error::SectionExhausted);
    }

    let intact_steel = 1.0 - corrosion;
    let flexural = (section.ec * section.gross_inertia() + section.es * section.steel_inertia() * intact_steel) * 1e3;
    let axial =
        (section.ec * section.gross_area() + section.es * 2.0 * section.face_steel_area() * 1e-6 * intact_steel) * 1e3;

    let resistance_per_length = cracking * cracking / (6.0 * flexural);
    let growth_ratio = growth_ratio_for(ultimate_damage_for_ratio(ratio * ratio)?);
    let growth_per_length = growth_ratio * resistance_per_length;
    let du = ultimate_damage(resistance_per_length, growth_per_length)?;

    let dp = if plastic <= cracking {
        0.0
    } else {
        let target = (plastic / cracking) * (plastic / cracking);
        numerics::bisect(|d| moment_ratio_squared(d, growth_ratio) - target, 0.0, du, ROOT_TOL)
            .ok_or(Error::SectionExhausted)?
    };

    let depth = section.effective_depth();
    let yield_strain = fy / section.es;
    let yield_curvature = if yield_axis < depth { yield_strain / (depth - yield_axis) } else { 0.0 };
    let ultimate_curvature = CONCRETE_ULTIMATE_STRAIN / ultimate_axis.max(1e-6);
    let rotation = ((ultimate_curvature - yield_curvature) * HINGE_LENGTH_RATIO * section.height)
        .max(MIN_ULTIMATE_PLASTIC_ROTATION);

    let k0 = plastic / (1.0 - dp);
    let hardening = ((ultimate / (1.0 - du) - k0) / rotation).max(0.0);

    Ok(SectionCapacities {
        cracking_moment: cracking,
        plastic_moment: plastic,
        ultimate_moment: ultimate,
        yield_damage: dp,
        ultimate_damage: du,
        ultimate_plastic_rotation: rotation,
        resistance_per_length,
        growth_per_length,
        effective_yield_moment: k0,
        hardening_modulus: hardening,
        flexural_stiffness: flexural,
        axial_stiffness: axial,
    })
}
