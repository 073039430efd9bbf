//! Planar frame model: nodes, elements, kinematics and equilibrium.
//!
//! Each node carries three degrees of freedom `(u, w, θ)`: horizontal and
//! vertical displacement and rotation. The element generalized strains are the
//! end rotations relative to the chord and the elongation, `Φ = B0·u`, with
//!
//! ```text
//!        | sinα/L  -cosα/L  1  -sinα/L  cosα/L  0 |
//! B0 =   | sinα/L  -cosα/L  0  -sinα/L  cosα/L  1 |
//!        | -cosα   -sinα    0   cosα    sinα    0 |
//! ```
//!
//! With `x` to the right and `w` upwards this makes `θ` positive clockwise; a
//! rigid rotation by `ω` counter-clockwise is `u = -ω·y, w = ω·x, θ = -ω`.
//! Nodal moments follow the same convention.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, SMatrix, Vector3, Vector6};

use crate::hinge::{self, HingeParams, HingeState, COLLAPSE_DAMAGE, DAMAGE_TOL, MAX_DAMAGE};
use crate::numerics;
use crate::{Error, Result};

pub type KinematicMatrix = SMatrix<f64, 3, 6>;

/// Maximum corrector sweeps inside one element.
const CORRECTOR_ITERATIONS: usize = 50;
const CORRECTOR_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    /// Restrained `(u, w, θ)`.
    pub fixed: [bool; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameElement {
    pub id: u32,
    /// Index into [`Structure::nodes`].
    pub node_i: usize,
    pub node_j: usize,
    /// Index of the cross-section in the model section table.
    pub section: usize,
    pub length: f64,
    /// Angle between the element axis and the global `x` axis (rad).
    pub angle: f64,
    /// Initial strains `Φ0`; zero for isostatic structures.
    pub initial_strain: GeneralizedStrain,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GeneralizedStrain {
    pub rotation_i: f64,
    pub rotation_j: f64,
    pub elongation: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GeneralizedStress {
    pub moment_i: f64,
    pub moment_j: f64,
    pub axial: f64,
}

impl GeneralizedStrain {
    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.rotation_i, self.rotation_j, self.elongation)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        GeneralizedStrain { rotation_i: v[0], rotation_j: v[1], elongation: v[2] }
    }
}

impl GeneralizedStress {
    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.moment_i, self.moment_j, self.axial)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        GeneralizedStress { moment_i: v[0], moment_j: v[1], axial: v[2] }
    }
}

/// `B0` for an element of length `L` at angle `α`.
pub fn kinematic_matrix(length: f64, angle: f64) -> KinematicMatrix {
    let (s, c) = libm::sincos(angle);
    let (sl, cl) = (s / length, c / length);
    KinematicMatrix::from_row_slice(&[
        sl, -cl, 1.0, -sl, cl, 0.0, //
        sl, -cl, 0.0, -sl, cl, 1.0, //
        -c, -s, 0.0, c, s, 0.0,
    ])
}

/// `ΔΦ = B0·Δu`.
pub fn strain_increment(b0: &KinematicMatrix, displacement: &Vector6<f64>) -> GeneralizedStrain {
    GeneralizedStrain::from_vector(&(b0 * displacement))
}

/// Flexibility of a damaged, corroded element:
///
/// ```text
/// | L/(3EI(1-di))   -L/(6EI)        0    |
/// | -L/(6EI)        L/(3EI(1-dj))   0    |
/// | 0               0               L/AE |
/// ```
pub fn flexibility(
    damage_i: f64,
    damage_j: f64,
    flexural_stiffness: f64,
    axial_stiffness: f64,
    length: f64,
) -> Result<Matrix3<f64>> {
    for d in [damage_i, damage_j] {
        if d >= COLLAPSE_DAMAGE {
            return Err(Error::HingeCollapsed);
        }
        if !(d >= 0.0) {
            return Err(Error::Domain("damage must be non-negative"));
        }
    }
    let end = length / (3.0 * flexural_stiffness);
    Ok(Matrix3::new(
        end / (1.0 - damage_i),
        -0.5 * end,
        0.0,
        -0.5 * end,
        end / (1.0 - damage_j),
        0.0,
        0.0,
        0.0,
        length / axial_stiffness,
    ))
}

/// Inverts `Φ - Φp = F·m + Φ0`: returns the stiffness `F⁻¹` and `m`.
pub fn element_stiffness(
    flexibility: &Matrix3<f64>,
    strain: GeneralizedStrain,
    plastic: GeneralizedStrain,
    initial: GeneralizedStrain,
) -> Result<(Matrix3<f64>, GeneralizedStress)> {
    let stiffness = flexibility.try_inverse().ok_or(Error::HingeCollapsed)?;
    let elastic = strain.to_vector() - plastic.to_vector() - initial.to_vector();
    Ok((stiffness, GeneralizedStress::from_vector(&(stiffness * elastic))))
}

/// Order of the two correctors inside one sweep of the element return mapping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectorOrder {
    #[default]
    DamageFirst,
    PlasticFirst,
}

/// Laws of one element at the current corrosion state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementLaw {
    pub hinges: [HingeParams; 2],
    pub axial_stiffness: f64,
}

impl ElementLaw {
    fn length(&self) -> f64 {
        self.hinges[0].length
    }

    /// Element bending stiffness: mean of the two hinge values.
    fn flexural_stiffness(&self) -> f64 {
        0.5 * (self.hinges[0].flexural_stiffness + self.hinges[1].flexural_stiffness)
    }
}

/// Result of the strain-driven state determination of one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementResponse {
    pub stress: GeneralizedStress,
    /// Algorithmic tangent `∂m/∂Φ`.
    pub tangent: Matrix3<f64>,
    pub hinges: [HingeState; 2],
}

/// Bending part of the element solved for given hinge variables.
struct Bending {
    end: f64,
    strain: [f64; 2],
}

impl Bending {
    fn compliance(&self, damage: [f64; 2]) -> Matrix2<f64> {
        Matrix2::new(self.end / (1.0 - damage[0]), -0.5 * self.end, -0.5 * self.end, self.end / (1.0 - damage[1]))
    }

    fn moments(&self, damage: [f64; 2], plastic: [f64; 2]) -> [f64; 2] {
        let f = self.compliance(damage);
        let det = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(0, 1)];
        let r = [self.strain[0] - plastic[0], self.strain[1] - plastic[1]];
        [(f[(1, 1)] * r[0] - f[(0, 1)] * r[1]) / det, (f[(0, 0)] * r[1] - f[(0, 1)] * r[0]) / det]
    }

    /// Damage of hinge `k` consistent with `G = R`, other variables frozen.
    fn damage_step(
        &self,
        k: usize,
        damage: [f64; 2],
        plastic: [f64; 2],
        committed: f64,
        law: &HingeParams,
    ) -> Result<f64> {
        let o = 1 - k;
        let a = self.end;
        let b = -0.5 * a;
        let other = a / (1.0 - damage[o]);
        // m̄_k = N / D(d_k), D = a·A_o - (1-d_k)·b²
        let numer = other * (self.strain[k] - plastic[k]) - b * (self.strain[o] - plastic[o]);
        let (r0, q) = (law.initial_resistance, law.resistance_growth);
        let excess = |d: f64| {
            let denom = a * other - (1.0 - d) * b * b;
            let effective = numer / denom;
            let intact = 1.0 - d;
            let log = libm::log(intact);
            let value = law.release_rate_effective(effective) - (r0 + q * log / intact);
            let slope = -a * effective * effective * b * b / denom - q * (log - 1.0) / (intact * intact);
            (value, slope)
        };
        let (f_lo, _) = excess(committed);
        if f_lo <= 0.0 {
            return Ok(committed);
        }
        let (f_hi, _) = excess(MAX_DAMAGE);
        if !(f_hi < 0.0) {
            return Err(Error::HingeCollapsed);
        }
        Ok(numerics::newton_in_bracket(excess, committed, MAX_DAMAGE, false, damage[k], DAMAGE_TOL))
    }

    /// Plastic rotation of hinge `k` by return mapping from the committed value.
    fn plastic_step(&self, k: usize, damage: [f64; 2], plastic: [f64; 2], committed: f64, law: &HingeParams) -> f64 {
        let mut trial_plastic = plastic;
        trial_plastic[k] = committed;
        let trial = self.moments(damage, trial_plastic)[k];
        let f = self.compliance(damage);
        let det = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(0, 1)];
        let stiffness = f[(1 - k, 1 - k)] / det;
        let state = HingeState { damage: damage[k], plastic_rotation: committed, corrosion: 0.0 };
        hinge::plastic_update(trial, &state, law, stiffness).plastic_rotation
    }
}

impl ElementResponse {
    /// Elastic predictor followed by alternating damage and plastic correctors
    /// from the committed hinge states, then the consistent tangent.
    pub fn evaluate(
        strain: GeneralizedStrain,
        committed: &[HingeState; 2],
        law: &ElementLaw,
        initial: GeneralizedStrain,
        order: CorrectorOrder,
    ) -> Result<Self> {
        let length = law.length();
        let ei = law.flexural_stiffness();
        let bending = Bending {
            end: length / (3.0 * ei),
            strain: [strain.rotation_i - initial.rotation_i, strain.rotation_j - initial.rotation_j],
        };
        let axial = law.axial_stiffness / length * (strain.elongation - initial.elongation);

        let mut damage = [committed[0].damage, committed[1].damage];
        let mut plastic = [committed[0].plastic_rotation, committed[1].plastic_rotation];
        for d in damage {
            if d >= COLLAPSE_DAMAGE {
                return Err(Error::HingeCollapsed);
            }
        }
        let rotation_scale =
            bending.end * law.hinges[0].effective_yield_moment.max(law.hinges[1].effective_yield_moment).max(1e-12);

        let mut converged = false;
        for _ in 0..CORRECTOR_ITERATIONS {
            let previous = (damage, plastic);
            let damage_pass = |damage: &mut [f64; 2], plastic: &[f64; 2]| -> Result<()> {
                for k in 0..2 {
                    damage[k] = bending.damage_step(k, *damage, *plastic, committed[k].damage, &law.hinges[k])?;
                }
                Ok(())
            };
            let plastic_pass = |damage: &[f64; 2], plastic: &mut [f64; 2]| {
                for k in 0..2 {
                    plastic[k] =
                        bending.plastic_step(k, *damage, *plastic, committed[k].plastic_rotation, &law.hinges[k]);
                }
            };
            match order {
                CorrectorOrder::DamageFirst => {
                    damage_pass(&mut damage, &plastic)?;
                    plastic_pass(&damage, &mut plastic);
                }
                CorrectorOrder::PlasticFirst => {
                    plastic_pass(&damage, &mut plastic);
                    damage_pass(&mut damage, &plastic)?;
                }
            }
            let change = (0..2).fold(0.0_f64, |acc, k| {
                acc.max(libm::fabs(damage[k] - previous.0[k]))
                    .max(libm::fabs(plastic[k] - previous.1[k]) / rotation_scale)
            });
            if change <= CORRECTOR_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { iterations: CORRECTOR_ITERATIONS });
        }
        if damage.iter().any(|&d| d >= COLLAPSE_DAMAGE) {
            return Err(Error::HingeCollapsed);
        }

        let moments = bending.moments(damage, plastic);
        let mut compliance = bending.compliance(damage);
        for k in 0..2 {
            compliance[(k, k)] += hinge_compliance(
                moments[k],
                damage[k],
                damage[k] > committed[k].damage,
                plastic[k] != committed[k].plastic_rotation,
                bending.end,
                &law.hinges[k],
            );
        }
        let bending_tangent = compliance.try_inverse().ok_or(Error::HingeCollapsed)?;
        let mut tangent = Matrix3::zeros();
        tangent.fixed_view_mut::<2, 2>(0, 0).copy_from(&bending_tangent);
        tangent[(2, 2)] = law.axial_stiffness / length;

        let mut hinges = *committed;
        for k in 0..2 {
            hinges[k].damage = damage[k];
            hinges[k].plastic_rotation = plastic[k];
        }
        Ok(ElementResponse {
            stress: GeneralizedStress { moment_i: moments[0], moment_j: moments[1], axial },
            tangent,
            hinges,
        })
    }
}

/// Extra compliance of an active hinge, from linearizing `G = R` and `f = 0`.
fn hinge_compliance(
    moment: f64,
    damage: f64,
    damage_active: bool,
    plastic_active: bool,
    end: f64,
    law: &HingeParams,
) -> f64 {
    let intact = 1.0 - damage;
    let effective = moment / intact;
    // dd = β·dm
    let beta = if damage_active {
        let slope = hinge::crack_resistance_slope(damage, law.resistance_growth);
        end * effective / (intact * slope - end * effective * effective)
    } else {
        0.0
    };
    let mut extra = end * effective * beta / intact;
    if plastic_active {
        let hardening = law.hardening_modulus.max(1e-12 * law.effective_yield_moment / end);
        extra += (1.0 + effective * beta) / (intact * hardening);
    }
    extra
}

/// Frame topology with cached kinematic matrices and DOF numbering.
#[derive(Clone, Debug)]
pub struct Structure {
    pub nodes: Vec<Node>,
    pub elements: Vec<FrameElement>,
    kinematics: Vec<KinematicMatrix>,
    /// Global equation number per node DOF, `None` when restrained.
    equations: Vec<[Option<usize>; 3]>,
    free_dofs: usize,
}

impl Structure {
    /// Builds the structure; element geometry is taken from node coordinates.
    pub fn new(nodes: Vec<Node>, connectivity: &[(u32, usize, usize, usize)]) -> Result<Self> {
        for (k, node) in nodes.iter().enumerate() {
            if nodes[..k].iter().any(|other| other.id == node.id) {
                return Err(Error::InvalidModel("duplicate node id"));
            }
        }
        let mut elements = Vec::with_capacity(connectivity.len());
        for &(id, i, j, section) in connectivity {
            if i >= nodes.len() || j >= nodes.len() {
                return Err(Error::InvalidModel("element references a missing node"));
            }
            let dx = nodes[j].x - nodes[i].x;
            let dy = nodes[j].y - nodes[i].y;
            let length = libm::hypot(dx, dy);
            if !(length > 0.0) {
                return Err(Error::InvalidModel("element has zero length"));
            }
            elements.push(FrameElement {
                id,
                node_i: i,
                node_j: j,
                section,
                length,
                angle: libm::atan2(dy, dx),
                initial_strain: GeneralizedStrain::default(),
            });
        }
        let mut equations = vec![[None; 3]; nodes.len()];
        let mut free_dofs = 0;
        for (node, eq) in nodes.iter().zip(equations.iter_mut()) {
            for (slot, &fixed) in eq.iter_mut().zip(&node.fixed) {
                if !fixed {
                    *slot = Some(free_dofs);
                    free_dofs += 1;
                }
            }
        }
        let kinematics = elements.iter().map(|e| kinematic_matrix(e.length, e.angle)).collect();
        Ok(Structure { nodes, elements, kinematics, equations, free_dofs })
    }

    pub fn free_dofs(&self) -> usize {
        self.free_dofs
    }

    pub fn kinematics(&self, element: usize) -> &KinematicMatrix {
        &self.kinematics[element]
    }

    /// Equation number of `(node, dof)`, `None` if restrained.
    pub fn equation(&self, node: usize, dof: usize) -> Option<usize> {
        self.equations[node][dof]
    }

    fn element_equations(&self, element: usize) -> [Option<usize>; 6] {
        let e = &self.elements[element];
        let (a, b) = (self.equations[e.node_i], self.equations[e.node_j]);
        [a[0], a[1], a[2], b[0], b[1], b[2]]
    }

    /// Element end displacements gathered from the free-DOF vector.
    pub fn element_displacements(&self, element: usize, displacements: &DVector<f64>) -> Vector6<f64> {
        let eqs = self.element_equations(element);
        Vector6::from_fn(|k, _| eqs[k].map_or(0.0, |q| displacements[q]))
    }

    pub fn element_strain(&self, element: usize, displacements: &DVector<f64>) -> GeneralizedStrain {
        strain_increment(&self.kinematics[element], &self.element_displacements(element, displacements))
    }

    /// Residual `Σ B0ᵀ·m - p` and tangent `Σ B0ᵀ·K·B0` on the free DOFs.
    pub fn assemble(
        &self,
        stresses: &[GeneralizedStress],
        tangents: &[Matrix3<f64>],
        external: &DVector<f64>,
    ) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.free_dofs;
        let mut residual = -external.clone();
        let mut tangent = DMatrix::zeros(n, n);
        for (e, b0) in self.kinematics.iter().enumerate() {
            let eqs = self.element_equations(e);
            let force = b0.transpose() * stresses[e].to_vector();
            let k = b0.transpose() * tangents[e] * b0;
            for (a, qa) in eqs.iter().enumerate() {
                let Some(qa) = *qa else { continue };
                residual[qa] += force[a];
                for (b, qb) in eqs.iter().enumerate() {
                    if let Some(qb) = *qb {
                        tangent[(qa, qb)] += k[(a, b)];
                    }
                }
            }
        }
        (residual, tangent)
    }

    /// Checks that the elastic tangent is regular; `laws` gives each element's
    /// pristine stiffnesses.
    pub fn check_constrained(&self, laws: &[ElementLaw]) -> Result<()> {
        if self.free_dofs == 0 {
            return Ok(());
        }
        let zero = DVector::zeros(self.free_dofs);
        let mut tangents = Vec::with_capacity(self.elements.len());
        for (e, law) in self.elements.iter().zip(laws) {
            let f = flexibility(0.0, 0.0, law.flexural_stiffness(), law.axial_stiffness, e.length)?;
            tangents.push(f.try_inverse().ok_or(Error::UnconstrainedStructure)?);
        }
        let stresses = vec![GeneralizedStress::default(); self.elements.len()];
        let (_, k) = self.assemble(&stresses, &tangents, &zero);
        let lu = k.lu();
        let u = lu.u();
        let diag = u.diagonal();
        let largest = diag.iter().fold(0.0_f64, |m, v| m.max(libm::fabs(*v)));
        let smallest = diag.iter().fold(f64::INFINITY, |m, v| m.min(libm::fabs(*v)));
        if !(largest > 0.0) || smallest <= 1e-12 * largest {
            return Err(Error::UnconstrainedStructure);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::FRAC_PI_2;
    use proptest::prelude::*;

    fn hinge(ei: f64, length: f64) -> HingeParams {
        // Pristine beam parameters: Mcr = 7.6, Mu = 23.5 kN·m, du ≈ 0.62.
        HingeParams {
            initial_resistance: 7.6 * 7.6 * length / (6.0 * ei),
            resistance_growth: -10.0 * 7.6 * 7.6 * length / (6.0 * ei),
            effective_yield_moment: 30.0,
            hardening_modulus: 400.0,
            flexural_stiffness: ei,
            length,
        }
    }

    fn law(ei: f64, ae: f64, length: f64) -> ElementLaw {
        ElementLaw { hinges: [hinge(ei, length); 2], axial_stiffness: ae }
    }

    #[test]
    fn kinematic_matrix_horizontal() {
        let b = kinematic_matrix(2.0, 0.0);
        let expected = KinematicMatrix::from_row_slice(&[
            0.0, -0.5, 1.0, 0.0, 0.5, 0.0, //
            0.0, -0.5, 0.0, 0.0, 0.5, 1.0, //
            -1.0, 0.0, 0.0, 1.0, 0.0, 0.0,
        ]);
        assert!((b - expected).abs().max() < 1e-15);
    }

    #[test]
    fn kinematic_matrix_vertical() {
        let b = kinematic_matrix(1.0, FRAC_PI_2);
        assert!((b[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((b[(1, 0)] - 1.0).abs() < 1e-15);
        assert!(b[(2, 0)].abs() < 1e-15);
    }

    #[test]
    fn strain_examples() {
        let b = kinematic_matrix(2.0, 0.0);
        assert_eq!(strain_increment(&b, &Vector6::zeros()), GeneralizedStrain::default());
        let s = strain_increment(&b, &Vector6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0));
        assert_eq!(s, GeneralizedStrain { rotation_i: 1.0, rotation_j: 0.0, elongation: 0.0 });
    }

    fn rigid_modes(xi: f64, yi: f64, xj: f64, yj: f64) -> [Vector6<f64>; 3] {
        [
            Vector6::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0),
            Vector6::new(0.0, 1.0, 0.0, 0.0, 1.0, 0.0),
            Vector6::new(-yi, xi, -1.0, -yj, xj, -1.0),
        ]
    }

    proptest! {
        #[test]
        fn rigid_body_motion_is_strain_free(
            xi in -5.0..5.0f64, yi in -5.0..5.0f64, angle in -3.2..3.2f64, length in 0.2..8.0f64,
        ) {
            let (s, c) = (angle.sin(), angle.cos());
            let (xj, yj) = (xi + length * c, yi + length * s);
            let b = kinematic_matrix(length, angle);
            for mode in rigid_modes(xi, yi, xj, yj) {
                let strain = b * mode;
                prop_assert!(strain.norm() <= 1e-12 * mode.norm().max(1.0), "{strain:?}");
            }
        }

        #[test]
        fn flexibility_is_symmetric_positive_definite(di in 0.0..0.99f64, dj in 0.0..0.99f64) {
            let f = flexibility(di, dj, 5000.0, 2e6, 1.7).unwrap();
            prop_assert!((f - f.transpose()).abs().max() == 0.0);
            let eig = f.symmetric_eigenvalues();
            prop_assert!(eig.iter().all(|&v| v > 0.0));
        }

        #[test]
        fn flexibility_grows_with_damage(d1 in 0.0..0.9f64, dd in 0.0..0.09f64) {
            let a = flexibility(d1, 0.1, 5000.0, 2e6, 1.7).unwrap();
            let b = flexibility(d1 + dd, 0.1, 5000.0, 2e6, 1.7).unwrap();
            prop_assert!(b[(0, 0)] >= a[(0, 0)]);
        }

        #[test]
        fn stiffness_round_trip(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64, di in 0.0..0.95f64) {
            let f = flexibility(di, 0.3, 4000.0, 1e6, 2.5).unwrap();
            let (k, _) = element_stiffness(&f, GeneralizedStrain::default(), GeneralizedStrain::default(),
                GeneralizedStrain::default()).unwrap();
            let v = Vector3::new(x, y, z);
            let back = f * (k * v);
            prop_assert!((back - v).norm() <= 1e-12 * v.norm().max(1e-300));
        }
    }

    #[test]
    fn flexibility_examples() {
        let (l, ei, ae) = (2.0, 1000.0, 1e5);
        let f0 = flexibility(0.0, 0.0, ei, ae, l).unwrap();
        assert_relative_eq!(f0[(0, 0)], l / (3.0 * ei));
        assert_relative_eq!(f0[(0, 1)], -l / (6.0 * ei));
        assert_relative_eq!(f0[(2, 2)], l / ae);
        let f = flexibility(0.5, 0.0, ei, ae, l).unwrap();
        assert_relative_eq!(f[(0, 0)], 2.0 * f0[(0, 0)], max_relative = 1e-15);
        assert_eq!(flexibility(1.0 - 1e-13, 0.0, ei, ae, l), Err(Error::HingeCollapsed));
    }

    #[test]
    fn element_stiffness_examples() {
        let (l, ei, ae) = (2.0, 1000.0, 1e5);
        let f = flexibility(0.0, 0.0, ei, ae, l).unwrap();
        let phi = GeneralizedStrain { rotation_i: 1e-3, rotation_j: 0.0, elongation: 0.0 };
        let (_, m) = element_stiffness(&f, phi, phi, GeneralizedStrain::default()).unwrap();
        assert_eq!(m.to_vector(), Vector3::zeros());
        let (_, m) = element_stiffness(&f, phi, GeneralizedStrain::default(), GeneralizedStrain::default()).unwrap();
        // Symbolic inverse of the elastic flexibility: [[4, 2], [2, 4]]·EI/L.
        assert_relative_eq!(m.moment_i, 4.0 * ei / l * 1e-3, max_relative = 1e-12);
        assert_relative_eq!(m.moment_j, 2.0 * ei / l * 1e-3, max_relative = 1e-12);
        assert_eq!(m.axial, 0.0);
    }

    fn simply_supported(spans: usize, length: f64) -> Structure {
        let nodes = (0..=spans)
            .map(|k| Node {
                id: k as u32 + 1,
                x: length * k as f64 / spans as f64,
                y: 0.0,
                fixed: [k == 0, k == 0 || k == spans, false],
            })
            .collect();
        let conn: Vec<_> = (0..spans).map(|k| (k as u32 + 1, k, k + 1, 0)).collect();
        Structure::new(nodes, &conn).unwrap()
    }

    #[test]
    fn zero_state_has_zero_residual() {
        let s = simply_supported(4, 3.0);
        let stresses = vec![GeneralizedStress::default(); 4];
        let tangents = vec![Matrix3::identity(); 4];
        let (r, _) = s.assemble(&stresses, &tangents, &DVector::zeros(s.free_dofs()));
        assert_eq!(r.norm(), 0.0);
    }

    #[test]
    fn midspan_deflection_matches_beam_theory() {
        let (l, ei, ae, p) = (3.0, 5000.0, 1e6, 10.0);
        let s = simply_supported(4, l);
        let laws = vec![law(ei, ae, l / 4.0); 4];
        s.check_constrained(&laws).unwrap();
        let stresses = vec![GeneralizedStress::default(); 4];
        let tangents: Vec<_> =
            (0..4).map(|_| flexibility(0.0, 0.0, ei, ae, l / 4.0).unwrap().try_inverse().unwrap()).collect();
        let mut load = DVector::zeros(s.free_dofs());
        load[s.equation(2, 1).unwrap()] = -p;
        let (r, k) = s.assemble(&stresses, &tangents, &load);
        let u = k.lu().solve(&(-r)).unwrap();
        let deflection = -u[s.equation(2, 1).unwrap()];
        let exact = p * l * l * l / (48.0 * ei);
        assert!((deflection - exact).abs() <= 1e-3 * exact, "{deflection} vs {exact}");

        // Reactions balance the applied load.
        let reaction: f64 = (0..4)
            .map(|e| {
                let m = tangents[e] * s.element_strain(e, &u).to_vector();
                let f = s.kinematics(e).transpose() * m;
                let mut r = 0.0;
                if e == 0 {
                    r += f[1];
                }
                if e == 3 {
                    r += f[4];
                }
                r
            })
            .sum();
        assert!((reaction - p).abs() < 1e-9 * p);
    }

    #[test]
    fn mechanism_is_rejected() {
        let nodes = vec![
            Node { id: 1, x: 0.0, y: 0.0, fixed: [true, true, false] },
            Node { id: 2, x: 2.0, y: 0.0, fixed: [false, false, false] },
        ];
        let s = Structure::new(nodes, &[(1, 0, 1, 0)]).unwrap();
        assert_eq!(s.check_constrained(&[law(5000.0, 1e6, 2.0)]), Err(Error::UnconstrainedStructure));
    }

    #[test]
    fn bad_topology_is_rejected() {
        let nodes =
            vec![Node { id: 1, x: 0.0, y: 0.0, fixed: [true; 3] }, Node { id: 1, x: 1.0, y: 0.0, fixed: [false; 3] }];
        assert!(Structure::new(nodes, &[]).is_err());
        let nodes = vec![Node { id: 1, x: 0.0, y: 0.0, fixed: [true; 3] }];
        assert!(Structure::new(nodes, &[(1, 0, 3, 0)]).is_err());
    }

    #[test]
    fn elastic_response_equals_inverse_flexibility() {
        let l = law(5000.0, 1e6, 2.0);
        let strain = GeneralizedStrain { rotation_i: 1e-4, rotation_j: -5e-5, elongation: 1e-6 };
        let r = ElementResponse::evaluate(
            strain,
            &[HingeState::default(); 2],
            &l,
            GeneralizedStrain::default(),
            CorrectorOrder::DamageFirst,
        )
        .unwrap();
        let f = flexibility(0.0, 0.0, 5000.0, 1e6, 2.0).unwrap();
        let (k, m) = element_stiffness(&f, strain, GeneralizedStrain::default(), GeneralizedStrain::default()).unwrap();
        assert!((r.stress.to_vector() - m.to_vector()).norm() < 1e-12 * m.to_vector().norm());
        assert!((r.tangent - k).abs().max() < 1e-9 * k.abs().max());
        assert_eq!(r.hinges, [HingeState::default(); 2]);
    }

    fn check_consistency(r: &ElementResponse, law: &ElementLaw) {
        let m = [r.stress.moment_i, r.stress.moment_j];
        for ((&m, p), h) in m.iter().zip(&law.hinges).zip(&r.hinges) {
            let g = hinge::energy_release_rate(m, p.length, p.flexural_stiffness, h.damage).unwrap();
            let res = hinge::crack_resistance(h.damage, p.initial_resistance, p.resistance_growth);
            assert!(g <= res * (1.0 + 1e-8), "G={g} R={res}");
            let f =
                hinge::yield_function(m, h.damage, h.plastic_rotation, p.hardening_modulus, p.effective_yield_moment);
            assert!(f <= 1e-9 * p.effective_yield_moment, "f={f}");
        }
    }

    #[test]
    fn corrector_satisfies_both_laws_and_is_order_independent() {
        let l = law(5000.0, 1e6, 2.0);
        for &rot in &[2e-3, 5e-3, 1e-2, 2e-2] {
            let strain = GeneralizedStrain { rotation_i: rot, rotation_j: -0.3 * rot, elongation: 0.0 };
            let a = ElementResponse::evaluate(
                strain,
                &[HingeState::default(); 2],
                &l,
                GeneralizedStrain::default(),
                CorrectorOrder::DamageFirst,
            )
            .unwrap();
            let b = ElementResponse::evaluate(
                strain,
                &[HingeState::default(); 2],
                &l,
                GeneralizedStrain::default(),
                CorrectorOrder::PlasticFirst,
            )
            .unwrap();
            check_consistency(&a, &l);
            check_consistency(&b, &l);
            for k in 0..2 {
                assert!((a.hinges[k].damage - b.hinges[k].damage).abs() <= 1e-8);
                assert!((a.hinges[k].plastic_rotation - b.hinges[k].plastic_rotation).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn corrector_tangent_matches_finite_differences() {
        let l = law(5000.0, 1e6, 2.0);
        let committed = [HingeState::default(); 2];
        for &rot in &[3e-3, 8e-3, 1.5e-2] {
            let base = Vector3::new(rot, -0.2 * rot, 1e-5);
            let eval = |v: Vector3<f64>| {
                ElementResponse::evaluate(
                    GeneralizedStrain::from_vector(&v),
                    &committed,
                    &l,
                    GeneralizedStrain::default(),
                    CorrectorOrder::DamageFirst,
                )
                .unwrap()
            };
            let r = eval(base);
            for col in 0..3 {
                let h = 1e-7 * base.norm();
                let mut up = base;
                up[col] += h;
                let mut down = base;
                down[col] -= h;
                let fd = (eval(up).stress.to_vector() - eval(down).stress.to_vector()) / (2.0 * h);
                let an = r.tangent.column(col);
                assert!((fd - an).norm() <= 1e-4 * r.tangent.norm(), "col {col}: fd {fd:?} vs {an:?}");
            }
            assert!((r.tangent - r.tangent.transpose()).abs().max() <= 1e-10 * r.tangent.abs().max());
        }
    }
}
