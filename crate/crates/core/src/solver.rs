//! Quasi-static life-cycle analysis of one structure realization.
//!
//! Every time step updates the corrosion state of each element, rebuilds the
//! hinge laws from the degraded section, and ramps the load from the level
//! sustained at the end of the previous step to the current one. Global
//! collapse is the failure of the equilibrium iteration; its time is located by
//! bisection inside the failing step.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::corrosion::{self, CorrosionMode, Environment};
use crate::frame::{CorrectorOrder, ElementLaw, ElementResponse, GeneralizedStress, Structure};
use crate::hinge::{HingeParams, HingeState};
use crate::section::{compute_capacities, CrossSection, SteelDegradation};
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const INCREMENT_TOL: f64 = 1e-8;
const LINE_SEARCH_HALVINGS: usize = 8;
const SUBSTEP_RETRIES: u32 = 4;

/// Displacements and committed hinge states of the whole frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameState {
    pub displacement: DVector<f64>,
    /// `[end i, end j]` per element.
    pub hinges: Vec<[HingeState; 2]>,
    pub stresses: Vec<GeneralizedStress>,
}

impl FrameState {
    pub fn new(structure: &Structure) -> Self {
        FrameState {
            displacement: DVector::zeros(structure.free_dofs()),
            hinges: vec![[HingeState::default(); 2]; structure.elements.len()],
            stresses: vec![GeneralizedStress::default(); structure.elements.len()],
        }
    }

    pub fn max_damage(&self) -> f64 {
        self.hinges.iter().flatten().fold(0.0, |m, h| m.max(h.damage))
    }
}

fn evaluate(
    structure: &Structure,
    laws: &[ElementLaw],
    committed: &FrameState,
    displacement: &DVector<f64>,
    order: CorrectorOrder,
) -> Result<Vec<ElementResponse>> {
    structure
        .elements
        .iter()
        .enumerate()
        .map(|(e, element)| {
            let strain = structure.element_strain(e, displacement);
            ElementResponse::evaluate(strain, &committed.hinges[e], &laws[e], element.initial_strain, order)
        })
        .collect()
}

/// Newton–Raphson on `Σ B0ᵀ·m(u) - p = 0` starting from the committed state.
pub fn solve_step(
    structure: &Structure,
    laws: &[ElementLaw],
    committed: &FrameState,
    load: &DVector<f64>,
    order: CorrectorOrder,
) -> Result<FrameState> {
    let mut u = committed.displacement.clone();
    let mut responses = evaluate(structure, laws, committed, &u, order)?;
    let load_norm = load.norm();
    let mut last_increment = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let stresses: Vec<_> = responses.iter().map(|r| r.stress).collect();
        let tangents: Vec<_> = responses.iter().map(|r| r.tangent).collect();
        let (residual, tangent) = structure.assemble(&stresses, &tangents, load);
        let internal = (&residual + load).norm();
        let scale = load_norm.max(internal).max(1e-12);
        let r_norm = residual.norm();
        if !r_norm.is_finite() {
            break;
        }
        let u_scale = u.amax().max(1e-12);
        if r_norm <= 1e-12 * scale || (r_norm <= RESIDUAL_TOL * scale && last_increment <= INCREMENT_TOL * u_scale) {
            return Ok(FrameState { displacement: u, hinges: responses.iter().map(|r| r.hinges).collect(), stresses });
        }
        let Some(mut du) = tangent.lu().solve(&(-residual)) else {
            break;
        };
        if !du.iter().all(|v| v.is_finite()) {
            break;
        }
        let mut accepted = None;
        for _ in 0..=LINE_SEARCH_HALVINGS {
            let trial = &u + &du;
            if let Ok(r) = evaluate(structure, laws, committed, &trial, order) {
                accepted = Some((trial, r));
                break;
            }
            du *= 0.5;
        }
        let Some((trial, r)) = accepted else {
            break;
        };
        last_increment = du.amax();
        u = trial;
        responses = r;
    }
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS })
}

/// Proportional ramp from `from` to `to` in `substeps` equilibrium steps;
/// a failing substep is retried in halves before giving up.
pub fn ramp(
    structure: &Structure,
    laws: &[ElementLaw],
    start: &FrameState,
    from: &DVector<f64>,
    to: &DVector<f64>,
    substeps: usize,
    order: CorrectorOrder,
) -> Result<FrameState> {
    let mut state = start.clone();
    let n = substeps.max(1);
    for k in 1..=n {
        let a = (k - 1) as f64 / n as f64;
        let b = k as f64 / n as f64;
        state = ramp_segment(structure, laws, &state, from, to, a, b, SUBSTEP_RETRIES, order)?;
    }
    Ok(state)
}

#[allow(clippy::too_many_arguments)]
fn ramp_segment(
    structure: &Structure,
    laws: &[ElementLaw],
    state: &FrameState,
    from: &DVector<f64>,
    to: &DVector<f64>,
    a: f64,
    b: f64,
    retries: u32,
    order: CorrectorOrder,
) -> Result<FrameState> {
    let load = from + (to - from) * b;
    match solve_step(structure, laws, state, &load, order) {
        Ok(next) => Ok(next),
        Err(err) if retries == 0 => Err(err),
        Err(_) => {
            let mid = 0.5 * (a + b);
            let half = ramp_segment(structure, laws, state, from, to, a, mid, retries - 1, order)?;
            ramp_segment(structure, laws, &half, from, to, mid, b, retries - 1, order)
        }
    }
}

/// Mechanical and environmental description of one realization.
#[derive(Clone, Debug)]
pub struct LifeModel<'a> {
    pub structure: &'a Structure,
    /// Indexed by [`crate::frame::FrameElement::section`].
    pub sections: &'a [CrossSection],
    pub degradation: SteelDegradation,
    pub environment: Environment,
    pub corrosion: CorrosionMode,
    pub pit_factor: f64,
    /// Elements whose bars corrode; empty means all.
    pub exposed: &'a [bool],
    pub permanent_load: &'a DVector<f64>,
    /// Load pattern scaled by the yearly magnitude.
    pub variable_load: &'a DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifeSettings {
    pub years: u32,
    pub time_step: f64,
    pub damage_threshold: f64,
    pub load_substeps: usize,
    pub collapse_resolution: f64,
    pub order: CorrectorOrder,
}

impl Default for LifeSettings {
    fn default() -> Self {
        LifeSettings {
            years: 50,
            time_step: 1.0,
            damage_threshold: 0.5,
            load_substeps: 10,
            collapse_resolution: 0.1,
            order: CorrectorOrder::DamageFirst,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub time: f64,
    pub max_damage: f64,
    pub load: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LifeResult {
    pub global_collapse_time: Option<f64>,
    /// Hinge `2e` is end i of element `e`, hinge `2e + 1` end j.
    pub local_failure_time: Vec<Option<f64>>,
    pub trace: Vec<TracePoint>,
}

impl<'a> LifeModel<'a> {
    fn corrosion_at(&self, element: usize, t: f64, initiation_time: f64) -> f64 {
        if !self.exposed.is_empty() && !self.exposed[element] {
            return 0.0;
        }
        let section = &self.sections[self.structure.elements[element].section];
        corrosion::corrosion_state(self.corrosion, section, &self.environment, t, initiation_time, self.pit_factor)
    }

    /// Element laws for the given corrosion state per element.
    pub fn laws(&self, corrosion: &[f64]) -> Result<Vec<ElementLaw>> {
        self.structure
            .elements
            .iter()
            .zip(corrosion)
            .map(|(element, &c)| {
                let caps = compute_capacities(&self.sections[element.section], c, self.degradation)?;
                let hinge = HingeParams::from_capacities(&caps, element.length);
                Ok(ElementLaw { hinges: [hinge; 2], axial_stiffness: caps.axial_stiffness })
            })
            .collect()
    }
}

struct Life<'m, 'a> {
    model: &'m LifeModel<'a>,
    settings: &'m LifeSettings,
    initiation_time: f64,
}

impl Life<'_, '_> {
    fn corrosion(&self, t: f64, floor: &[f64]) -> Vec<f64> {
        floor.iter().enumerate().map(|(e, &c)| c.max(self.model.corrosion_at(e, t, self.initiation_time))).collect()
    }

    fn load(&self, level: f64) -> DVector<f64> {
        self.model.permanent_load + self.model.variable_load * level
    }

    /// Advances from `(state, level0)` to time `t` and load level `level1`.
    fn advance(&self, state: &FrameState, corrosion: &[f64], level0: f64, level1: f64) -> Result<FrameState> {
        let laws = match self.model.laws(corrosion) {
            Ok(laws) => laws,
            Err(Error::SectionExhausted) => return Err(Error::HingeCollapsed),
            Err(e) => return Err(e),
        };
        let from = self.load(level0);
        let to = self.load(level1);
        ramp(self.model.structure, &laws, state, &from, &to, self.settings.load_substeps, self.settings.order)
    }
}

fn is_collapse(err: &Error) -> bool {
    matches!(err, Error::NonConvergence { .. } | Error::HingeCollapsed | Error::NegativeRadicand)
}

fn record_local(result: &mut LifeResult, state: &FrameState, t: f64, threshold: f64) {
    for (e, pair) in state.hinges.iter().enumerate() {
        for (k, h) in pair.iter().enumerate() {
            let slot = &mut result.local_failure_time[2 * e + k];
            if slot.is_none() && h.damage >= threshold {
                *slot = Some(t);
            }
        }
    }
}

/// Runs the realization over `settings.years`; `yearly_load[n - 1]` is the
/// variable-load magnitude in year `n`.
pub fn run_life(
    model: &LifeModel<'_>,
    initiation_time: f64,
    yearly_load: &[f64],
    settings: &LifeSettings,
) -> Result<LifeResult> {
    if !(settings.time_step > 0.0) {
        return Err(Error::Domain("time step must be positive"));
    }
    if yearly_load.len() < settings.years as usize {
        return Err(Error::Domain("one load value per year is required"));
    }
    let structure = model.structure;
    let n_elements = structure.elements.len();
    let mut result =
        LifeResult { global_collapse_time: None, local_failure_time: vec![None; 2 * n_elements], trace: Vec::new() };
    let life = Life { model, settings, initiation_time };

    let mut corrosion = vec![0.0; n_elements];
    let pristine = model.laws(&corrosion)?;
    structure.check_constrained(&pristine)?;

    let zero = DVector::zeros(structure.free_dofs());
    let mut state = match ramp(
        structure,
        &pristine,
        &FrameState::new(structure),
        &zero,
        model.permanent_load,
        settings.load_substeps,
        settings.order,
    ) {
        Ok(s) => s,
        Err(e) if is_collapse(&e) => {
            result.global_collapse_time = Some(0.0);
            return Ok(result);
        }
        Err(e) => return Err(e),
    };

    let horizon = settings.years as f64;
    let steps = libm::ceil(horizon / settings.time_step - 1e-9) as usize;
    let mut t0 = 0.0;
    let mut level0 = 0.0;
    for step in 1..=steps {
        let t1 = (step as f64 * settings.time_step).min(horizon);
        let year = (libm::ceil(t1 - 1e-9) as usize).clamp(1, settings.years as usize);
        let level1 = yearly_load[year - 1];
        let c1 = life.corrosion(t1, &corrosion);
        match life.advance(&state, &c1, level0, level1) {
            Ok(next) => {
                state = next;
                for (e, pair) in state.hinges.iter_mut().enumerate() {
                    pair[0].corrosion = c1[e];
                    pair[1].corrosion = c1[e];
                }
                corrosion = c1;
                record_local(&mut result, &state, t1, settings.damage_threshold);
                result.trace.push(TracePoint { time: t1, max_damage: state.max_damage(), load: level1 });
                t0 = t1;
                level0 = level1;
            }
            Err(e) if is_collapse(&e) => {
                let (mut lo, mut hi) = (t0, t1);
                let mut last = state.clone();
                while hi - lo > settings.collapse_resolution {
                    let mid = 0.5 * (lo + hi);
                    let level = level0 + (mid - t0) / (t1 - t0) * (level1 - level0);
                    let c = life.corrosion(mid, &corrosion);
                    match life.advance(&state, &c, level0, level) {
                        Ok(s) => {
                            lo = mid;
                            last = s;
                        }
                        Err(e) if is_collapse(&e) => hi = mid,
                        Err(e) => return Err(e),
                    }
                }
                if lo > t0 {
                    record_local(&mut result, &last, lo, settings.damage_threshold);
                }
                result.global_collapse_time = Some(hi);
                return Ok(result);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(result)
}
