//! Random inputs, extreme-value loads and the Monte Carlo campaign.
//!
//! Each sample owns a ChaCha stream selected by `(seed, sample index)`, and
//! every random variable is drawn from it in a fixed order whatever the
//! corrosion mode. Campaigns that differ only in the corrosion mode therefore
//! share their samples, and results do not depend on how samples are split
//! between workers.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gumbel, LogNormal, Normal};

use crate::corrosion::{self, CorrosionMode, Environment, NEVER_INITIATES};
use crate::frame::Structure;
use crate::section::{CrossSection, SteelDegradation};
use crate::solver::{run_life, LifeModel, LifeResult, LifeSettings};
use crate::{Error, Result};

pub type SampleRng = ChaCha8Rng;

const EULER_GAMMA: f64 = 0.577216;
/// Lower bound for sampled quantities that must stay positive.
const POSITIVE_FLOOR: f64 = 1e-6;

/// Generator of sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    Normal,
    Lognormal,
    GumbelMax,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomVariableSpec {
    pub name: String,
    pub distribution: Distribution,
    pub mean: f64,
    pub cov: f64,
}

impl RandomVariableSpec {
    pub fn new(name: &str, distribution: Distribution, mean: f64, cov: f64) -> Self {
        RandomVariableSpec { name: name.into(), distribution, mean, cov }
    }

    pub fn std_dev(&self) -> f64 {
        self.cov * libm::fabs(self.mean)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::Domain("mean must be finite"));
        }
        if !(self.cov >= 0.0 && self.cov.is_finite()) {
            return Err(Error::Domain("COV must be non-negative"));
        }
        if self.distribution == Distribution::Lognormal && !(self.mean > 0.0) {
            return Err(Error::Domain("lognormal mean must be positive"));
        }
        Ok(())
    }

    /// One draw; degenerate specs return the mean without consuming randomness.
    pub fn sample(&self, rng: &mut SampleRng) -> f64 {
        let sigma = self.std_dev();
        if !(sigma > 0.0) {
            return self.mean;
        }
        match self.distribution {
            Distribution::Normal => Normal::new(self.mean, sigma).map_or(self.mean, |d| d.sample(rng)),
            Distribution::Lognormal => {
                let s2 = libm::log1p(self.cov * self.cov);
                let mu = libm::log(self.mean) - 0.5 * s2;
                LogNormal::new(mu, libm::sqrt(s2)).map_or(self.mean, |d| d.sample(rng))
            }
            Distribution::GumbelMax => {
                let p = gumbel_params(self.mean, sigma).expect("positive sigma");
                Gumbel::new(p.location, 1.0 / p.omega).map_or(self.mean, |d| d.sample(rng))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GumbelParams {
    /// Form parameter (1/unit of x).
    pub omega: f64,
    pub location: f64,
}

/// `ω = π/(√6·σ)`, `u = μ - γ/ω`.
pub fn gumbel_params(mean: f64, std_dev: f64) -> Result<GumbelParams> {
    if !(std_dev > 0.0) {
        return Err(Error::Domain("standard deviation must be positive"));
    }
    let omega = PI / (libm::sqrt(6.0) * std_dev);
    Ok(GumbelParams { omega, location: mean - EULER_GAMMA / omega })
}

impl GumbelParams {
    pub fn cdf(&self, x: f64) -> f64 {
        libm::exp(-libm::exp(-self.omega * (x - self.location)))
    }
}

/// CDF of the maximum of `n` independent variables with CDF value `fx`.
pub fn extreme_cdf(fx: f64, n: u32) -> f64 {
    libm::pow(fx, n as f64)
}

/// `u_n = u50 + ln(n/50)/ω`.
pub fn characteristic_value_at_year(u50: f64, omega: f64, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("year must be at least 1"));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain("omega must be positive"));
    }
    Ok(u50 + libm::log(n as f64 / 50.0) / omega)
}

/// Literal `u_n = u50 + ln(-ln((50 - n)/50))`, defined for `1 ≤ n ≤ 49`.
pub fn characteristic_value_at_year_printed(u50: f64, n: u32) -> Result<f64> {
    if !(1..=49).contains(&n) {
        return Err(Error::Domain("printed shift is defined for years 1 to 49"));
    }
    Ok(u50 + libm::log(-libm::log((50 - n) as f64 / 50.0)))
}

/// `g = d_thre - d`; failure when `g ≤ 0`.
pub fn local_limit_state(damage: f64, threshold: f64) -> f64 {
    threshold - damage
}

/// Cumulative failure counts per year (index `y - 1` for year `y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureTally {
    pub years: u32,
    pub n_simulations: u64,
    pub global: Vec<u64>,
    /// `hinges[h][y - 1]`.
    pub hinges: Vec<Vec<u64>>,
}

/// Year in which a failure at time `t` is counted.
fn failure_year(t: f64) -> usize {
    (libm::ceil(t - 1e-9).max(1.0)) as usize
}

impl FailureTally {
    pub fn new(years: u32, n_hinges: usize) -> Self {
        FailureTally {
            years,
            n_simulations: 0,
            global: vec![0; years as usize],
            hinges: vec![vec![0; years as usize]; n_hinges],
        }
    }

    fn fill(counts: &mut [u64], time: Option<f64>) {
        if let Some(t) = time {
            let first = failure_year(t);
            for c in counts.iter_mut().skip(first - 1) {
                *c += 1;
            }
        }
    }

    /// Adds one sample with the given global and per-hinge failure times.
    pub fn record_times(&mut self, global: Option<f64>, hinges: &[Option<f64>]) {
        self.n_simulations += 1;
        Self::fill(&mut self.global, global);
        for (counts, &t) in self.hinges.iter_mut().zip(hinges) {
            Self::fill(counts, t);
        }
    }

    pub fn record(&mut self, life: &LifeResult) {
        self.record_times(life.global_collapse_time, &life.local_failure_time);
    }

    pub fn record_survivor(&mut self) {
        self.n_simulations += 1;
    }

    /// Exact, order-independent reduction.
    pub fn merge(&mut self, other: &FailureTally) {
        debug_assert_eq!(self.years, other.years);
        self.n_simulations += other.n_simulations;
        for (a, b) in self.global.iter_mut().zip(&other.global) {
            *a += b;
        }
        for (ha, hb) in self.hinges.iter_mut().zip(&other.hinges) {
            for (a, b) in ha.iter_mut().zip(hb) {
                *a += b;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfCurve {
    pub pf: Vec<f64>,
    pub std_err: Vec<f64>,
}

impl PfCurve {
    fn from_counts(counts: &[u64], n: u64) -> Self {
        let nt = n as f64;
        let pf: Vec<f64> = counts.iter().map(|&c| c as f64 / nt).collect();
        let std_err = pf.iter().map(|&p| libm::sqrt(p * (1.0 - p) / nt)).collect();
        PfCurve { pf, std_err }
    }

    pub fn last(&self) -> f64 {
        self.pf.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfEstimate {
    pub global: PfCurve,
    pub hinges: Vec<PfCurve>,
    pub n_simulations: u64,
}

/// `Pf = n_f / n_t` with `√(Pf(1 - Pf)/n_t)` per year.
pub fn estimate_pf(tally: &FailureTally) -> Result<PfEstimate> {
    if tally.n_simulations == 0 {
        return Err(Error::Domain("no simulations"));
    }
    Ok(PfEstimate {
        global: PfCurve::from_counts(&tally.global, tally.n_simulations),
        hinges: tally.hinges.iter().map(|h| PfCurve::from_counts(h, tally.n_simulations)).collect(),
        n_simulations: tally.n_simulations,
    })
}

/// Stochastic inputs, drawn in declaration order.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomInputs {
    /// m.
    pub cover: RandomVariableSpec,
    pub fc: RandomVariableSpec,
    pub fy: RandomVariableSpec,
    pub fsu: RandomVariableSpec,
    pub load: RandomVariableSpec,
    pub water_cement: RandomVariableSpec,
    pub moisture: RandomVariableSpec,
    pub temperature: RandomVariableSpec,
    pub corrosion_rate_carbonation: RandomVariableSpec,
    pub corrosion_rate_chloride: RandomVariableSpec,
    pub chloride_threshold: RandomVariableSpec,
    pub surface_chloride: RandomVariableSpec,
    pub co2: RandomVariableSpec,
}

impl RandomInputs {
    pub fn all(&self) -> [&RandomVariableSpec; 13] {
        [
            &self.cover,
            &self.fc,
            &self.fy,
            &self.fsu,
            &self.load,
            &self.water_cement,
            &self.moisture,
            &self.temperature,
            &self.corrosion_rate_carbonation,
            &self.corrosion_rate_chloride,
            &self.chloride_threshold,
            &self.surface_chloride,
            &self.co2,
        ]
    }
}

/// Cross-section geometry; materials come from the random inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionGeometry {
    pub width: f64,
    pub height: f64,
    pub bars_per_face: u32,
    /// mm.
    pub bar_diameter: f64,
}

/// Deterministic mix parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixDesign {
    pub aggregate_cement: f64,
    pub aggregate_density: f64,
    pub cement_density: f64,
    pub water_density: f64,
    pub air_content: f64,
}

impl Default for MixDesign {
    fn default() -> Self {
        MixDesign {
            aggregate_cement: 5.0,
            aggregate_density: 2560.0,
            cement_density: 2500.0,
            water_density: 1000.0,
            air_content: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LoadProcess {
    /// Draw an independent annual maximum each year instead of shifting the
    /// sampled 50-year maximum along `u_n`.
    pub resample_yearly: bool,
    /// Use the literal printed shift (years ≥ 50 fall back to no shift).
    pub printed_shift: bool,
}

#[derive(Clone, Debug)]
pub struct Campaign {
    pub structure: Structure,
    pub sections: Vec<SectionGeometry>,
    /// Per element; empty means every element corrodes.
    pub exposed: Vec<bool>,
    pub inputs: RandomInputs,
    pub mix: MixDesign,
    /// MPa.
    pub steel_modulus: f64,
    /// MPa; `None` uses `5600·√fc`.
    pub concrete_modulus: Option<f64>,
    pub degradation: SteelDegradation,
    pub pit_factor: f64,
    pub permanent_load: DVector<f64>,
    pub variable_load: DVector<f64>,
    pub corrosion: CorrosionMode,
    pub load_process: LoadProcess,
    pub settings: LifeSettings,
    /// Skip the mechanical run when corrosion does not start within the horizon.
    pub skip_uninitiated: bool,
    pub seed: u64,
}

/// Inputs of one realization.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub sections: Vec<CrossSection>,
    pub environment: Environment,
    pub initiation_time: f64,
    pub yearly_load: Vec<f64>,
}

fn at_least(x: f64, floor: f64) -> f64 {
    if x.is_finite() {
        x.max(floor)
    } else {
        floor
    }
}

impl Campaign {
    pub fn n_hinges(&self) -> usize {
        2 * self.structure.elements.len()
    }

    /// Checks everything that can be checked before sampling.
    pub fn validate(&self) -> Result<()> {
        for spec in self.inputs.all() {
            spec.validate()?;
        }
        if self.sections.is_empty() {
            return Err(Error::InvalidModel("no sections"));
        }
        if self.structure.elements.iter().any(|e| e.section >= self.sections.len()) {
            return Err(Error::InvalidModel("element references a missing section"));
        }
        if !self.exposed.is_empty() && self.exposed.len() != self.structure.elements.len() {
            return Err(Error::InvalidModel("exposure flags must match the elements"));
        }
        let n = self.structure.free_dofs();
        if self.permanent_load.len() != n || self.variable_load.len() != n {
            return Err(Error::InvalidModel("load vectors must match the free DOFs"));
        }
        if self.settings.years == 0 {
            return Err(Error::Domain("years must be positive"));
        }
        if !(self.settings.time_step > 0.0) {
            return Err(Error::Domain("time step must be positive"));
        }
        let mean = self.realization_at_means();
        for s in &mean.sections {
            s.validate()?;
        }
        mean.environment.validate()?;
        let model = self.life_model(&mean);
        let laws = model.laws(&vec![0.0; self.structure.elements.len()])?;
        self.structure.check_constrained(&laws)
    }

    fn sections_for(&self, cover: f64, fc: f64, fy: f64, fsu: f64) -> Vec<CrossSection> {
        let ec = self.concrete_modulus.unwrap_or_else(|| 5600.0 * libm::sqrt(fc));
        self.sections
            .iter()
            .map(|g| {
                let max_cover = 0.5 * g.height - g.bar_diameter / 1000.0 - 1e-4;
                CrossSection {
                    width: g.width,
                    height: g.height,
                    cover: cover.clamp(1e-3, max_cover.max(1e-3)),
                    bars_per_face: g.bars_per_face,
                    bar_diameter: g.bar_diameter,
                    fc,
                    fy,
                    fsu,
                    ec,
                    es: self.steel_modulus,
                }
            })
            .collect()
    }

    fn environment(&self, values: [f64; 8]) -> Environment {
        let [water_cement, moisture, temperature, rate_carb, rate_chl, threshold, surface, co2] = values;
        let corrosion_rate = match self.corrosion {
            CorrosionMode::Chloride => rate_chl,
            _ => rate_carb,
        };
        Environment {
            water_cement: at_least(water_cement, 0.01),
            moisture: moisture.clamp(0.0, 100.0),
            temperature: temperature.max(-50.0),
            corrosion_rate: at_least(corrosion_rate, 0.0),
            chloride_threshold: at_least(threshold, 0.0),
            surface_chloride: at_least(surface, 0.0),
            co2: at_least(co2, 0.0),
            aggregate_cement: self.mix.aggregate_cement,
            aggregate_density: self.mix.aggregate_density,
            cement_density: self.mix.cement_density,
            water_density: self.mix.water_density,
            air_content: self.mix.air_content,
        }
    }

    fn initiation_time(&self, env: &Environment, cover: f64) -> f64 {
        match self.corrosion {
            CorrosionMode::None => NEVER_INITIATES,
            CorrosionMode::Carbonation => corrosion::initiation_time_carbonation(env, cover),
            CorrosionMode::Chloride => corrosion::initiation_time_chloride(env, cover),
        }
    }

    fn yearly_load(&self, base: f64, rng: &mut SampleRng) -> Vec<f64> {
        let years = self.settings.years;
        let spec = &self.inputs.load;
        let sigma = spec.std_dev();
        let Ok(params) = gumbel_params(spec.mean, sigma) else {
            return vec![base.max(0.0); years as usize];
        };
        (1..=years)
            .map(|n| {
                let value = if self.load_process.resample_yearly {
                    let annual =
                        characteristic_value_at_year(params.location, params.omega, 1).unwrap_or(params.location);
                    Gumbel::new(annual, 1.0 / params.omega).map_or(annual, |d| d.sample(rng))
                } else if self.load_process.printed_shift {
                    let shift =
                        characteristic_value_at_year_printed(params.location, n).map_or(0.0, |u| u - params.location);
                    base + shift
                } else {
                    base + libm::log(n as f64 / 50.0) / params.omega
                };
                value.max(0.0)
            })
            .collect()
    }

    /// Draws every random input of sample `index`.
    pub fn realization(&self, index: u64) -> Realization {
        let mut rng = sample_rng(self.seed, index);
        let draws: Vec<f64> = self.inputs.all().iter().map(|s| s.sample(&mut rng)).collect();
        let cover = at_least(draws[0], 1e-3);
        let fc = at_least(draws[1], 1.0);
        let fy = at_least(draws[2], POSITIVE_FLOOR);
        let fsu = at_least(draws[3], POSITIVE_FLOOR).max(1.01 * fy);
        let load = draws[4];
        let env = self.environment([draws[5], draws[6], draws[7], draws[8], draws[9], draws[10], draws[11], draws[12]]);
        let sections = self.sections_for(cover, fc, fy, fsu);
        let initiation_time = self.initiation_time(&env, sections[0].cover);
        let yearly_load = self.yearly_load(load, &mut rng);
        Realization { sections, environment: env, initiation_time, yearly_load }
    }

    /// Realization with every input at its mean.
    pub fn realization_at_means(&self) -> Realization {
        let i = &self.inputs;
        let env = self.environment([
            i.water_cement.mean,
            i.moisture.mean,
            i.temperature.mean,
            i.corrosion_rate_carbonation.mean,
            i.corrosion_rate_chloride.mean,
            i.chloride_threshold.mean,
            i.surface_chloride.mean,
            i.co2.mean,
        ]);
        let sections = self.sections_for(i.cover.mean, i.fc.mean, i.fy.mean, i.fsu.mean.max(i.fy.mean));
        let initiation_time = self.initiation_time(&env, sections[0].cover);
        let mut rng = sample_rng(self.seed, 0);
        let yearly_load = LoadProcess { resample_yearly: false, ..self.load_process };
        let this = Campaign { load_process: yearly_load, ..self.clone() };
        let yearly_load = this.yearly_load(i.load.mean, &mut rng);
        Realization { sections, environment: env, initiation_time, yearly_load }
    }

    pub fn life_model<'a>(&'a self, r: &'a Realization) -> LifeModel<'a> {
        LifeModel {
            structure: &self.structure,
            sections: &r.sections,
            degradation: self.degradation,
            environment: r.environment,
            corrosion: self.corrosion,
            pit_factor: self.pit_factor,
            exposed: &self.exposed,
            permanent_load: &self.permanent_load,
            variable_load: &self.variable_load,
        }
    }

    /// Runs one realization; `None` when the guard skips the mechanical run.
    pub fn run_realization(&self, r: &Realization) -> Result<Option<LifeResult>> {
        let horizon = self.settings.years as f64;
        if self.skip_uninitiated && self.corrosion != CorrosionMode::None && r.initiation_time >= horizon {
            return Ok(None);
        }
        run_life(&self.life_model(r), r.initiation_time, &r.yearly_load, &self.settings).map(Some)
    }

    pub fn run_sample(&self, index: u64) -> Result<Option<LifeResult>> {
        self.run_realization(&self.realization(index))
    }

    /// Tally of samples `range` run one after another.
    pub fn run_range(&self, range: core::ops::Range<u64>) -> Result<FailureTally> {
        let mut tally = FailureTally::new(self.settings.years, self.n_hinges());
        for index in range {
            match self.run_sample(index)? {
                Some(life) => tally.record(&life),
                None => tally.record_survivor(),
            }
        }
        Ok(tally)
    }
}
