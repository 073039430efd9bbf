//! Campaign configuration files (JSON).
//!
//! Lengths are in metres except bar diameters (mm); stresses in MPa; forces in
//! kN. See `docs/config_schema.json` for the full schema.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use ldmc_core::corrosion::CorrosionMode;
use ldmc_core::frame::{CorrectorOrder, Node, Structure};
use ldmc_core::nalgebra::DVector;
use ldmc_core::reliability::{
    Campaign, Distribution, LoadProcess, MixDesign, RandomInputs, RandomVariableSpec, SectionGeometry,
};
use ldmc_core::section::SteelDegradation;
use ldmc_core::solver::LifeSettings;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(violations: &[Violation]) -> String {
    violations.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CorrosionKind {
    #[default]
    None,
    Chloride,
    Carbonation,
}

impl From<CorrosionKind> for CorrosionMode {
    fn from(k: CorrosionKind) -> Self {
        match k {
            CorrosionKind::None => CorrosionMode::None,
            CorrosionKind::Chloride => CorrosionMode::Chloride,
            CorrosionKind::Carbonation => CorrosionMode::Carbonation,
        }
    }
}

impl std::str::FromStr for CorrosionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(CorrosionKind::None),
            "chloride" => Ok(CorrosionKind::Chloride),
            "carbonation" => Ok(CorrosionKind::Carbonation),
            other => Err(format!("unknown corrosion mode `{other}` (none, chloride, carbonation)")),
        }
    }
}

impl fmt::Display for CorrosionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrosionKind::None => "none",
            CorrosionKind::Chloride => "chloride",
            CorrosionKind::Carbonation => "carbonation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Normal,
    Lognormal,
    GumbelMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    #[default]
    DamageFirst,
    PlasticFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restraint {
    U,
    W,
    Theta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub restraints: Vec<Restraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionConfig {
    pub id: String,
    pub width: f64,
    pub height: f64,
    pub bars_per_face: u32,
    pub bar_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementConfig {
    pub id: u32,
    pub nodes: [u32; 2],
    pub section: String,
    #[serde(default = "default_true")]
    pub exposed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalLoad {
    pub node: u32,
    #[serde(default)]
    pub fx: f64,
    #[serde(default)]
    pub fy: f64,
    #[serde(default)]
    pub moment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LoadsConfig {
    #[serde(default)]
    pub permanent: Vec<NodalLoad>,
    /// Pattern multiplied by the sampled load magnitude.
    #[serde(default)]
    pub variable: Vec<NodalLoad>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomVariableConfig {
    pub distribution: DistributionKind,
    pub mean: f64,
    pub cov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixConfig {
    #[serde(default = "default_aggregate_cement")]
    pub aggregate_cement: f64,
    #[serde(default = "default_aggregate_density")]
    pub aggregate_density: f64,
    #[serde(default = "default_cement_density")]
    pub cement_density: f64,
    #[serde(default = "default_water_density")]
    pub water_density: f64,
    #[serde(default = "default_air_content")]
    pub air_content: f64,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig {
            aggregate_cement: default_aggregate_cement(),
            aggregate_density: default_aggregate_density(),
            cement_density: default_cement_density(),
            water_density: default_water_density(),
            air_content: default_air_content(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteelConfig {
    #[serde(default = "default_steel_modulus")]
    pub modulus: f64,
    #[serde(default = "default_yield_loss")]
    pub yield_stress_loss: f64,
}

impl Default for SteelConfig {
    fn default() -> Self {
        SteelConfig { modulus: default_steel_modulus(), yield_stress_loss: default_yield_loss() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LoadProcessConfig {
    #[serde(default)]
    pub resample_yearly: bool,
    #[serde(default)]
    pub printed_shift: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_years")]
    pub years: u32,
    #[serde(default = "default_time_step")]
    pub time_step: f64,
    #[serde(default = "default_simulations")]
    pub simulations: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub damage_threshold: f64,
    #[serde(default)]
    pub corrosion: CorrosionKind,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub skip_uninitiated: bool,
    #[serde(default = "default_substeps")]
    pub load_substeps: usize,
    #[serde(default)]
    pub corrector_order: OrderKind,
    #[serde(default)]
    pub load_process: LoadProcessConfig,
    #[serde(default)]
    pub steel: SteelConfig,
    /// MPa; `5600·√fc` when absent.
    #[serde(default)]
    pub concrete_modulus: Option<f64>,
    #[serde(default = "default_pit_factor")]
    pub pit_factor: f64,
    #[serde(default)]
    pub mix: MixConfig,
    pub nodes: Vec<NodeConfig>,
    pub sections: Vec<SectionConfig>,
    pub elements: Vec<ElementConfig>,
    #[serde(default)]
    pub loads: LoadsConfig,
    pub random_variables: BTreeMap<String, RandomVariableConfig>,
}

fn default_true() -> bool {
    true
}
fn default_years() -> u32 {
    50
}
fn default_time_step() -> f64 {
    1.0
}
fn default_simulations() -> u64 {
    10_000
}
fn default_threshold() -> f64 {
    0.5
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("ldmc-out")
}
fn default_substeps() -> usize {
    10
}
fn default_pit_factor() -> f64 {
    ldmc_core::corrosion::DEFAULT_PIT_FACTOR
}
fn default_aggregate_cement() -> f64 {
    5.0
}
fn default_aggregate_density() -> f64 {
    2560.0
}
fn default_cement_density() -> f64 {
    2500.0
}
fn default_water_density() -> f64 {
    1000.0
}
fn default_air_content() -> f64 {
    0.02
}
fn default_steel_modulus() -> f64 {
    200_000.0
}
fn default_yield_loss() -> f64 {
    0.5
}

/// Random variables every campaign needs.
pub const REQUIRED_VARIABLES: [&str; 11] = [
    "cover",
    "fc",
    "fy",
    "fsu",
    "load",
    "water_cement",
    "moisture",
    "temperature",
    "chloride_threshold",
    "surface_chloride",
    "co2",
];
const RATE_VARIABLES: [&str; 3] = ["corrosion_rate", "corrosion_rate_carbonation", "corrosion_rate_chloride"];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub simulations: Option<u64>,
    pub seed: Option<u64>,
    pub years: Option<u32>,
    pub corrosion: Option<CorrosionKind>,
    pub output_dir: Option<PathBuf>,
    pub time_step: Option<f64>,
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { path: path.into(), message: message.into() });
    }

    fn positive(&mut self, path: impl Into<String>, value: f64) {
        if !(value > 0.0 && value.is_finite()) {
            self.push(path, format!("must be positive, got {value}"));
        }
    }

    fn non_negative(&mut self, path: impl Into<String>, value: f64) {
        if !(value >= 0.0 && value.is_finite()) {
            self.push(path, format!("must be non-negative, got {value}"));
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: CampaignConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(v) = o.simulations {
            self.simulations = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.years {
            self.years = v;
        }
        if let Some(v) = o.corrosion {
            self.corrosion = v;
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.time_step {
            self.time_step = v;
        }
        self.validate()
    }

    /// Lists every violation found, not only the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut c = Checker { violations: Vec::new() };
        if self.years == 0 {
            c.push("years", "must be at least 1");
        }
        c.positive("time_step", self.time_step);
        if self.simulations == 0 {
            c.push("simulations", "must be at least 1");
        }
        if !(self.damage_threshold > 0.0 && self.damage_threshold < 1.0) {
            c.push("damage_threshold", "must lie in (0, 1)");
        }
        if self.load_substeps == 0 {
            c.push("load_substeps", "must be at least 1");
        }
        c.positive("steel.modulus", self.steel.modulus);
        if !(0.0..1.0).contains(&self.steel.yield_stress_loss) {
            c.push("steel.yield_stress_loss", "must lie in [0, 1)");
        }
        if let Some(ec) = self.concrete_modulus {
            c.positive("concrete_modulus", ec);
        }
        c.positive("pit_factor", self.pit_factor);
        c.positive("mix.aggregate_cement", self.mix.aggregate_cement);
        c.positive("mix.aggregate_density", self.mix.aggregate_density);
        c.positive("mix.cement_density", self.mix.cement_density);
        c.positive("mix.water_density", self.mix.water_density);
        c.non_negative("mix.air_content", self.mix.air_content);

        let mut node_ids = HashMap::new();
        for (k, n) in self.nodes.iter().enumerate() {
            if node_ids.insert(n.id, k).is_some() {
                c.push(format!("nodes[{k}].id"), format!("duplicate node id {}", n.id));
            }
            if !(n.x.is_finite() && n.y.is_finite()) {
                c.push(format!("nodes[{k}]"), "coordinates must be finite");
            }
        }
        if self.nodes.is_empty() {
            c.push("nodes", "at least one node is required");
        }

        let mut section_ids = HashMap::new();
        for (k, s) in self.sections.iter().enumerate() {
            if section_ids.insert(s.id.as_str(), k).is_some() {
                c.push(format!("sections[{k}].id"), format!("duplicate section id `{}`", s.id));
            }
            c.positive(format!("sections[{k}].width"), s.width);
            c.positive(format!("sections[{k}].height"), s.height);
            c.positive(format!("sections[{k}].bar_diameter"), s.bar_diameter);
            if s.bars_per_face == 0 {
                c.push(format!("sections[{k}].bars_per_face"), "must be at least 1");
            }
        }
        if self.sections.is_empty() {
            c.push("sections", "at least one section is required");
        }

        let mut element_ids = HashMap::new();
        for (k, e) in self.elements.iter().enumerate() {
            if element_ids.insert(e.id, k).is_some() {
                c.push(format!("elements[{k}].id"), format!("duplicate element id {}", e.id));
            }
            for (end, id) in e.nodes.iter().enumerate() {
                if !node_ids.contains_key(id) {
                    c.push(format!("elements[{k}].nodes[{end}]"), format!("unknown node {id}"));
                }
            }
            if e.nodes[0] == e.nodes[1] {
                c.push(format!("elements[{k}].nodes"), "element ends must differ");
            } else if let (Some(&a), Some(&b)) = (node_ids.get(&e.nodes[0]), node_ids.get(&e.nodes[1])) {
                let (na, nb) = (&self.nodes[a], &self.nodes[b]);
                if (na.x - nb.x).hypot(na.y - nb.y) <= 0.0 {
                    c.push(format!("elements[{k}].nodes"), "element has zero length");
                }
            }
            if !section_ids.contains_key(e.section.as_str()) {
                c.push(format!("elements[{k}].section"), format!("unknown section `{}`", e.section));
            }
        }
        if self.elements.is_empty() {
            c.push("elements", "at least one element is required");
        }

        for (group, loads) in [("permanent", &self.loads.permanent), ("variable", &self.loads.variable)] {
            for (k, l) in loads.iter().enumerate() {
                let path = format!("loads.{group}[{k}]");
                match node_ids.get(&l.node) {
                    None => c.push(format!("{path}.node"), format!("unknown node {}", l.node)),
                    Some(&n) => {
                        let r = &self.nodes[n].restraints;
                        for (value, dof, name) in [
                            (l.fx, Restraint::U, "fx"),
                            (l.fy, Restraint::W, "fy"),
                            (l.moment, Restraint::Theta, "moment"),
                        ] {
                            if !value.is_finite() {
                                c.push(format!("{path}.{name}"), "must be finite");
                            } else if value != 0.0 && r.contains(&dof) {
                                c.push(format!("{path}.{name}"), "acts on a restrained degree of freedom");
                            }
                        }
                    }
                }
            }
        }
        if self.loads.variable.is_empty() {
            c.push("loads.variable", "at least one variable load is required");
        }

        for (name, rv) in &self.random_variables {
            let path = format!("random_variables.{name}");
            if !REQUIRED_VARIABLES.contains(&name.as_str()) && !RATE_VARIABLES.contains(&name.as_str()) {
                c.push(&path, "unknown random variable");
            }
            if !rv.mean.is_finite() {
                c.push(format!("{path}.mean"), "must be finite");
            }
            if !(rv.cov >= 0.0 && rv.cov.is_finite()) {
                c.push(format!("{path}.cov"), format!("must be non-negative, got {}", rv.cov));
            }
            if rv.distribution == DistributionKind::Lognormal
                && rv.mean.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            {
                c.push(format!("{path}.mean"), "lognormal mean must be positive");
            }
        }
        for name in REQUIRED_VARIABLES {
            if !self.random_variables.contains_key(name) {
                c.push(format!("random_variables.{name}"), "missing");
            }
        }
        let has = |n: &str| self.random_variables.contains_key(n);
        if !has("corrosion_rate") && !(has("corrosion_rate_carbonation") && has("corrosion_rate_chloride")) {
            c.push(
                "random_variables.corrosion_rate",
                "missing (give it, or both corrosion_rate_carbonation and corrosion_rate_chloride)",
            );
        }

        if c.violations.is_empty() {
            if let Err(e) = self.to_campaign().and_then(|campaign| campaign.validate().map_err(|e| e.to_string())) {
                c.push("model", e);
            }
        }
        if c.violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(c.violations))
        }
    }

    fn spec(&self, name: &str) -> RandomVariableSpec {
        let fallback = match name {
            "corrosion_rate_carbonation" | "corrosion_rate_chloride" => "corrosion_rate",
            other => other,
        };
        let rv = self
            .random_variables
            .get(name)
            .or_else(|| self.random_variables.get(fallback))
            .expect("validated random variable");
        let distribution = match rv.distribution {
            DistributionKind::Normal => Distribution::Normal,
            DistributionKind::Lognormal => Distribution::Lognormal,
            DistributionKind::GumbelMax => Distribution::GumbelMax,
        };
        RandomVariableSpec::new(name, distribution, rv.mean, rv.cov)
    }

    /// Hinge id, element id, node id and coordinates, in hinge order.
    pub fn hinges(&self) -> Vec<HingeInfo> {
        let node = |id: u32| self.nodes.iter().find(|n| n.id == id).expect("validated node");
        self.elements
            .iter()
            .enumerate()
            .flat_map(|(e, el)| el.nodes.iter().enumerate().map(move |(end, &nid)| (e, el, end, nid)))
            .map(|(e, el, end, nid)| {
                let n = node(nid);
                HingeInfo { id: (2 * e + end + 1) as u32, element: el.id, node: nid, x: n.x, y: n.y }
            })
            .collect()
    }

    /// Builds the core campaign; assumes the field-level checks passed.
    pub fn to_campaign(&self) -> Result<Campaign, String> {
        let index: HashMap<u32, usize> = self.nodes.iter().enumerate().map(|(k, n)| (n.id, k)).collect();
        let sections: HashMap<&str, usize> =
            self.sections.iter().enumerate().map(|(k, s)| (s.id.as_str(), k)).collect();
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                id: n.id,
                x: n.x,
                y: n.y,
                fixed: [Restraint::U, Restraint::W, Restraint::Theta].map(|r| n.restraints.contains(&r)),
            })
            .collect();
        let connectivity: Vec<_> = self
            .elements
            .iter()
            .map(|e| (e.id, index[&e.nodes[0]], index[&e.nodes[1]], sections[e.section.as_str()]))
            .collect();
        let structure = Structure::new(nodes, &connectivity).map_err(|e| e.to_string())?;
        let load_vector = |loads: &[NodalLoad]| {
            let mut v = DVector::zeros(structure.free_dofs());
            for l in loads {
                let n = index[&l.node];
                for (dof, value) in [l.fx, l.fy, l.moment].into_iter().enumerate() {
                    if let Some(q) = structure.equation(n, dof) {
                        v[q] += value;
                    }
                }
            }
            v
        };
        let permanent_load = load_vector(&self.loads.permanent);
        let variable_load = load_vector(&self.loads.variable);
        let inputs = RandomInputs {
            cover: self.spec("cover"),
            fc: self.spec("fc"),
            fy: self.spec("fy"),
            fsu: self.spec("fsu"),
            load: self.spec("load"),
            water_cement: self.spec("water_cement"),
            moisture: self.spec("moisture"),
            temperature: self.spec("temperature"),
            corrosion_rate_carbonation: self.spec("corrosion_rate_carbonation"),
            corrosion_rate_chloride: self.spec("corrosion_rate_chloride"),
            chloride_threshold: self.spec("chloride_threshold"),
            surface_chloride: self.spec("surface_chloride"),
            co2: self.spec("co2"),
        };
        Ok(Campaign {
            structure,
            sections: self
                .sections
                .iter()
                .map(|s| SectionGeometry {
                    width: s.width,
                    height: s.height,
                    bars_per_face: s.bars_per_face,
                    bar_diameter: s.bar_diameter,
                })
                .collect(),
            exposed: self.elements.iter().map(|e| e.exposed).collect(),
            inputs,
            mix: MixDesign {
                aggregate_cement: self.mix.aggregate_cement,
                aggregate_density: self.mix.aggregate_density,
                cement_density: self.mix.cement_density,
                water_density: self.mix.water_density,
                air_content: self.mix.air_content,
            },
            steel_modulus: self.steel.modulus,
            concrete_modulus: self.concrete_modulus,
            degradation: SteelDegradation { yield_stress_loss: self.steel.yield_stress_loss },
            pit_factor: self.pit_factor,
            permanent_load,
            variable_load,
            corrosion: self.corrosion.into(),
            load_process: LoadProcess {
                resample_yearly: self.load_process.resample_yearly,
                printed_shift: self.load_process.printed_shift,
            },
            settings: LifeSettings {
                years: self.years,
                time_step: self.time_step,
                damage_threshold: self.damage_threshold,
                load_substeps: self.load_substeps,
                collapse_resolution: 0.1,
                order: match self.corrector_order {
                    OrderKind::DamageFirst => CorrectorOrder::DamageFirst,
                    OrderKind::PlasticFirst => CorrectorOrder::PlasticFirst,
                },
            },
            skip_uninitiated: self.skip_uninitiated,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HingeInfo {
    pub id: u32,
    pub element: u32,
    pub node: u32,
    pub x: f64,
    pub y: f64,
}
