use ldmc_core::corrosion::{CorrosionMode, DEFAULT_PIT_FACTOR};
use ldmc_core::frame::{Node, Structure};
use ldmc_core::nalgebra::DVector;
use ldmc_core::reliability::{
    estimate_pf, Campaign, Distribution, FailureTally, LoadProcess, MixDesign, RandomInputs, RandomVariableSpec,
    SectionGeometry,
};
use ldmc_core::section::SteelDegradation;
use ldmc_core::solver::LifeSettings;

fn spec(name: &str, distribution: Distribution, mean: f64, cov: f64) -> RandomVariableSpec {
    RandomVariableSpec::new(name, distribution, mean, cov)
}

fn inputs(load: f64) -> RandomInputs {
    use Distribution::*;
    RandomInputs {
        cover: spec("cover", Normal, 0.015, 0.15),
        fc: spec("fc", Normal, 38.0, 0.1),
        fy: spec("fy", Lognormal, 500.0, 0.1),
        fsu: spec("fsu", Lognormal, 550.0, 0.1),
        load: spec("load", GumbelMax, load, 0.1),
        water_cement: spec("water_cement", Normal, 0.5, 0.15),
        moisture: spec("moisture", Normal, 75.0, 0.25),
        temperature: spec("temperature", Normal, 20.0, 0.25),
        corrosion_rate_carbonation: spec("corrosion_rate", Lognormal, 0.431, 0.6),
        corrosion_rate_chloride: spec("corrosion_rate", Lognormal, 0.431, 0.6),
        chloride_threshold: spec("chloride_threshold", Normal, 0.5, 0.15),
        surface_chloride: spec("surface_chloride", Normal, 75.0, 0.25),
        co2: spec("co2", Normal, 2.0, 0.25),
    }
}

/// Simply supported 3 m beam loaded at its third points.
fn beam_campaign(load: f64, corrosion: CorrosionMode, years: u32, seed: u64) -> Campaign {
    let xs = [0.0, 1.0, 1.5, 2.0, 3.0];
    let nodes = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| Node { id: k as u32 + 1, x, y: 0.0, fixed: [k == 0, k == 0 || k == 4, false] })
        .collect();
    let structure = Structure::new(nodes, &[(1, 0, 1, 0), (2, 1, 2, 0), (3, 2, 3, 0), (4, 3, 4, 0)]).unwrap();
    let mut variable = DVector::zeros(structure.free_dofs());
    variable[structure.equation(1, 1).unwrap()] = -0.5;
    variable[structure.equation(3, 1).unwrap()] = -0.5;
    Campaign {
        permanent_load: DVector::zeros(structure.free_dofs()),
        variable_load: variable,
        structure,
        sections: vec![SectionGeometry { width: 0.15, height: 0.3, bars_per_face: 3, bar_diameter: 10.0 }],
        exposed: Vec::new(),
        inputs: inputs(load),
        mix: MixDesign::default(),
        steel_modulus: 200_000.0,
        concrete_modulus: None,
        degradation: SteelDegradation::default(),
        pit_factor: DEFAULT_PIT_FACTOR,
        corrosion,
        load_process: LoadProcess::default(),
        settings: LifeSettings { years, ..LifeSettings::default() },
        skip_uninitiated: false,
        seed,
    }
}

#[test]
fn campaign_validates() {
    beam_campaign(50.0, CorrosionMode::Chloride, 50, 1).validate().unwrap();
}

#[test]
fn split_ranges_merge_to_the_full_run() {
    let c = beam_campaign(75.0, CorrosionMode::Chloride, 20, 3);
    let whole = c.run_range(0..24).unwrap();
    let mut parts = c.run_range(0..7).unwrap();
    parts.merge(&c.run_range(7..24).unwrap());
    assert_eq!(whole, parts);
    assert_eq!(whole.n_simulations, 24);
    assert!(whole.global.last().copied().unwrap() > 0, "load too low to exercise failures");
}

#[test]
fn same_seed_same_tally_other_seed_other_draws() {
    let a = beam_campaign(75.0, CorrosionMode::Carbonation, 10, 5);
    let b = beam_campaign(75.0, CorrosionMode::Carbonation, 10, 5);
    assert_eq!(a.run_range(0..6).unwrap(), b.run_range(0..6).unwrap());
    let other = beam_campaign(75.0, CorrosionMode::Carbonation, 10, 6);
    assert_ne!(a.realization(0), other.realization(0));
    assert_eq!(a.realization(4), b.realization(4));
}

#[test]
fn cumulative_curves_never_decrease() {
    let c = beam_campaign(75.0, CorrosionMode::Chloride, 20, 9);
    let est = estimate_pf(&c.run_range(0..16).unwrap()).unwrap();
    for curve in std::iter::once(&est.global).chain(&est.hinges) {
        assert!(curve.pf.windows(2).all(|w| w[1] >= w[0]));
        assert!(curve.pf.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn light_loads_never_fail() {
    let c = beam_campaign(5.0, CorrosionMode::None, 10, 2);
    let tally = c.run_range(0..5).unwrap();
    let mut expected = FailureTally::new(10, 8);
    for _ in 0..5 {
        expected.record_survivor();
    }
    assert_eq!(tally, expected);
}

#[test]
fn corrosion_does_not_lower_the_failure_count() {
    let none = beam_campaign(70.0, CorrosionMode::None, 20, 4).run_range(0..12).unwrap();
    let chloride = beam_campaign(70.0, CorrosionMode::Chloride, 20, 4).run_range(0..12).unwrap();
    // Common random numbers: each sample sees the same load and materials.
    assert!(chloride.global.last() >= none.global.last());
}
