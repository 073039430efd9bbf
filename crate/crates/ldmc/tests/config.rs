use std::path::{Path, PathBuf};

use ldmc::config::{CampaignConfig, ConfigError, CorrosionKind, Overrides};
use serde_json::{json, Value};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn beam_json() -> Value {
    serde_json::from_str(&std::fs::read_to_string(config_path("beam.json")).unwrap()).unwrap()
}

fn violations(value: &Value) -> Vec<String> {
    match CampaignConfig::from_json(&value.to_string()) {
        Err(ConfigError::Invalid(v)) => v.into_iter().map(|v| v.path).collect(),
        other => panic!("expected validation errors, got {other:?}"),
    }
}

#[test]
fn shipped_configs_are_valid() {
    for name in ["beam.json", "beam_text_load.json", "frame.json", "frame_text_load.json"] {
        let cfg = CampaignConfig::load(&config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        cfg.to_campaign().unwrap();
    }
}

#[test]
fn frame_hinges_follow_element_order() {
    let cfg = CampaignConfig::load(&config_path("frame.json")).unwrap();
    let hinges = cfg.hinges();
    assert_eq!(hinges.len(), 12);
    let at = |id: u32| hinges.iter().find(|h| h.id == id).map(|h| (h.x, h.y)).unwrap();
    // Fixed bases.
    assert_eq!(at(1), (0.0, 0.0));
    assert_eq!(at(10), (3.5, 0.0));
    // Roof-level column tops.
    assert_eq!(at(4), (0.0, 3.8));
    assert_eq!(at(7), (3.5, 3.8));
}

#[test]
fn beam_variable_pattern_sums_to_one_total_load() {
    let campaign = CampaignConfig::load(&config_path("beam.json")).unwrap().to_campaign().unwrap();
    assert!((campaign.variable_load.sum() + 1.0).abs() < 1e-12);
}

#[test]
fn unknown_keys_are_rejected() {
    let mut v = beam_json();
    v["simulatoins"] = json!(10);
    assert!(matches!(CampaignConfig::from_json(&v.to_string()), Err(ConfigError::Parse(_))));
}

#[test]
fn every_violation_is_reported() {
    let mut v = beam_json();
    v["sections"][0]["width"] = json!(-0.1);
    v["elements"][1]["nodes"] = json!([2, 42]);
    v["random_variables"].as_object_mut().unwrap().remove("fc");
    v["random_variables"]["fy"]["cov"] = json!(-1.0);
    let paths = violations(&v);
    for expected in ["sections[0].width", "elements[1].nodes[1]", "random_variables.fc", "random_variables.fy.cov"] {
        assert!(paths.iter().any(|p| p == expected), "{expected} missing from {paths:?}");
    }
}

#[test]
fn loads_on_supports_are_rejected() {
    let mut v = beam_json();
    v["loads"]["variable"][0]["node"] = json!(1);
    assert_eq!(violations(&v), ["loads.variable[0].fy"]);
}

#[test]
fn corrosion_rate_can_be_split_by_mechanism() {
    let mut v = beam_json();
    let rate = v["random_variables"]["corrosion_rate"].clone();
    let vars = v["random_variables"].as_object_mut().unwrap();
    vars.remove("corrosion_rate");
    vars.insert("corrosion_rate_chloride".into(), rate.clone());
    assert_eq!(violations(&v), ["random_variables.corrosion_rate"]);
    v["random_variables"]["corrosion_rate_carbonation"] = rate;
    CampaignConfig::from_json(&v.to_string()).unwrap();
}

#[test]
fn mechanism_free_frame_is_rejected() {
    let mut v = beam_json();
    v["nodes"][4]["restraints"] = json!([]);
    assert_eq!(violations(&v), ["model"]);
}

#[test]
fn overrides_take_precedence_and_are_checked() {
    let mut cfg = CampaignConfig::load(&config_path("beam.json")).unwrap();
    cfg.apply(&Overrides {
        simulations: Some(12),
        seed: Some(3),
        corrosion: Some(CorrosionKind::Carbonation),
        years: Some(20),
        ..Overrides::default()
    })
    .unwrap();
    assert_eq!((cfg.simulations, cfg.seed, cfg.years), (12, 3, 20));
    assert_eq!(cfg.corrosion, CorrosionKind::Carbonation);
    let err = cfg.apply(&Overrides { time_step: Some(0.0), ..Overrides::default() }).unwrap_err();
    assert!(err.to_string().contains("time_step"));
}

#[test]
fn corrosion_names_round_trip() {
    for kind in [CorrosionKind::None, CorrosionKind::Chloride, CorrosionKind::Carbonation] {
        assert_eq!(kind.to_string().parse::<CorrosionKind>().unwrap(), kind);
    }
    assert!("salt".parse::<CorrosionKind>().is_err());
}
