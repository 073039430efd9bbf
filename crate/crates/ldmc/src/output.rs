//! Result files. Column layouts are documented in `docs/output_schema.json`.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use ldmc_core::reliability::{PfCurve, PfEstimate};
use serde::Serialize;

use crate::config::HingeInfo;

/// `x` with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.8e}")
}

/// `x` rounded to 9 significant digits, for JSON output.
pub fn round9(x: f64) -> f64 {
    sig9(x).parse().unwrap_or(x)
}

pub fn curve_csv(curve: &PfCurve) -> String {
    let mut out = String::from("year,pf,stderr\n");
    for (k, (pf, se)) in curve.pf.iter().zip(&curve.std_err).enumerate() {
        out.push_str(&format!("{},{},{}\n", k + 1, sig9(*pf), sig9(*se)));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct MapEntry {
    pub element: u32,
    pub node: u32,
    pub x: f64,
    pub y: f64,
    pub pf: f64,
}

pub fn failure_map(hinges: &[HingeInfo], estimate: &PfEstimate) -> BTreeMap<u32, MapEntry> {
    hinges
        .iter()
        .zip(&estimate.hinges)
        .map(|(h, curve)| {
            (
                h.id,
                MapEntry { element: h.element, node: h.node, x: round9(h.x), y: round9(h.y), pf: round9(curve.last()) },
            )
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CampaignMeta {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub n_sims: u64,
    pub years: u32,
    pub time_step: f64,
    pub corrosion: String,
    pub workers: usize,
    pub wall_time_s: f64,
}

/// Writes every result file into `dir`.
pub fn write_all(dir: &Path, hinges: &[HingeInfo], estimate: &PfEstimate, meta: &CampaignMeta) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("pf_global.csv"), curve_csv(&estimate.global))?;
    for (h, curve) in hinges.iter().zip(&estimate.hinges) {
        fs::write(dir.join(format!("pf_hinge_{}.csv", h.id)), curve_csv(curve))?;
    }
    let map = serde_json::to_string_pretty(&failure_map(hinges, estimate))?;
    fs::write(dir.join("failure_map.json"), map + "\n")?;
    let meta = serde_json::to_string_pretty(meta)?;
    fs::write(dir.join("campaign_meta.json"), meta + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0228), "2.28000000e-2");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1.00000000e0");
        assert_eq!(round9(1.0 / 3.0), 0.333333333);
    }

    #[test]
    fn csv_layout() {
        let c = PfCurve { pf: vec![0.0, 0.5], std_err: vec![0.0, 0.05] };
        assert_eq!(curve_csv(&c), "year,pf,stderr\n1,0,0\n2,5.00000000e-1,5.00000000e-2\n");
    }
}
