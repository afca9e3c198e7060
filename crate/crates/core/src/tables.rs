//! Embedded datasets: spectroscopic line tables, protected-band thresholds,
//! and link-budget defaults.
//!
//! Each dataset is a versioned CSV/JSON file compiled into the binary and
//! parsed once on first use. Setting the `COEX_DATA_DIR` environment variable
//! redirects loading to `$COEX_DATA_DIR/<file>` so a deployment can pin its
//! own dataset revisions without rebuilding.

use once_cell::sync::Lazy;
use serde::Deserialize;

use crate::linkbudget::ProtectedBand;

/// One oxygen line: center frequency plus the a1..a6 shape coefficients.
#[derive(Debug, Clone, Copy)]
pub struct OxygenLine {
    pub f0_ghz: f64,
    pub a: [f64; 6],
}

/// One water-vapour line: center frequency plus the b1..b6 shape coefficients.
#[derive(Debug, Clone, Copy)]
pub struct WaterLine {
    pub f0_ghz: f64,
    pub b: [f64; 6],
}

/// Table IV-style system defaults shared by the link-budget operations.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDefaults {
    pub version: String,
    pub tx_gain_max_dbi: f64,
    pub rx_gain_max_dbi: f64,
    pub satellite_gain_dbi_options: Vec<f64>,
    pub tx_power_dbw_options: Vec<f64>,
    pub carrier_frequency_ghz_options: Vec<f64>,
    pub noise_psd_dbw_hz: f64,
    pub modulation_orders: Vec<u32>,
    pub target_rate_bps: f64,
    pub mimo_stream_options: Vec<u32>,
    pub default_bandwidth_hz: f64,
}

fn load(name: &str, embedded: &'static str) -> String {
    match std::env::var("COEX_DATA_DIR") {
        Ok(dir) => {
            let path = std::path::Path::new(&dir).join(name);
            std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("cannot read dataset {}: {e}", path.display()))
        }
        Err(_) => embedded.to_string(),
    }
}

fn version_of(text: &str) -> String {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# version:"))
        .map(|v| v.trim().to_string())
        .unwrap_or_else(|| "unversioned".to_string())
}

fn numeric_rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .filter(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#') && l.starts_with(|c: char| c.is_ascii_digit())
        })
        .map(|l| l.split(',').map(str::trim).collect())
}

struct Datasets {
    oxygen: Vec<OxygenLine>,
    water: Vec<WaterLine>,
    bands: Vec<ProtectedBand>,
    defaults: LinkDefaults,
    version_tag: String,
}

static DATASETS: Lazy<Datasets> = Lazy::new(|| {
    let ox_text = load("p676_oxygen.csv", include_str!("../data/p676_oxygen.csv"));
    let wv_text = load("p676_water.csv", include_str!("../data/p676_water.csv"));
    let band_text = load(
        "protected_bands.csv",
        include_str!("../data/protected_bands.csv"),
    );
    let defaults_text = load("link_defaults.json", include_str!("../data/link_defaults.json"));

    let parse = |s: &str| -> f64 { s.parse().expect("malformed numeric field in dataset") };

    let oxygen: Vec<OxygenLine> = numeric_rows(&ox_text)
        .map(|f| OxygenLine {
            f0_ghz: parse(f[0]),
            a: [parse(f[1]), parse(f[2]), parse(f[3]), parse(f[4]), parse(f[5]), parse(f[6])],
        })
        .collect();
    let water: Vec<WaterLine> = numeric_rows(&wv_text)
        .map(|f| WaterLine {
            f0_ghz: parse(f[0]),
            b: [parse(f[1]), parse(f[2]), parse(f[3]), parse(f[4]), parse(f[5]), parse(f[6])],
        })
        .collect();
    assert_eq!(oxygen.len(), 44, "oxygen line table must hold 44 lines");
    assert_eq!(water.len(), 35, "water line table must hold 35 lines");

    let bands: Vec<ProtectedBand> = numeric_rows(&band_text)
        .map(|f| ProtectedBand {
            band_low_ghz: parse(f[0]),
            band_high_ghz: parse(f[1]),
            threshold_nadir_dbw: (!f[2].is_empty()).then(|| parse(f[2])),
            threshold_limb_dbw: (!f[3].is_empty()).then(|| parse(f[3])),
            lowest_satellite_altitude_km: parse(f[4]),
            satellite_name: f[5].to_string(),
        })
        .collect();
    for b in &bands {
        assert!(b.band_low_ghz < b.band_high_ghz, "inverted band edges");
        assert!(
            b.threshold_nadir_dbw.is_some() || b.threshold_limb_dbw.is_some(),
            "band without any threshold"
        );
    }

    let defaults: LinkDefaults =
        serde_json::from_str(&defaults_text).expect("malformed link_defaults.json");

    let version_tag = format!(
        "{};{};{};{}",
        version_of(&ox_text),
        version_of(&wv_text),
        version_of(&band_text),
        defaults.version
    );

    Datasets { oxygen, water, bands, defaults, version_tag }
});

/// Oxygen line table (44 lines).
pub fn oxygen_lines() -> &'static [OxygenLine] {
    &DATASETS.oxygen
}

/// Water-vapour line table (35 lines).
pub fn water_lines() -> &'static [WaterLine] {
    &DATASETS.water
}

/// Protected passive-sensing bands with their interference thresholds.
pub fn protected_bands() -> &'static [ProtectedBand] {
    &DATASETS.bands
}

/// System-parameter defaults.
pub fn link_defaults() -> &'static LinkDefaults {
    &DATASETS.defaults
}

/// Combined version tag of every loaded dataset, for output provenance.
pub fn dataset_version() -> &'static str {
    &DATASETS.version_tag
}
