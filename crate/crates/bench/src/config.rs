//! Experiment configuration, read from JSON.
//!
//! SNR is `10 log10(1 / N0)` under unit symbol energy and unit channel
//! power; every CSV also reports `n0` itself.

use crate::error::BenchError;
use chanshort::channel::{Preset, PermutationMode};
use chanshort::methods::OptimizerConfig;
use chanshort::rx::{DesignConfig, RxMethod, TxConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GmiSweep,
    AsymptCheck,
    LinkSim,
    Prop8Trace,
    PermSearch,
    DesignTaps,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GmiSweep => "gmi-sweep",
            ExperimentKind::AsymptCheck => "asympt-check",
            ExperimentKind::LinkSim => "link-sim",
            ExperimentKind::Prop8Trace => "prop8-trace",
            ExperimentKind::PermSearch => "perm-search",
            ExperimentKind::DesignTaps => "design-taps",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Preset { name: Preset },
    /// Real ISI taps.
    Taps { taps: Vec<f64> },
    /// Real `N x K` matrix given row by row.
    Matrix { rows: Vec<Vec<f64>> },
    /// IID `CN(0, 1/K)` entries, `count` realizations.
    RandomMimo { n: usize, k: usize, count: usize },
    /// IID complex Gaussian taps with unit total power, `count` realizations.
    RandomIsi { taps: usize, count: usize },
}

impl ChannelSpec {
    pub fn realizations(&self) -> usize {
        match self {
            ChannelSpec::RandomMimo { count, .. } | ChannelSpec::RandomIsi { count, .. } => *count,
            _ => 1,
        }
    }

    pub fn is_isi(&self) -> bool {
        matches!(self, ChannelSpec::Preset { .. } | ChannelSpec::Taps { .. } | ChannelSpec::RandomIsi { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSettings {
    pub tx: TxConfig,
    pub global_iters: usize,
    pub ext_scale: f64,
    pub scale_both: bool,
    pub max_log: bool,
    pub freeze_after: Option<usize>,
    /// Block budget per (SNR, method, ν) point.
    pub blocks: usize,
    /// Budget used with `--full-scale`.
    pub full_scale_blocks: usize,
    /// A point stops once this many final-iteration block errors are seen.
    pub max_block_errors: usize,
    /// Blocks simulated between stopping checks.
    pub chunk: usize,
}

impl Default for LinkSettings {
    fn default() -> Self {
        Self {
            tx: TxConfig::default(),
            global_iters: 3,
            ext_scale: 0.6,
            scale_both: true,
            max_log: false,
            freeze_after: None,
            blocks: 300,
            full_scale_blocks: 10_000,
            max_block_errors: 100,
            chunk: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PermSettings {
    pub mode: PermutationMode,
    /// Design method scored for each column order.
    pub method: RxMethod,
}

impl Default for PermSettings {
    fn default() -> Self {
        Self { mode: PermutationMode::EnergyBased, method: RxMethod::IIc }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub channel: ChannelSpec,
    #[serde(default = "default_snr")]
    pub snr_db: Vec<f64>,
    /// Prior quality grid, `P = αI`.
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<RxMethod>,
    #[serde(default = "default_nu")]
    pub nu: Vec<usize>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub design: DesignConfig,
    #[serde(default)]
    pub link: LinkSettings,
    #[serde(default)]
    pub perm: PermSettings,
    #[serde(default)]
    pub seed: u64,
}

fn default_snr() -> Vec<f64> {
    vec![10.0]
}

fn default_alpha() -> Vec<f64> {
    vec![0.0]
}

fn default_methods() -> Vec<RxMethod> {
    vec![RxMethod::IIc]
}

fn default_nu() -> Vec<usize> {
    vec![1]
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| BenchError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.into()));
        if self.snr_db.is_empty() || self.alpha.is_empty() || self.methods.is_empty() || self.nu.is_empty() {
            return bad("snr_db, alpha, methods and nu must be non-empty");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_db entries must be finite");
        }
        if self.alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return bad("alpha entries must lie in [0, 1]");
        }
        if self.channel.realizations() == 0 {
            return bad("channel ensemble needs count >= 1");
        }
        match &self.channel {
            ChannelSpec::Taps { taps } if taps.is_empty() => return bad("taps must be non-empty"),
            ChannelSpec::Matrix { rows } => {
                let k = rows.first().map_or(0, Vec::len);
                if k == 0 || rows.iter().any(|r| r.len() != k) {
                    return bad("matrix rows must be non-empty and of equal length");
                }
            }
            ChannelSpec::RandomMimo { n, k, .. } if *n == 0 || *k == 0 => return bad("n and k must be positive"),
            ChannelSpec::RandomIsi { taps, .. } if *taps == 0 => return bad("taps must be positive"),
            _ => {}
        }
        self.optimizer.validate().map_err(|e| BenchError::Config(e.to_string()))?;
        let l = &self.link;
        if l.global_iters == 0 || l.blocks == 0 || l.chunk == 0 || l.max_block_errors == 0 {
            return bad("link global_iters, blocks, chunk and max_block_errors must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let text = r#"{
            "experiment": "link-sim",
            "channel": {"preset": {"name": "ProakisB"}},
            "snr_db": [6.5, 7.25],
            "methods": ["Map", "IIc", "LmmsePic"],
            "link": {"blocks": 40, "tx": {"constellation": "Qpsk", "channel_interleaver_seed": 3,
                "code": {"kind": "Turbo", "info_bits": 256, "rate": 0.665, "interleaver_seed": 2, "iterations": 8, "max_log": false}}},
            "seed": 11
        }"#;
        let a = ExperimentConfig::parse(text).unwrap();
        let b = ExperimentConfig::parse(&a.to_json()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.link.blocks, 40);
        assert_eq!(a.link.max_block_errors, 100);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"experiment": "gmi-sweep", "channel": {"taps": {"taps": [1.0]}}, "snr": [1]}"#;
        let e = ExperimentConfig::parse(text).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        let nested = r#"{"experiment": "gmi-sweep", "channel": {"taps": {"taps": [1.0]}}, "optimizer": {"steps": 3}}"#;
        assert!(ExperimentConfig::parse(nested).is_err());
    }

    #[test]
    fn empty_grids_are_rejected() {
        let text = r#"{"experiment": "gmi-sweep", "channel": {"taps": {"taps": [1.0]}}, "alpha": []}"#;
        assert!(matches!(ExperimentConfig::parse(text), Err(BenchError::Config(_))));
    }
}
