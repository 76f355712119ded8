//! The batch experiments. Every experiment is a pure function of its config:
//! realization `r` of a random ensemble and link block `b` draw their
//! randomness from seeds derived from `(config.seed, r)` and
//! `(config.seed, b)`, so results do not depend on the thread count.

mod asympt;
mod design_taps;
mod link;
mod perm;
mod prop8;
mod sweep;

pub use asympt::{asympt_check, asympt_table, AsymptRow};
pub use design_taps::{design_taps, TapRow};
pub use link::{link_sim, link_table, trace_path, LinkPoint, TraceLine};
pub use perm::{perm_search, perm_table, PermRow};
pub use prop8::{prop8_table, prop8_trace, Prop8Row};
pub use sweep::{gmi_sweep, sweep_table, SweepRow};

use crate::config::{ChannelSpec, ExperimentConfig, ExperimentKind};
use crate::error::{BenchError, BenchResult};
use crate::output::Table;
use chanshort::channel::{make_random_mimo, preset_taps, random_isi_taps, ChannelModel};
use chanshort::linalg::{c64, from_real_rows, CMat, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// Seed of item `index` in the stream of `seed`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

#[derive(Debug, Clone)]
pub enum Realized {
    Mimo(CMat),
    Isi(Vec<Complex64>),
}

impl Realized {
    pub fn channel(&self, n0: f64) -> ChannelModel {
        match self {
            Realized::Mimo(h) => ChannelModel::matrix(h.clone(), n0),
            Realized::Isi(t) => ChannelModel::isi(t.clone(), n0),
        }
    }
}

/// Realization `r` of the configured channel.
pub fn realize(spec: &ChannelSpec, seed: u64, r: usize) -> Realized {
    let real = |t: &[f64]| t.iter().map(|&v| c64(v, 0.0)).collect();
    match spec {
        ChannelSpec::Preset { name } => Realized::Isi(real(&preset_taps(*name))),
        ChannelSpec::Taps { taps } => Realized::Isi(real(taps)),
        ChannelSpec::Matrix { rows } => {
            let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
            Realized::Mimo(from_real_rows(&refs))
        }
        ChannelSpec::RandomMimo { n, k, .. } => {
            let ch = make_random_mimo(*n, *k, mix_seed(seed, r as u64));
            Realized::Mimo(ch.h().expect("matrix channel").clone())
        }
        ChannelSpec::RandomIsi { taps, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, r as u64));
            Realized::Isi(random_isi_taps(&mut rng, *taps))
        }
    }
}

pub(crate) fn need_isi(cfg: &ExperimentConfig) -> BenchResult<()> {
    if cfg.channel.is_isi() {
        Ok(())
    } else {
        Err(BenchError::Config(format!("{} needs an ISI channel", cfg.experiment.name())))
    }
}

pub(crate) fn need_mimo(cfg: &ExperimentConfig) -> BenchResult<()> {
    if cfg.channel.is_isi() {
        Err(BenchError::Config(format!("{} needs a matrix channel", cfg.experiment.name())))
    } else {
        Ok(())
    }
}

/// Runs the configured experiment. `out` is the CSV path; link-sim keeps its
/// block trace next to it and design-taps writes its tap files next to it.
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> BenchResult<Table> {
    Ok(match cfg.experiment {
        ExperimentKind::GmiSweep => sweep_table(&gmi_sweep(cfg)?),
        ExperimentKind::AsymptCheck => asympt_table(&asympt_check(cfg)?),
        ExperimentKind::LinkSim => link_table(&link_sim(cfg, out.map(trace_path).as_deref())?),
        ExperimentKind::Prop8Trace => prop8_table(&prop8_trace(cfg)?),
        ExperimentKind::PermSearch => perm_table(&perm_search(cfg)?),
        ExperimentKind::DesignTaps => design_taps::taps_table(&design_taps(cfg, out)?),
    })
}
