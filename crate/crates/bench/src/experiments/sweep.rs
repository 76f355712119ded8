use super::{realize, Realized};
use crate::config::ExperimentConfig;
use crate::error::BenchResult;
use crate::output::{num, Table};
use chanshort::channel::{n0_from_snr_db, PriorState};
use chanshort::linalg::{c64, hermitize, Cholesky, CMat};
use chanshort::rx::{mimo_design, IsiDesigner, RxMethod};
use rayon::prelude::*;
use std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub n0: f64,
    pub method: RxMethod,
    pub nu: usize,
    pub alpha: f64,
    /// Bits per channel use: per vector for matrix channels, per symbol for ISI.
    pub mean_gmi_bits: f64,
    pub stderr: f64,
    pub capacity_ref: f64,
}

/// `log2 det(I + H^H H / N0)`.
fn mimo_capacity(h: &CMat, n0: f64) -> BenchResult<f64> {
    let k = h.ncols();
    let a = CMat::identity(k, k) + h.adjoint() * h / c64(n0, 0.0);
    Ok(Cholesky::new(&hermitize(&a))?.logdet() / LN_2)
}

struct Sample {
    gmi: Vec<f64>,
    cap: Vec<f64>,
}

/// Ensemble mean of each design's GMI over the configured channel
/// realizations, for every (SNR, α, method, ν).
pub fn gmi_sweep(cfg: &ExperimentConfig) -> BenchResult<Vec<SweepRow>> {
    let combos: Vec<(usize, usize, RxMethod, usize)> = (0..cfg.snr_db.len())
        .flat_map(|s| {
            (0..cfg.alpha.len()).flat_map(move |a| {
                cfg.methods.iter().flat_map(move |&m| cfg.nu.iter().map(move |&nu| (s, a, m, nu)))
            })
        })
        .collect();
    let count = cfg.channel.realizations();
    let samples: Vec<Sample> = (0..count)
        .into_par_iter()
        .map(|r| -> BenchResult<Sample> {
            let real = realize(&cfg.channel, cfg.seed, r);
            let mut gmi = Vec::with_capacity(combos.len());
            let mut cap = Vec::with_capacity(cfg.snr_db.len());
            match &real {
                Realized::Mimo(h) => {
                    let k = h.ncols();
                    for &snr in &cfg.snr_db {
                        cap.push(mimo_capacity(h, n0_from_snr_db(snr))?);
                    }
                    for &(s, a, m, nu) in &combos {
                        let ch = real.channel(n0_from_snr_db(cfg.snr_db[s]));
                        let prior = PriorState::uniform(k, cfg.alpha[a]);
                        gmi.push(mimo_design(m, &ch, &prior, nu, &cfg.optimizer)?.1 / LN_2);
                    }
                }
                Realized::Isi(taps) => {
                    let designers = cfg
                        .snr_db
                        .iter()
                        .map(|&snr| IsiDesigner::new(taps, n0_from_snr_db(snr), cfg.design))
                        .collect::<chanshort::Result<Vec<_>>>()?;
                    for d in &designers {
                        cap.push(d.design(RxMethod::Map, 0, 0.0)?.rate / LN_2);
                    }
                    for &(s, a, m, nu) in &combos {
                        gmi.push(designers[s].design(m, nu, cfg.alpha[a])?.rate / LN_2);
                    }
                }
            }
            Ok(Sample { gmi, cap })
        })
        .collect::<BenchResult<_>>()?;
    let n = count as f64;
    let mean = |f: &dyn Fn(&Sample) -> f64| samples.iter().map(f).sum::<f64>() / n;
    Ok(combos
        .iter()
        .enumerate()
        .map(|(i, &(s, a, method, nu))| {
            let m = mean(&|x| x.gmi[i]);
            let stderr = if count > 1 {
                let var = samples.iter().map(|x| (x.gmi[i] - m).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            SweepRow {
                snr_db: cfg.snr_db[s],
                n0: n0_from_snr_db(cfg.snr_db[s]),
                method,
                nu,
                alpha: cfg.alpha[a],
                mean_gmi_bits: m,
                stderr,
                capacity_ref: mean(&|x| x.cap[s]),
            }
        })
        .collect())
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&["snr_db", "n0", "method", "nu", "alpha", "mean_gmi_bits", "stderr", "capacity_ref"]);
    for r in rows {
        t.push(vec![
            num(r.snr_db),
            num(r.n0),
            r.method.label().into(),
            r.nu.to_string(),
            num(r.alpha),
            num(r.mean_gmi_bits),
            num(r.stderr),
            num(r.capacity_ref),
        ]);
    }
    t
}
