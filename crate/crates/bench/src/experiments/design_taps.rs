use super::{need_isi, realize, Realized};
use crate::config::ExperimentConfig;
use crate::error::BenchResult;
use crate::output::{num, Table};
use chanshort::channel::n0_from_snr_db;
use chanshort::isi::write_taps;
use chanshort::rx::{IsiDesigner, RxMethod};
use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct TapRow {
    pub snr_db: f64,
    pub method: RxMethod,
    pub nu: usize,
    pub alpha: f64,
    pub rate_bits: f64,
    /// File name prefix of the `_v`, `_r` and `_g` tap files.
    pub stem: String,
}

/// Directory receiving the tap files of a run writing `csv`.
pub fn taps_dir(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}_taps"))
}

/// Spectral designs for every (SNR, α, method, ν); writes `V`, `R` and `G`
/// tap files when `out` is given.
pub fn design_taps(cfg: &ExperimentConfig, out: Option<&Path>) -> BenchResult<Vec<TapRow>> {
    need_isi(cfg)?;
    let Realized::Isi(taps) = realize(&cfg.channel, cfg.seed, 0) else { unreachable!("checked above") };
    let dir = out.map(taps_dir);
    if let Some(d) = &dir {
        std::fs::create_dir_all(d)?;
    }
    let mut rows = Vec::new();
    for &snr in &cfg.snr_db {
        let ds = IsiDesigner::new(&taps, n0_from_snr_db(snr), cfg.design)?;
        for &alpha in &cfg.alpha {
            for &method in &cfg.methods {
                for &nu in &cfg.nu {
                    let d = ds.design(method, nu, alpha)?;
                    let stem = format!("{method:?}_nu{nu}_snr{snr}_a{alpha}");
                    if let Some(dir) = &dir {
                        for (tag, s) in [("v", &d.v), ("r", &d.r), ("g", &d.g)] {
                            write_taps(&dir.join(format!("{stem}_{tag}.txt")), s)?;
                        }
                    }
                    rows.push(TapRow { snr_db: snr, method, nu, alpha, rate_bits: d.rate / LN_2, stem });
                }
            }
        }
    }
    Ok(rows)
}

pub fn taps_table(rows: &[TapRow]) -> Table {
    let mut t = Table::new(&["snr_db", "n0", "method", "nu", "alpha", "rate_bits", "files"]);
    for r in rows {
        t.push(vec![
            num(r.snr_db),
            num(n0_from_snr_db(r.snr_db)),
            r.method.label().into(),
            r.nu.to_string(),
            num(r.alpha),
            num(r.rate_bits),
            r.stem.clone(),
        ]);
    }
    t
}
