use super::{need_isi, realize, Realized};
use crate::config::ExperimentConfig;
use crate::error::BenchResult;
use crate::output::{num, Table};
use chanshort::channel::n0_from_snr_db;
use chanshort::isi::{check_prop8, isi_method2, spectral_mse, QuadratureGrid, SpectralSeries};
use chanshort::linalg::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Prop8Row {
    pub alpha: f64,
    pub k: i64,
    /// Coefficient of `V H`.
    pub a: Complex64,
    /// Coefficient of `R`.
    pub b: Complex64,
    /// `|k| > ν + ν_R`, where the two are expected to agree.
    pub equal_flag: bool,
}

/// Coefficients of `V H` and `R` of the Method II.c design (`ν_R = ν`) for
/// every α, at `snr_db[0]` and `ν = nu[0]`.
pub fn prop8_trace(cfg: &ExperimentConfig) -> BenchResult<Vec<Prop8Row>> {
    need_isi(cfg)?;
    let Realized::Isi(taps) = realize(&cfg.channel, cfg.seed, 0) else { unreachable!("checked above") };
    let h = SpectralSeries::causal(&taps);
    let n0 = n0_from_snr_db(cfg.snr_db[0]);
    let nu = cfg.nu[0];
    let n_r = cfg.design.tap_factor * taps.len();
    let grid = QuadratureGrid::default();
    let mut rows = Vec::new();
    for &alpha in &cfg.alpha {
        let d = isi_method2(&h, n0, alpha, nu, nu, n_r, &cfg.optimizer, &grid)?;
        let mse = spectral_mse(&h, n0, alpha, &grid)?;
        let m = check_prop8(&mse, &d.g, &d.r, nu, nu, &grid)?;
        for (i, &k) in m.lags.iter().enumerate() {
            rows.push(Prop8Row { alpha, k, a: m.a[i], b: m.b[i], equal_flag: k.unsigned_abs() as usize > 2 * nu });
        }
    }
    Ok(rows)
}

pub fn prop8_table(rows: &[Prop8Row]) -> Table {
    let mut t = Table::new(&["alpha", "k", "a_k_re", "a_k_im", "b_k_re", "b_k_im", "equal_flag"]);
    for r in rows {
        t.push(vec![num(r.alpha), r.k.to_string(), num(r.a.re), num(r.a.im), num(r.b.re), num(r.b.im), r.equal_flag.to_string()]);
    }
    t
}
