use super::{need_mimo, realize, Realized};
use crate::config::ExperimentConfig;
use crate::error::BenchResult;
use crate::output::{num, Table};
use chanshort::channel::{n0_from_snr_db, permutation_search, permute_columns, ChannelModel, PriorState};
use chanshort::linalg::CMat;
use chanshort::rx::mimo_design;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct PermRow {
    pub realization: usize,
    /// Nats per channel use in the given column order.
    pub identity_gmi: f64,
    pub permuted_gmi: f64,
    pub order: Vec<usize>,
}

/// Design GMI before and after reordering the channel columns, for every
/// realization, at `snr_db[0]`, `P = alpha[0] I` and `ν = nu[0]`.
pub fn perm_search(cfg: &ExperimentConfig) -> BenchResult<Vec<PermRow>> {
    need_mimo(cfg)?;
    let n0 = n0_from_snr_db(cfg.snr_db[0]);
    let (method, nu, alpha) = (cfg.perm.method, cfg.nu[0], cfg.alpha[0]);
    (0..cfg.channel.realizations())
        .into_par_iter()
        .map(|r| {
            let Realized::Mimo(h) = realize(&cfg.channel, cfg.seed, r) else { unreachable!("checked above") };
            let k = h.ncols();
            let gmi = |hp: &CMat| {
                mimo_design(method, &ChannelModel::matrix(hp.clone(), n0), &PriorState::uniform(k, alpha), nu, &cfg.optimizer)
                    .map(|(_, g)| g)
            };
            let order = permutation_search(&h, nu, cfg.perm.mode, &gmi)?;
            Ok(PermRow { realization: r, identity_gmi: gmi(&h)?, permuted_gmi: gmi(&permute_columns(&h, &order))?, order })
        })
        .collect()
}

pub fn perm_table(rows: &[PermRow]) -> Table {
    let mut t = Table::new(&["realization", "identity_gmi", "permuted_gmi", "order"]);
    for r in rows {
        let order: Vec<String> = r.order.iter().map(usize::to_string).collect();
        t.push(vec![r.realization.to_string(), num(r.identity_gmi), num(r.permuted_gmi), order.join(" ")]);
    }
    t
}
