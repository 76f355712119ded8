use super::{need_mimo, realize, Realized};
use crate::config::ExperimentConfig;
use crate::error::BenchResult;
use crate::output::{num, Table};
use chanshort::channel::{n0_from_snr_db, ChannelModel, PriorState};
use chanshort::gmi::{ezf_params, gmi_eval, tmf_params};
use chanshort::linalg::{band, c64, eye, hpd_inverse, max_abs, RShape};
use chanshort::methods::{method2_optimize, method3_design};

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptRow {
    pub n0: f64,
    /// GMIs in nats per channel use.
    pub gmi_iic: f64,
    pub gmi_iii: f64,
    pub gmi_static: f64,
    pub gmi_ezf: f64,
    pub gmi_tmf: f64,
    /// `δ2` of the Method II.c optimum.
    pub delta2: f64,
    /// `max |[(N0 (I + G))^{-1} - (H^H H)^{-1}]_ν|`, relative to the limit.
    pub low_residual: f64,
    /// `max |[N0 G - H^H H]_ν|`, relative to the limit.
    pub high_residual: f64,
}

/// Method II.c and III against the EZF and TMF references over an N0 grid
/// (taken from `snr_db`), on realization 0 with `P = alpha[0] I` and
/// `ν = nu[0]`.
pub fn asympt_check(cfg: &ExperimentConfig) -> BenchResult<Vec<AsymptRow>> {
    need_mimo(cfg)?;
    let Realized::Mimo(h) = realize(&cfg.channel, cfg.seed, 0) else { unreachable!("checked above") };
    let k = h.ncols();
    let nu = cfg.nu[0].min(k - 1);
    let prior = PriorState::uniform(k, cfg.alpha[0]);
    let gram = h.adjoint() * &h;
    let gram_inv = hpd_inverse(&gram)?;
    let (lim_low, lim_high) = (band(&gram_inv, nu), band(&gram, nu));
    cfg.snr_db
        .iter()
        .map(|&snr| {
            let n0 = n0_from_snr_db(snr);
            let ch = ChannelModel::matrix(h.clone(), n0);
            let iic = method2_optimize(&ch, &prior, nu, RShape::C, &cfg.optimizer)?;
            let iii = method3_design(&ch, &prior, nu)?;
            let st = method2_optimize(&ch, &PriorState::none(k), nu, RShape::C, &cfg.optimizer)?;
            let none = PriorState::none(k);
            let g = &iic.params.g;
            let low = band(&hpd_inverse(&((eye(k) + g) * c64(n0, 0.0)))?, nu) - &lim_low;
            let high = band(&(g * c64(n0, 0.0)), nu) - &lim_high;
            Ok(AsymptRow {
                n0,
                gmi_iic: iic.gmi,
                gmi_iii: iii.gmi,
                gmi_static: st.gmi,
                gmi_ezf: gmi_eval(&ch, &none, &ezf_params(&ch, nu)?)?,
                gmi_tmf: gmi_eval(&ch, &none, &tmf_params(&ch, nu)?)?,
                delta2: iic.delta_term,
                low_residual: max_abs(&low) / max_abs(&lim_low),
                high_residual: max_abs(&high) / max_abs(&lim_high),
            })
        })
        .collect()
}

pub fn asympt_table(rows: &[AsymptRow]) -> Table {
    let mut t = Table::new(&[
        "n0",
        "gmi_iic",
        "gmi_iii",
        "gmi_static",
        "gmi_ezf",
        "gmi_tmf",
        "delta2",
        "low_residual",
        "high_residual",
    ]);
    for r in rows {
        t.push(
            [r.n0, r.gmi_iic, r.gmi_iii, r.gmi_static, r.gmi_ezf, r.gmi_tmf, r.delta2, r.low_residual, r.high_residual]
                .into_iter()
                .map(num)
                .collect(),
        );
    }
    t
}
