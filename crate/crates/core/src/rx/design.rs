use crate::channel::{ChannelModel, PriorState};
use crate::error::{Error, Result};
use crate::gmi::{gmi_eval, map_params, CsParams};
use crate::isi::{autocorrelation, isi_method1, isi_method2, isi_method3, QuadratureGrid, SpectralSeries};
use crate::linalg::{Complex64, RShape, ZERO};
use crate::methods::{method1_optimize, method2_optimize, method3_design, OptimizerConfig};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Receiver front ends of the link simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RxMethod {
    I,
    IIa,
    IIb,
    IIc,
    III,
    LmmsePic,
    /// Full-memory BCJR on the true likelihood.
    Map,
}

impl RxMethod {
    pub fn label(self) -> &'static str {
        match self {
            RxMethod::I => "I",
            RxMethod::IIa => "II.a",
            RxMethod::IIb => "II.b",
            RxMethod::IIc => "II.c",
            RxMethod::III => "III",
            RxMethod::LmmsePic => "LMMSE-PIC",
            RxMethod::Map => "MAP",
        }
    }

    /// Trellis memory actually used for a requested `nu`.
    pub fn memory(self, nu: usize, full: usize) -> usize {
        match self {
            RxMethod::Map => full,
            RxMethod::LmmsePic => 0,
            _ => nu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignConfig {
    pub optimizer: OptimizerConfig,
    /// `N_T = N_R = tap_factor * L` for the spectral designs.
    pub tap_factor: usize,
    /// Quantization step of `α = mean(P)` for cached ISI designs.
    pub alpha_step: f64,
    pub alpha_max: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self { optimizer: OptimizerConfig::default(), tap_factor: 8, alpha_step: 0.01, alpha_max: 0.99 }
    }
}

/// Ungerboeck triple of a Toeplitz receiver.
#[derive(Debug, Clone)]
pub struct IsiDesign {
    pub v: SpectralSeries,
    pub r: SpectralSeries,
    pub g: SpectralSeries,
    pub nu: usize,
    /// Design rate in nats per symbol.
    pub rate: f64,
}

impl IsiDesign {
    /// `ŷ_k = Σ_n v_{k-n} y_n - Σ_j r_{k-j} x̂_j` for `k < x_hat.len()`.
    pub fn front_end(&self, y: &[Complex64], x_hat: &[Complex64]) -> Vec<Complex64> {
        let conv = |s: &SpectralSeries, x: &[Complex64], k: usize| -> Complex64 {
            let t = s.tap_len as i64;
            let lo = (k as i64 - t).max(0);
            let hi = (k as i64 + t).min(x.len() as i64 - 1);
            (lo..=hi).map(|n| s.get(k as i64 - n) * x[n as usize]).sum()
        };
        (0..x_hat.len()).map(|k| conv(&self.v, y, k) - conv(&self.r, x_hat, k)).collect()
    }
}

type DesignKey = (RxMethod, usize, u32);

/// Spectral designs for one ISI channel and noise level, cached by method,
/// memory and quantized `α`.
#[derive(Debug)]
pub struct IsiDesigner {
    h: SpectralSeries,
    taps: Vec<Complex64>,
    n0: f64,
    cfg: DesignConfig,
    grid: QuadratureGrid,
    cache: Mutex<HashMap<DesignKey, Arc<IsiDesign>>>,
}

impl IsiDesigner {
    pub fn new(taps: &[Complex64], n0: f64, cfg: DesignConfig) -> Result<Self> {
        if taps.is_empty() || !(n0 > 0.0) {
            return Err(Error::InvalidInput("ISI design needs taps and N0 > 0".into()));
        }
        if !(cfg.alpha_step > 0.0) || !(0.0..1.0).contains(&cfg.alpha_max) {
            return Err(Error::InvalidInput("alpha_step must be positive and alpha_max in [0, 1)".into()));
        }
        Ok(Self {
            h: SpectralSeries::causal(taps),
            taps: taps.to_vec(),
            n0,
            cfg,
            grid: QuadratureGrid::default(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn quantize(&self, alpha: f64) -> (u32, f64) {
        let a = alpha.clamp(0.0, self.cfg.alpha_max);
        let i = (a / self.cfg.alpha_step).round() as u32;
        (i, (i as f64 * self.cfg.alpha_step).min(self.cfg.alpha_max))
    }

    pub fn design(&self, method: RxMethod, nu: usize, alpha: f64) -> Result<Arc<IsiDesign>> {
        let l = self.taps.len();
        let nu = method.memory(nu, l - 1);
        let (idx, a) = self.quantize(alpha);
        let key = (method, nu, idx);
        if let Some(d) = self.cache.lock().expect("design cache poisoned").get(&key) {
            return Ok(d.clone());
        }
        let d = Arc::new(self.compute(method, nu, a)?);
        self.cache.lock().expect("design cache poisoned").entry(key).or_insert_with(|| d.clone());
        Ok(d)
    }

    fn compute(&self, method: RxMethod, nu: usize, alpha: f64) -> Result<IsiDesign> {
        let n = self.cfg.tap_factor * self.taps.len();
        let (h, n0, g, cfg) = (&self.h, self.n0, &self.grid, &self.cfg.optimizer);
        Ok(match method {
            RxMethod::Map => {
                let l = self.taps.len() - 1;
                let mut v = SpectralSeries::zeros(l);
                for (i, t) in self.taps.iter().enumerate() {
                    v.set(-(i as i64), t.conj() / n0);
                }
                let mut gs = autocorrelation(&self.taps);
                gs.coeffs.iter_mut().for_each(|c| *c /= n0);
                let hv = g.eval(h)?;
                let rate = g.mean(&hv.iter().map(|z| (1.0 + z.norm_sqr() / n0).ln()).collect::<Vec<_>>());
                IsiDesign { v, r: SpectralSeries::zeros(0), g: gs, nu: l, rate }
            }
            RxMethod::I => {
                let d = isi_method1(h, n0, alpha, nu, n, cfg, g)?;
                IsiDesign { v: d.v, r: d.r, g: d.g, nu, rate: d.rate }
            }
            RxMethod::IIa | RxMethod::IIb | RxMethod::IIc => {
                let nu_r = if method == RxMethod::IIc { nu } else { 0 };
                let d = isi_method2(h, n0, alpha, nu, nu_r, n, cfg, g)?;
                IsiDesign { v: d.v, r: d.r, g: d.g, nu, rate: d.rate }
            }
            RxMethod::III | RxMethod::LmmsePic => {
                let d = isi_method3(h, n0, alpha, nu, g)?;
                IsiDesign { v: d.v, r: d.r, g: d.g, nu, rate: d.rate }
            }
        })
    }
}

/// Finite-block design for one channel use; returns the parameters and their GMI.
pub fn mimo_design(
    method: RxMethod,
    ch: &ChannelModel,
    prior: &PriorState,
    nu: usize,
    cfg: &OptimizerConfig,
) -> Result<(CsParams, f64)> {
    let k = ch.k()?;
    let nu = method.memory(nu, k - 1).min(k - 1);
    let r = match method {
        RxMethod::Map => {
            let p = map_params(ch)?;
            let gmi = gmi_eval(ch, prior, &p)?;
            return Ok((p, gmi));
        }
        RxMethod::I => method1_optimize(ch, prior, nu, cfg)?,
        RxMethod::IIa => method2_optimize(ch, prior, nu, RShape::A, cfg)?,
        RxMethod::IIb => method2_optimize(ch, prior, nu, RShape::B, cfg)?,
        RxMethod::IIc => method2_optimize(ch, prior, nu, RShape::C, cfg)?,
        RxMethod::III | RxMethod::LmmsePic => method3_design(ch, prior, nu)?,
    };
    Ok((r.params, r.gmi))
}

/// `ŷ = V y - R x̂`.
pub fn mimo_front_end(p: &CsParams, y: &[Complex64], x_hat: &[Complex64]) -> Vec<Complex64> {
    let k = p.v.nrows();
    (0..k)
        .map(|i| {
            let a: Complex64 = (0..y.len()).map(|n| p.v[(i, n)] * y[n]).sum();
            let b: Complex64 = (0..x_hat.len()).map(|j| p.r[(i, j)] * x_hat[j]).fold(ZERO, |s, v| s + v);
            a - b
        })
        .collect()
}
