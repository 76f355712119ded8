use super::code::{CodeConfig, OuterCode};
use super::design::{mimo_design, mimo_front_end, DesignConfig, IsiDesign, IsiDesigner, RxMethod};
use super::interleave::Interleaver;
use super::lmmse::lmmse_pic_demodulate;
use super::trellis::{bcjr_demodulate, trellis_app, BandedTrellis, TrellisInput, TrellisSpec};
use crate::channel::{complex_gaussian, priors_from_llrs, random_mimo_matrix, ChannelKind, ChannelModel, Constellation, LLR_CLIP};
use crate::error::{Error, Result};
use crate::gmi::CsParams;
use crate::linalg::{CMat, CVec, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxConfig {
    pub constellation: Constellation,
    pub code: CodeConfig,
    pub channel_interleaver_seed: u64,
    /// Draw a fresh `N x K` matrix for every channel use (matrix channels only).
    #[serde(default)]
    pub fast_fading: bool,
}

impl Default for TxConfig {
    fn default() -> Self {
        Self { constellation: Constellation::Qpsk, code: CodeConfig::default(), channel_interleaver_seed: 7, fast_fading: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverConfig {
    pub method: RxMethod,
    pub nu: usize,
    pub global_iters: usize,
    /// Extrinsic LLR scaling at the demodulator/decoder boundary.
    pub ext_scale: f64,
    /// Also scale the decoder-to-demodulator direction.
    pub scale_both: bool,
    pub max_log: bool,
    /// Keep the parameters designed in this iteration for all later ones.
    pub freeze_after: Option<usize>,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            method: RxMethod::IIc,
            nu: 1,
            global_iters: 3,
            ext_scale: 0.6,
            scale_both: true,
            max_log: false,
            freeze_after: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub p_mean: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Design objective in nats per symbol.
    pub design_gmi: f64,
    pub llr_mean_abs: f64,
    /// Fraction of demodulator LLRs whose sign disagrees with the sent bit.
    pub llr_sign_errors: f64,
    pub bit_errors: usize,
    pub block_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub seed: u64,
    pub method: RxMethod,
    pub nu: usize,
    pub records: Vec<IterationRecord>,
}

/// Transmitter, channel and the parts of the receiver shared across blocks.
#[derive(Debug)]
pub struct Link {
    pub ch: ChannelModel,
    pub tx: TxConfig,
    pub design: DesignConfig,
    code: OuterCode,
    chan_il: Interleaver,
    designer: Option<IsiDesigner>,
}

/// One transmitted block: information bits, interleaved code bits and the
/// received samples, one vector per channel use.
struct Block {
    info: Vec<u8>,
    sent: Vec<u8>,
    uses: Vec<(CMat, Vec<Complex64>)>,
}

enum Frozen {
    Isi(Arc<IsiDesign>),
    Mimo(Vec<CsParams>),
}

impl Link {
    pub fn new(ch: ChannelModel, tx: TxConfig, design: DesignConfig) -> Result<Self> {
        let m = tx.constellation.bits_per_symbol()?;
        let (multiple, designer) = match &ch.kind {
            ChannelKind::IsiTaps(t) => (m, Some(IsiDesigner::new(t, ch.n0, design)?)),
            ChannelKind::FiniteMatrix(h) => (m * h.ncols(), None),
        };
        let code = OuterCode::new(tx.code, multiple)?;
        let chan_il = Interleaver::random(code.coded_len(), tx.channel_interleaver_seed);
        let ch = ch.with_constellation(tx.constellation);
        Ok(Self { ch, tx, design, code, chan_il, designer })
    }

    pub fn code(&self) -> &OuterCode {
        &self.code
    }

    pub fn symbols(&self) -> usize {
        self.code.coded_len() / self.tx.constellation.bits_per_symbol().expect("checked in new")
    }

    fn transmit(&self, seed: u64) -> Result<Block> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u8> = (0..self.tx.code.info_bits).map(|_| rng.gen_range(0..2u8)).collect();
        let sent = self.chan_il.interleave(&self.code.encode(&info)?);
        let x = self.tx.constellation.modulate(&sent)?;
        let n0 = self.ch.n0;
        let uses = match &self.ch.kind {
            ChannelKind::IsiTaps(t) => {
                let n = x.len() + t.len() - 1;
                let y = (0..n)
                    .map(|i| {
                        let s: Complex64 = t.iter().enumerate().filter(|(l, _)| i >= *l && i - l < x.len()).map(|(l, h)| h * x[i - l]).sum();
                        s + complex_gaussian(&mut rng, n0)
                    })
                    .collect();
                vec![(CMat::zeros(0, 0), y)]
            }
            ChannelKind::FiniteMatrix(h) => {
                let (nr, k) = h.shape();
                let count = x.len() / k;
                let hs: Vec<CMat> =
                    (0..count).map(|_| if self.tx.fast_fading { random_mimo_matrix(&mut rng, nr, k) } else { h.clone() }).collect();
                hs.into_iter()
                    .enumerate()
                    .map(|(u, hu)| {
                        let yu = &hu * CVec::from_column_slice(&x[u * k..(u + 1) * k]);
                        let y = yu.iter().map(|v| v + complex_gaussian(&mut rng, n0)).collect();
                        (hu, y)
                    })
                    .collect()
            }
        };
        Ok(Block { info, sent, uses })
    }
}

fn clip(v: f64) -> f64 {
    v.clamp(-LLR_CLIP, LLR_CLIP)
}

/// Runs the receiver of `rx` on the block generated from `seed`. Blocks with
/// equal seeds carry the same bits and noise for every receiver.
pub fn run_iterative_receiver(link: &Link, rx: &ReceiverConfig, seed: u64) -> Result<IterationTrace> {
    if rx.global_iters == 0 {
        return Err(Error::InvalidInput("at least one global iteration is needed".into()));
    }
    let block = link.transmit(seed)?;
    let c = link.tx.constellation;
    let m = c.bits_per_symbol()?;
    let n_bits = block.sent.len();
    let mut priors = vec![0.0; n_bits];
    let mut frozen: Option<Frozen> = None;
    let mut records = Vec::with_capacity(rx.global_iters);
    for it in 1..=rx.global_iters {
        let prior = priors_from_llrs(&priors, c)?;
        let keep = rx.freeze_after.is_some_and(|f| it > f) && frozen.is_some();
        let (ext, design_gmi) = match &link.designer {
            Some(ds) => {
                let d = match (&frozen, keep) {
                    (Some(Frozen::Isi(d)), true) => d.clone(),
                    _ => ds.design(rx.method, rx.nu, prior.alpha())?,
                };
                let y_hat = d.front_end(&block.uses[0].1, &prior.x_hat);
                let g = BandedTrellis::toeplitz(&d.g, y_hat.len(), d.nu);
                let spec = TrellisSpec { max_log: rx.max_log, ..TrellisSpec::new(c, d.nu) };
                let ext = trellis_app(TrellisInput::Ungerboeck { y_hat: &y_hat, g: &g }, &spec, &priors)?.extrinsic;
                let rate = d.rate;
                frozen = Some(Frozen::Isi(d));
                (ext, rate)
            }
            None => {
                let k = link.ch.h()?.ncols();
                let mut ext = Vec::with_capacity(n_bits);
                let mut params = Vec::with_capacity(block.uses.len());
                let mut gmi = 0.0;
                for (u, (hu, y)) in block.uses.iter().enumerate() {
                    let bits = &priors[u * k * m..(u + 1) * k * m];
                    let pu = priors_from_llrs(bits, c)?;
                    let chu = ChannelModel::matrix(hu.clone(), link.ch.n0).with_constellation(c);
                    let p = match (&frozen, keep) {
                        (Some(Frozen::Mimo(ps)), true) => ps[u].clone(),
                        _ => {
                            let (p, g) = mimo_design(rx.method, &chu, &pu, rx.nu, &link.design.optimizer)?;
                            gmi += g;
                            p
                        }
                    };
                    if rx.method == RxMethod::LmmsePic {
                        ext.extend(lmmse_pic_demodulate(y, &chu, bits)?);
                    } else {
                        let nu = rx.method.memory(rx.nu, k - 1).min(k - 1);
                        let y_hat = mimo_front_end(&p, y, &pu.x_hat);
                        let spec = TrellisSpec { max_log: rx.max_log, ..TrellisSpec::new(c, nu) };
                        ext.extend(bcjr_demodulate(&y_hat, &p, &spec, bits)?);
                    }
                    params.push(p);
                }
                if !keep {
                    frozen = Some(Frozen::Mimo(params));
                }
                (ext, gmi / (block.uses.len() * k) as f64)
            }
        };
        let ext: Vec<f64> = ext.into_iter().map(clip).collect();
        let llr_mean_abs = ext.iter().map(|v| v.abs()).sum::<f64>() / n_bits as f64;
        let sign_err = ext.iter().zip(&block.sent).filter(|(l, &b)| (**l < 0.0) != (b == 1)).count();
        let dec_in: Vec<f64> = link.chan_il.deinterleave(&ext).iter().map(|v| v * rx.ext_scale).collect();
        let out = link.code.decode(&dec_in)?;
        let bit_errors = out.bits.iter().zip(&block.info).filter(|(a, b)| a != b).count();
        records.push(IterationRecord {
            iteration: it,
            p_mean: prior.alpha(),
            p_min: prior.p_diag.iter().cloned().fold(f64::INFINITY, f64::min),
            p_max: prior.p_diag.iter().cloned().fold(0.0, f64::max),
            design_gmi,
            llr_mean_abs,
            llr_sign_errors: sign_err as f64 / n_bits as f64,
            bit_errors,
            block_error: bit_errors > 0,
        });
        let back = if rx.scale_both { rx.ext_scale } else { 1.0 };
        priors = link.chan_il.interleave(&out.extrinsic).into_iter().map(|v| clip(v * back)).collect();
    }
    Ok(IterationTrace { seed, method: rx.method, nu: rx.nu, records })
}
