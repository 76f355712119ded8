//! Recursive systematic (7,5) convolutional code, its parallel concatenation
//! and a log-MAP decoder. LLRs are `ln P(b = 0) / P(b = 1)`.

use super::interleave::Interleaver;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeKind {
    /// Two RSC encoders joined by a random interleaver.
    Turbo,
    /// A single terminated RSC encoder, decoded in one pass.
    Convolutional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub kind: CodeKind,
    pub info_bits: usize,
    /// Target rate after puncturing the parity bits.
    pub rate: f64,
    pub interleaver_seed: u64,
    /// Turbo iterations.
    pub iterations: usize,
    pub max_log: bool,
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self { kind: CodeKind::Turbo, info_bits: 512, rate: 0.5, interleaver_seed: 1, iterations: 8, max_log: false }
    }
}

/// Termination steps of the memory-2 encoder.
const TAIL: usize = 2;

/// `(next state, parity)` for state `(a_{t-1}, a_{t-2})` packed as `2 a_{t-1} + a_{t-2}`.
fn rsc_step(s: usize, u: u8) -> (usize, u8) {
    let (s1, s2) = ((s >> 1) as u8 & 1, s as u8 & 1);
    let a = u ^ s1 ^ s2;
    (((a as usize) << 1) | s1 as usize, a ^ s2)
}

/// Parity of `u` followed by the two termination steps: returns
/// `(parity, tail inputs, tail parity)`.
fn rsc_encode(u: &[u8]) -> (Vec<u8>, [u8; TAIL], [u8; TAIL]) {
    let mut s = 0;
    let mut par = Vec::with_capacity(u.len());
    for &b in u {
        let (n, p) = rsc_step(s, b);
        par.push(p);
        s = n;
    }
    let (mut tu, mut tp) = ([0; TAIL], [0; TAIL]);
    for i in 0..TAIL {
        let u = ((s >> 1) ^ s) as u8 & 1;
        let (n, p) = rsc_step(s, u);
        tu[i] = u;
        tp[i] = p;
        s = n;
    }
    debug_assert_eq!(s, 0);
    (par, tu, tp)
}

fn log_add(a: f64, b: f64, max_log: bool) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if max_log {
        m
    } else {
        m + (-(a - b).abs()).exp().ln_1p()
    }
}

/// Log-MAP over the 4-state trellis of a terminated RSC sequence. Returns the
/// a posteriori LLRs of the inputs and of the parity bits.
pub fn rsc_log_map(sys: &[f64], par: &[f64], apriori: &[f64], max_log: bool) -> (Vec<f64>, Vec<f64>) {
    let t_len = sys.len();
    let ninf = f64::NEG_INFINITY;
    let half = |l: f64, b: u8| if b == 0 { 0.5 * l } else { -0.5 * l };
    let gamma = |t: usize, u: u8, p: u8| half(sys[t] + apriori[t], u) + half(par[t], p);
    let mut alpha = vec![[ninf; 4]; t_len + 1];
    alpha[0][0] = 0.0;
    for t in 0..t_len {
        let mut nx = [ninf; 4];
        for s in 0..4 {
            if alpha[t][s] == ninf {
                continue;
            }
            for u in 0..2u8 {
                let (n, p) = rsc_step(s, u);
                nx[n] = log_add(nx[n], alpha[t][s] + gamma(t, u, p), max_log);
            }
        }
        let mx = nx.iter().cloned().fold(ninf, f64::max);
        nx.iter_mut().for_each(|v| *v -= mx);
        alpha[t + 1] = nx;
    }
    let mut beta = vec![[ninf; 4]; t_len + 1];
    beta[t_len][0] = 0.0;
    for t in (0..t_len).rev() {
        let mut cur = [ninf; 4];
        for (s, c) in cur.iter_mut().enumerate() {
            for u in 0..2u8 {
                let (n, p) = rsc_step(s, u);
                *c = log_add(*c, gamma(t, u, p) + beta[t + 1][n], max_log);
            }
        }
        let mx = cur.iter().cloned().fold(ninf, f64::max);
        cur.iter_mut().for_each(|v| *v -= mx);
        beta[t] = cur;
    }
    let mut lu = Vec::with_capacity(t_len);
    let mut lp = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let (mut u0, mut u1, mut p0, mut p1) = (ninf, ninf, ninf, ninf);
        for s in 0..4 {
            if alpha[t][s] == ninf {
                continue;
            }
            for u in 0..2u8 {
                let (n, p) = rsc_step(s, u);
                let v = alpha[t][s] + gamma(t, u, p) + beta[t + 1][n];
                if u == 0 {
                    u0 = log_add(u0, v, max_log);
                } else {
                    u1 = log_add(u1, v, max_log);
                }
                if p == 0 {
                    p0 = log_add(p0, v, max_log);
                } else {
                    p1 = log_add(p1, v, max_log);
                }
            }
        }
        lu.push(u0 - u1);
        lp.push(p0 - p1);
    }
    (lu, lp)
}

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    /// A posteriori LLRs of the information bits.
    pub app: Vec<f64>,
    /// A posteriori minus channel LLR for every transmitted code bit.
    pub extrinsic: Vec<f64>,
    pub bits: Vec<u8>,
}

/// Position of a mother-code bit in the transmitted stream.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Sys(usize),
    Par1(usize),
    Par2(usize),
    Tail1Sys(usize),
    Tail1Par(usize),
    Tail2Sys(usize),
    Tail2Par(usize),
}

#[derive(Debug, Clone)]
pub struct OuterCode {
    pub cfg: CodeConfig,
    interleaver: Interleaver,
    /// Transmitted slots in order.
    slots: Vec<Slot>,
}

impl OuterCode {
    /// The coded length is rounded up to a multiple of `multiple` by keeping
    /// extra parity bits.
    pub fn new(cfg: CodeConfig, multiple: usize) -> Result<Self> {
        let n = cfg.info_bits;
        if n == 0 || multiple == 0 {
            return Err(Error::InvalidInput("code needs information bits".into()));
        }
        if !(cfg.rate > 0.0 && cfg.rate < 1.0) {
            return Err(Error::InvalidInput(format!("code rate {} outside (0, 1)", cfg.rate)));
        }
        let turbo = cfg.kind == CodeKind::Turbo;
        let tail = if turbo { 4 * TAIL } else { 2 * TAIL };
        let n_par = if turbo { 2 * n } else { n };
        let target = (n as f64 / cfg.rate).ceil() as usize;
        let target = target.div_ceil(multiple) * multiple;
        let keep = target
            .checked_sub(n + tail)
            .filter(|&k| k <= n_par)
            .ok_or_else(|| Error::InvalidInput(format!("rate {} not reachable with {} information bits", cfg.rate, n)))?;
        // Each encoder's kept parity is spread evenly in time; the second
        // pattern is offset by half a period so the two interleave.
        let (k1, k2) = if turbo { (keep.div_ceil(2), keep / 2) } else { (keep, 0) };
        let off2 = if k2 > 0 { n / (2 * k2) } else { 0 };
        let take = |t: usize, k: usize, off: usize| (t + 1 + off) * k / n > (t + off) * k / n;
        let mut slots = Vec::with_capacity(target);
        for t in 0..n {
            slots.push(Slot::Sys(t));
            if take(t, k1, 0) {
                slots.push(Slot::Par1(t));
            }
            if turbo && take(t, k2, off2) {
                slots.push(Slot::Par2(t));
            }
        }
        for i in 0..TAIL {
            slots.push(Slot::Tail1Sys(i));
            slots.push(Slot::Tail1Par(i));
        }
        if turbo {
            for i in 0..TAIL {
                slots.push(Slot::Tail2Sys(i));
                slots.push(Slot::Tail2Par(i));
            }
        }
        debug_assert_eq!(slots.len(), target);
        Ok(Self { cfg, interleaver: Interleaver::random(n, cfg.interleaver_seed), slots })
    }

    pub fn coded_len(&self) -> usize {
        self.slots.len()
    }

    pub fn rate(&self) -> f64 {
        self.cfg.info_bits as f64 / self.coded_len() as f64
    }

    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.cfg.info_bits {
            return Err(Error::DimensionMismatch(format!("{} bits for a {}-bit code", u.len(), self.cfg.info_bits)));
        }
        let (p1, t1u, t1p) = rsc_encode(u);
        let (p2, t2u, t2p) = if self.cfg.kind == CodeKind::Turbo {
            rsc_encode(&self.interleaver.interleave(u))
        } else {
            (Vec::new(), [0; TAIL], [0; TAIL])
        };
        Ok(self
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Sys(t) => u[t],
                Slot::Par1(t) => p1[t],
                Slot::Par2(t) => p2[t],
                Slot::Tail1Sys(i) => t1u[i],
                Slot::Tail1Par(i) => t1p[i],
                Slot::Tail2Sys(i) => t2u[i],
                Slot::Tail2Par(i) => t2p[i],
            })
            .collect())
    }

    pub fn decode(&self, llrs: &[f64]) -> Result<DecodeOutput> {
        if llrs.len() != self.coded_len() {
            return Err(Error::DimensionMismatch(format!("{} LLRs for a {}-bit codeword", llrs.len(), self.coded_len())));
        }
        let n = self.cfg.info_bits;
        let ml = self.cfg.max_log;
        let mut sys1 = vec![0.0; n + TAIL];
        let mut par1 = vec![0.0; n + TAIL];
        let mut sys2_tail = [0.0; TAIL];
        let mut par2 = vec![0.0; n + TAIL];
        for (s, &l) in self.slots.iter().zip(llrs) {
            match *s {
                Slot::Sys(t) => sys1[t] = l,
                Slot::Par1(t) => par1[t] = l,
                Slot::Par2(t) => par2[t] = l,
                Slot::Tail1Sys(i) => sys1[n + i] = l,
                Slot::Tail1Par(i) => par1[n + i] = l,
                Slot::Tail2Sys(i) => sys2_tail[i] = l,
                Slot::Tail2Par(i) => par2[n + i] = l,
            }
        }
        let (app1, papp1, app2, papp2) = if self.cfg.kind == CodeKind::Turbo {
            let mut sys2 = self.interleaver.interleave(&sys1[..n]);
            sys2.extend_from_slice(&sys2_tail);
            let mut la1 = vec![0.0; n + TAIL];
            let mut last2 = (vec![0.0; n + TAIL], vec![0.0; n + TAIL]);
            for _ in 0..self.cfg.iterations {
                let (a1, _) = rsc_log_map(&sys1, &par1, &la1, ml);
                let e1: Vec<f64> = (0..n).map(|t| a1[t] - sys1[t] - la1[t]).collect();
                let mut la2 = self.interleaver.interleave(&e1);
                la2.extend_from_slice(&[0.0; TAIL]);
                let (a2, p2) = rsc_log_map(&sys2, &par2, &la2, ml);
                let e2: Vec<f64> = (0..n).map(|t| a2[t] - sys2[t] - la2[t]).collect();
                la1[..n].copy_from_slice(&self.interleaver.deinterleave(&e2));
                last2 = (a2, p2);
            }
            let (a1, p1) = rsc_log_map(&sys1, &par1, &la1, ml);
            (a1, p1, last2.0, last2.1)
        } else {
            let (a1, p1) = rsc_log_map(&sys1, &par1, &vec![0.0; n + TAIL], ml);
            (a1, p1, Vec::new(), Vec::new())
        };
        let extrinsic = self
            .slots
            .iter()
            .zip(llrs)
            .map(|(s, &l)| {
                let app = match *s {
                    Slot::Sys(t) => app1[t],
                    Slot::Par1(t) => papp1[t],
                    Slot::Par2(t) => papp2[t],
                    Slot::Tail1Sys(i) => app1[n + i],
                    Slot::Tail1Par(i) => papp1[n + i],
                    Slot::Tail2Sys(i) => app2[n + i],
                    Slot::Tail2Par(i) => papp2[n + i],
                };
                app - l
            })
            .collect();
        let app = app1[..n].to_vec();
        let bits = app.iter().map(|&l| u8::from(l < 0.0)).collect();
        Ok(DecodeOutput { app, extrinsic, bits })
    }
}

/// Decodes one codeword of `code`.
pub fn outer_decode(llrs: &[f64], code: &OuterCode) -> Result<DecodeOutput> {
    code.decode(llrs)
}
