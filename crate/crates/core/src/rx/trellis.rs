use crate::channel::{bit_log_probs, symbol_log_priors, Constellation};
use crate::error::{Error, Result};
use crate::gmi::CsParams;
use crate::isi::SpectralSeries;
use crate::linalg::{CMat, Complex64, ZERO};
use serde::{Deserialize, Serialize};

/// Largest trellis the demodulator will build.
pub const MAX_STATES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    /// `2Re{x^H ŷ} - x^H G x` with Hermitian banded `G`.
    Ungerboeck,
    /// `-|z - F x|^2` with lower banded `F`.
    Forney,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisSpec {
    pub constellation: Constellation,
    pub nu: usize,
    pub metric: MetricKind,
    /// Replace log-sum-exp by max.
    pub max_log: bool,
}

impl TrellisSpec {
    pub fn new(constellation: Constellation, nu: usize) -> Self {
        Self { constellation, nu, metric: MetricKind::Ungerboeck, max_log: false }
    }

    pub fn states(&self) -> Result<usize> {
        let q = 1usize << self.constellation.bits_per_symbol()?;
        q.checked_pow(self.nu as u32)
            .filter(|&s| s <= MAX_STATES)
            .ok_or_else(|| Error::InvalidInput(format!("trellis with memory {} exceeds {MAX_STATES} states", self.nu)))
    }
}

/// Lower band of a trellis matrix: `diag[k] = A[k, k]` and
/// `lower[k * nu + i - 1] = A[k, k - i]` (zero when `k < i`).
#[derive(Debug, Clone, PartialEq)]
pub struct BandedTrellis {
    pub nu: usize,
    pub diag: Vec<Complex64>,
    pub lower: Vec<Complex64>,
}

impl BandedTrellis {
    pub fn from_matrix(a: &CMat, nu: usize) -> Self {
        let k = a.nrows();
        let mut lower = vec![ZERO; k * nu];
        for r in 0..k {
            for i in 1..=nu.min(r) {
                lower[r * nu + i - 1] = a[(r, r - i)];
            }
        }
        Self { nu, diag: (0..k).map(|r| a[(r, r)]).collect(), lower }
    }

    /// `K x K` section of the Toeplitz operator with symbol `s`.
    pub fn toeplitz(s: &SpectralSeries, k: usize, nu: usize) -> Self {
        let mut lower = vec![ZERO; k * nu];
        for r in 0..k {
            for i in 1..=nu.min(r) {
                lower[r * nu + i - 1] = s.get(i as i64);
            }
        }
        Self { nu, diag: vec![s.get(0); k], lower }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn at(&self, k: usize, i: usize) -> Complex64 {
        self.lower[k * self.nu + i - 1]
    }
}

/// Observation and matrix for one of the two metrics.
#[derive(Debug, Clone, Copy)]
pub enum TrellisInput<'a> {
    Ungerboeck { y_hat: &'a [Complex64], g: &'a BandedTrellis },
    Forney { z: &'a [Complex64], f: &'a BandedTrellis },
}

impl TrellisInput<'_> {
    fn parts(&self) -> (&[Complex64], &BandedTrellis) {
        match *self {
            TrellisInput::Ungerboeck { y_hat, g } => (y_hat, g),
            TrellisInput::Forney { z, f } => (z, f),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrellisOutput {
    /// Normalized `ln P(x_k = s | ŷ)`, `K x |X|` row-major.
    pub log_app: Vec<f64>,
    /// `ln P(b = 0) / P(b = 1)` a posteriori minus a priori, per bit.
    pub extrinsic: Vec<f64>,
}

fn log_add(a: f64, b: f64, max_log: bool) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    if max_log {
        m
    } else {
        m + (-(a - b).abs()).exp().ln_1p()
    }
}

/// Forward-backward over `|X|^ν` states. State digits hold the previous `ν`
/// symbols, the most recent in the least significant place.
pub fn trellis_app(input: TrellisInput<'_>, spec: &TrellisSpec, prior_llrs: &[f64]) -> Result<TrellisOutput> {
    let (obs, band) = input.parts();
    let m = spec.constellation.bits_per_symbol()?;
    let points = spec.constellation.points()?;
    let q = points.len();
    let ns = spec.states()?;
    let k = obs.len();
    if band.len() != k || band.nu != spec.nu {
        return Err(Error::DimensionMismatch(format!(
            "trellis matrix has {} rows and memory {}, observation {} and memory {}",
            band.len(),
            band.nu,
            k,
            spec.nu
        )));
    }
    if prior_llrs.len() != k * m {
        return Err(Error::DimensionMismatch(format!("{} prior LLRs for {} symbols", prior_llrs.len(), k)));
    }
    let nu = spec.nu;
    let top = ns / q.max(1);
    let next = |s: usize, d: usize| if nu == 0 { 0 } else { d + q * (s % top) };
    let digit = |s: usize, i: usize| (s / q.pow(i as u32 - 1)) % q;

    // gamma[(k * ns + s) * q + d]
    let mut gamma = vec![0.0; k * ns * q];
    for t in 0..k {
        let lp = symbol_log_priors(&prior_llrs[t * m..(t + 1) * m], m);
        for s in 0..ns {
            let past: Complex64 = (1..=nu).map(|i| band.at(t, i) * points[digit(s, i)]).sum();
            for d in 0..q {
                let x = points[d];
                let metric = match input {
                    TrellisInput::Ungerboeck { .. } => {
                        2.0 * (x.conj() * (obs[t] - past)).re - band.diag[t].re * x.norm_sqr()
                    }
                    TrellisInput::Forney { .. } => -(obs[t] - past - band.diag[t] * x).norm_sqr(),
                };
                gamma[(t * ns + s) * q + d] = metric + lp[d];
            }
        }
    }

    let ninf = f64::NEG_INFINITY;
    let mut alpha = vec![ninf; (k + 1) * ns];
    alpha[0] = 0.0;
    for t in 0..k {
        let (cur, nxt) = alpha.split_at_mut((t + 1) * ns);
        let cur = &cur[t * ns..];
        let nxt = &mut nxt[..ns];
        for s in 0..ns {
            if cur[s] == ninf {
                continue;
            }
            for d in 0..q {
                let n = next(s, d);
                nxt[n] = log_add(nxt[n], cur[s] + gamma[(t * ns + s) * q + d], spec.max_log);
            }
        }
        let mx = nxt.iter().cloned().fold(ninf, f64::max);
        nxt.iter_mut().for_each(|v| *v -= mx);
    }
    let mut beta = vec![0.0; (k + 1) * ns];
    for t in (0..k).rev() {
        let (cur, nxt) = beta.split_at_mut((t + 1) * ns);
        let cur = &mut cur[t * ns..];
        for s in 0..ns {
            let mut acc = ninf;
            for d in 0..q {
                acc = log_add(acc, gamma[(t * ns + s) * q + d] + nxt[next(s, d)], spec.max_log);
            }
            cur[s] = acc;
        }
        let mx = cur.iter().cloned().fold(ninf, f64::max);
        cur.iter_mut().for_each(|v| *v -= mx);
    }

    let mut log_app = vec![ninf; k * q];
    let mut extrinsic = Vec::with_capacity(k * m);
    for t in 0..k {
        let row = &mut log_app[t * q..(t + 1) * q];
        for s in 0..ns {
            let a = alpha[t * ns + s];
            if a == ninf {
                continue;
            }
            for d in 0..q {
                let v = a + gamma[(t * ns + s) * q + d] + beta[(t + 1) * ns + next(s, d)];
                row[d] = log_add(row[d], v, spec.max_log);
            }
        }
        let norm = row.iter().fold(ninf, |acc, &v| log_add(acc, v, false));
        row.iter_mut().for_each(|v| *v -= norm);
        for b in 0..m {
            let (mut l0, mut l1) = (ninf, ninf);
            for (d, &v) in row.iter().enumerate() {
                if d >> (m - 1 - b) & 1 == 0 {
                    l0 = log_add(l0, v, spec.max_log);
                } else {
                    l1 = log_add(l1, v, spec.max_log);
                }
            }
            let (p0, p1) = bit_log_probs(prior_llrs[t * m + b]);
            extrinsic.push((l0 - l1) - (p0 - p1));
        }
    }
    Ok(TrellisOutput { log_app, extrinsic })
}

/// Extrinsic bit LLRs of the Ungerboeck-metric BCJR on `ŷ = V y - R x̂`,
/// using the lower band `[0, ν]` of `G`.
pub fn bcjr_demodulate(y_hat: &[Complex64], params: &CsParams, trellis: &TrellisSpec, priors: &[f64]) -> Result<Vec<f64>> {
    let g = BandedTrellis::from_matrix(&params.g, trellis.nu);
    let spec = TrellisSpec { metric: MetricKind::Ungerboeck, ..*trellis };
    Ok(trellis_app(TrellisInput::Ungerboeck { y_hat, g: &g }, &spec, priors)?.extrinsic)
}
