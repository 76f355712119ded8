//! Channel and prior models: random MIMO matrices, ISI presets, constellations,
//! prior statistics and column permutations.

mod constellation;
mod permutation;

pub use constellation::{bit_log_probs, symbol_log_priors, Constellation, LLR_CLIP};
pub use permutation::{band_energy, permutation_search, permute_columns, PermutationMode};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, Complex64, ZERO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    /// `N x K` matrix.
    FiniteMatrix(CMat),
    /// Causal impulse response `h_0 .. h_{L-1}`.
    IsiTaps(Vec<Complex64>),
}

/// `y = H x + n` with `n ~ CN(0, N0 I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    pub n0: f64,
    pub constellation: Constellation,
}

impl ChannelModel {
    pub fn matrix(h: CMat, n0: f64) -> Self {
        Self {
            kind: ChannelKind::FiniteMatrix(h),
            n0,
            constellation: Constellation::Gaussian,
        }
    }

    pub fn isi(taps: Vec<Complex64>, n0: f64) -> Self {
        Self {
            kind: ChannelKind::IsiTaps(taps),
            n0,
            constellation: Constellation::Gaussian,
        }
    }

    pub fn with_n0(mut self, n0: f64) -> Self {
        self.n0 = n0;
        self
    }

    pub fn with_constellation(mut self, c: Constellation) -> Self {
        self.constellation = c;
        self
    }

    /// Channel matrix; errors for ISI channels.
    pub fn h(&self) -> Result<&CMat> {
        match &self.kind {
            ChannelKind::FiniteMatrix(h) => Ok(h),
            ChannelKind::IsiTaps(_) => Err(Error::InvalidInput(
                "operation needs a finite matrix channel".into(),
            )),
        }
    }

    pub fn taps(&self) -> Result<&[Complex64]> {
        match &self.kind {
            ChannelKind::IsiTaps(t) => Ok(t),
            ChannelKind::FiniteMatrix(_) => Err(Error::InvalidInput(
                "operation needs an ISI channel".into(),
            )),
        }
    }

    /// Number of transmitted symbols per matrix use.
    pub fn k(&self) -> Result<usize> {
        Ok(self.h()?.ncols())
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (1.0 / self.n0).log10()
    }
}

pub fn n0_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    ProakisB,
    ProakisC,
    Epr4,
}

pub fn preset_taps(p: Preset) -> Vec<f64> {
    match p {
        Preset::ProakisB => vec![0.407, 0.815, 0.407],
        Preset::ProakisC => vec![0.227, 0.46, 0.688, 0.46, 0.227],
        Preset::Epr4 => vec![0.5, 0.5, -0.5, -0.5],
    }
}

pub fn preset_channel(p: Preset, n0: f64) -> ChannelModel {
    ChannelModel::isi(preset_taps(p).into_iter().map(|t| c64(t, 0.0)).collect(), n0)
}

/// `CN(0, var)` sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(s * re, s * im)
}

/// IID `CN(0, 1/K)` entries so every receive antenna sees unit mean power.
pub fn random_mimo_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> CMat {
    let var = 1.0 / k as f64;
    CMat::from_fn(n, k, |_, _| complex_gaussian(rng, var))
}

pub fn make_random_mimo(n: usize, k: usize, seed: u64) -> ChannelModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ChannelModel::matrix(random_mimo_matrix(&mut rng, n, k), 1.0)
}

/// IID complex Gaussian taps scaled to unit total power.
pub fn random_isi_taps<R: Rng + ?Sized>(rng: &mut R, l: usize) -> Vec<Complex64> {
    let t: Vec<Complex64> = (0..l).map(|_| complex_gaussian(rng, 1.0)).collect();
    let e = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    t.into_iter().map(|z| z / e).collect()
}

/// `(K + L - 1) x K` linear-convolution matrix of the taps.
pub fn toeplitz_channel(taps: &[Complex64], k: usize) -> CMat {
    let l = taps.len();
    CMat::from_fn(k + l - 1, k, |i, j| if i >= j && i - j < l { taps[i - j] } else { ZERO })
}

/// Prior means `x̂` and the diagonal of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorState {
    pub x_hat: Vec<Complex64>,
    pub p_diag: Vec<f64>,
}

impl PriorState {
    /// Zero prior information.
    pub fn none(k: usize) -> Self {
        Self {
            x_hat: vec![ZERO; k],
            p_diag: vec![0.0; k],
        }
    }

    /// Design-time prior with a given `P` and zero means.
    pub fn with_p(p_diag: Vec<f64>) -> Self {
        Self {
            x_hat: vec![ZERO; p_diag.len()],
            p_diag,
        }
    }

    pub fn uniform(k: usize, alpha: f64) -> Self {
        Self::with_p(vec![alpha; k])
    }

    pub fn k(&self) -> usize {
        self.p_diag.len()
    }

    /// Scalar `α = mean(p)` used by the ISI designs.
    pub fn alpha(&self) -> f64 {
        if self.p_diag.is_empty() {
            0.0
        } else {
            self.p_diag.iter().sum::<f64>() / self.p_diag.len() as f64
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_hat.len() != self.p_diag.len() {
            return Err(Error::DimensionMismatch("prior means and variances differ in length".into()));
        }
        if self.p_diag.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidInput("prior powers must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Symbol statistics from independent bit LLRs.
pub fn priors_from_llrs(llrs: &[f64], c: Constellation) -> Result<PriorState> {
    let m = c.bits_per_symbol()?;
    if llrs.len() % m != 0 {
        return Err(Error::DimensionMismatch(format!(
            "{} LLRs for {}-bit symbols",
            llrs.len(),
            m
        )));
    }
    let points = c.points()?;
    let mut x_hat = Vec::with_capacity(llrs.len() / m);
    for chunk in llrs.chunks(m) {
        let lp = symbol_log_priors(chunk, m);
        let mean = points
            .iter()
            .zip(&lp)
            .fold(ZERO, |acc, (s, l)| acc + s * l.exp());
        x_hat.push(mean);
    }
    let p_diag = x_hat.iter().map(|z| z.norm_sqr().min(1.0)).collect();
    Ok(PriorState { x_hat, p_diag })
}
