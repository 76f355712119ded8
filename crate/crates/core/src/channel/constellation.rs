use crate::linalg::{c64, Complex64};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// LLR magnitude at which bit probabilities saturate.
pub const LLR_CLIP: f64 = 40.0;

/// Input alphabet. Bit LLRs are `ln P(b = 0) / P(b = 1)` and labels are Gray
/// coded with the most significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constellation {
    /// Unit-variance complex Gaussian inputs, used for receiver design only.
    Gaussian,
    Qpsk,
    Qam16,
}

impl Constellation {
    pub fn bits_per_symbol(self) -> Result<usize> {
        match self {
            Constellation::Gaussian => Err(Error::InvalidInput(
                "Gaussian design alphabet has no bit labels".into(),
            )),
            Constellation::Qpsk => Ok(2),
            Constellation::Qam16 => Ok(4),
        }
    }

    /// Points indexed by their bit label.
    pub fn points(self) -> Result<Vec<Complex64>> {
        let m = self.bits_per_symbol()?;
        Ok((0..1usize << m).map(|s| self.point(s)).collect())
    }

    fn point(self, s: usize) -> Complex64 {
        match self {
            Constellation::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                c64(a * pam2(s >> 1 & 1), a * pam2(s & 1))
            }
            Constellation::Qam16 => {
                let a = 1.0 / 10f64.sqrt();
                c64(a * pam4(s >> 2 & 3), a * pam4(s & 3))
            }
            Constellation::Gaussian => c64(0.0, 0.0),
        }
    }

    /// Map a bit slice (length multiple of bits per symbol) to symbols.
    pub fn modulate(self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let m = self.bits_per_symbol()?;
        if bits.len() % m != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} bits do not fill {}-bit symbols",
                bits.len(),
                m
            )));
        }
        Ok(bits
            .chunks(m)
            .map(|c| self.point(c.iter().fold(0usize, |s, &b| (s << 1) | (b as usize & 1))))
            .collect())
    }
}

fn pam2(b: usize) -> f64 {
    1.0 - 2.0 * b as f64
}

/// Gray 4-PAM: first bit is the sign, second the magnitude.
fn pam4(b: usize) -> f64 {
    let sign = pam2(b >> 1 & 1);
    let mag = if b & 1 == 0 { 1.0 } else { 3.0 };
    sign * mag
}

/// `ln P(b = 0)` and `ln P(b = 1)` for a clipped LLR.
pub fn bit_log_probs(llr: f64) -> (f64, f64) {
    let l = if llr.is_nan() { 0.0 } else { llr.clamp(-LLR_CLIP, LLR_CLIP) };
    // ln(1 / (1 + e^{-l})) computed stably.
    let lp0 = -softplus(-l);
    let lp1 = -softplus(l);
    (lp0, lp1)
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Per-symbol log prior of every constellation point given bit LLRs.
pub fn symbol_log_priors(llrs: &[f64], m: usize) -> Vec<f64> {
    let probs: Vec<(f64, f64)> = llrs.iter().map(|&l| bit_log_probs(l)).collect();
    (0..1usize << m)
        .map(|s| {
            (0..m)
                .map(|b| {
                    let bit = s >> (m - 1 - b) & 1;
                    if bit == 0 {
                        probs[b].0
                    } else {
                        probs[b].1
                    }
                })
                .sum()
        })
        .collect()
}
