use super::series::{QuadratureGrid, SpectralSeries};
use super::theorem3::{spectral_mse, theorem3_optimal_g, SpectralMse};
use crate::channel::toeplitz_channel;
use crate::error::{Error, Result};
use crate::methods::{method3_parts, P_EPS};
use num_complex::Complex64;

/// Block length of the finite section the Wiener symbols are read from.
pub const SECTION_K: usize = 256;
/// Taps kept from the central row of the section.
pub const SECTION_TAPS: usize = 96;

#[derive(Debug, Clone)]
pub struct IsiMethod3 {
    pub w_hat: SpectralSeries,
    pub c_hat: SpectralSeries,
    /// `M̂(ω)` at the grid nodes.
    pub m_hat: Vec<f64>,
    pub g: SpectralSeries,
    /// `V = (1+G) Ŵ`, `R = (1+G) Ĉ`.
    pub v: SpectralSeries,
    pub r: SpectralSeries,
    pub rate: f64,
}

/// Symbols of `Ŵ` and `Ĉ` read off the central row of the `k`-symbol
/// finite-section design.
pub fn section_wiener_symbols(
    taps: &[Complex64],
    n0: f64,
    alpha: f64,
    nu: usize,
    k: usize,
    n_taps: usize,
) -> Result<(SpectralSeries, SpectralSeries)> {
    let l = taps.len();
    if 2 * n_taps + l >= k {
        return Err(Error::InvalidInput("finite section too short for the requested taps".into()));
    }
    let h = toeplitz_channel(taps, k);
    let parts = method3_parts(&h, n0, &vec![alpha; k], nu)?;
    let c = k / 2;
    let mut w = SpectralSeries::zeros(n_taps);
    let mut ch = SpectralSeries::zeros(n_taps);
    for d in -(n_taps as i64)..=(n_taps as i64) {
        let j = (c as i64 - d) as usize;
        w.set(d, parts.w_hat[(c, j)]);
        ch.set(d, parts.c_hat[(c, j)]);
    }
    Ok((w, ch))
}

/// `M̂ = 2Re{α Ŵ H Ĉ* + Ŵ H - α Ĉ*} - |Ŵ|^2 (N0 + |H|^2) - α |Ĉ|^2 - 1`.
pub fn spectral_m_hat(mse: &SpectralMse, w_hat: &SpectralSeries, c_hat: &SpectralSeries, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    let (wv, cv) = (grid.eval(w_hat)?, grid.eval(c_hat)?);
    let a = mse.alpha;
    Ok((0..grid.len())
        .map(|i| {
            let wh = wv[i] * mse.h[i];
            2.0 * (wh * cv[i].conj() * a + wh - cv[i].conj() * a).re
                - wv[i].norm_sqr() * mse.s[i]
                - a * cv[i].norm_sqr()
                - 1.0
        })
        .collect())
}

fn times_one_plus(g: &SpectralSeries, x: &SpectralSeries, grid: &QuadratureGrid) -> Result<SpectralSeries> {
    let (gv, xv) = (grid.eval(g)?, grid.eval(x)?);
    let vals: Vec<Complex64> = gv.iter().zip(&xv).map(|(a, b)| (1.0 + a) * b).collect();
    grid.coeffs(&vals, x.tap_len + g.tap_len)
}

pub fn isi_method3(h: &SpectralSeries, n0: f64, alpha: f64, nu: usize, grid: &QuadratureGrid) -> Result<IsiMethod3> {
    if (1..=h.tap_len as i64).any(|k| h.get(-k) != crate::linalg::ZERO) {
        return Err(Error::InvalidInput("ISI channel taps must be causal".into()));
    }
    let mse = spectral_mse(h, n0, alpha, grid)?;
    let (w_hat, c_hat) = if alpha <= P_EPS {
        // Without priors the Wiener rows are the plain LMMSE filter.
        let vals: Vec<Complex64> = mse.h.iter().zip(&mse.s).map(|(z, s)| z.conj() / *s).collect();
        (grid.coeffs(&vals, SECTION_TAPS)?, SpectralSeries::zeros(SECTION_TAPS))
    } else {
        section_wiener_symbols(&h.causal_taps(), n0, alpha, nu, SECTION_K, SECTION_TAPS)?
    };
    let m_hat = if alpha <= P_EPS { mse.m.clone() } else { spectral_m_hat(&mse, &w_hat, &c_hat, grid)? };
    let t3 = theorem3_optimal_g(&m_hat, nu, grid)?;
    Ok(IsiMethod3 {
        v: times_one_plus(&t3.g, &w_hat, grid)?,
        r: times_one_plus(&t3.g, &c_hat, grid)?,
        w_hat,
        c_hat,
        m_hat,
        g: t3.g,
        rate: t3.rate,
    })
}
