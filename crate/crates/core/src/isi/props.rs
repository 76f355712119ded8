use super::series::{QuadratureGrid, SpectralSeries};
use super::theorem3::SpectralMse;
use crate::error::Result;
use num_complex::Complex64;

/// Fourier coefficients `a_k` (of `V H` or `F* W H`) and `b_k` (of `R` or
/// `F* T`) over a lag range, split by where they must agree.
#[derive(Debug, Clone)]
pub struct CoeffMatch {
    pub lags: Vec<i64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    /// Largest `|a_k - b_k|` over lags where equality is claimed.
    pub off_band: f64,
    /// Largest `|a_k - b_k|` over the band where `R` is free but equality
    /// is not claimed.
    pub in_band: f64,
}

impl CoeffMatch {
    pub fn holds(&self, tol: f64) -> bool {
        self.off_band <= tol
    }

    pub fn get(&self, k: i64) -> Option<(Complex64, Complex64)> {
        self.lags.iter().position(|&l| l == k).map(|i| (self.a[i], self.b[i]))
    }
}

/// `a` from `V_opt H = (1 + G + αR) |H|^2 / (N0 + |H|^2)`, exact on the grid.
fn vh_coeffs(mse: &SpectralMse, g: &SpectralSeries, r: &SpectralSeries, n: usize, grid: &QuadratureGrid) -> Result<SpectralSeries> {
    let (gv, rv) = (grid.eval(g)?, grid.eval(r)?);
    let vals: Vec<Complex64> =
        (0..grid.len()).map(|i| (1.0 + gv[i] + rv[i] * mse.alpha) * (1.0 + mse.m[i])).collect();
    grid.coeffs(&vals, n)
}

/// Method II: `a_k == b_k` for `ν + ν_R < |k| <= N_R - ν`, where `N_R` is the tap
/// length of `R`. Lags beyond `N_R - ν` see the truncation of `R`.
pub fn check_prop8(mse: &SpectralMse, g: &SpectralSeries, r: &SpectralSeries, nu: usize, nu_r: usize, grid: &QuadratureGrid) -> Result<CoeffMatch> {
    let n_r = r.tap_len;
    let a = vh_coeffs(mse, g, r, n_r, grid)?;
    let lags: Vec<i64> = a.lags().collect();
    let (mut off_band, mut in_band) = (0.0f64, 0.0f64);
    for &k in &lags {
        let d = (a.get(k) - r.get(k)).norm();
        let m = k.unsigned_abs() as usize;
        if m > nu + nu_r && m + nu <= n_r {
            off_band = off_band.max(d);
        } else if m > nu_r && m <= nu + nu_r {
            in_band = in_band.max(d);
        }
    }
    Ok(CoeffMatch {
        a: lags.iter().map(|&k| a.get(k)).collect(),
        b: lags.iter().map(|&k| r.get(k)).collect(),
        lags,
        off_band,
        in_band,
    })
}

/// `a_k == b_k` for `-N_T/2 <= k < -(ν + 1)` with `a` from `F* W_opt H`
/// and `b` from `F* T_opt`; `R = F* T` is passed as `r`.
///
/// The identity relies on a causal inverse of `F`, so the residual decays
/// geometrically away from the truncation edge `-N_T` at a rate set by the
/// zero of `F` nearest the unit circle. Lags closer to the edge are excluded.
pub fn check_prop6(mse: &SpectralMse, f: &SpectralSeries, r: &SpectralSeries, n_t: usize, grid: &QuadratureGrid) -> Result<CoeffMatch> {
    let nu = f.support(0.0);
    let g = super::theorem3::autocorrelation(&f.causal_taps()[..=nu]);
    let a = vh_coeffs(mse, &g, r, r.tap_len, grid)?;
    let lags: Vec<i64> = a.lags().collect();
    let (mut off_band, mut in_band) = (0.0f64, 0.0f64);
    for &k in &lags {
        let d = (a.get(k) - r.get(k)).norm();
        if k < -(nu as i64 + 1) && k >= -((n_t / 2) as i64) {
            off_band = off_band.max(d);
        } else if k < 0 && k >= -(nu as i64 + 1) {
            in_band = in_band.max(d);
        }
    }
    Ok(CoeffMatch {
        a: lags.iter().map(|&k| a.get(k)).collect(),
        b: lags.iter().map(|&k| r.get(k)).collect(),
        lags,
        off_band,
        in_band,
    })
}

/// Method III with `ν_R = ν`: `a` from `(1+G) Ŵ H`, `b` from `(1+G) Ĉ`,
/// equal for `2ν < |k| <= N - ν` where `N` is the tap length of `Ĉ`.
pub fn check_method3_band(h: &SpectralSeries, d: &super::IsiMethod3, grid: &QuadratureGrid) -> Result<CoeffMatch> {
    let nu = d.g.tap_len;
    let n = d.c_hat.tap_len;
    let (vv, hv) = (grid.eval(&d.v)?, grid.eval(h)?);
    let vh: Vec<Complex64> = vv.iter().zip(&hv).map(|(a, b)| a * b).collect();
    let a = grid.coeffs(&vh, n)?;
    let lags: Vec<i64> = a.lags().collect();
    let (mut off_band, mut in_band) = (0.0f64, 0.0f64);
    for &k in &lags {
        let diff = (a.get(k) - d.r.get(k)).norm();
        let m = k.unsigned_abs() as usize;
        if m > 2 * nu && m + nu <= n {
            off_band = off_band.max(diff);
        } else if m > nu && m <= 2 * nu {
            in_band = in_band.max(diff);
        }
    }
    Ok(CoeffMatch {
        a: lags.iter().map(|&k| a.get(k)).collect(),
        b: lags.iter().map(|&k| d.r.get(k)).collect(),
        lags,
        off_band,
        in_band,
    })
}
