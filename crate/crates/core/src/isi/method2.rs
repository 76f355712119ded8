use super::series::{free_lags, lag_gram, lag_vector, QuadratureGrid, SpectralSeries};
use super::theorem3::{spectral_mse, theorem3_objective, theorem3_optimal_g, SpectralMse};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, Cholesky};
use crate::methods::{gradient_ascent, OptimizerConfig, P_EPS};
use num_complex::Complex64;

/// Optimal cancelation taps on `lags` given `x = α M F*` (or `α M`) and the
/// weight `w = M̃ |F|^2 / (1+|F|^2)` (or `M̃ / (1+G)`).
///
/// Returns the taps (one per lag) and the gain `-x^H A^{-1} x`.
pub(crate) fn cancel_taps(
    x: &SpectralSeries,
    w: &SpectralSeries,
    lags: &[i64],
    alpha: f64,
) -> Result<(Vec<Complex64>, f64)> {
    let z = lag_vector(x, lags) * c64(alpha, 0.0);
    let neg = -lag_gram(w, lags);
    let chol = Cholesky::new(&neg).map_err(|_| Error::Numerical("cancelation Gram matrix is singular".into()))?;
    let y = chol.solve(&z);
    let delta = (z.adjoint() * &y)[(0, 0)].re;
    Ok((y.iter().map(|v| v.conj()).collect(), delta))
}

pub(crate) fn taps_to_series(lags: &[i64], taps: &[Complex64], n: usize) -> SpectralSeries {
    let mut s = SpectralSeries::zeros(n);
    for (&k, &t) in lags.iter().zip(taps) {
        s.set(k, t);
    }
    s
}

/// `[g0, Re g1, Im g1, ..]` to the Hermitian series `g_{-ν} .. g_ν`.
pub(crate) fn unpack_g(x: &[f64], nu: usize) -> SpectralSeries {
    let mut g = SpectralSeries::zeros(nu);
    g.set(0, c64(x[0], 0.0));
    for k in 1..=nu {
        let z = c64(x[2 * k - 1], x[2 * k]);
        g.set(k as i64, z);
        g.set(-(k as i64), z.conj());
    }
    g
}

pub(crate) fn pack_g(g: &SpectralSeries, nu: usize) -> Vec<f64> {
    let mut x = vec![g.get(0).re];
    for k in 1..=nu {
        let z = g.get(k as i64);
        x.push(z.re);
        x.push(z.im);
    }
    x
}

fn psi_lags(nu_r: usize, n_r: usize) -> Vec<i64> {
    free_lags(-(n_r as i64)..=-(nu_r as i64 + 1), nu_r as i64 + 1..=n_r as i64)
}

/// Rate and gradient of Method II at a fixed `G(ω)`.
#[derive(Debug, Clone)]
pub struct IsiMethod2Point {
    pub i2: f64,
    pub delta: f64,
    pub r: SpectralSeries,
    /// Gradient in the packed real coordinates `[g0, Re g1, Im g1, ..]`.
    pub grad: Vec<f64>,
}

/// Design and rate of spectral Method II (or its `α = 0` closed form).
#[derive(Debug, Clone)]
pub struct IsiMethod2 {
    pub v: SpectralSeries,
    pub r: SpectralSeries,
    pub g: SpectralSeries,
    pub rate: f64,
    pub i2: f64,
    pub delta: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

pub fn isi_method2_point(
    mse: &SpectralMse,
    g: &SpectralSeries,
    nu_r: usize,
    n_r: usize,
    grid: &QuadratureGrid,
) -> Result<IsiMethod2Point> {
    let nu = g.tap_len;
    let gv = grid.eval_real(g)?;
    let i2 = theorem3_objective(&mse.m, &gv, grid)?;
    let (r, delta, rv) = if mse.alpha > P_EPS {
        let lags = psi_lags(nu_r, n_r);
        let xm = grid.coeffs_real(&mse.m, n_r)?;
        let w: Vec<f64> = mse.m_tilde.iter().zip(&gv).map(|(mt, gi)| mt / (1.0 + gi)).collect();
        let wc = grid.coeffs_real(&w, 2 * n_r)?;
        let (taps, delta) = cancel_taps(&xm, &wc, &lags, mse.alpha)?;
        let r = taps_to_series(&lags, &taps, n_r);
        let rv = grid.eval(&r)?;
        (r, delta, rv)
    } else {
        (SpectralSeries::zeros(n_r), 0.0, vec![c64(0.0, 0.0); grid.len()])
    };
    let lam: Vec<f64> = (0..grid.len())
        .map(|i| {
            let d = 1.0 + gv[i];
            mse.m[i] + 1.0 / d - mse.m_tilde[i] * rv[i].norm_sqr() / (d * d)
        })
        .collect();
    let lc = grid.coeffs_real(&lam, nu)?;
    let mut grad = vec![lc.get(0).re];
    for k in 1..=nu {
        let z = lc.get(k as i64) * 2.0;
        grad.push(z.re);
        grad.push(z.im);
    }
    Ok(IsiMethod2Point { i2, delta, r, grad })
}

/// `V_opt = H* (1 + G + α R) / (N0 + |H|^2)` truncated to `n` taps.
pub(crate) fn v_opt(mse: &SpectralMse, g: &SpectralSeries, r: &SpectralSeries, n: usize, grid: &QuadratureGrid) -> Result<SpectralSeries> {
    let gv = grid.eval(g)?;
    let rv = grid.eval(r)?;
    let vals: Vec<Complex64> =
        (0..grid.len()).map(|i| mse.h[i].conj() * (1.0 + gv[i] + rv[i] * mse.alpha) / mse.s[i]).collect();
    grid.coeffs(&vals, n)
}

pub fn isi_method2(
    h: &SpectralSeries,
    n0: f64,
    alpha: f64,
    nu: usize,
    nu_r: usize,
    n_r: usize,
    cfg: &OptimizerConfig,
    grid: &QuadratureGrid,
) -> Result<IsiMethod2> {
    if nu_r != 0 && nu_r != nu {
        return Err(Error::InvalidInput("nu_r must be 0 or nu for ISI channels".into()));
    }
    if n_r <= nu_r.max(nu) {
        return Err(Error::InvalidInput("cancelation tap length must exceed the memory".into()));
    }
    let mse = spectral_mse(h, n0, alpha, grid)?;
    let t3 = theorem3_optimal_g(&mse.m, nu, grid)?;
    if alpha <= P_EPS {
        let r = SpectralSeries::zeros(n_r);
        return Ok(IsiMethod2 {
            v: v_opt(&mse, &t3.g, &r, n_r, grid)?,
            r,
            g: t3.g,
            rate: t3.rate,
            i2: t3.rate,
            delta: 0.0,
            iterations: 0,
            converged: true,
            trace: vec![t3.rate],
        });
    }
    let eval = |x: &[f64]| {
        let p = isi_method2_point(&mse, &unpack_g(x, nu), nu_r, n_r, grid)?;
        Ok((p.i2 + p.delta, p.grad))
    };
    let asc = gradient_ascent(pack_g(&t3.g, nu), eval, |_| {}, cfg)?;
    let g = unpack_g(&asc.x, nu);
    let p = isi_method2_point(&mse, &g, nu_r, n_r, grid)?;
    Ok(IsiMethod2 {
        v: v_opt(&mse, &g, &p.r, n_r, grid)?,
        r: p.r,
        g,
        rate: p.i2 + p.delta,
        i2: p.i2,
        delta: p.delta,
        iterations: asc.iterations,
        converged: asc.converged,
        trace: asc.trace,
    })
}

/// Direct evaluation of the spectral Method II rate for arbitrary `V, R, G`.
pub fn isi_rate_vrg(
    mse: &SpectralMse,
    v: &SpectralSeries,
    r: &SpectralSeries,
    g: &SpectralSeries,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let (vv, rv, gv) = (grid.eval(v)?, grid.eval(r)?, grid.eval_real(g)?);
    let a = mse.alpha;
    let mut acc = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let d = 1.0 + gv[i];
        if !(d > 0.0) {
            return Err(Error::GmiUndefined("1 + G(ω) must be positive"));
        }
        let vh = vv[i] * mse.h[i];
        let l2 = vv[i].norm_sqr() * mse.s[i] + a * rv[i].norm_sqr() - 2.0 * a * (vh * rv[i].conj()).re;
        acc.push(d.ln() - gv[i] - l2 / d + 2.0 * (vh - rv[i] * a).re);
    }
    Ok(grid.mean(&acc))
}

/// Per-symbol GMI of the `K`-symbol Toeplitz section of a design, with the
/// linear-convolution channel of `h_taps`.
pub fn section_gmi(
    h_taps: &[Complex64],
    n0: f64,
    alpha: f64,
    v: &SpectralSeries,
    r: &SpectralSeries,
    g: &SpectralSeries,
    k: usize,
) -> Result<f64> {
    let h = crate::channel::toeplitz_channel(h_taps, k);
    let n = h.nrows();
    let vm: CMat = v.toeplitz(k, n);
    let rm = r.toeplitz(k, k);
    let gm = crate::linalg::hermitize(&g.toeplitz(k, k));
    let p = vec![alpha; k];
    Ok(crate::gmi::gmi_raw(&h, n0, &p, &vm, &rm, &gm)? / k as f64)
}
