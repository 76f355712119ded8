use super::method2::{cancel_taps, taps_to_series, v_opt};
use super::series::{free_lags, QuadratureGrid, SpectralSeries};
use super::theorem3::{spectral_factor, spectral_mse, theorem3_objective, theorem3_optimal_g, SpectralMse};
use crate::error::{Error, Result};
use crate::linalg::{c64, ZERO};
use crate::methods::{gradient_ascent, OptimizerConfig, P_EPS};
use num_complex::Complex64;

/// Rate and gradient of Method I at a fixed causal `F(ω)`.
#[derive(Debug, Clone)]
pub struct IsiMethod1Point {
    pub i1: f64,
    pub delta: f64,
    pub t: SpectralSeries,
    /// Gradient in `[Re f0, Im f0, Re f1, ..]`.
    pub grad: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct IsiMethod1 {
    pub w: SpectralSeries,
    pub t: SpectralSeries,
    /// Causal, taps `0 ..= ν`.
    pub f: SpectralSeries,
    /// Ungerboeck equivalents `V = F* W`, `R = F* T`, `G = |F|^2`.
    pub v: SpectralSeries,
    pub r: SpectralSeries,
    pub g: SpectralSeries,
    pub rate: f64,
    pub i1: f64,
    pub delta: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

fn phi_lags(nu: usize, n_t: usize) -> Vec<i64> {
    free_lags(-(n_t as i64)..=-1, nu as i64 + 1..=n_t as i64)
}

fn pack_f(f: &[Complex64]) -> Vec<f64> {
    f.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unpack_f(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|p| c64(p[0], p[1])).collect()
}

pub fn isi_method1_point(mse: &SpectralMse, f: &[Complex64], n_t: usize, grid: &QuadratureGrid) -> Result<IsiMethod1Point> {
    let nu = f.len() - 1;
    let fv = grid.eval(&SpectralSeries::causal(f))?;
    let g: Vec<f64> = fv.iter().map(|z| z.norm_sqr()).collect();
    let i1 = theorem3_objective(&mse.m, &g, grid)?;
    let active = mse.alpha > P_EPS && f.iter().any(|z| z.norm() > 0.0);
    let (t, delta, tv) = if active {
        let lags = phi_lags(nu, n_t);
        let mf: Vec<Complex64> = fv.iter().zip(&mse.m).map(|(z, m)| z.conj() * *m).collect();
        let w: Vec<f64> = (0..grid.len()).map(|i| mse.m_tilde[i] * g[i] / (1.0 + g[i])).collect();
        let (taps, delta) = cancel_taps(&grid.coeffs(&mf, n_t)?, &grid.coeffs_real(&w, 2 * n_t)?, &lags, mse.alpha)?;
        let t = taps_to_series(&lags, &taps, n_t);
        let tv = grid.eval(&t)?;
        (t, delta, tv)
    } else {
        (SpectralSeries::zeros(n_t), 0.0, vec![ZERO; grid.len()])
    };
    // Derivative with respect to conj(F(ω)), with T held at its optimum.
    let xi: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let d = 1.0 + g[i];
            fv[i] * (mse.m[i] + 1.0 / d + mse.m_tilde[i] * tv[i].norm_sqr() / (d * d)) + tv[i] * (mse.alpha * mse.m[i])
        })
        .collect();
    let c = grid.coeffs(&xi, nu)?;
    let grad = (0..=nu as i64).flat_map(|k| [2.0 * c.get(k).re, 2.0 * c.get(k).im]).collect();
    Ok(IsiMethod1Point { i1, delta, t, grad })
}

fn regularized_factor(g: &SpectralSeries, eps: f64, grid: &QuadratureGrid) -> Result<Vec<Complex64>> {
    let min = grid.eval_real(g)?.into_iter().fold(f64::INFINITY, f64::min);
    let mut shifted = g.clone();
    if min < eps {
        shifted.set(0, shifted.get(0) + (eps - min));
    }
    spectral_factor(&shifted, grid)
}

/// Starting points: factors of the `α = 0` optimum `G_opt` and of the
/// truncated matched filter `[|H|^2 / N0]_ν`, each shifted to be positive.
fn initial_factors(mse: &SpectralMse, nu: usize, eps: f64, grid: &QuadratureGrid) -> Result<Vec<Vec<Complex64>>> {
    let mut out = vec![];
    if let Ok(t3) = theorem3_optimal_g(&mse.m, nu, grid) {
        out.push(regularized_factor(&t3.g, eps, grid)?);
    }
    let tmf: Vec<f64> = mse.s.iter().map(|s| (s - mse.n0) / mse.n0).collect();
    out.push(regularized_factor(&grid.coeffs_real(&tmf, nu)?, eps, grid)?);
    Ok(out)
}

pub fn isi_method1_from(
    mse: &SpectralMse,
    f0: &[Complex64],
    n_t: usize,
    cfg: &OptimizerConfig,
    grid: &QuadratureGrid,
) -> Result<IsiMethod1> {
    let nu = f0.len() - 1;
    if n_t <= nu {
        return Err(Error::InvalidInput("T tap length must exceed the memory".into()));
    }
    let eval = |x: &[f64]| {
        let p = isi_method1_point(mse, &unpack_f(x), n_t, grid)?;
        Ok((p.i1 + p.delta, p.grad))
    };
    let asc = gradient_ascent(pack_f(f0), eval, |_| {}, cfg)?;
    let f = unpack_f(&asc.x);
    let p = isi_method1_point(mse, &f, n_t, grid)?;
    let fs = SpectralSeries::causal(&f);
    let fv = grid.eval(&fs)?;
    let tv = grid.eval(&p.t)?;
    let rv: Vec<Complex64> = fv.iter().zip(&tv).map(|(a, b)| a.conj() * b).collect();
    let r = grid.coeffs(&rv, n_t + nu)?;
    let g = super::theorem3::autocorrelation(&f);
    let v = v_opt(mse, &g, &r, n_t, grid)?;
    if fv.iter().any(|z| z.norm() < 1e-150) {
        return Err(Error::Numerical("F(ω) vanishes on the grid; W is unbounded".into()));
    }
    let w_vals: Vec<Complex64> = (0..grid.len())
        .map(|i| mse.h[i].conj() * (1.0 + fv[i].norm_sqr() + fv[i].conj() * tv[i] * mse.alpha) / (fv[i].conj() * mse.s[i]))
        .collect();
    Ok(IsiMethod1 {
        w: grid.coeffs(&w_vals, n_t)?,
        t: p.t,
        f: fs,
        v,
        r,
        g,
        rate: p.i1 + p.delta,
        i1: p.i1,
        delta: p.delta,
        iterations: asc.iterations,
        converged: asc.converged,
        trace: asc.trace,
    })
}

pub fn isi_method1(
    h: &SpectralSeries,
    n0: f64,
    alpha: f64,
    nu: usize,
    n_t: usize,
    cfg: &OptimizerConfig,
    grid: &QuadratureGrid,
) -> Result<IsiMethod1> {
    let mse = spectral_mse(h, n0, alpha, grid)?;
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for f in initial_factors(&mse, nu, cfg.init_reg_epsilon, grid)? {
        let p = isi_method1_point(&mse, &f, n_t, grid)?;
        let v = p.i1 + p.delta;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, f));
        }
    }
    let (_, f0) = best.ok_or_else(|| Error::Numerical("no Method I starting point".into()))?;
    isi_method1_from(&mse, &f0, n_t, cfg, grid)
}
