use super::series::{QuadratureGrid, SpectralSeries};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, Cholesky, ZERO};
use num_complex::Complex64;

/// Pointwise spectral quantities of a channel at the grid nodes.
#[derive(Debug, Clone)]
pub struct SpectralMse {
    pub h: Vec<Complex64>,
    /// `N0 + |H(ω)|^2`.
    pub s: Vec<f64>,
    /// `M(ω) = |H|^2 / (N0 + |H|^2) - 1`.
    pub m: Vec<f64>,
    /// `M̃(ω) = α^2 (M(ω) + 1) - α`.
    pub m_tilde: Vec<f64>,
    pub n0: f64,
    pub alpha: f64,
}

pub fn spectral_mse(h: &SpectralSeries, n0: f64, alpha: f64, grid: &QuadratureGrid) -> Result<SpectralMse> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidInput("N0 must be positive".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside [0, 1]")));
    }
    let hv = grid.eval(h)?;
    let s: Vec<f64> = hv.iter().map(|z| n0 + z.norm_sqr()).collect();
    // -N0 / (N0 + |H|^2) keeps full relative accuracy near spectral nulls.
    let m: Vec<f64> = s.iter().map(|&si| -n0 / si).collect();
    let m_tilde = m.iter().map(|&mi| alpha * alpha * (mi + 1.0) - alpha).collect();
    Ok(SpectralMse { h: hv, s, m, m_tilde, n0, alpha })
}

/// Closed-form band-limited maximizer of `1 + ∫ (log(1+G) + M (1+G)) dω/2π`.
#[derive(Debug, Clone)]
pub struct Theorem3 {
    pub u0: f64,
    /// `u_1 .. u_ν`.
    pub u_hat: Vec<Complex64>,
    /// `G_opt` with `1 + G_opt = |u0 + Σ u_i exp(jiω)|^2`.
    pub g: SpectralSeries,
    /// `2 log u0`.
    pub rate: f64,
}

impl Theorem3 {
    /// Taps `u_0 .. u_ν` of the causal factor.
    pub fn u(&self) -> Vec<Complex64> {
        std::iter::once(c64(self.u0, 0.0)).chain(self.u_hat.iter().copied()).collect()
    }
}

/// Coefficients of `|U|^2` for causal taps `u`, lags `-(len-1) .. len-1`.
pub fn autocorrelation(u: &[Complex64]) -> SpectralSeries {
    let n = u.len().saturating_sub(1);
    let mut s = SpectralSeries::zeros(n);
    for d in 0..=n {
        let v: Complex64 = (0..u.len() - d).map(|l| u[l + d] * u[l].conj()).sum();
        s.set(d as i64, v);
        s.set(-(d as i64), v.conj());
    }
    s
}

pub fn theorem3_optimal_g(m: &[f64], nu: usize, grid: &QuadratureGrid) -> Result<Theorem3> {
    if m.iter().any(|&v| !(v < 0.0)) {
        return Err(Error::NotNegativeDefinite("M(ω) must be negative on the grid"));
    }
    let c = grid.coeffs_real(m, nu)?;
    let tau0 = c.get(0).re;
    // τ1[i] = c_{-i}, τ2[a, b] = c_{b-a} with lags 1..ν; -τ2 is positive definite.
    let tau1 = CMat::from_fn(nu, 1, |i, _| c.get(-(i as i64 + 1)));
    let neg_tau2 = CMat::from_fn(nu, nu, |a, b| -c.get(b as i64 - a as i64));
    let x = if nu == 0 {
        CMat::zeros(0, 1)
    } else {
        let chol = Cholesky::new(&neg_tau2).map_err(|_| Error::Numerical("τ2 is singular".into()))?;
        -chol.solve(&tau1)
    };
    let quad = if nu == 0 { 0.0 } else { (tau1.adjoint() * &x)[(0, 0)].re };
    let s = quad - tau0;
    if !(s > 0.0) {
        return Err(Error::Numerical("degenerate spectrum in the optimal G".into()));
    }
    let u0 = 1.0 / s.sqrt();
    let u_hat: Vec<Complex64> = (0..nu).map(|i| -x[(i, 0)].conj() * u0).collect();
    let mut u = vec![c64(u0, 0.0)];
    u.extend_from_slice(&u_hat);
    let mut g = autocorrelation(&u);
    g.set(0, g.get(0) - 1.0);
    Ok(Theorem3 { u0, u_hat, g, rate: 2.0 * u0.ln() })
}

/// `1 + ∫ (log(1+G) + M (1+G)) dω / 2π`; errors when `1+G` is not positive.
pub fn theorem3_objective(m: &[f64], g: &[f64], grid: &QuadratureGrid) -> Result<f64> {
    let mut acc = Vec::with_capacity(m.len());
    for (&mi, &gi) in m.iter().zip(g) {
        if !(1.0 + gi > 0.0) {
            return Err(Error::GmiUndefined("1 + G(ω) must be positive"));
        }
        acc.push((1.0 + gi).ln() + mi * (1.0 + gi));
    }
    Ok(1.0 + grid.mean(&acc))
}

/// Roots of `Σ a_i z^i` (ascending coefficients, nonzero leading term).
fn poly_roots(a: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = a.len() - 1;
    if d == 0 {
        return Ok(vec![]);
    }
    let lead = a[d];
    let mut comp = CMat::zeros(d, d);
    for i in 0..d {
        comp[(0, i)] = -a[d - 1 - i] / lead;
        if i + 1 < d {
            comp[(i + 1, i)] = c64(1.0, 0.0);
        }
    }
    let mut roots: Vec<Complex64> =
        comp.eigenvalues().ok_or_else(|| Error::Numerical("root finding failed".into()))?.iter().copied().collect();
    // A few Newton steps tidy up the companion-matrix roots.
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (mut p, mut dp) = (ZERO, ZERO);
            for &ai in a.iter().rev() {
                dp = dp * *r + p;
                p = p * *r + ai;
            }
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.is_finite() {
                    *r -= step;
                }
            }
        }
    }
    Ok(roots)
}

fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![c64(1.0, 0.0)];
    for &r in roots {
        let mut q = vec![ZERO; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            q[i + 1] += c;
            q[i] -= c * r;
        }
        p = q;
    }
    p
}

fn normalize_phase(f: &mut [Complex64]) {
    if let Some(&f0) = f.iter().find(|z| z.norm() > 0.0) {
        let rot = f0.conj() / f0.norm();
        for z in f.iter_mut() {
            *z *= rot;
        }
    }
}

/// Causal minimum-phase `F` (zeros of `Σ f_k z^k` outside the unit disk)
/// with `|F(ω)|^2 = G(ω)`, returned as taps `f_0 .. f_ν` with `f_0 > 0`.
///
/// `G` must be strictly positive on the unit circle.
pub fn spectral_factor(g: &SpectralSeries, grid: &QuadratureGrid) -> Result<Vec<Complex64>> {
    let vals = grid.eval_real(g)?;
    if vals.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NotPositiveDefinite { pivot: 0 });
    }
    let nu = g.tap_len;
    let scale = g.coeffs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let eff = (1..=nu).rev().find(|&k| g.get(k as i64).norm() > 1e-14 * scale).unwrap_or(0);
    let mut f = if eff == 0 {
        vec![c64(g.get(0).re.sqrt(), 0.0)]
    } else {
        let a: Vec<Complex64> = (0..=2 * eff).map(|i| g.get(i as i64 - eff as i64)).collect();
        let mut roots = poly_roots(&a)?;
        roots.sort_by(|x, y| y.norm().partial_cmp(&x.norm()).unwrap());
        let outer = &roots[..eff];
        let mut p = poly_from_roots(outer);
        let pv = grid.eval(&SpectralSeries::causal(&p))?;
        let num: f64 = grid.mean(&vals);
        let den: f64 = grid.mean(&pv.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
        let sc = (num / den).sqrt();
        for z in p.iter_mut() {
            *z *= sc;
        }
        p
    };
    normalize_phase(&mut f);
    f.resize(nu + 1, ZERO);
    Ok(f)
}

/// Minimum-phase taps with the same `|H(ω)|` as `taps`.
pub fn min_phase_taps(taps: &[Complex64]) -> Result<Vec<Complex64>> {
    let first = taps.iter().position(|z| z.norm() > 0.0).ok_or_else(|| Error::InvalidInput("all-zero taps".into()))?;
    let last = taps.iter().rposition(|z| z.norm() > 0.0).unwrap();
    let a = &taps[first..=last];
    let roots = poly_roots(a)?;
    // Reflecting a zero through the unit circle: |e^{jω} - ρ| = |1 - conj(ρ) e^{jω}|.
    let mut p = vec![a[a.len() - 1]];
    for &r in &roots {
        let (c0, c1) = if r.norm() < 1.0 { (c64(1.0, 0.0), -r.conj()) } else { (-r, c64(1.0, 0.0)) };
        let mut q = vec![ZERO; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            q[i] += c * c0;
            q[i + 1] += c * c1;
        }
        p = q;
    }
    normalize_phase(&mut p);
    p.resize(taps.len(), ZERO);
    Ok(p)
}
