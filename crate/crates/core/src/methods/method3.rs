use super::MethodResult;
use crate::channel::{ChannelModel, PriorState};
use crate::error::{Error, Result};
use crate::gmi::{solve_optimal_g_banded, CsParams};
use crate::linalg::{c64, diag_real, eye, hermitize, off_band, BandSpec, CMat, Cholesky, RShape};

/// Intermediate matrices of Method III.
#[derive(Debug, Clone)]
pub struct Method3Parts {
    /// Stacked per-symbol Wiener rows `Ŵ` (K x N).
    pub w_hat: CMat,
    /// `Ĉ = [Ŵ H]` outside the band `[-nu, nu]`.
    pub c_hat: CMat,
    /// Negative error covariance of `x̃ = Ŵ y - Ĉ x̂`.
    pub m_hat: CMat,
}

/// Rows `ŵ_k = h_k^H (H C_k H^H + N0 I)^{-1}`, where `C_k` holds `1 - p_n`
/// for symbols outside `[k - nu, k + nu]` and `1` inside.
///
/// `C_k` differs from `diag(1 - p)` only on the window, so every row is a
/// low-rank update of one base inverse.
pub fn wiener_rows(h: &CMat, n0: f64, p: &[f64], nu: usize) -> Result<CMat> {
    let (n, k) = h.shape();
    if p.len() != k {
        return Err(Error::DimensionMismatch("prior length differs from K".into()));
    }
    let one_minus: Vec<f64> = p.iter().map(|v| 1.0 - v).collect();
    let base = hermitize(&(h * diag_real(&one_minus) * h.adjoint() + eye(n) * c64(n0, 0.0)));
    let z = Cholesky::new(&base)?.solve(h);
    let hg = h.adjoint() * &z;
    let mut w = CMat::zeros(k, n);
    for row in 0..k {
        let lo = row.saturating_sub(nu);
        let hi = (row + nu).min(k - 1);
        let win: Vec<usize> = (lo..=hi).filter(|&i| p[i] > 0.0).collect();
        let mut x = z.column(row).into_owned();
        if !win.is_empty() {
            let s: Vec<f64> = win.iter().map(|&i| p[i].sqrt()).collect();
            let w_len = win.len();
            let core = CMat::from_fn(w_len, w_len, |a, b| {
                let d = if a == b { 1.0 } else { 0.0 };
                c64(d, 0.0) + hg[(win[a], win[b])] * s[a] * s[b]
            });
            let rhs = CMat::from_fn(w_len, 1, |a, _| hg[(win[a], row)] * s[a]);
            let sol = Cholesky::new(&hermitize(&core))?.solve(&rhs);
            for (a, &i) in win.iter().enumerate() {
                x -= z.column(i) * (sol[(a, 0)] * s[a]);
            }
        }
        w.set_row(row, &x.adjoint());
    }
    Ok(w)
}

pub fn method3_parts(h: &CMat, n0: f64, p: &[f64], nu: usize) -> Result<Method3Parts> {
    let k = h.ncols();
    let w_hat = wiener_rows(h, n0, p, nu)?;
    let wh = &w_hat * h;
    let c_hat = off_band(&wh, nu);
    let pm = diag_real(p);
    let pc = &pm * c_hat.adjoint();
    let x = &wh * &pc + &wh - &pc;
    let m_hat = hermitize(
        &(&x + x.adjoint()
            - &wh * wh.adjoint()
            - &w_hat * w_hat.adjoint() * c64(n0, 0.0)
            - &c_hat * &pc
            - eye(k)),
    );
    Ok(Method3Parts { w_hat, c_hat, m_hat })
}

/// Method III on an explicit matrix channel.
pub fn method3_design_with(h: &CMat, n0: f64, p: &[f64], nu: usize) -> Result<MethodResult> {
    let k = h.ncols();
    let parts = method3_parts(h, n0, p, nu)?;
    let g = solve_optimal_g_banded(&parts.m_hat, nu)?;
    let ig = eye(k) + &g;
    let gmi = Cholesky::new(&hermitize(&ig))?.logdet();
    Ok(MethodResult {
        params: CsParams {
            v: &ig * &parts.w_hat,
            r: &ig * &parts.c_hat,
            g,
            band: BandSpec::new(k, nu, RShape::B),
        },
        forney: None,
        gmi,
        delta_term: 0.0,
        iterations: 0,
        converged: true,
        trace: vec![gmi],
    })
}

/// Closed-form design from LMMSE parallel interference cancelation.
pub fn method3_design(ch: &ChannelModel, prior: &PriorState, nu: usize) -> Result<MethodResult> {
    method3_design_with(ch.h()?, ch.n0, &prior.p_diag, nu)
}
