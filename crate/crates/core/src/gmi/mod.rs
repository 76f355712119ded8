//! GMI of the mismatched demodulator `exp(2Re{x^H(Vy - Rx̂)} - x^H G x)`,
//! the MSE matrices it depends on, the optimal banded `G` and the reference
//! parameterizations.

mod reference;
mod theorem2;

pub use reference::{ezf_params, map_params, tmf_params};
pub use theorem2::{solve_optimal_g_banded, theorem2_objective};

use crate::channel::{ChannelModel, PriorState};
use crate::error::{Error, Result};
use crate::linalg::{c64, diag_real, eye, hermitize, Cholesky, BandSpec, CMat};

/// Front-end filter `V` (K x N), cancelation matrix `R` and trellis matrix `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsParams {
    pub v: CMat,
    pub r: CMat,
    pub g: CMat,
    pub band: BandSpec,
}

/// `M = H^H (N0 I + H H^H)^{-1} H - I` and `M̃ = P (I + M) P - P`.
#[derive(Debug, Clone, PartialEq)]
pub struct MseMatrices {
    pub m: CMat,
    pub m_tilde: CMat,
}

/// GMI in nats for explicit `H`, `N0`, `diag(P)` and parameters.
pub fn gmi_raw(h: &CMat, n0: f64, p: &[f64], v: &CMat, r: &CMat, g: &CMat) -> Result<f64> {
    let k = h.ncols();
    if v.nrows() != k || v.ncols() != h.nrows() || r.shape() != (k, k) || g.shape() != (k, k) || p.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "H {:?}, V {:?}, R {:?}, G {:?}, P {}",
            h.shape(),
            v.shape(),
            r.shape(),
            g.shape(),
            p.len()
        )));
    }
    let ig = hermitize(&(eye(k) + g));
    let chol = Cholesky::new(&ig).map_err(|_| Error::GmiUndefined("I + G is not positive definite"))?;
    let logdet = chol.logdet();
    let pm = diag_real(p);
    let vh = v * h;
    let rp = r * &pm;
    let x = &vh * &pm * r.adjoint();
    let l = v * v.adjoint() * c64(n0, 0.0) + &vh * vh.adjoint() - &x - x.adjoint() + &rp * r.adjoint();
    let quad = chol.solve(&l).trace().re;
    Ok(logdet - g.trace().re + 2.0 * (vh.trace() - rp.trace()).re - quad)
}

pub fn gmi_eval(ch: &ChannelModel, prior: &PriorState, p: &CsParams) -> Result<f64> {
    gmi_raw(ch.h()?, ch.n0, &prior.p_diag, &p.v, &p.r, &p.g)
}

/// `M = -(I + H^H H / N0)^{-1}`, written as `-N0 (N0 I + H^H H)^{-1}`.
pub fn mse_matrix(h: &CMat, n0: f64) -> Result<CMat> {
    let k = h.ncols();
    let a = h.adjoint() * h + eye(k) * c64(n0, 0.0);
    Ok(hermitize(&(Cholesky::new(&hermitize(&a))?.inverse() * c64(-n0, 0.0))))
}

pub fn m_tilde(m: &CMat, p: &[f64]) -> CMat {
    let pm = diag_real(p);
    hermitize(&(&pm * (eye(m.nrows()) + m) * &pm - &pm))
}

pub fn build_mse_matrices(ch: &ChannelModel, prior: &PriorState) -> Result<MseMatrices> {
    let m = mse_matrix(ch.h()?, ch.n0)?;
    let m_tilde = m_tilde(&m, &prior.p_diag);
    Ok(MseMatrices { m, m_tilde })
}
