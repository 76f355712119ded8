use super::{
    gradient_ascent, has_prior, lower_band_positions, pack, unpack_hermitian, MethodResult, OptimizerConfig, P_EPS,
};
use crate::channel::{ChannelModel, PriorState};
use crate::error::{Error, Result};
use crate::gmi::{m_tilde, mse_matrix, solve_optimal_g_banded, CsParams};
use crate::linalg::{
    c64, diag_real, eye, hermitize, trace_prod, BandSpec, CMat, CVec, Cholesky, RShape, ZERO,
};

/// Objective pieces of Method II at a given `G`.
#[derive(Debug, Clone)]
pub struct Method2Point {
    /// `K + log det(I + G) + Tr(M (I + G))`.
    pub i2: f64,
    /// `δ2 = -d^H B̂2^{-1} d`.
    pub delta: f64,
    /// Optimal `R` for this `G`.
    pub r: CMat,
    /// Partial derivatives on the lower band of `G` (the upper band follows
    /// by symmetry): diagonal entries are real, off-diagonal entries carry the
    /// derivative with respect to `Re G(i, j)` and `Im G(i, j)`.
    pub grad: Option<CMat>,
}

struct Ctx<'a> {
    h: &'a CMat,
    n0: f64,
    p: &'a [f64],
    m: CMat,
    mt: CMat,
    spec: BandSpec,
}

impl<'a> Ctx<'a> {
    fn new(ch: &'a ChannelModel, prior: &'a PriorState, nu: usize, shape: RShape) -> Result<Self> {
        let h = ch.h()?;
        let k = h.ncols();
        if prior.k() != k {
            return Err(Error::DimensionMismatch("prior length differs from K".into()));
        }
        let m = mse_matrix(h, ch.n0)?;
        let mt = m_tilde(&m, &prior.p_diag);
        Ok(Self { h, n0: ch.n0, p: &prior.p_diag, m, mt, spec: BandSpec::new(k, nu, shape) })
    }

    fn point(&self, g: &CMat, want_grad: bool) -> Result<Method2Point> {
        let k = self.spec.k;
        let ig = hermitize(&(eye(k) + g));
        let chol = Cholesky::new(&ig)?;
        let j = chol.inverse();
        let i2 = k as f64 + chol.logdet() + trace_prod(&self.m, &ig).re;
        let map = self.spec.indication_map().restrict_columns(|c| self.p[c] > P_EPS);
        let (delta, y) = if map.is_empty() {
            (0.0, CMat::from_element(k, k, ZERO))
        } else {
            let bhat = map.reduce_kron(&self.mt.map(|z| z.conj()), &j);
            let d = map.gather(&(&self.m * diag_real(self.p)));
            let dc = CMat::from_column_slice(d.len(), 1, d.as_slice());
            let neg = Cholesky::new(&hermitize(&(-bhat))).map_err(|_| Error::NotInvertible("B̂2 is singular"))?;
            let y = -neg.solve(&dc);
            let delta = -(dc.adjoint() * &y)[(0, 0)].re;
            (delta, map.scatter(&CVec::from_column_slice(y.as_slice())))
        };
        let grad = if want_grad {
            let q = &y * &self.mt * y.adjoint();
            let gamma = &j + &self.m - &j * q * &j;
            let mut out = CMat::from_element(k, k, ZERO);
            for (a, b) in lower_band_positions(k, self.spec.nu) {
                out[(a, b)] = if a == b { c64(gamma[(a, a)].re, 0.0) } else { gamma[(a, b)] * c64(2.0, 0.0) };
            }
            Some(out)
        } else {
            None
        };
        Ok(Method2Point { i2, delta, r: -y, grad })
    }

    fn v_opt(&self, g: &CMat, r: &CMat) -> Result<CMat> {
        let k = self.spec.k;
        let a = hermitize(&(self.h.adjoint() * self.h + eye(k) * c64(self.n0, 0.0)));
        let front = Cholesky::new(&a)?.solve(&self.h.adjoint());
        Ok((eye(k) + g + r * diag_real(self.p)) * front)
    }

    fn check_g(&self, g: &CMat) -> Result<()> {
        let k = self.spec.k;
        if g.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!("G is {:?}, K = {k}", g.shape())));
        }
        if crate::linalg::band_violation(g, self.spec.nu, self.spec.nu) > 0.0 {
            return Err(Error::InvalidInput("G has entries outside its band".into()));
        }
        Ok(())
    }
}

/// `I2(G) + δ2(G)`.
pub fn method2_objective(ch: &ChannelModel, prior: &PriorState, g: &CMat, nu: usize, shape: RShape) -> Result<f64> {
    let ctx = Ctx::new(ch, prior, nu, shape)?;
    ctx.check_g(g)?;
    let pt = ctx.point(g, false)?;
    Ok(pt.i2 + pt.delta)
}

/// Optimal `V` and `R` for a given `G`, with the resulting GMI.
pub fn method2_closed_forms(
    ch: &ChannelModel,
    prior: &PriorState,
    g: &CMat,
    nu: usize,
    shape: RShape,
) -> Result<(CMat, CMat, f64)> {
    let ctx = Ctx::new(ch, prior, nu, shape)?;
    ctx.check_g(g)?;
    let pt = ctx.point(g, false)?;
    let v = ctx.v_opt(g, &pt.r)?;
    Ok((v, pt.r, pt.i2 + pt.delta))
}

/// Gradient of `I2 + δ2` over the lower band of `G`.
pub fn method2_gradient(ch: &ChannelModel, prior: &PriorState, g: &CMat, nu: usize, shape: RShape) -> Result<CMat> {
    let ctx = Ctx::new(ch, prior, nu, shape)?;
    ctx.check_g(g)?;
    Ok(ctx.point(g, true)?.grad.expect("requested"))
}

/// Maximizes the concave `I2 + δ2` over the Hermitian band of `G`, starting
/// from the `P = 0` optimum (which is returned as is when `P = 0`).
pub fn method2_optimize(
    ch: &ChannelModel,
    prior: &PriorState,
    nu: usize,
    shape: RShape,
    cfg: &OptimizerConfig,
) -> Result<MethodResult> {
    let ctx = Ctx::new(ch, prior, nu, shape)?;
    let k = ctx.spec.k;
    let g0 = solve_optimal_g_banded(&ctx.m, nu)?;
    let pos = lower_band_positions(k, nu);
    let (g, iterations, converged, trace) = if !has_prior(ctx.p) {
        let v = ctx.point(&g0, false)?.i2;
        (g0, 0, true, vec![v])
    } else {
        let eval = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            let g = unpack_hermitian(x, k, &pos);
            let pt = ctx.point(&g, true)?;
            Ok((pt.i2 + pt.delta, pack(&pt.grad.expect("requested"), &pos)))
        };
        let r = gradient_ascent(pack(&g0, &pos), eval, |_| {}, cfg)?;
        (unpack_hermitian(&r.x, k, &pos), r.iterations, r.converged, r.trace)
    };
    let pt = ctx.point(&g, false)?;
    let v = ctx.v_opt(&g, &pt.r)?;
    Ok(MethodResult {
        params: CsParams { v, r: pt.r, g, band: ctx.spec },
        forney: None,
        gmi: pt.i2 + pt.delta,
        delta_term: pt.delta,
        iterations,
        converged,
        trace,
    })
}
