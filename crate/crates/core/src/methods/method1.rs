use super::{
    gradient_ascent, has_prior, lower_band_positions, pack, unpack_lower, ForneyParams, MethodResult,
    OptimizerConfig, P_EPS,
};
use crate::channel::{ChannelModel, PriorState};
use crate::error::{Error, Result};
use crate::gmi::{m_tilde, mse_matrix, solve_optimal_g_banded};
use crate::linalg::{
    c64, diag_real, eye, hermitize, inverse, lower_upper_factor, min_eigenvalue, trace_prod, BandSpec, CMat,
    Cholesky, IndicationMap, RShape, ZERO,
};

/// Objective pieces of Method I at a given `F`.
#[derive(Debug, Clone)]
pub struct Method1Point {
    /// `K + log det(I + F^H F) + Tr(M (I + F^H F))`.
    pub i1: f64,
    /// `δ1 = -z^H B̂1^{-1} z`.
    pub delta: f64,
    /// Optimal `T` for this `F`.
    pub t: CMat,
    /// Partial derivatives on the lower band of `F`: real part with respect to
    /// `Re F(i, j)`, imaginary part with respect to `Im F(i, j)`.
    pub grad: Option<CMat>,
}

struct Ctx<'a> {
    h: &'a CMat,
    n0: f64,
    p: &'a [f64],
    m: CMat,
    mt: CMat,
    nu: usize,
}

impl<'a> Ctx<'a> {
    fn new(ch: &'a ChannelModel, prior: &'a PriorState, nu: usize) -> Result<Self> {
        let h = ch.h()?;
        if prior.k() != h.ncols() {
            return Err(Error::DimensionMismatch("prior length differs from K".into()));
        }
        let m = mse_matrix(h, ch.n0)?;
        let mt = m_tilde(&m, &prior.p_diag);
        Ok(Self { h, n0: ch.n0, p: &prior.p_diag, m, mt, nu })
    }

    fn k(&self) -> usize {
        self.h.ncols()
    }

    fn point(&self, f: &CMat, want_grad: bool) -> Result<Method1Point> {
        let k = self.k();
        let ifhf = hermitize(&(eye(k) + f.adjoint() * f));
        let chol = Cholesky::new(&ifhf)?;
        let j1 = chol.inverse();
        let i1 = k as f64 + chol.logdet() + trace_prod(&self.m, &ifhf).re;
        let pm = diag_real(self.p);
        let map = IndicationMap::forney_t(k, self.nu).restrict_columns(|j| self.p[j] > P_EPS);
        let (delta, y) = if map.is_empty() {
            (0.0, CMat::from_element(k, k, ZERO))
        } else {
            let b = hermitize(&(f * &j1 * f.adjoint()));
            let bhat = map.reduce_kron(&self.mt.map(|z| z.conj()), &b);
            let z = map.gather(&(f * &self.m * &pm));
            let zc = CMat::from_column_slice(z.len(), 1, z.as_slice());
            let neg = Cholesky::new(&hermitize(&(-bhat))).map_err(|_| Error::NotInvertible("B̂1 is singular"))?;
            let y = -neg.solve(&zc);
            let delta = -(zc.adjoint() * &y)[(0, 0)].re;
            let yv = crate::linalg::CVec::from_column_slice(y.as_slice());
            (delta, map.scatter(&yv))
        };
        let grad = if want_grad {
            let e = Cholesky::new(&hermitize(&(eye(k) + f * f.adjoint())))?.inverse();
            let q = &y * &self.mt * y.adjoint();
            let full = (f * &self.m + f * &j1 - &y * &pm * &self.m + &e * q * &e * f) * c64(2.0, 0.0);
            let mut g = CMat::from_element(k, k, ZERO);
            for (i, j) in lower_band_positions(k, self.nu) {
                g[(i, j)] = if i == j { c64(full[(i, j)].re, 0.0) } else { full[(i, j)] };
            }
            Some(g)
        } else {
            None
        };
        Ok(Method1Point { i1, delta, t: -y, grad })
    }

    fn w_opt(&self, f: &CMat, t: &CMat) -> Result<CMat> {
        let k = self.k();
        let finv_h = inverse(f)?.adjoint();
        let pm = diag_real(self.p);
        let a = hermitize(&(self.h.adjoint() * self.h + eye(k) * c64(self.n0, 0.0)));
        let front = Cholesky::new(&a)?.solve(&self.h.adjoint());
        Ok((finv_h + f + t * pm) * front)
    }

    fn check_f(&self, f: &CMat) -> Result<()> {
        let k = self.k();
        if f.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!("F is {:?}, K = {k}", f.shape())));
        }
        for i in 0..k {
            for j in 0..k {
                let inside = i >= j && i - j <= self.nu;
                if !inside && f[(i, j)] != ZERO {
                    return Err(Error::InvalidInput(format!("F({i},{j}) lies outside the band [0, nu]")));
                }
            }
            if !(f[(i, i)].re > 0.0) || f[(i, i)].im != 0.0 {
                return Err(Error::InvalidInput("F needs a positive real diagonal".into()));
            }
        }
        Ok(())
    }
}

/// `I1(F) + δ1(F)`.
pub fn method1_objective(ch: &ChannelModel, prior: &PriorState, f: &CMat, nu: usize) -> Result<f64> {
    let ctx = Ctx::new(ch, prior, nu)?;
    ctx.check_f(f)?;
    let pt = ctx.point(f, false)?;
    Ok(pt.i1 + pt.delta)
}

/// Optimal `W` and `T` for a given `F`, with the resulting GMI `I1 + δ1`.
pub fn method1_closed_forms(
    ch: &ChannelModel,
    prior: &PriorState,
    f: &CMat,
    nu: usize,
) -> Result<(CMat, CMat, f64)> {
    let ctx = Ctx::new(ch, prior, nu)?;
    ctx.check_f(f)?;
    let pt = ctx.point(f, false)?;
    let w = ctx.w_opt(f, &pt.t)?;
    Ok((w, pt.t, pt.i1 + pt.delta))
}

/// Gradient of `I1 + δ1` over the lower band of `F`.
pub fn method1_gradient(ch: &ChannelModel, prior: &PriorState, f: &CMat, nu: usize) -> Result<CMat> {
    let ctx = Ctx::new(ch, prior, nu)?;
    ctx.check_f(f)?;
    Ok(ctx.point(f, true)?.grad.expect("requested"))
}

/// Maximizes `I1 + δ1` over `F`, starting from the factor of the `P = 0`
/// optimal `G` (shifted to be positive definite when needed).
pub fn method1_optimize(
    ch: &ChannelModel,
    prior: &PriorState,
    nu: usize,
    cfg: &OptimizerConfig,
) -> Result<MethodResult> {
    let ctx = Ctx::new(ch, prior, nu)?;
    let k = ctx.k();
    let mut g0 = solve_optimal_g_banded(&ctx.m, nu)?;
    let lmin = min_eigenvalue(&g0);
    let regularized = lmin < cfg.init_reg_epsilon;
    if regularized {
        g0 += eye(k) * c64(cfg.init_reg_epsilon - lmin, 0.0);
    }
    let f0 = lower_upper_factor(&g0)?;
    let pos = lower_band_positions(k, nu);
    let (f, iterations, converged, trace) = if !regularized && !has_prior(ctx.p) {
        let v = ctx.point(&f0, false)?.i1;
        (f0, 0, true, vec![v])
    } else {
        let eval = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            let f = unpack_lower(x, k, &pos);
            let pt = ctx.point(&f, true)?;
            Ok((pt.i1 + pt.delta, pack(&pt.grad.expect("requested"), &pos)))
        };
        let diag_slots: Vec<usize> = {
            let mut n = 0;
            let mut v = Vec::new();
            for &(i, j) in &pos {
                if i == j {
                    v.push(n);
                    n += 1;
                } else {
                    n += 2;
                }
            }
            v
        };
        let project = |x: &mut [f64]| {
            for &s in &diag_slots {
                x[s] = x[s].abs().max(1e-12);
            }
        };
        let r = gradient_ascent(pack(&f0, &pos), eval, project, cfg)?;
        (unpack_lower(&r.x, k, &pos), r.iterations, r.converged, r.trace)
    };
    let pt = ctx.point(&f, false)?;
    let w = ctx.w_opt(&f, &pt.t)?;
    let forney = ForneyParams { w, t: pt.t, f, band: BandSpec::new(k, nu, RShape::A) };
    Ok(MethodResult {
        params: forney.to_cs(),
        forney: Some(forney),
        gmi: pt.i1 + pt.delta,
        delta_term: pt.delta,
        iterations,
        converged,
        trace,
    })
}
