use super::{solve_optimal_g_banded, CsParams};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::linalg::{band, c64, hermitize, BandSpec, Cholesky, CMat, RShape};

fn gram(h: &CMat) -> CMat {
    hermitize(&(h.adjoint() * h))
}

/// `V = H^H / N0`, `R = 0`, `G = H^H H / N0`: the exact likelihood.
pub fn map_params(ch: &ChannelModel) -> Result<CsParams> {
    let h = ch.h()?;
    let k = h.ncols();
    let s = c64(1.0 / ch.n0, 0.0);
    Ok(CsParams {
        v: h.adjoint() * s,
        r: CMat::zeros(k, k),
        g: gram(h) * s,
        band: BandSpec::new(k, k.saturating_sub(1), RShape::B),
    })
}

/// Extended zero forcing: `V = (I + G)(H^H H)^{-1} H^H`, `R = 0`, with `G`
/// solving `[(I + G)^{-1}]_nu = N0 [(H^H H)^{-1}]_nu`.
pub fn ezf_params(ch: &ChannelModel, nu: usize) -> Result<CsParams> {
    let h = ch.h()?;
    let k = h.ncols();
    let q = gram(h);
    let qinv = Cholesky::new(&q)
        .map_err(|_| Error::NotInvertible("Gram matrix H^H H is singular"))?
        .inverse();
    let g = solve_optimal_g_banded(&(&qinv * c64(-ch.n0, 0.0)), nu)?;
    let v = (CMat::identity(k, k) + &g) * qinv * h.adjoint();
    Ok(CsParams {
        v,
        r: CMat::zeros(k, k),
        g,
        band: BandSpec::new(k, nu, RShape::B),
    })
}

/// Truncated matched filter: `V = H^H / N0`, `R = 0`, `G = [H^H H / N0]_nu`.
pub fn tmf_params(ch: &ChannelModel, nu: usize) -> Result<CsParams> {
    let mut p = map_params(ch)?;
    p.g = band(&p.g, nu);
    p.band = BandSpec::new(p.g.nrows(), nu, RShape::B);
    Ok(p)
}
