use crate::channel::{bit_log_probs, priors_from_llrs, symbol_log_priors, ChannelModel};
use crate::error::{Error, Result};
use crate::linalg::{c64, eye, hermitize, CMat, CVec, Cholesky, Complex64};

/// Per-symbol LMMSE estimate after subtracting the soft interference of all
/// other symbols, treated as `z_k = μ_k x_k + CN(0, μ_k (1 - μ_k))`.
/// Returns extrinsic bit LLRs.
pub fn lmmse_pic_demodulate(y: &[Complex64], ch: &ChannelModel, prior_llrs: &[f64]) -> Result<Vec<f64>> {
    let h = ch.h()?;
    let (n, k) = h.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("{} observations for {} receive dimensions", y.len(), n)));
    }
    let c = ch.constellation;
    let m = c.bits_per_symbol()?;
    let points = c.points()?;
    let prior = priors_from_llrs(prior_llrs, c)?;
    if prior.k() != k {
        return Err(Error::DimensionMismatch(format!("{} prior symbols for K = {}", prior.k(), k)));
    }
    let xh = CVec::from_vec(prior.x_hat.clone());
    let resid = CVec::from_vec(y.to_vec()) - h * &xh;
    let mut out = Vec::with_capacity(k * m);
    for j in 0..k {
        let mut cov: Vec<f64> = prior.p_diag.iter().map(|p| 1.0 - p).collect();
        cov[j] = 1.0;
        let hc = CMat::from_fn(n, k, |a, b| h[(a, b)] * cov[b]);
        let a = hermitize(&(&hc * h.adjoint() + eye(n) * c64(ch.n0, 0.0)));
        let hj = h.column(j).into_owned();
        let w = Cholesky::new(&a)?.solve(&CMat::from_column_slice(n, 1, hj.as_slice()));
        let mu = (hj.adjoint() * &w)[(0, 0)].re;
        let z = (w.adjoint() * (&resid + &hj * xh[j]))[(0, 0)];
        let var = (mu * (1.0 - mu)).max(f64::MIN_POSITIVE);
        let lp = symbol_log_priors(&prior_llrs[j * m..(j + 1) * m], m);
        let logp: Vec<f64> = points.iter().zip(&lp).map(|(x, l)| -(z - x * mu).norm_sqr() / var + l).collect();
        for b in 0..m {
            let lse = |bit: usize| {
                let v: Vec<f64> = logp.iter().enumerate().filter(|(d, _)| d >> (m - 1 - b) & 1 == bit).map(|(_, &v)| v).collect();
                let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
            };
            let (p0, p1) = bit_log_probs(prior_llrs[j * m + b]);
            out.push(lse(0) - lse(1) - (p0 - p1));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Constellation;

    #[test]
    fn identity_channel_is_matched_filter() {
        let ch = ChannelModel::matrix(eye(2), 0.5).with_constellation(Constellation::Qpsk);
        let y = [c64(0.3, -0.8), c64(-1.1, 0.2)];
        let llr = lmmse_pic_demodulate(&y, &ch, &[0.0; 4]).unwrap();
        // QPSK on CN(0, N0): LLR = 4 Re{y} / (sqrt 2 N0) per component.
        let s = 4.0 / (2f64.sqrt() * 0.5);
        let expect = [s * 0.3, s * -0.8, s * -1.1, s * 0.2];
        for (a, b) in llr.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }
}
