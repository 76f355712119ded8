use crate::error::{Error, Result};
use crate::linalg::{band, c64, hermitize, trace_prod, Cholesky, CMat, ZERO};

/// `K + log det(I + G) + Tr(M (I + G))`.
pub fn theorem2_objective(m: &CMat, g: &CMat) -> Result<f64> {
    let k = m.nrows();
    let ig = CMat::identity(k, k) + g;
    let ld = Cholesky::new(&hermitize(&ig))?.logdet();
    Ok(k as f64 + ld + trace_prod(m, &ig).re)
}

/// Banded `G` maximizing `log det(I + G) + Tr(M (I + G))`, characterized by
/// `[(I + G)^{-1}]_nu = -[M]_nu`.
///
/// Builds the upper factor `U` of `I + G = U^H U` one row at a time: with
/// `B = -M` and window `W = [k, min(k + nu, K - 1)]`, solve `B[W, W] z = e_1`
/// and set row `k` of `U` on `W` to `(z / sqrt(z_1))^H`.
pub fn solve_optimal_g_banded(m: &CMat, nu: usize) -> Result<CMat> {
    let k = m.nrows();
    if !m.is_square() || k == 0 {
        return Err(Error::DimensionMismatch("M must be square and nonempty".into()));
    }
    if nu >= k {
        return Err(Error::InvalidInput(format!("nu = {nu} exceeds K - 1 = {}", k - 1)));
    }
    let b = hermitize(&(-m));
    Cholesky::new(&b).map_err(|_| Error::NotNegativeDefinite("M in the optimal G problem"))?;
    let mut u = CMat::zeros(k, k);
    for row in 0..k {
        let end = (row + nu).min(k - 1);
        let w = end - row + 1;
        let sub = b.view((row, row), (w, w)).into_owned();
        let mut e1 = CMat::zeros(w, 1);
        e1[(0, 0)] = c64(1.0, 0.0);
        let z = Cholesky::new(&sub)?.solve(&e1);
        let z1 = z[(0, 0)].re;
        if !(z1 > 0.0) {
            return Err(Error::Numerical(format!("nonpositive pivot in row {row}")));
        }
        let s = z1.sqrt();
        for j in 0..w {
            u[(row, row + j)] = z[(j, 0)].conj() / s;
        }
    }
    let mut g = hermitize(&(u.adjoint() * u));
    for i in 0..k {
        g[(i, i)] -= c64(1.0, 0.0);
        g[(i, i)].im = 0.0;
    }
    let g = band(&g, nu);
    debug_assert!(g.iter().all(|z| z.re.is_finite()) && g[(0, 0)] != ZERO || k > 0);
    Ok(g)
}
