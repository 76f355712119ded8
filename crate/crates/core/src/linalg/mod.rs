//! Dense complex matrix kernels shared by the rest of the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Band conventions follow the
//! usual "banded within `[-n1, n2]`" notation where `n1` counts the *upper*
//! diagonals and `n2` the lower ones.

mod band;
mod chol;
mod indication;
mod kron;

pub use band::{band, band_project, band_violation, banded_trace_identity_check, off_band};
pub use chol::{chol_logdet, hpd_inverse, lower_upper_factor, Cholesky};
pub use indication::{BandSpec, IndicationMap, RShape};
pub use kron::{kron_vec_apply, unvec, vec_of};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(k: usize) -> CMat {
    CMat::identity(k, k)
}

/// Diagonal matrix with real entries.
pub fn diag_real(d: &[f64]) -> CMat {
    let mut m = CMat::zeros(d.len(), d.len());
    for (i, &v) in d.iter().enumerate() {
        m[(i, i)] = c64(v, 0.0);
    }
    m
}

/// Real matrix given row by row.
pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, k, |i, j| c64(rows[i][j], 0.0))
}

/// `(A + A^H) / 2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * c64(0.5, 0.0)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace of `A B` without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> Complex64 {
    let mut s = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// General inverse through LU.
pub fn inverse(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let inv = a
        .clone()
        .try_inverse()
        .ok_or(Error::NotInvertible("singular matrix"))?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotInvertible("singular matrix"));
    }
    Ok(inv)
}

/// Solve `A X = B` through LU.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or(Error::NotInvertible("singular system"))?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotInvertible("singular system"));
    }
    Ok(x)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let e = SymmetricEigen::new(hermitize(a));
    let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}
