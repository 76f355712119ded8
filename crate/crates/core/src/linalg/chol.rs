use super::{c64, CMat, ZERO};
use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `L L^H = A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    pub l: CMat,
}

impl Cholesky {
    pub fn new(a: &CMat) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "cholesky of {}x{} matrix",
                n,
                a.ncols()
            )));
        }
        let mut l = CMat::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let djj = d.sqrt();
            l[(j, j)] = c64(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn logdet(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|z| z.re.ln()).sum::<f64>()
    }

    /// Solve `A x = b` for each column of `b`.
    pub fn solve(&self, b: &CMat) -> CMat {
        let n = self.l.nrows();
        let mut x = b.clone();
        for col in 0..x.ncols() {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= self.l[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / self.l[(i, i)];
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in i + 1..n {
                    s -= self.l[(k, i)].conj() * x[(k, col)];
                }
                x[(i, col)] = s / self.l[(i, i)];
            }
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        let n = self.l.nrows();
        super::hermitize(&self.solve(&CMat::identity(n, n)))
    }
}

/// Cholesky factor and `log det A` of a Hermitian positive definite matrix.
pub fn chol_logdet(a: &CMat) -> Result<(CMat, f64)> {
    let c = Cholesky::new(a)?;
    let ld = c.logdet();
    Ok((c.l, ld))
}

/// Inverse of a Hermitian positive definite matrix.
pub fn hpd_inverse(a: &CMat) -> Result<CMat> {
    Ok(Cholesky::new(a)?.inverse())
}

/// Lower-triangular `F` with positive diagonal and `F^H F = A`.
///
/// This is the Cholesky factor of the index-reversed matrix, reversed back.
/// A band `[-nu, nu]` in `A` gives `F` banded within `[0, nu]`.
pub fn lower_upper_factor(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let rev = CMat::from_fn(n, n, |i, j| a[(n - 1 - i, n - 1 - j)]);
    let l = Cholesky::new(&rev)?.l;
    // J L J is upper triangular and A = (J L J)(J L J)^H, so F = (J L J)^H.
    let u = CMat::from_fn(n, n, |i, j| l[(n - 1 - i, n - 1 - j)]);
    let mut f = u.adjoint();
    for i in 0..n {
        for j in i + 1..n {
            f[(i, j)] = ZERO;
        }
    }
    Ok(f)
}
