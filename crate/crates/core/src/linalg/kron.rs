use super::{CMat, CVec};
use crate::error::{Error, Result};

/// Column-stacked `vec(X)`.
pub fn vec_of(x: &CMat) -> CVec {
    CVec::from_iterator(x.len(), x.iter().copied())
}

/// Inverse of [`vec_of`].
pub fn unvec(x: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, x.as_slice())
}

/// `(A ⊗ B) x` through `(A ⊗ B) vec(X) = vec(B X A^T)`.
pub fn kron_vec_apply(a: &CMat, b: &CMat, x: &CVec) -> Result<CVec> {
    if x.len() != a.ncols() * b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "kron of {}x{} and {}x{} applied to vector of length {}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            x.len()
        )));
    }
    let xm = unvec(x, b.ncols(), a.ncols());
    Ok(vec_of(&(b * xm * a.transpose())))
}
