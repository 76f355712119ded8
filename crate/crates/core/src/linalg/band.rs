use super::{inverse, trace_prod, CMat, ZERO};
use crate::error::Result;

/// Keep the diagonals `l - k <= upper` and `k - l <= lower`, zero the rest.
///
/// `upper` is the count of kept super-diagonals and `lower` the count of kept
/// sub-diagonals, so `band_project(a, n1, n2)` is the projection onto matrices
/// banded within `[-n1, n2]`.
pub fn band_project(a: &CMat, upper: usize, lower: usize) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let keep = if j >= i { j - i <= upper } else { i - j <= lower };
        if keep {
            a[(i, j)]
        } else {
            ZERO
        }
    })
}

/// Symmetric band `[A]_nu`.
pub fn band(a: &CMat, nu: usize) -> CMat {
    band_project(a, nu, nu)
}

/// Complement `[A]_{\nu} = A - [A]_nu`.
pub fn off_band(a: &CMat, nu: usize) -> CMat {
    a - band(a, nu)
}

/// Largest magnitude outside the band `[-upper, lower]`.
pub fn band_violation(a: &CMat, upper: usize, lower: usize) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let inside = if j >= i { j - i <= upper } else { i - j <= lower };
            if !inside {
                m = m.max(a[(i, j)].norm());
            }
        }
    }
    m
}

/// For `a1` banded within `[-nu, nu]` with `[a1^{-1}]_nu == [a2]_nu`, checks
/// that `Tr(a1 a2) == K` to within `1e-9` relative.
pub fn banded_trace_identity_check(a1: &CMat, a2: &CMat, nu: usize) -> Result<bool> {
    let inv = inverse(a1)?;
    let k = a1.nrows() as f64;
    let band_ok = super::max_abs(&(band(&inv, nu) - band(a2, nu))) <= 1e-9 * (1.0 + super::max_abs(&inv));
    let t = trace_prod(a1, a2);
    Ok(band_ok && (t.re - k).abs() <= 1e-9 * k && t.im.abs() <= 1e-9 * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, eye, max_abs};
    use proptest::prelude::*;

    fn cm(rows: usize, cols: usize, vals: &[f64]) -> CMat {
        CMat::from_fn(rows, cols, |i, j| {
            let n = (i * cols + j) * 2;
            c64(vals[n % vals.len()], vals[(n + 1) % vals.len()])
        })
    }

    #[test]
    fn identity_is_banded() {
        assert_eq!(band_project(&eye(3), 1, 1), eye(3));
    }

    #[test]
    fn diagonal_extraction() {
        let ones = CMat::from_element(3, 3, c64(1.0, 0.0));
        assert_eq!(band_project(&ones, 0, 0), eye(3));
    }

    #[test]
    fn orientation_upper_first() {
        let ones = CMat::from_element(3, 3, c64(1.0, 0.0));
        let b = band_project(&ones, 1, 0);
        assert_eq!(b[(0, 1)], c64(1.0, 0.0));
        assert_eq!(b[(1, 0)], ZERO);
        assert_eq!(b[(0, 2)], ZERO);
    }

    #[test]
    fn trace_identity_examples() {
        let a1 = eye(4) * c64(2.0, 0.0);
        let mut a2 = eye(4) * c64(0.5, 0.0);
        a2[(0, 3)] = c64(7.0, -1.0);
        a2[(2, 0)] = c64(-3.0, 0.0);
        assert!(banded_trace_identity_check(&a1, &a2, 0).unwrap());

        let mut t = eye(4) * c64(3.0, 0.0);
        for i in 0..3 {
            t[(i, i + 1)] = c64(1.0, 0.5);
            t[(i + 1, i)] = c64(1.0, -0.5);
        }
        let inv = inverse(&t).unwrap();
        assert!(banded_trace_identity_check(&t, &inv, 1).unwrap());

        let mut a2 = eye(4);
        a2[(0, 2)] = c64(5.0, 0.0);
        a2[(3, 0)] = c64(0.0, 2.0);
        assert!(banded_trace_identity_check(&eye(4), &a2, 1).unwrap());
    }

    #[test]
    fn trace_identity_singular_errors() {
        assert!(banded_trace_identity_check(&CMat::zeros(3, 3), &eye(3), 1).is_err());
    }

    proptest! {
        #[test]
        fn projection_plus_complement_is_exact(vals in proptest::collection::vec(-5.0f64..5.0, 50)) {
            let a = cm(5, 5, &vals);
            let p = band_project(&a, 1, 1);
            prop_assert_eq!(&p + (&a - &p), a.clone());
            prop_assert_eq!(band(&a, 1) + off_band(&a, 1), a);
        }

        #[test]
        fn projection_is_idempotent_and_linear(
            vals in proptest::collection::vec(-5.0f64..5.0, 24),
            up in 0usize..4, lo in 0usize..4, s in -3.0f64..3.0,
        ) {
            let a = cm(4, 6, &vals);
            let b = cm(4, 6, &vals[3..]);
            let p = band_project(&a, up, lo);
            prop_assert_eq!(band_project(&p, up, lo), p.clone());
            let lhs = band_project(&(&a * c64(s, 0.0) + &b), up, lo);
            let rhs = p * c64(s, 0.0) + band_project(&b, up, lo);
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }

        #[test]
        fn product_band_closure(
            vals in proptest::collection::vec(-2.0f64..2.0, 72),
            n1 in 0usize..6, n2 in 0usize..6, n3 in 0usize..6, n4 in 0usize..6,
        ) {
            let k = 6;
            let a = band_project(&cm(k, k, &vals), n1, n2);
            let b = band_project(&cm(k, k, &vals[5..]), n3, n4);
            let up = (n1 + n3).min(k - 1);
            let lo = (n2 + n4).min(k - 1);
            prop_assert!(band_violation(&(a * b), up, lo) == 0.0);
        }
    }
}
