//! Finite-dimensional receiver designs.
//!
//! * Method I works in the Forney domain `exp(-|Wy - Tx̂ - Fx|^2)` and is
//!   optimized over the lower band of `F`.
//! * Method II works in the Ungerboeck domain and is optimized over the
//!   Hermitian band of `G`; `R` takes one of three zero patterns.
//! * Method III is a closed form built on LMMSE parallel interference
//!   cancelation.

mod method1;
mod method2;
mod method3;
mod optimizer;
mod props;

pub use method1::{method1_closed_forms, method1_gradient, method1_objective, method1_optimize, Method1Point};
pub use method2::{method2_closed_forms, method2_gradient, method2_objective, method2_optimize, Method2Point};
pub use method3::{method3_design, method3_design_with, method3_parts, wiener_rows, Method3Parts};
pub use optimizer::{gradient_ascent, Ascent, OptimizerConfig};
pub use props::{check_prop2, check_prop4, prop2_residuals, prop4_residuals, BandResiduals};

use crate::gmi::CsParams;
use crate::linalg::{c64, BandSpec, CMat, ZERO};
use serde::{Deserialize, Serialize};

/// Prior powers at or below this are treated as "no prior information".
pub const P_EPS: f64 = 1e-12;

/// Forney-domain parameters: front end `W`, cancelation `T`, target `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForneyParams {
    pub w: CMat,
    pub t: CMat,
    pub f: CMat,
    pub band: BandSpec,
}

impl ForneyParams {
    /// Ungerboeck triple `V = F^H W`, `R = F^H T`, `G = F^H F`.
    pub fn to_cs(&self) -> CsParams {
        let fh = self.f.adjoint();
        CsParams {
            v: &fh * &self.w,
            r: &fh * &self.t,
            g: crate::linalg::hermitize(&(&fh * &self.f)),
            band: self.band,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MethodResult {
    pub params: CsParams,
    /// Set for Method I.
    pub forney: Option<ForneyParams>,
    pub gmi: f64,
    /// `δ1` or `δ2`; zero for Method III.
    pub delta_term: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    I,
    IIa,
    IIb,
    IIc,
    III,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::I => "I",
            Method::IIa => "II.a",
            Method::IIb => "II.b",
            Method::IIc => "II.c",
            Method::III => "III",
        }
    }
}

/// Positions `(i, j)` with `0 <= i - j <= nu`, column by column.
pub(crate) fn lower_band_positions(k: usize, nu: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for j in 0..k {
        for i in j..(j + nu + 1).min(k) {
            v.push((i, j));
        }
    }
    v
}

/// Real coordinates of a matrix restricted to lower-band positions: one real
/// number per diagonal entry, two per off-diagonal entry.
pub(crate) fn pack(a: &CMat, pos: &[(usize, usize)]) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * pos.len());
    for &(i, j) in pos {
        x.push(a[(i, j)].re);
        if i != j {
            x.push(a[(i, j)].im);
        }
    }
    x
}

pub(crate) fn unpack_lower(x: &[f64], k: usize, pos: &[(usize, usize)]) -> CMat {
    let mut a = CMat::from_element(k, k, ZERO);
    let mut n = 0;
    for &(i, j) in pos {
        if i == j {
            a[(i, j)] = c64(x[n], 0.0);
            n += 1;
        } else {
            a[(i, j)] = c64(x[n], x[n + 1]);
            n += 2;
        }
    }
    a
}

pub(crate) fn unpack_hermitian(x: &[f64], k: usize, pos: &[(usize, usize)]) -> CMat {
    let mut a = unpack_lower(x, k, pos);
    for &(i, j) in pos {
        if i != j {
            a[(j, i)] = a[(i, j)].conj();
        }
    }
    a
}

pub(crate) fn has_prior(p: &[f64]) -> bool {
    p.iter().any(|&v| v > P_EPS)
}
