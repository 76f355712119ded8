use super::ForneyParams;
use crate::gmi::CsParams;
use crate::linalg::{max_abs, CMat};

/// Largest magnitudes of a structural difference matrix inside and outside
/// the band where it is allowed to be nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandResiduals {
    pub outside: f64,
    pub inside: f64,
    pub scale: f64,
}

impl BandResiduals {
    pub fn holds(&self, tol: f64) -> bool {
        self.outside <= tol * self.scale
    }
}

/// `F^H (W H - T)` must vanish above super-diagonal `nu`.
pub fn prop2_residuals(fp: &ForneyParams, h: &CMat) -> BandResiduals {
    let d = fp.f.adjoint() * (&fp.w * h - &fp.t);
    let nu = fp.band.nu;
    let (mut outside, mut inside) = (0.0f64, 0.0f64);
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            let v = d[(i, j)].norm();
            if j > i + nu {
                outside = outside.max(v);
            } else {
                inside = inside.max(v);
            }
        }
    }
    BandResiduals { outside, inside, scale: 1.0 + max_abs(&(fp.f.adjoint() * &fp.w * h)) }
}

/// `V H` and `R` must agree outside the band `[-(nu + nu_r), nu + nu_r]`.
/// `inside` reports the largest mismatch on the off-diagonal part of that band.
pub fn prop4_residuals(cp: &CsParams, h: &CMat, nu_r: usize) -> BandResiduals {
    let vh = &cp.v * h;
    let d = &vh - &cp.r;
    let w = cp.band.nu + nu_r;
    let (mut outside, mut inside) = (0.0f64, 0.0f64);
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            let v = d[(i, j)].norm();
            let off = i.abs_diff(j);
            if off > w {
                outside = outside.max(v);
            } else if off > 0 {
                inside = inside.max(v);
            }
        }
    }
    BandResiduals { outside, inside, scale: 1.0 + max_abs(&vh) }
}

pub fn check_prop2(fp: &ForneyParams, h: &CMat) -> bool {
    prop2_residuals(fp, h).holds(1e-8)
}

pub fn check_prop4(cp: &CsParams, h: &CMat, nu_r: usize) -> bool {
    prop4_residuals(cp, h, nu_r).holds(1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_random_mimo, PriorState};
    use crate::linalg::RShape;
    use crate::methods::{method1_optimize, method2_optimize, method3_design, OptimizerConfig};

    #[test]
    fn method1_prop2() {
        let ch = make_random_mimo(5, 5, 21).with_n0(0.2);
        let prior = PriorState::uniform(5, 0.5);
        let r = method1_optimize(&ch, &prior, 1, &OptimizerConfig::default()).unwrap();
        let res = prop2_residuals(r.forney.as_ref().unwrap(), ch.h().unwrap());
        assert!(res.holds(1e-8), "{res:?}");
        assert!(res.inside > 1e-3);
    }

    #[test]
    fn method2_prop4() {
        let ch = make_random_mimo(5, 5, 22).with_n0(0.2);
        let prior = PriorState::uniform(5, 0.5);
        let cfg = OptimizerConfig::default();
        let h = ch.h().unwrap();
        for shape in [RShape::A, RShape::B] {
            let r = method2_optimize(&ch, &prior, 1, shape, &cfg).unwrap();
            assert!(check_prop4(&r.params, h, 0), "{shape:?}");
        }
        let r = method2_optimize(&ch, &prior, 1, RShape::C, &cfg).unwrap();
        assert!(check_prop4(&r.params, h, 1));
        assert!(!check_prop4(&r.params, h, 0));
        assert!(prop4_residuals(&r.params, h, 1).inside > 1e-3);
    }

    #[test]
    fn lmmse_pic_law() {
        let ch = make_random_mimo(5, 5, 23).with_n0(0.2);
        let prior = PriorState::uniform(5, 0.5);
        let r = method2_optimize(&ch, &prior, 0, RShape::B, &OptimizerConfig::default()).unwrap();
        assert!(check_prop4(&r.params, ch.h().unwrap(), 0));
        let r = method3_design(&ch, &prior, 0).unwrap();
        assert!(check_prop4(&r.params, ch.h().unwrap(), 0));
    }
}
