use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Stop when `max |grad| <= grad_tol * (1 + |objective|)`.
    pub grad_tol: f64,
    /// Armijo sufficient-increase constant.
    pub c1: f64,
    /// Backtracking factor.
    pub shrink: f64,
    /// Smallest eigenvalue enforced on `G` before a Cholesky initialization.
    pub init_reg_epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-8,
            c1: 1e-4,
            shrink: 0.5,
            init_reg_epsilon: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) || !(self.c1 > 0.0 && self.c1 < 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidInput(
                "optimizer needs grad_tol > 0, 0 < c1 < 1 and 0 < shrink < 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

const MAX_BACKTRACKS: usize = 80;

/// Projected gradient ascent with Armijo backtracking.
///
/// `eval` returns the objective and its gradient in the same real
/// coordinates as `x`, or an error when `x` is infeasible. The first trial
/// step of each iteration is the Barzilai-Borwein length from the previous
/// pair of iterates (a unit step on the first iteration).
pub fn gradient_ascent(
    x0: Vec<f64>,
    mut eval: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    project: impl Fn(&mut [f64]),
    cfg: &OptimizerConfig,
) -> Result<Ascent> {
    cfg.validate()?;
    let mut x = x0;
    project(&mut x);
    let (mut f, mut g) = eval(&x)?;
    let mut trace = vec![f];
    let mut step = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for it in 0..cfg.max_iters {
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax <= cfg.grad_tol * (1.0 + f.abs()) {
            return Ok(Ascent { x, value: f, iterations: it, converged: true, trace });
        }
        if let Some((px, pg)) = &prev {
            let (mut ss, mut sy) = (0.0, 0.0);
            for i in 0..x.len() {
                let s = x[i] - px[i];
                ss += s * s;
                sy += s * (g[i] - pg[i]);
            }
            if sy < 0.0 && (ss / -sy).is_finite() {
                step = (ss / -sy).clamp(1e-14, 1e14);
            } else {
                step = (step * 2.0).min(1e14);
            }
        }
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut xn: Vec<f64> = x.iter().zip(&g).map(|(a, d)| a + step * d).collect();
            project(&mut xn);
            let gain: f64 = xn.iter().zip(&x).zip(&g).map(|((a, b), d)| (a - b) * d).sum();
            if let Ok((fn_, gn)) = eval(&xn) {
                if fn_.is_finite() && fn_ >= f + cfg.c1 * gain && fn_ >= f {
                    prev = Some((std::mem::replace(&mut x, xn), std::mem::replace(&mut g, gn)));
                    f = fn_;
                    trace.push(f);
                    accepted = true;
                    break;
                }
            }
            step *= cfg.shrink;
        }
        if !accepted {
            return Ok(Ascent { x, value: f, iterations: it, converged: false, trace });
        }
    }
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let converged = gmax <= cfg.grad_tol * (1.0 + f.abs());
    Ok(Ascent { x, value: f, iterations: cfg.max_iters, converged, trace })
}
