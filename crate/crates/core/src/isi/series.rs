use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, ZERO};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Symbol `E(ω) = Σ e_k exp(jkω)` of a banded Toeplitz operator whose
/// `k`-th lower diagonal holds `e_k` (negative `k` are upper diagonals).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSeries {
    /// `e_{-N}, ..., e_0, ..., e_N`.
    pub coeffs: Vec<Complex64>,
    pub tap_len: usize,
}

impl SpectralSeries {
    pub fn zeros(tap_len: usize) -> Self {
        Self { coeffs: vec![ZERO; 2 * tap_len + 1], tap_len }
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidInput("series needs an odd number of coefficients".into()));
        }
        let tap_len = coeffs.len() / 2;
        Ok(Self { coeffs, tap_len })
    }

    /// Causal series with `e_0 .. e_{L-1}` taken from `taps`.
    pub fn causal(taps: &[Complex64]) -> Self {
        let n = taps.len().saturating_sub(1);
        let mut s = Self::zeros(n);
        for (k, &t) in taps.iter().enumerate() {
            s.set(k as i64, t);
        }
        s
    }

    pub fn from_real_taps(taps: &[f64]) -> Self {
        Self::causal(&taps.iter().map(|&t| c64(t, 0.0)).collect::<Vec<_>>())
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.tap_len {
            ZERO
        } else {
            self.coeffs[(k + self.tap_len as i64) as usize]
        }
    }

    /// Panics when `|k|` exceeds the tap length.
    pub fn set(&mut self, k: i64, v: Complex64) {
        assert!(k.unsigned_abs() as usize <= self.tap_len, "lag {k} outside series");
        let n = self.tap_len as i64;
        self.coeffs[(k + n) as usize] = v;
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> {
        let n = self.tap_len as i64;
        -n..=n
    }

    pub fn eval(&self, w: f64) -> Complex64 {
        self.lags().map(|k| self.get(k) * Complex64::from_polar(1.0, k as f64 * w)).sum()
    }

    /// Re-indexed copy with `tap_len` `n`, truncating or zero padding.
    pub fn resized(&self, n: usize) -> Self {
        let mut s = Self::zeros(n);
        for k in -(n as i64)..=(n as i64) {
            s.set(k, self.get(k));
        }
        s
    }

    /// Largest nonzero lag magnitude, ignoring entries at or below `tol`.
    pub fn support(&self, tol: f64) -> usize {
        self.lags().filter(|&k| self.get(k).norm() > tol).map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// `e_{-k} == conj(e_k)`, the condition for a real symbol.
    pub fn hermitian_defect(&self) -> f64 {
        self.lags().map(|k| (self.get(-k) - self.get(k).conj()).norm()).fold(0.0, f64::max)
    }

    /// `rows x cols` section `E[i, j] = e_{i-j}`.
    pub fn toeplitz(&self, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |i, j| self.get(i as i64 - j as i64))
    }

    /// Coefficients of `e_0 .. e_N` (the causal part).
    pub fn causal_taps(&self) -> Vec<Complex64> {
        (0..=self.tap_len as i64).map(|k| self.get(k)).collect()
    }
}

/// Uniform `n`-point rule on `[-π, π)`; every `∫ dω / 2π` is a grid mean.
///
/// The rule is exact for trigonometric polynomials of degree below `n / 2`.
/// Nodes are kept in DFT order: `2πi/n`, wrapped into `[-π, π)`.
#[derive(Clone)]
pub struct QuadratureGrid {
    pub n_points: usize,
    pub nodes: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for QuadratureGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadratureGrid").field("n_points", &self.n_points).finish()
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::new(4096).expect("default grid")
    }
}

impl QuadratureGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 16 || n_points % 2 != 0 {
            return Err(Error::InvalidInput("quadrature grid needs an even size of at least 16".into()));
        }
        let nodes = (0..n_points)
            .map(|i| {
                let w = 2.0 * PI * i as f64 / n_points as f64;
                if i >= n_points / 2 {
                    w - 2.0 * PI
                } else {
                    w
                }
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_points,
            nodes,
            fwd: planner.plan_fft_forward(n_points),
            inv: planner.plan_fft_inverse(n_points),
        })
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    /// Largest tap length a series may have for exact evaluation here.
    pub fn max_taps(&self) -> usize {
        self.n_points / 2 - 1
    }

    fn check_taps(&self, n: usize) -> Result<()> {
        if n > self.max_taps() {
            return Err(Error::TooLarge { k: n, limit: self.max_taps() });
        }
        Ok(())
    }

    /// `∫ f dω / 2π`.
    pub fn mean(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / self.n_points as f64
    }

    pub fn mean_c(&self, values: &[Complex64]) -> Complex64 {
        values.iter().sum::<Complex64>() / self.n_points as f64
    }

    /// Values of `s` at the nodes.
    pub fn eval(&self, s: &SpectralSeries) -> Result<Vec<Complex64>> {
        self.check_taps(s.tap_len)?;
        let n = self.n_points as i64;
        let mut buf = vec![ZERO; self.n_points];
        for k in s.lags() {
            buf[k.rem_euclid(n) as usize] += s.get(k);
        }
        self.inv.process(&mut buf);
        Ok(buf)
    }

    pub fn eval_real(&self, s: &SpectralSeries) -> Result<Vec<f64>> {
        Ok(self.eval(s)?.into_iter().map(|z| z.re).collect())
    }

    /// Fourier coefficients `c_k = ∫ f exp(-jkω) dω / 2π` for `|k| <= tap_len`.
    pub fn coeffs(&self, values: &[Complex64], tap_len: usize) -> Result<SpectralSeries> {
        self.check_taps(tap_len)?;
        if values.len() != self.n_points {
            return Err(Error::DimensionMismatch("values do not match the grid".into()));
        }
        let mut buf = values.to_vec();
        self.fwd.process(&mut buf);
        let n = self.n_points as i64;
        let scale = 1.0 / self.n_points as f64;
        let mut s = SpectralSeries::zeros(tap_len);
        for k in s.lags().collect::<Vec<_>>() {
            s.set(k, buf[k.rem_euclid(n) as usize] * scale);
        }
        Ok(s)
    }

    pub fn coeffs_real(&self, values: &[f64], tap_len: usize) -> Result<SpectralSeries> {
        let v: Vec<Complex64> = values.iter().map(|&x| c64(x, 0.0)).collect();
        self.coeffs(&v, tap_len)
    }
}

/// Lag sets of the free cancelation taps.
pub fn free_lags(neg: std::ops::RangeInclusive<i64>, pos: std::ops::RangeInclusive<i64>) -> Vec<i64> {
    neg.chain(pos).collect()
}

/// `A[a, b] = ∫ w exp(j(n_a - n_b)ω) dω / 2π` from the coefficients of `w`.
pub fn lag_gram(w: &SpectralSeries, lags: &[i64]) -> CMat {
    CMat::from_fn(lags.len(), lags.len(), |a, b| w.get(lags[b] - lags[a]))
}

/// `v[a] = ∫ x exp(j n_a ω) dω / 2π` from the coefficients of `x`.
pub fn lag_vector(x: &SpectralSeries, lags: &[i64]) -> CMat {
    CMat::from_fn(lags.len(), 1, |a, _| x.get(-lags[a]))
}

/// One `re im` pair per line, lags `-N .. N`.
pub fn format_taps(s: &SpectralSeries) -> String {
    let mut out = String::new();
    for c in &s.coeffs {
        out.push_str(&format!("{:.17e} {:.17e}\n", c.re, c.im));
    }
    out
}

pub fn parse_taps(text: &str) -> Result<SpectralSeries> {
    let mut coeffs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<f64> {
            it.next()
                .ok_or_else(|| Error::InvalidInput(format!("tap line {} needs two numbers", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("tap line {}: {e}", i + 1)))
        };
        let (re, im) = (next()?, next()?);
        if it.next().is_some() {
            return Err(Error::InvalidInput(format!("tap line {} has extra fields", i + 1)));
        }
        coeffs.push(c64(re, im));
    }
    SpectralSeries::from_coeffs(coeffs)
}

pub fn write_taps(path: &std::path::Path, s: &SpectralSeries) -> std::io::Result<()> {
    std::fs::write(path, format_taps(s))
}

pub fn read_taps(path: &std::path::Path) -> Result<SpectralSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_taps(&text)
}
