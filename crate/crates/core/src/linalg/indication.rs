use super::{CMat, CVec, ZERO};
use serde::{Deserialize, Serialize};

/// Zero pattern imposed on the cancelation matrix `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RShape {
    /// Main diagonal plus the lower triangle of the bottom-right `(nu+1)x(nu+1)` corner.
    A,
    /// Main diagonal only.
    B,
    /// Diagonals `[-nu, nu]`.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSpec {
    pub nu: usize,
    pub nu_r: usize,
    pub r_shape: RShape,
    pub k: usize,
}

impl BandSpec {
    pub fn new(k: usize, nu: usize, r_shape: RShape) -> Self {
        let nu_r = if r_shape == RShape::C { nu } else { 0 };
        Self { nu, nu_r, r_shape, k }
    }

    /// True when `R[(i, j)]` is forced to zero.
    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        match self.r_shape {
            RShape::A => {
                let c = (self.k - 1).saturating_sub(self.nu);
                i == j || (j <= i && i >= c && j >= c)
            }
            RShape::B => i == j,
            RShape::C => i.abs_diff(j) <= self.nu,
        }
    }

    pub fn indication_map(&self) -> IndicationMap {
        IndicationMap::from_zero_set(self.k, |i, j| self.is_zero(i, j))
    }
}

/// The free positions of a constrained `K x K` matrix, listed in `vec` order
/// (column by column). Plays the role of the selection matrix `Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicationMap {
    pub k: usize,
    pub free: Vec<(usize, usize)>,
}

impl IndicationMap {
    pub fn from_zero_set(k: usize, is_zero: impl Fn(usize, usize) -> bool) -> Self {
        let mut free = Vec::new();
        for j in 0..k {
            for i in 0..k {
                if !is_zero(i, j) {
                    free.push((i, j));
                }
            }
        }
        Self { k, free }
    }

    /// Free set of the feedforward-side matrix `T`: everything outside the
    /// lower band `[0, nu]` occupied by `F`.
    pub fn forney_t(k: usize, nu: usize) -> Self {
        Self::from_zero_set(k, |i, j| i >= j && i - j <= nu)
    }

    /// Keep only free positions whose column satisfies `keep`.
    pub fn restrict_columns(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            k: self.k,
            free: self.free.iter().copied().filter(|&(_, j)| keep(j)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    /// `Ω vec(X)`.
    pub fn gather(&self, x: &CMat) -> CVec {
        CVec::from_iterator(self.len(), self.free.iter().map(|&(i, j)| x[(i, j)]))
    }

    /// `Ω^T t`, reshaped to `K x K`.
    pub fn scatter(&self, t: &CVec) -> CMat {
        let mut x = CMat::from_element(self.k, self.k, ZERO);
        for (n, &(i, j)) in self.free.iter().enumerate() {
            x[(i, j)] = t[n];
        }
        x
    }

    /// `Ω (A ⊗ B) Ω^T` assembled entrywise.
    pub fn reduce_kron(&self, a: &CMat, b: &CMat) -> CMat {
        let s = self.len();
        CMat::from_fn(s, s, |p, q| {
            let (ip, jp) = self.free[p];
            let (iq, jq) = self.free[q];
            a[(jp, jq)] * b[(ip, iq)]
        })
    }
}
