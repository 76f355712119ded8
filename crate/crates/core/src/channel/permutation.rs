use crate::error::{Error, Result};
use crate::linalg::CMat;
use serde::{Deserialize, Serialize};

const EXHAUSTIVE_LIMIT: usize = 8;
const ENERGY_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PermutationMode {
    /// Score every column order with the supplied GMI function.
    Exhaustive,
    /// Maximize the Gram energy inside diagonals `[-nu, nu]`.
    EnergyBased,
}

/// Column `j` of the result is column `perm[j]` of `h`.
pub fn permute_columns(h: &CMat, perm: &[usize]) -> CMat {
    CMat::from_fn(h.nrows(), perm.len(), |i, j| h[(i, perm[j])])
}

/// `Σ |(H^H H)_{ab}|^2` over `|a - b| <= nu` after permuting columns.
pub fn band_energy(gram: &CMat, perm: &[usize], nu: usize) -> f64 {
    let k = perm.len();
    let mut e = 0.0;
    for a in 0..k {
        for b in 0..k {
            if a.abs_diff(b) <= nu {
                e += gram[(perm[a], perm[b])].norm_sqr();
            }
        }
    }
    e
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Column order chosen by `mode`. Ties resolve to the lexicographically first
/// order. `gmi` is only called in exhaustive mode.
pub fn permutation_search(
    h: &CMat,
    nu: usize,
    mode: PermutationMode,
    gmi: &dyn Fn(&CMat) -> Result<f64>,
) -> Result<Vec<usize>> {
    let k = h.ncols();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    match mode {
        PermutationMode::Exhaustive => {
            if k > EXHAUSTIVE_LIMIT {
                return Err(Error::TooLarge { k, limit: EXHAUSTIVE_LIMIT });
            }
            let mut best_val = f64::NEG_INFINITY;
            loop {
                let v = gmi(&permute_columns(h, &perm))?;
                if v > best_val {
                    best_val = v;
                    best.clone_from(&perm);
                }
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
        PermutationMode::EnergyBased => {
            if k > ENERGY_LIMIT {
                return Err(Error::TooLarge { k, limit: ENERGY_LIMIT });
            }
            let gram = h.adjoint() * h;
            let mut best_val = f64::NEG_INFINITY;
            loop {
                // An order and its reversal have the same band energy.
                if k < 2 || perm[0] < perm[k - 1] {
                    let v = band_energy(&gram, &perm, nu);
                    if v > best_val {
                        best_val = v;
                        best.clone_from(&perm);
                    }
                }
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
    }
    Ok(best)
}
