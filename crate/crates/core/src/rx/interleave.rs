use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded random permutation: `interleave(a)[i] = a[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    pub perm: Vec<usize>,
}

impl Interleaver {
    pub fn random(n: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn interleave<T: Copy>(&self, a: &[T]) -> Vec<T> {
        self.perm.iter().map(|&p| a[p]).collect()
    }

    pub fn deinterleave<T: Copy + Default>(&self, b: &[T]) -> Vec<T> {
        let mut a = vec![T::default(); b.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            a[p] = b[i];
        }
        a
    }
}
