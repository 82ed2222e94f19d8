use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::matcore::Mat;
use crate::num;
use crate::C64;

/// Seeded ChaCha20 stream with the fixed conversions used by every ensemble.
///
/// Key: the seed as little-endian `u64` in bytes 0..8, bytes 8..32 zero.
/// Stream id 0, block counter from 0. A `u64` is two consecutive 32-bit
/// output words, low word first. Doubles are `(u64 >> 11) · 2⁻⁵³`.
/// Gaussians come in Box-Muller pairs `(r cos 2πv, r sin 2πv)` with
/// `r = √(−2 ln(1 − u))`, and the second of a pair is used by the next call.
#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha20Rng,
    spare: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Stream {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut inner = ChaCha20Rng::from_seed(key);
        inner.set_stream(0);
        Stream { inner, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n.saturating_sub(1))
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare.take() {
            return g;
        }
        let u = self.uniform();
        let v = self.uniform();
        let r = num::sqrt(-2.0 * num::ln(1.0 - u));
        let theta = 2.0 * core::f64::consts::PI * v;
        self.spare = Some(r * num::sin(theta));
        r * num::cos(theta)
    }

    /// Standard complex Gaussian, `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let re = self.gaussian();
        let im = self.gaussian();
        C64::new(s * re, s * im)
    }

    /// Complex Ginibre matrix, row-major fill.
    pub fn ginibre(&mut self, dim: usize) -> Mat {
        Mat::from_fn(dim, |_, _| self.complex_gaussian())
    }

    /// `(G + G*)/2` for a Ginibre `G`.
    pub fn hermitian(&mut self, dim: usize) -> Mat {
        self.ginibre(dim).hermitian_part()
    }

    /// Haar-distributed unitary: Gram-Schmidt on the columns of a Ginibre
    /// matrix. The `R` factor then has positive diagonal, which is the phase
    /// normalization making the distribution exactly Haar.
    pub fn haar_unitary(&mut self, dim: usize) -> Mat {
        let g = self.ginibre(dim);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut v = g.column(j);
            for _ in 0..2 {
                for q in &cols {
                    let dot: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= dot * qi;
                    }
                }
            }
            let norm = num::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
        Mat::from_columns(dim, &cols)
    }

    /// Uniformly rotated projection of the given rank.
    pub fn projection(&mut self, dim: usize, rank: usize) -> Mat {
        let u = self.haar_unitary(dim);
        let cols: Vec<Vec<C64>> = (0..rank).map(|j| u.column(j)).collect();
        Mat::projector_onto(dim, &cols)
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a list of words into one seed: `h ← splitmix64(h ⊕ w)` starting from 0.
pub fn derive_seed(words: &[u64]) -> u64 {
    words.iter().fold(0u64, |h, &w| splitmix64(h ^ w))
}
