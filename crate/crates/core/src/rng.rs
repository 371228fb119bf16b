//! Seeded random draws.
//!
//! Every random quantity in the crate comes from [`SeededRng`], a ChaCha8
//! stream cipher used as a counter-based generator. The 64-bit seed is
//! expanded to the 256-bit ChaCha key with `rand_core`'s PCG32-based
//! `seed_from_u64` (multiplier 6364136223846793005, increment 11634580027462260723).
//! Floats are produced as `(next_u64 >> 11) * 2^-53`, so any implementation
//! of ChaCha8 with the same key expansion reproduces the same draws.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream derived from this seed and a label.
    pub fn substream(seed: u64, label: u64) -> Self {
        Self::new(seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `0..bound`.
    pub fn index(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        (self.unit() * bound as f64) as usize % bound
    }

    pub fn signed(&mut self) -> f64 {
        self.uniform(-1.0, 1.0)
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.signed(), self.signed())
    }

    pub fn real_vector(&mut self, len: usize) -> DVector<f64> {
        DVector::from_fn(len, |_, _| self.signed())
    }

    pub fn real_matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        // column-major fill order is part of the reproducibility contract
        DMatrix::from_fn(rows, cols, |_, _| self.signed())
    }

    pub fn complex_vector(&mut self, len: usize) -> DVector<Complex64> {
        DVector::from_fn(len, |_, _| self.complex())
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(rows, cols, |_, _| self.complex())
    }
}
