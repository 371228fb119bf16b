//! Fields on flat tori represented as trigonometric polynomials.
//!
//! Derivatives are exact (frequency-wise), so every tolerance in the checks
//! built on these fields comes from a deliberate finite-difference oracle.

mod acs;
mod trig;

pub use acs::{
    nijenhuis_direct, nijenhuis_of_field, nijenhuis_with_extensions, verify_tensoriality,
    AlmostComplexField, FdStructureField, StructureField, TensorialityReport,
};
pub use trig::{jacobian, lie_bracket, TrigPolyField};

use crate::rng::SeededRng;
use std::f64::consts::TAU;

/// The torus `R^d / (2π Z)^d` with its global angle coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusChart {
    pub dim: usize,
}

impl TorusChart {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "torus dimension must be positive");
        Self { dim }
    }

    /// Reduce each coordinate to `[0, 2π)`.
    pub fn wrap(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| v.rem_euclid(TAU)).collect()
    }

    /// Cell-centred grid: coordinate `i` takes the values `2π(j + ½)/counts[i]`.
    /// The last coordinate varies fastest.
    pub fn grid(&self, counts: &[usize]) -> Vec<Vec<f64>> {
        assert_eq!(counts.len(), self.dim, "one count per coordinate");
        let total: usize = counts.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; self.dim];
                for i in (0..self.dim).rev() {
                    let j = idx % counts[i];
                    idx /= counts[i];
                    p[i] = TAU * (j as f64 + 0.5) / counts[i] as f64;
                }
                p
            })
            .collect()
    }

    pub fn random_points(&self, count: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| (0..self.dim).map(|_| rng.uniform(0.0, TAU)).collect())
            .collect()
    }
}
