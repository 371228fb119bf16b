use super::chart::HolomorphicMatrixMap;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::rng::SeededRng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `coeff · Π_l z_l^{powers[l]}` placed at entry `a_{ij}`.
///
/// In JSON `i` runs over `1..=n` and `j` over `n+1..=N`, matching the
/// usual indexing of the frame fields `e_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub i: usize,
    pub j: usize,
    pub powers: Vec<u32>,
    pub coeff: [f64; 2],
}

/// Polynomial matrix `a(z)` with stored coefficients and exact derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialMatrix {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub monomials: Vec<Monomial>,
}

fn monomial_value(powers: &[u32], z: &CVector) -> Complex64 {
    powers
        .iter()
        .zip(z.iter())
        .fold(Complex64::new(1.0, 0.0), |acc, (&p, &zl)| acc * zl.powu(p))
}

impl PolynomialMatrix {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n >= self.big_n {
            return Err(Error::InvalidParams(format!(
                "need 0 < n < N, got n={}, N={}",
                self.n, self.big_n
            )));
        }
        for (idx, m) in self.monomials.iter().enumerate() {
            if m.i < 1 || m.i > self.n || m.j <= self.n || m.j > self.big_n {
                return Err(Error::InvalidParams(format!(
                    "monomial {idx}: entry (i={}, j={}) outside 1..={} x {}..={}",
                    m.i,
                    m.j,
                    self.n,
                    self.n + 1,
                    self.big_n
                )));
            }
            if m.powers.len() != self.big_n {
                return Err(Error::InvalidParams(format!(
                    "monomial {idx}: {} exponents for N = {}",
                    m.powers.len(),
                    self.big_n
                )));
            }
        }
        Ok(())
    }

    /// Random polynomial with no constant terms (so `a(0) = 0`), total degree
    /// between 1 and `max_degree`, coefficients in the unit square times `scale`.
    pub fn random(n: usize, big_n: usize, max_degree: u32, count: usize, scale: f64, rng: &mut SeededRng) -> Self {
        let mut monomials = Vec::with_capacity(count);
        for _ in 0..count {
            let degree = 1 + rng.index(max_degree as usize) as u32;
            let mut powers = vec![0u32; big_n];
            for _ in 0..degree {
                powers[rng.index(big_n)] += 1;
            }
            let c = rng.complex() * scale;
            monomials.push(Monomial {
                i: 1 + rng.index(n),
                j: n + 1 + rng.index(big_n - n),
                powers,
                coeff: [c.re, c.im],
            });
        }
        Self { n, big_n, monomials }
    }

    pub fn degree(&self) -> u32 {
        self.monomials
            .iter()
            .map(|m| m.powers.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

impl HolomorphicMatrixMap for PolynomialMatrix {
    fn ambient_dim(&self) -> usize {
        self.big_n
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.big_n - self.n)
    }

    fn eval(&self, z: &CVector) -> Result<CMatrix> {
        let mut a = CMatrix::zeros(self.n, self.big_n - self.n);
        for m in &self.monomials {
            let c = Complex64::new(m.coeff[0], m.coeff[1]);
            a[(m.i - 1, m.j - self.n - 1)] += c * monomial_value(&m.powers, z);
        }
        Ok(a)
    }

    fn has_exact_partials(&self) -> bool {
        true
    }

    fn partial(&self, z: &CVector, l: usize) -> Result<CMatrix> {
        let mut a = CMatrix::zeros(self.n, self.big_n - self.n);
        for m in &self.monomials {
            let p = m.powers[l];
            if p == 0 {
                continue;
            }
            let mut lowered = m.powers.clone();
            lowered[l] -= 1;
            let c = Complex64::new(m.coeff[0], m.coeff[1]) * p as f64;
            a[(m.i - 1, m.j - self.n - 1)] += c * monomial_value(&lowered, z);
        }
        Ok(a)
    }
}
