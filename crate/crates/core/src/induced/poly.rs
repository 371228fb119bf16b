use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, RMatrix};
use crate::rng::SeededRng;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `coeff · Π z_l^{z[l]} · Π conj(z_l)^{zbar[l]}` in output component `out` (1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedMonomial {
    pub out: usize,
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub coeff: [f64; 2],
}

/// Real-smooth polynomial map `C^dim_in → C^dim_out` in `(z, z̄)`, with exact
/// Wirtinger derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexPolyMap {
    pub dim_in: usize,
    pub dim_out: usize,
    #[serde(default)]
    pub terms: Vec<MixedMonomial>,
}

fn powers_value(p: &[u32], z: &CVector, conj: bool) -> Complex64 {
    p.iter().zip(z.iter()).fold(Complex64::new(1.0, 0.0), |acc, (&k, &zl)| {
        let base = if conj { zl.conj() } else { zl };
        acc * base.powu(k)
    })
}

impl ComplexPolyMap {
    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        Self {
            dim_in,
            dim_out,
            terms: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (idx, t) in self.terms.iter().enumerate() {
            if t.out < 1 || t.out > self.dim_out || t.z.len() != self.dim_in || t.zbar.len() != self.dim_in {
                return Err(Error::InvalidParams(format!(
                    "term {idx}: output {} or exponent lengths ({}, {}) do not fit C^{} -> C^{}",
                    t.out,
                    t.z.len(),
                    t.zbar.len(),
                    self.dim_in,
                    self.dim_out
                )));
            }
        }
        Ok(())
    }

    /// Add `coeff · z^p · z̄^q` to component `out` (0-based).
    pub fn push(&mut self, out: usize, z: Vec<u32>, zbar: Vec<u32>, coeff: Complex64) {
        self.terms.push(MixedMonomial {
            out: out + 1,
            z,
            zbar,
            coeff: [coeff.re, coeff.im],
        });
    }

    /// Linear map `z ↦ A z + B z̄ + c`.
    pub fn affine(a: &CMatrix, b: &CMatrix, c: &CVector) -> Self {
        let (p, n) = a.shape();
        let mut f = Self::zero(n, p);
        for r in 0..p {
            for l in 0..n {
                let mut e = vec![0; n];
                e[l] = 1;
                if a[(r, l)] != Complex64::new(0.0, 0.0) {
                    f.push(r, e.clone(), vec![0; n], a[(r, l)]);
                }
                if b[(r, l)] != Complex64::new(0.0, 0.0) {
                    f.push(r, vec![0; n], e, b[(r, l)]);
                }
            }
            if c[r] != Complex64::new(0.0, 0.0) {
                f.push(r, vec![0; n], vec![0; n], c[r]);
            }
        }
        f
    }

    /// Random map with `count` terms of total degree `1..=max_degree`.
    pub fn random(dim_in: usize, dim_out: usize, max_degree: u32, count: usize, scale: f64, rng: &mut SeededRng) -> Self {
        let mut f = Self::zero(dim_in, dim_out);
        for _ in 0..count {
            let degree = 1 + rng.index(max_degree as usize) as u32;
            let mut z = vec![0; dim_in];
            let mut zbar = vec![0; dim_in];
            for _ in 0..degree {
                let l = rng.index(dim_in);
                if rng.unit() < 0.5 {
                    z[l] += 1;
                } else {
                    zbar[l] += 1;
                }
            }
            let out = rng.index(dim_out);
            let c = rng.complex() * scale;
            f.push(out, z, zbar, c);
        }
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn eval(&self, z: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim_out);
        for t in &self.terms {
            let c = Complex64::new(t.coeff[0], t.coeff[1]);
            out[t.out - 1] += c * powers_value(&t.z, z, false) * powers_value(&t.zbar, z, true);
        }
        out
    }

    fn wirtinger(&self, z: &CVector, conj: bool) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_in);
        for t in &self.terms {
            let c = Complex64::new(t.coeff[0], t.coeff[1]);
            let (hit, other) = if conj { (&t.zbar, &t.z) } else { (&t.z, &t.zbar) };
            for l in 0..self.dim_in {
                let k = hit[l];
                if k == 0 {
                    continue;
                }
                let mut lowered = hit.clone();
                lowered[l] -= 1;
                let v = c * k as f64 * powers_value(&lowered, z, conj) * powers_value(other, z, !conj);
                out[(t.out - 1, l)] += v;
            }
        }
        out
    }

    /// `∂f/∂z`.
    pub fn d_z(&self, z: &CVector) -> CMatrix {
        self.wirtinger(z, false)
    }

    /// `∂f/∂z̄`.
    pub fn d_zbar(&self, z: &CVector) -> CMatrix {
        self.wirtinger(z, true)
    }

    /// Real-linear differential `u ↦ ∂f·u + ∂̄f·ū`.
    pub fn differential(&self, z: &CVector, u: &CVector) -> CVector {
        self.d_z(z) * u + self.d_zbar(z) * u.map(|x| x.conj())
    }

    /// Realified Jacobian (`2·dim_out × 2·dim_in`).
    pub fn real_jacobian(&self, z: &CVector) -> RMatrix {
        let a = self.d_z(z);
        let b = self.d_zbar(z);
        let (p, n) = a.shape();
        let s = &a + &b;
        let d = &a - &b;
        let mut out = RMatrix::zeros(2 * p, 2 * n);
        for r in 0..p {
            for c in 0..n {
                out[(r, c)] = s[(r, c)].re;
                out[(r, c + n)] = -d[(r, c)].im;
                out[(r + p, c)] = s[(r, c)].im;
                out[(r + p, c + n)] = d[(r, c)].re;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complexify_vector, max_abs, realify_vector, RVector};

    #[test]
    fn real_jacobian_matches_fd() {
        let mut rng = SeededRng::new(2);
        let f = ComplexPolyMap::random(2, 3, 3, 8, 0.5, &mut rng);
        let z = rng.complex_vector(2) * Complex64::new(0.3, 0.0);
        let x = realify_vector(&z);
        let jac = f.real_jacobian(&z);
        let h = 1e-6;
        for c in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            let fd: RVector = (realify_vector(&f.eval(&complexify_vector(&xp))) - realify_vector(&f.eval(&complexify_vector(&xm)))) / (2.0 * h);
            assert!((fd - jac.column(c)).norm() < 1e-8);
        }
    }

    #[test]
    fn dbar_of_conjugate() {
        let mut f = ComplexPolyMap::zero(1, 1);
        f.push(0, vec![0], vec![1], Complex64::new(0.3, 0.0));
        let z = CVector::from_element(1, Complex64::new(0.2, 0.1));
        assert!(max_abs(&f.d_z(&z)) == 0.0);
        assert_eq!(f.d_zbar(&z)[(0, 0)], Complex64::new(0.3, 0.0));
    }

    #[test]
    fn json_shape() {
        let src = r#"{"dim_in":1,"dim_out":2,"terms":[{"out":2,"z":[0],"zbar":[1],"coeff":[0.3,0.0]}]}"#;
        let f: ComplexPolyMap = serde_json::from_str(src).unwrap();
        f.validate().unwrap();
        let v = f.eval(&CVector::from_element(1, Complex64::new(0.0, 1.0)));
        assert_eq!(v[1], Complex64::new(0.0, -0.3));
    }
}
