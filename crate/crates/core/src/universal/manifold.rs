use crate::error::{Error, Result};
use crate::fields::{jacobian, AlmostComplexField, TrigPolyField};
use crate::linalg::{singular_values, RMatrix};

/// An almost complex torus `(T^{2n}, J)` with a real-analytic map
/// `g: T^{2n} → R^k`, the data of the pointwise universal construction.
#[derive(Debug, Clone)]
pub struct PointwiseACManifold {
    n: usize,
    k: usize,
    g: TrigPolyField,
    j: AlmostComplexField,
}

impl PointwiseACManifold {
    pub fn new(g: TrigPolyField, j: AlmostComplexField) -> Result<Self> {
        let n = j.n();
        let (k, cols) = g.shape();
        if cols != 1 || g.dim() != 2 * n {
            return Err(Error::ShapeMismatch(format!(
                "g must be a k x 1 field on T^{}, got {:?} on T^{}",
                2 * n,
                g.shape(),
                g.dim()
            )));
        }
        if k < 2 * n || k <= n {
            return Err(Error::InvalidParams(format!(
                "need k >= 2n and k > n for an embedding of T^{} into R^k, got k={k}",
                2 * n
            )));
        }
        Ok(Self { n, k, g, j })
    }

    /// Product of circles: `x ↦ (cos x_1, …, cos x_{2n}, sin x_1, …, sin x_{2n}) ∈ R^{4n}`.
    pub fn torus_embedding(n: usize) -> TrigPolyField {
        let d = 2 * n;
        let mut g = TrigPolyField::zero(2 * d, 1, d);
        for i in 0..d {
            let mut freq = vec![0; d];
            freq[i] = 1;
            let mut c = RMatrix::zeros(2 * d, 1);
            let mut s = RMatrix::zeros(2 * d, 1);
            c[(i, 0)] = 1.0;
            s[(d + i, 0)] = 1.0;
            g.add_term(&freq, &c, &s);
        }
        g
    }

    /// `j` on `T^{2n}` with the default embedding into `R^{4n}`.
    pub fn torus(j: AlmostComplexField) -> Self {
        let n = j.n();
        Self::new(Self::torus_embedding(n), j).expect("default embedding has valid shape")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn g(&self) -> &TrigPolyField {
        &self.g
    }

    pub fn structure(&self) -> &AlmostComplexField {
        &self.j
    }

    pub fn g_at(&self, x: &[f64]) -> Vec<f64> {
        self.g.eval_vector(x)
    }

    /// Exact `dg(x)`, `k × 2n`.
    pub fn dg(&self, x: &[f64]) -> RMatrix {
        jacobian(&self.g, x)
    }

    pub fn j_at(&self, x: &[f64]) -> RMatrix {
        self.j.field().eval(x)
    }

    /// `dg(x)` after checking it has full rank `2n` (relative threshold `rank_tol`).
    pub fn checked_dg(&self, x: &[f64], rank_tol: f64) -> Result<RMatrix> {
        if x.len() != 2 * self.n {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n,
                found: x.len(),
            });
        }
        let dg = self.dg(x);
        let s = singular_values(&dg);
        let top = s.first().copied().unwrap_or(0.0);
        let sigma_min = s.get(2 * self.n - 1).copied().unwrap_or(0.0);
        if top == 0.0 || sigma_min <= rank_tol * top {
            return Err(Error::RankDeficientEmbedding { sigma_min });
        }
        Ok(dg)
    }
}
