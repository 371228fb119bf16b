use crate::error::{Error, Result};
use crate::linalg::{singular_values, solve, CMatrix, CVector, ComplexSubspace, I};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// A holomorphic matrix-valued map on an open set of `C^N`.
pub trait HolomorphicMatrixMap: Send + Sync {
    fn ambient_dim(&self) -> usize;

    fn shape(&self) -> (usize, usize);

    fn eval(&self, z: &CVector) -> Result<CMatrix>;

    fn has_exact_partials(&self) -> bool {
        false
    }

    /// `∂/∂z_j` at `z`, when available in closed form.
    fn partial(&self, _z: &CVector, _j: usize) -> Result<CMatrix> {
        Err(Error::InvalidParams("map has no closed-form derivative".into()))
    }
}

/// Black-box holomorphic map given by a closure.
pub struct ClosureMap<F> {
    pub ambient_dim: usize,
    pub shape: (usize, usize),
    pub f: F,
}

impl<F> HolomorphicMatrixMap for ClosureMap<F>
where
    F: Fn(&CVector) -> CMatrix + Send + Sync,
{
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn eval(&self, z: &CVector) -> Result<CMatrix> {
        Ok((self.f)(z))
    }
}

/// How derivatives of `a` are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Closed form from the source map; falls back to `ComplexStep` if absent.
    Exact,
    /// Four-point Cauchy stencil `Σ_q i^{-q} a(z + h i^q u) / 4h`, error `O(h^4)`.
    ComplexStep { h: f64 },
    /// Central differences along the real part of the direction.
    Central { h: f64 },
}

#[derive(Clone)]
enum Source {
    /// `a(z)` directly.
    Graph(Arc<dyn HolomorphicMatrixMap>),
    /// A frame `B(z)` (`N × (N-n)`); `a = B' B''^{-1}`.
    Frame(Arc<dyn HolomorphicMatrixMap>),
}

/// Adapted-coordinate presentation of a corank-`n` distribution near `base`.
#[derive(Clone)]
pub struct DistributionChart {
    n: usize,
    big_n: usize,
    base: CVector,
    radius: f64,
    source: Source,
    mode: DerivativeMode,
}

impl fmt::Debug for DistributionChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionChart")
            .field("n", &self.n)
            .field("N", &self.big_n)
            .field("base", &self.base)
            .field("radius", &self.radius)
            .field("mode", &self.mode)
            .finish()
    }
}

pub const DEFAULT_RADIUS: f64 = 0.5;

impl DistributionChart {
    /// Chart from `a(z)`, an `n × (N-n)` map on `C^N`.
    pub fn from_graph(n: usize, a: Arc<dyn HolomorphicMatrixMap>, base: CVector) -> Result<Self> {
        let big_n = a.ambient_dim();
        if n == 0 || n >= big_n {
            return Err(Error::InvalidParams(format!("need 0 < n < N, got n={n}, N={big_n}")));
        }
        if a.shape() != (n, big_n - n) {
            return Err(Error::ShapeMismatch(format!(
                "a(z) must be {n}x{}, got {:?}",
                big_n - n,
                a.shape()
            )));
        }
        Self::build(n, big_n, base, Source::Graph(a))
    }

    /// Chart from a holomorphic frame `B(z)` of the distribution (`N × (N-n)`).
    pub fn from_frame(n: usize, frame: Arc<dyn HolomorphicMatrixMap>, base: CVector) -> Result<Self> {
        let big_n = frame.ambient_dim();
        if n == 0 || n >= big_n {
            return Err(Error::InvalidParams(format!("need 0 < n < N, got n={n}, N={big_n}")));
        }
        if frame.shape() != (big_n, big_n - n) {
            return Err(Error::ShapeMismatch(format!(
                "frame must be {big_n}x{}, got {:?}",
                big_n - n,
                frame.shape()
            )));
        }
        Self::build(n, big_n, base, Source::Frame(frame))
    }

    fn build(n: usize, big_n: usize, base: CVector, source: Source) -> Result<Self> {
        if base.len() != big_n {
            return Err(Error::DimensionMismatch {
                expected: big_n,
                found: base.len(),
            });
        }
        Ok(Self {
            n,
            big_n,
            base,
            radius: DEFAULT_RADIUS,
            source,
            mode: DerivativeMode::Exact,
        })
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.big_n
    }

    pub fn base(&self) -> &CVector {
        &self.base
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    fn check_domain(&self, z: &CVector) -> Result<()> {
        if z.len() != self.big_n {
            return Err(Error::DimensionMismatch {
                expected: self.big_n,
                found: z.len(),
            });
        }
        let distance = (z - &self.base).norm();
        if distance > self.radius {
            return Err(Error::OutsideDomain {
                distance,
                radius: self.radius,
            });
        }
        Ok(())
    }

    fn split_frame(&self, b: &CMatrix) -> Result<(CMatrix, CMatrix)> {
        let m = self.big_n - self.n;
        let top = b.rows(0, self.n).into_owned();
        let bottom = b.rows(self.n, m).into_owned();
        let s = singular_values(&bottom);
        let sigma_min = s.last().copied().unwrap_or(0.0);
        let top_s = s.first().copied().unwrap_or(0.0);
        if top_s == 0.0 || sigma_min <= 1e-10 * top_s {
            return Err(Error::GraphConditionFails { sigma_min });
        }
        let inv = solve(&bottom, &CMatrix::identity(m, m))
            .ok_or(Error::GraphConditionFails { sigma_min })?;
        Ok((top * &inv, inv))
    }

    /// The matrix `a(z)`.
    pub fn a(&self, z: &CVector) -> Result<CMatrix> {
        self.check_domain(z)?;
        match &self.source {
            Source::Graph(a) => a.eval(z),
            Source::Frame(b) => Ok(self.split_frame(&b.eval(z)?)?.0),
        }
    }

    fn exact_available(&self) -> bool {
        match &self.source {
            Source::Graph(a) => a.has_exact_partials(),
            Source::Frame(b) => b.has_exact_partials(),
        }
    }

    fn exact_partial(&self, z: &CVector, j: usize) -> Result<CMatrix> {
        self.check_domain(z)?;
        match &self.source {
            Source::Graph(a) => a.partial(z, j),
            Source::Frame(b) => {
                let (a, inv) = self.split_frame(&b.eval(z)?)?;
                let db = b.partial(z, j)?;
                let m = self.big_n - self.n;
                let dtop = db.rows(0, self.n).into_owned();
                let dbottom = db.rows(self.n, m).into_owned();
                Ok((dtop - a * dbottom) * inv)
            }
        }
    }

    /// Holomorphic directional derivative `da(z)·u = Σ_j u_j ∂a/∂z_j`.
    pub fn da(&self, z: &CVector, u: &CVector) -> Result<CMatrix> {
        let norm = u.norm();
        if norm == 0.0 {
            return Ok(CMatrix::zeros(self.n, self.big_n - self.n));
        }
        match self.mode {
            DerivativeMode::Exact if self.exact_available() => {
                let mut out = CMatrix::zeros(self.n, self.big_n - self.n);
                for (j, &uj) in u.iter().enumerate() {
                    if uj != Complex64::new(0.0, 0.0) {
                        out += self.exact_partial(z, j)? * uj;
                    }
                }
                Ok(out)
            }
            DerivativeMode::Exact => self.stencil_complex(z, u, 1e-3),
            DerivativeMode::ComplexStep { h } => self.stencil_complex(z, u, h),
            DerivativeMode::Central { h } => {
                let step = h / norm;
                let plus = self.a(&(z + u * Complex64::new(step, 0.0)))?;
                let minus = self.a(&(z - u * Complex64::new(step, 0.0)))?;
                Ok((plus - minus) / Complex64::new(2.0 * step, 0.0))
            }
        }
    }

    fn stencil_complex(&self, z: &CVector, u: &CVector, h: f64) -> Result<CMatrix> {
        let step = h / u.norm();
        let mut acc = CMatrix::zeros(self.n, self.big_n - self.n);
        let mut rot = Complex64::new(1.0, 0.0);
        for _ in 0..4 {
            let val = self.a(&(z + u * (rot * step)))?;
            acc += val * rot.conj();
            rot *= I;
        }
        Ok(acc / Complex64::new(4.0 * step, 0.0))
    }

    /// `∂a/∂z_j` at `z`.
    pub fn partial(&self, z: &CVector, j: usize) -> Result<CMatrix> {
        let mut e = CVector::zeros(self.big_n);
        e[j] = Complex64::new(1.0, 0.0);
        self.da(z, &e)
    }

    /// Columns `(a(z) e_j, e_j)`, a basis of `D_z`.
    pub fn fiber_basis(&self, z: &CVector) -> Result<CMatrix> {
        let a = self.a(z)?;
        let m = self.big_n - self.n;
        let mut b = CMatrix::zeros(self.big_n, m);
        b.view_mut((0, 0), (self.n, m)).copy_from(&a);
        b.view_mut((self.n, 0), (m, m)).fill_with_identity();
        Ok(b)
    }

    pub fn fiber(&self, z: &CVector) -> Result<ComplexSubspace> {
        Ok(ComplexSubspace::span(&self.fiber_basis(z)?, 1e-12))
    }

    /// Class of `v` in `C^N / D_z`, identified with `C^n` by `v ↦ v' - a(z)v''`.
    pub fn quotient(&self, z: &CVector, v: &CVector) -> Result<CVector> {
        let a = self.a(z)?;
        let m = self.big_n - self.n;
        Ok(v.rows(0, self.n) - a * v.rows(self.n, m))
    }

    /// `|a(base)|_max`.
    pub fn normalization_residual(&self) -> Result<f64> {
        Ok(crate::linalg::max_abs(&self.a(&self.base)?))
    }

    /// New chart centred at `z0` in coordinates `w = S z`, `S = [[I, -a(z0)], [0, I]]`,
    /// so that the new `a` vanishes at `S z0`.
    pub fn recenter(&self, z0: &CVector) -> Result<DistributionChart> {
        let a0 = self.a(z0)?;
        let s = recentering_transform(&a0);
        let sinv = recentering_transform(&(-&a0));
        let new_base = &s * z0;
        let pullback = AffinePullback {
            inner: self.clone(),
            sinv,
            a0,
        };
        Ok(DistributionChart {
            n: self.n,
            big_n: self.big_n,
            base: new_base,
            radius: self.radius,
            source: Source::Graph(Arc::new(pullback)),
            mode: DerivativeMode::Exact,
        })
    }
}

/// `[[I, -a0], [0, I]]`, the linear change of coordinates that straightens `D_{z0}`.
pub fn recentering_transform(a0: &CMatrix) -> CMatrix {
    let (n, m) = a0.shape();
    let mut s = CMatrix::identity(n + m, n + m);
    s.view_mut((0, n), (n, m)).copy_from(&(-a0));
    s
}

struct AffinePullback {
    inner: DistributionChart,
    sinv: CMatrix,
    a0: CMatrix,
}

impl HolomorphicMatrixMap for AffinePullback {
    fn ambient_dim(&self) -> usize {
        self.inner.big_n
    }

    fn shape(&self) -> (usize, usize) {
        self.a0.shape()
    }

    fn eval(&self, w: &CVector) -> Result<CMatrix> {
        Ok(self.inner.a(&(&self.sinv * w))? - &self.a0)
    }

    fn has_exact_partials(&self) -> bool {
        true
    }

    fn partial(&self, w: &CVector, j: usize) -> Result<CMatrix> {
        let col = self.sinv.column(j).into_owned();
        self.inner.da(&(&self.sinv * w), &col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::rng::SeededRng;

    fn quadratic_chart() -> DistributionChart {
        // n = 1, N = 3: a = (z3 + z1 z2, z2^2)
        let f = |z: &CVector| {
            CMatrix::from_row_slice(1, 2, &[z[2] + z[0] * z[1], z[1] * z[1]])
        };
        let map = ClosureMap {
            ambient_dim: 3,
            shape: (1, 2),
            f,
        };
        DistributionChart::from_graph(1, Arc::new(map), CVector::zeros(3)).unwrap()
    }

    #[test]
    fn stencils_agree() {
        let c = quadratic_chart();
        let mut rng = SeededRng::new(1);
        let z = rng.complex_vector(3) * Complex64::new(0.1, 0.0);
        let u = rng.complex_vector(3);
        let exact = CMatrix::from_row_slice(
            1,
            2,
            &[u[2] + u[0] * z[1] + z[0] * u[1], u[1] * z[1] * 2.0],
        );
        let cs = c.clone().with_mode(DerivativeMode::ComplexStep { h: 1e-3 }).da(&z, &u).unwrap();
        let ce = c.with_mode(DerivativeMode::Central { h: 1e-5 }).da(&z, &u).unwrap();
        assert!(max_abs(&(&cs - &exact)) < 1e-11);
        assert!(max_abs(&(&ce - &exact)) < 1e-8);
    }

    #[test]
    fn domain_is_enforced() {
        let c = quadratic_chart();
        let far = CVector::from_element(3, Complex64::new(1.0, 0.0));
        assert!(matches!(c.a(&far), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn recenter_constant_and_identity() {
        let a0 = CMatrix::from_row_slice(1, 2, &[Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)]);
        let map = ClosureMap {
            ambient_dim: 3,
            shape: (1, 2),
            f: move |_: &CVector| a0.clone(),
        };
        let c = DistributionChart::from_graph(1, Arc::new(map), CVector::zeros(3)).unwrap();
        let r = c.recenter(&CVector::zeros(3)).unwrap();
        let w = CVector::from_element(3, Complex64::new(0.1, -0.1));
        assert!(max_abs(&r.a(&w).unwrap()) < 1e-15);

        let q = quadratic_chart();
        let same = q.recenter(&CVector::zeros(3)).unwrap();
        assert!(max_abs(&(same.a(&w).unwrap() - q.a(&w).unwrap())) < 1e-15);
    }

    #[test]
    fn recenter_preserves_subbundle() {
        let q = quadratic_chart();
        let mut rng = SeededRng::new(2);
        let z0 = rng.complex_vector(3) * Complex64::new(0.1, 0.0);
        let r = q.recenter(&z0).unwrap();
        assert!(r.normalization_residual().unwrap() < 1e-15);
        let s = recentering_transform(&q.a(&z0).unwrap());
        let z = &z0 + rng.complex_vector(3) * Complex64::new(0.05, 0.0);
        let mapped = ComplexSubspace::span(&(&s * q.fiber_basis(&z).unwrap()), 1e-12);
        assert!(mapped.subspace_eq(&r.fiber(&(&s * &z)).unwrap(), 1e-12));
    }

    #[test]
    fn frame_without_graph_form_fails() {
        // n = 1, N = 2, fiber spanned by e1: not a graph over ∂/∂z2
        let map = ClosureMap {
            ambient_dim: 2,
            shape: (2, 1),
            f: |_: &CVector| CMatrix::from_column_slice(2, 1, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]),
        };
        let c = DistributionChart::from_frame(1, Arc::new(map), CVector::zeros(2)).unwrap();
        assert!(matches!(
            c.recenter(&CVector::zeros(2)),
            Err(Error::GraphConditionFails { .. })
        ));
    }
}
