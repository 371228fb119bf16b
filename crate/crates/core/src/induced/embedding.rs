use super::poly::ComplexPolyMap;
use crate::distribution::{torsion_operator, DistributionChart};
use crate::error::{Error, Result};
use crate::fields::StructureField;
use crate::linalg::{
    column_span, complexify_vector, hstack, realify_vector, singular_values, standard_structure,
    CMatrix, CVector, RMatrix, RVector, I,
};
use nalgebra::LU;
use nalgebra::Dyn;
use num_complex::Complex64;
use std::sync::Arc;

/// A real-smooth map `C^dim_in → C^dim_out` with its realified Jacobian.
pub trait GraphMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval(&self, z: &CVector) -> CVector;
    /// `2·dim_out × 2·dim_in`, realified as `(Re, Im)` blocks.
    fn real_jacobian(&self, z: &CVector) -> RMatrix;

    /// `dg(z)·u` for a complex direction `u`.
    fn differential(&self, z: &CVector, u: &CVector) -> CVector {
        complexify_vector(&(self.real_jacobian(z) * realify_vector(u)))
    }
}

impl GraphMap for ComplexPolyMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn eval(&self, z: &CVector) -> CVector {
        ComplexPolyMap::eval(self, z)
    }

    fn real_jacobian(&self, z: &CVector) -> RMatrix {
        ComplexPolyMap::real_jacobian(self, z)
    }

    fn differential(&self, z: &CVector, u: &CVector) -> CVector {
        ComplexPolyMap::differential(self, z, u)
    }
}

/// Closure-backed map differentiated by the fourth-order central stencil.
pub struct FdGraphMap<F> {
    pub dim_in: usize,
    pub dim_out: usize,
    pub h: f64,
    pub f: F,
}

impl<F: Fn(&CVector) -> CVector + Send + Sync> GraphMap for FdGraphMap<F> {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn eval(&self, z: &CVector) -> CVector {
        (self.f)(z)
    }

    fn real_jacobian(&self, z: &CVector) -> RMatrix {
        let x = realify_vector(z);
        real_jacobian_fd(&|y: &RVector| realify_vector(&(self.f)(&complexify_vector(y))), &x, self.h)
    }
}

/// Fourth-order central-difference Jacobian of a map `R^d → R^p`.
pub fn real_jacobian_fd(f: &dyn Fn(&RVector) -> RVector, x: &RVector, h: f64) -> RMatrix {
    let mut cols = Vec::with_capacity(x.len());
    for c in 0..x.len() {
        let at = |s: f64| {
            let mut y = x.clone();
            y[c] += s * h;
            f(&y)
        };
        cols.push((at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) / (12.0 * h));
    }
    RMatrix::from_columns(&cols)
}

/// `M = {z'' = g(z')}`, parametrized by `F(z') = (z', g(z'))`.
#[derive(Clone)]
pub struct GraphEmbedding {
    n: usize,
    big_n: usize,
    g: Arc<dyn GraphMap>,
    base: CVector,
}

impl GraphEmbedding {
    pub fn new(g: Arc<dyn GraphMap>, base: CVector) -> Result<Self> {
        let n = g.dim_in();
        if base.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: base.len(),
            });
        }
        Ok(Self {
            n,
            big_n: n + g.dim_out(),
            g,
            base,
        })
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

    pub fn g(&self) -> &Arc<dyn GraphMap> {
        &self.g
    }

    pub fn point(&self, zp: &CVector) -> CVector {
        let gz = self.g.eval(zp);
        CVector::from_iterator(self.big_n, zp.iter().chain(gz.iter()).copied())
    }

    /// Realified `dF(z')`, `2N × 2n`, rows ordered `(Re z', Re z'', Im z', Im z'')`.
    pub fn real_differential(&self, zp: &CVector) -> RMatrix {
        let (n, m) = (self.n, self.big_n - self.n);
        let jg = self.g.real_jacobian(zp);
        let mut out = RMatrix::zeros(2 * self.big_n, 2 * n);
        for r in 0..n {
            out[(r, r)] = 1.0;
            out[(self.big_n + r, n + r)] = 1.0;
        }
        out.view_mut((n, 0), (m, 2 * n)).copy_from(&jg.rows(0, m));
        out.view_mut((self.big_n + n, 0), (m, 2 * n)).copy_from(&jg.rows(m, m));
        out
    }

    /// `dF(z')·ξ` as a complex vector.
    pub fn differential(&self, zp: &CVector, xi: &RVector) -> CVector {
        complexify_vector(&(self.real_differential(zp) * xi))
    }

    /// `∂̄g(z')·ζ = ½(dg ζ + i dg(iζ))`.
    pub fn dbar_g(&self, zp: &CVector, zeta: &RVector) -> CVector {
        let jg = self.g.real_jacobian(zp);
        let iz = standard_structure(self.n) * zeta;
        (complexify_vector(&(&jg * zeta)) + complexify_vector(&(&jg * iz)) * I) * Complex64::new(0.5, 0.0)
    }
}

/// Real basis `(b_c, i b_c)` of `D_z`, realified.
fn fiber_real_basis(chart: &DistributionChart, z: &CVector) -> Result<RMatrix> {
    let b = chart.fiber_basis(z)?;
    let mut cols = Vec::with_capacity(2 * b.ncols());
    for c in 0..b.ncols() {
        let col = b.column(c).into_owned();
        cols.push(realify_vector(&col));
        cols.push(realify_vector(&(col * I)));
    }
    Ok(RMatrix::from_columns(&cols))
}

/// The joint system `[dF | D] (α, β) = v` at one point, factored once.
pub struct QuotientSolver {
    two_n: usize,
    lu: LU<f64, Dyn, Dyn>,
    df: RMatrix,
    sigma_min: f64,
}

impl QuotientSolver {
    pub fn new(e: &GraphEmbedding, chart: &DistributionChart, zp: &CVector, rank_tol: f64) -> Result<Self> {
        if e.ambient_dim() != chart.ambient_dim() || e.n() != chart.n() {
            return Err(Error::DimensionMismatch {
                expected: chart.ambient_dim(),
                found: e.ambient_dim(),
            });
        }
        let z = e.point(zp);
        let df = e.real_differential(zp);
        let d = fiber_real_basis(chart, &z)?;
        let sigma_min = transversality_margin(&df, &d);
        if sigma_min <= rank_tol {
            return Err(Error::NotTransverse { sigma_min });
        }
        let m = hstack(&[&df, &d]);
        Ok(Self {
            two_n: df.ncols(),
            lu: m.lu(),
            df,
            sigma_min,
        })
    }

    /// `dF^{-1} π(v)`: the tangent coordinates of the projection of `v` to `T M` along `D`.
    pub fn tangent_part(&self, v: &CVector) -> RVector {
        let sol = self.lu.solve(&realify_vector(v)).expect("factored system is invertible");
        sol.rows(0, self.two_n).into_owned()
    }

    pub fn real_differential(&self) -> &RMatrix {
        &self.df
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }
}

/// Smallest singular value of `[orth(T M) | orth(D)]` (1 for orthogonal complements).
fn transversality_margin(df: &RMatrix, d: &RMatrix) -> f64 {
    let a = column_span(df, 1e-12);
    let b = column_span(d, 1e-12);
    if a.ncols() + b.ncols() != df.nrows() {
        return 0.0;
    }
    singular_values(&hstack(&[&a, &b])).last().copied().unwrap_or(0.0)
}

/// `J_F` by the quotient method: project `i·dF ζ` back to `T M` along `D`.
pub fn induced_jf_quotient(e: &GraphEmbedding, chart: &DistributionChart, zp: &CVector, rank_tol: f64) -> Result<RMatrix> {
    let solver = QuotientSolver::new(e, chart, zp, rank_tol)?;
    Ok(jf_from_solver(&solver))
}

fn jf_from_solver(solver: &QuotientSolver) -> RMatrix {
    let df = solver.real_differential();
    let cols: Vec<RVector> = (0..df.ncols())
        .map(|b| {
            let v = complexify_vector(&df.column(b).into_owned()) * I;
            solver.tangent_part(&v)
        })
        .collect();
    RMatrix::from_columns(&cols)
}

/// `J_F ζ = iζ - 2 dF^{-1} π(i a(F) ∂̄g ζ, 0)`.
pub fn induced_jf_formula(e: &GraphEmbedding, chart: &DistributionChart, zp: &CVector, rank_tol: f64) -> Result<RMatrix> {
    let solver = QuotientSolver::new(e, chart, zp, rank_tol)?;
    let a = chart.a(&e.point(zp))?;
    let two_n = 2 * e.n();
    let j0 = standard_structure(e.n());
    let mut out = RMatrix::zeros(two_n, two_n);
    for b in 0..two_n {
        let mut zeta = RVector::zeros(two_n);
        zeta[b] = 1.0;
        let top = &a * e.dbar_g(zp, &zeta) * I;
        let mut v = CVector::zeros(e.ambient_dim());
        v.rows_mut(0, e.n()).copy_from(&top);
        let col = &j0 * &zeta - solver.tangent_part(&v) * 2.0;
        out.set_column(b, &col);
    }
    Ok(out)
}

/// `∂̄F = ½(dF + i∘dF∘J_F)` as a complex `N × 2n` matrix (columns: real basis of `T M`).
pub fn dbar_f(e: &GraphEmbedding, chart: &DistributionChart, zp: &CVector, rank_tol: f64) -> Result<CMatrix> {
    let solver = QuotientSolver::new(e, chart, zp, rank_tol)?;
    Ok(dbar_from_solver(&solver))
}

fn dbar_from_solver(solver: &QuotientSolver) -> CMatrix {
    let df = solver.real_differential();
    let j = jf_from_solver(solver);
    let dfj = df * &j;
    let cols: Vec<CVector> = (0..df.ncols())
        .map(|b| {
            (complexify_vector(&df.column(b).into_owned())
                + complexify_vector(&dfj.column(b).into_owned()) * I)
                * Complex64::new(0.5, 0.0)
        })
        .collect();
    CMatrix::from_columns(&cols)
}

/// Largest distance of a column of `∂̄F(z')` from `D_{F(z')}`, relative to its norm.
pub fn dbar_fiber_residual(e: &GraphEmbedding, chart: &DistributionChart, zp: &CVector, rank_tol: f64) -> Result<f64> {
    let db = dbar_f(e, chart, zp, rank_tol)?;
    let z = e.point(zp);
    let fiber = chart.fiber(&z)?;
    let scale = db.column_iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    Ok(db
        .column_iter()
        .map(|c| fiber.residual(&c.into_owned()))
        .fold(0.0, f64::max)
        / scale)
}

/// `4 dF^{-1}π(θ(∂̄F ζ, ∂̄F η), 0)`.
pub fn nijenhuis_via_torsion(
    e: &GraphEmbedding,
    chart: &DistributionChart,
    zp: &CVector,
    zeta: &RVector,
    eta: &RVector,
    rank_tol: f64,
) -> Result<RVector> {
    let solver = QuotientSolver::new(e, chart, zp, rank_tol)?;
    let db = dbar_from_solver(&solver);
    let to_c = |v: &RVector| v.map(|x| Complex64::new(x, 0.0));
    let u = &db * to_c(zeta);
    let w = &db * to_c(eta);
    let z = e.point(zp);
    let c = torsion_operator(chart, &z, &u, &w)?;
    let mut v = CVector::zeros(e.ambient_dim());
    v.rows_mut(0, e.n()).copy_from(&c);
    Ok(solver.tangent_part(&v) * 4.0)
}

/// `z' ↦ J_F(z')` on realified coordinates, differentiated by a fourth-order
/// stencil of step `h`. Points where `J_F` is undefined evaluate to NaN.
pub struct InducedStructureField<'a> {
    pub embedding: &'a GraphEmbedding,
    pub chart: &'a DistributionChart,
    pub rank_tol: f64,
    pub h: f64,
}

impl StructureField for InducedStructureField<'_> {
    fn real_dim(&self) -> usize {
        2 * self.embedding.n()
    }

    fn value(&self, x: &[f64]) -> RMatrix {
        let zp = complexify_vector(&RVector::from_column_slice(x));
        induced_jf_quotient(self.embedding, self.chart, &zp, self.rank_tol)
            .unwrap_or_else(|_| RMatrix::from_element(x.len(), x.len(), f64::NAN))
    }

    fn directional(&self, x: &[f64], v: &[f64]) -> RMatrix {
        let at = |s: f64| {
            let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + s * self.h * b).collect();
            self.value(&y)
        };
        (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) / (12.0 * self.h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityReport {
    /// `(transverse, sigma_min)` per sample, in input order.
    pub points: Vec<(bool, f64)>,
    pub min_sigma: f64,
    pub all_transverse: bool,
}

pub fn transversality_report(
    e: &GraphEmbedding,
    chart: &DistributionChart,
    samples: &[CVector],
    rank_tol: f64,
) -> TransversalityReport {
    let points: Vec<(bool, f64)> = crate::exec::par_map(samples, |zp| {
        let z = e.point(zp);
        match fiber_real_basis(chart, &z) {
            Ok(d) => {
                let s = transversality_margin(&e.real_differential(zp), &d);
                (s > rank_tol, s)
            }
            Err(_) => (false, 0.0),
        }
    });
    let min_sigma = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    TransversalityReport {
        all_transverse: points.iter().all(|p| p.0),
        min_sigma,
        points,
    }
}
