use super::chart::DistributionChart;
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::linalg::{complexify_vector, max_abs, realify_vector, CMatrix, CVector, ComplexSubspace};
use num_complex::Complex64;

/// Components `θ_ijk`, `i < n ≤ j, k < N` (0-based), antisymmetric in `(j, k)`.
///
/// As a bilinear operator on `D_{z0}`, `θ(u, v) = Σ θ_ijk (u_j v_k - u_k v_j) ∂_i
/// = da(u)·v'' - da(v)·u''`, which is the frame bracket reduced mod `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionTensor {
    n: usize,
    big_n: usize,
    /// `comps[i][(j - n, k - n)]`.
    comps: Vec<CMatrix>,
}

impl TorsionTensor {
    pub fn zero(n: usize, big_n: usize) -> Self {
        let m = big_n - n;
        Self {
            n,
            big_n,
            comps: vec![CMatrix::zeros(m, m); n],
        }
    }

    /// Store `value` at `(i, j, k)` and `-value` at `(i, k, j)`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Complex64) {
        let (j, k) = (j - self.n, k - self.n);
        if j == k {
            return;
        }
        self.comps[i][(j, k)] = value;
        self.comps[i][(k, j)] = -value;
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.comps[i][(j - self.n, k - self.n)]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.big_n
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Exact antisymmetry check on the stored components.
    pub fn is_antisymmetric(&self) -> bool {
        self.comps.iter().all(|c| c == &(-c.transpose()))
    }

    /// `θ(u, v)` for trailing-coordinate vectors `u, v ∈ C^{N-n}`.
    pub fn apply(&self, u: &CVector, v: &CVector) -> CVector {
        CVector::from_fn(self.n, |i, _| {
            let t = &self.comps[i];
            (u.transpose() * t * v)[(0, 0)] * 2.0
        })
    }

    /// `θ(u, v)` for full vectors of `C^N`; only their trailing parts enter.
    pub fn apply_full(&self, u: &CVector, v: &CVector) -> CVector {
        let m = self.big_n - self.n;
        self.apply(
            &u.rows(self.n, m).into_owned(),
            &v.rows(self.n, m).into_owned(),
        )
    }

    /// Largest deviation `|θ_a - θ_b|` relative to `max(|θ_a|, 1)`.
    pub fn relative_distance(&self, other: &TorsionTensor) -> f64 {
        let diff = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| max_abs(&(a - b)))
            .fold(0.0, f64::max);
        diff / self.max_abs().max(1.0)
    }
}

/// Torsion operator at an arbitrary point `z` of the chart: for `u, v ∈ D_z`,
/// `θ_z(u, v) = da(z)(u)·v'' - da(z)(v)·u''`, the bracket of the constant-coefficient
/// sections through `u` and `v` read in `C^N / D_z ≅ C^n`.
pub fn torsion_operator(chart: &DistributionChart, z: &CVector, u: &CVector, v: &CVector) -> Result<CVector> {
    let n = chart.n();
    let m = chart.ambient_dim() - n;
    let du = chart.da(z, u)?;
    let dv = chart.da(z, v)?;
    Ok(du * v.rows(n, m) - dv * u.rows(n, m))
}

/// `θ_ijk = ½(∂_j a_ik - ∂_k a_ij)` at a normalized base point.
pub fn torsion_at(chart: &DistributionChart, z0: &CVector, alg_tol: f64) -> Result<TorsionTensor> {
    let residual = max_abs(&chart.a(z0)?);
    if residual > alg_tol {
        return Err(Error::NotNormalized { residual });
    }
    let (n, big_n) = (chart.n(), chart.ambient_dim());
    let partials: Vec<CMatrix> = (n..big_n)
        .map(|j| chart.partial(z0, j))
        .collect::<Result<_>>()?;
    let mut t = TorsionTensor::zero(n, big_n);
    for i in 0..n {
        for j in n..big_n {
            for k in (j + 1)..big_n {
                let v = (partials[j - n][(i, k - n)] - partials[k - n][(i, j - n)]) * 0.5;
                t.set(i, j, k, v);
            }
        }
    }
    Ok(t)
}

/// Independent oracle: `θ_ijk = ½ [e_j, e_k]_i mod D` with real-coordinate
/// brackets `[V, W] = DW·V - DV·W` of the realified frame fields, Jacobians
/// by central differences of step `h`.
pub fn frame_bracket_torsion(chart: &DistributionChart, z0: &CVector, h: f64) -> Result<TorsionTensor> {
    let (n, big_n) = (chart.n(), chart.ambient_dim());
    let m = big_n - n;
    let x0 = realify_vector(z0);
    let dirs: Vec<usize> = (0..2 * big_n).collect();
    // real derivative of every realified frame column along each real coordinate
    let derivs: Vec<Result<Vec<_>>> = par_map(&dirs, |&l| {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[l] += h;
        xm[l] -= h;
        let bp = chart.fiber_basis(&complexify_vector(&xp))?;
        let bm = chart.fiber_basis(&complexify_vector(&xm))?;
        Ok((0..m)
            .map(|c| (realify_vector(&bp.column(c).into_owned()) - realify_vector(&bm.column(c).into_owned())) / (2.0 * h))
            .collect())
    });
    let derivs: Vec<Vec<_>> = derivs.into_iter().collect::<Result<_>>()?;
    let b0 = chart.fiber_basis(z0)?;
    let fields: Vec<_> = (0..m).map(|c| realify_vector(&b0.column(c).into_owned())).collect();
    let directional = |w: usize, v: usize| {
        // DE_w · E_v
        let mut acc = fields[0].clone() * 0.0;
        for (l, d) in derivs.iter().enumerate() {
            acc += &d[w] * fields[v][l];
        }
        acc
    };
    let mut t = TorsionTensor::zero(n, big_n);
    for j in 0..m {
        for k in (j + 1)..m {
            let br = directional(k, j) - directional(j, k);
            let q = chart.quotient(z0, &complexify_vector(&br))?;
            for i in 0..n {
                t.set(i, j + n, k + n, q[i] * 0.5);
            }
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationReport {
    pub is_foliation: bool,
    pub max_torsion: f64,
    pub samples_checked: usize,
}

/// Recentre at every sample and test whether all torsion components vanish.
pub fn is_foliation(chart: &DistributionChart, samples: &[CVector], fd_tol: f64) -> Result<FoliationReport> {
    let values: Vec<Result<f64>> = par_map(samples, |z| {
        let local = chart.recenter(z)?;
        Ok(torsion_at(&local, local.base(), 1e-9)?.max_abs())
    });
    let mut worst: f64 = 0.0;
    for v in values {
        worst = worst.max(v?);
    }
    Ok(FoliationReport {
        is_foliation: worst <= fd_tol,
        max_torsion: worst,
        samples_checked: samples.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyReport {
    pub isotropic: bool,
    pub max_residual: f64,
}

/// Whether `θ` vanishes on `S × S` for a subspace `S` of the fiber.
pub fn isotropy_test(
    theta: &TorsionTensor,
    s: &ComplexSubspace,
    fiber: &ComplexSubspace,
    alg_tol: f64,
) -> Result<IsotropyReport> {
    let residual = s.inclusion_residual(fiber);
    if s.ambient_dim() != fiber.ambient_dim() || residual > alg_tol.max(1e-9) {
        return Err(Error::NotASubspaceOfFiber { residual });
    }
    let b = s.basis();
    let mut worst: f64 = 0.0;
    for p in 0..b.ncols() {
        for q in (p + 1)..b.ncols() {
            let v = theta.apply_full(&b.column(p).into_owned(), &b.column(q).into_owned());
            worst = worst.max(v.camax());
        }
    }
    Ok(IsotropyReport {
        isotropic: worst <= alg_tol,
        max_residual: worst,
    })
}
