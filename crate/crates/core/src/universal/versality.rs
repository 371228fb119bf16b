use super::chart::{ChartChoice, UniversalChart};
use super::fiber::{build_fiber, realify_columns, UniversalPoint};
use super::manifold::PointwiseACManifold;
use crate::distribution::{isotropy_test, torsion_at, DistributionChart, IsotropyReport};
use crate::error::{Error, Result};
use crate::linalg::{
    max_abs, numerical_rank, realify_vector, singular_values, solve_real,
    to_complex, CMatrix, CVector, ComplexSubspace, RMatrix, RVector, I,
};
use crate::Tolerances;
use num_complex::Complex64;

/// Step of the fourth-order stencil used to differentiate the lift.
pub const LIFT_FD_STEP: f64 = 1e-3;

/// The lift `f(x)` in a universal chart, with its differential, the
/// induced structure and `∂̄f = ½(df + i·df·J_f)`.
#[derive(Debug, Clone)]
pub struct UniversalLift {
    pub point: UniversalPoint,
    pub chart: DistributionChart,
    pub z0: CVector,
    /// `N × 2n`, column `b` = `df(x)·e_b`.
    pub df: CMatrix,
    pub jf: RMatrix,
    pub dbar: CMatrix,
}

pub fn lift_at(
    x: &[f64],
    m: &PointwiseACManifold,
    choice: ChartChoice,
    tol: &Tolerances,
) -> Result<UniversalLift> {
    let n = m.n();
    let point = build_fiber(x, m, tol)?;
    let uc = UniversalChart::new(&point, choice, tol.rank)?;
    let z0 = uc.coordinates(&point)?;
    let big_n = uc.dim();
    let h = LIFT_FD_STEP;
    let mut df = CMatrix::zeros(big_n, 2 * n);
    for b in 0..2 * n {
        let at = |s: f64| -> Result<CVector> {
            let mut y = x.to_vec();
            y[b] += s * h;
            uc.lift_coordinates(&y, m, tol)
        };
        let col = (at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * Complex64::new(8.0, 0.0))
            / Complex64::new(12.0 * h, 0.0);
        df.set_column(b, &col);
    }
    let chart = uc.into_distribution_chart(z0.clone())?;
    let a0 = chart.a(&z0)?;
    let qdf = df.rows(0, n) - &a0 * df.rows(n, big_n - n);
    let jf = solve_real(&realify_columns(&qdf), &realify_columns(&(&qdf * I)))
        .ok_or(Error::NotTransverse { sigma_min: 0.0 })?;
    let dbar = (&df + &df * to_complex(&jf) * I) * Complex64::new(0.5, 0.0);
    Ok(UniversalLift {
        point,
        chart,
        z0,
        df,
        jf,
        dbar,
    })
}

impl UniversalLift {
    pub fn n(&self) -> usize {
        self.chart.n()
    }

    /// `|J_f - J|` against a reference structure.
    pub fn jf_residual(&self, j: &RMatrix) -> f64 {
        max_abs(&(&self.jf - j))
    }

    /// Isotropy of `span ∂̄f(x)` for the torsion at `f(x)`.
    pub fn isotropy(&self, tol: &Tolerances) -> Result<IsotropyReport> {
        let theta = torsion_at(&self.chart, &self.z0, tol.alg)?;
        let image = ComplexSubspace::span(&self.dbar, tol.rank);
        let fiber = self.chart.fiber(&self.z0)?;
        isotropy_test(&theta, &image, &fiber, tol.fd)
    }

    /// `N(ζ, η) = 4·(q∘df)^{-1} θ(∂̄f ζ, ∂̄f η)`, read back in `T_xX`.
    pub fn nijenhuis(&self, zeta: &RVector, eta: &RVector) -> Result<RVector> {
        let n = self.n();
        let big_n = self.chart.ambient_dim();
        let dz = complexify_columns(&self.dbar, zeta);
        let de = complexify_columns(&self.dbar, eta);
        let theta = crate::distribution::torsion_operator(&self.chart, &self.z0, &dz, &de)?;
        let a0 = self.chart.a(&self.z0)?;
        let qdf = self.df.rows(0, n) - &a0 * self.df.rows(n, big_n - n);
        let back = solve_real(
            &realify_columns(&qdf),
            &RMatrix::from_column_slice(2 * n, 1, realify_vector(&theta).as_slice()),
        )
        .ok_or(Error::NotTransverse { sigma_min: 0.0 })?;
        Ok(back.column(0) * 4.0)
    }
}

fn complexify_columns(m: &CMatrix, x: &RVector) -> CVector {
    m * x.map(|v| Complex64::new(v, 0.0))
}

/// Real matrix of `u ↦ (θ(∂̄f·e_b, u))_b` on the real basis
/// `u = (a(z)η, η)`, `η ∈ {e_l, i·e_l}` of `D_z`; `dbar` is `N × 2n`.
pub fn versality_map(chart: &DistributionChart, z: &CVector, dbar: &CMatrix) -> Result<RMatrix> {
    let (n, big_n) = (chart.n(), chart.ambient_dim());
    if dbar.nrows() != big_n || dbar.ncols() != 2 * n {
        return Err(Error::ShapeMismatch(format!(
            "dbar must be {big_n}x{}, got {:?}",
            2 * n,
            dbar.shape()
        )));
    }
    let partials: Vec<CMatrix> = (0..big_n).map(|j| chart.partial(z, j)).collect::<Result<_>>()?;
    let da = |w: &CVector| -> CMatrix {
        let mut out = CMatrix::zeros(n, big_n - n);
        for (j, p) in partials.iter().enumerate() {
            if w[j] != Complex64::new(0.0, 0.0) {
                out += p * w[j];
            }
        }
        out
    };
    let a = chart.a(z)?;
    let d_cols: Vec<CVector> = dbar.column_iter().map(|c| c.into_owned()).collect();
    let da_d: Vec<CMatrix> = d_cols.iter().map(&da).collect();
    let mut out = RMatrix::zeros(4 * n * n, 2 * (big_n - n));
    for l in 0..big_n - n {
        for (si, s) in [Complex64::new(1.0, 0.0), I].into_iter().enumerate() {
            let mut u = CVector::zeros(big_n);
            u[n + l] = s;
            let lead = a.column(l) * s;
            u.rows_mut(0, n).copy_from(&lead);
            let da_u = da(&u);
            let mut img = CVector::zeros(2 * n * n);
            for (b, d) in d_cols.iter().enumerate() {
                let theta = &da_d[b] * u.rows(n, big_n - n) - &da_u * d.rows(n, big_n - n);
                img.rows_mut(b * n, n).copy_from(&theta);
            }
            out.set_column(2 * l + si, &realify_vector(&img));
        }
    }
    Ok(out)
}

/// Numerical rank (relative threshold `rel_tol`, absolute floor `abs_tol`),
/// the normalized gap `(σ_r - σ_{r+1}) / max(σ_1, 1)` around it, and the
/// singular values.
pub fn rank_with_gap(m: &RMatrix, rel_tol: f64, abs_tol: f64) -> (usize, f64, Vec<f64>) {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    let scale = top.max(1.0);
    let threshold = (rel_tol * top).max(abs_tol);
    let rank = s.iter().filter(|&&v| v > threshold).count();
    let above = if rank == 0 { scale } else { s[rank - 1] };
    let below = s.get(rank).copied().unwrap_or(0.0);
    (rank, (above - below) / scale, s)
}

/// Versality conditions at one point: `∂̄f` injective (complex rank `n`)
/// and `u ↦ θ(∂̄f·, u)` onto the conjugate-linear endomorphisms
/// (real rank `2n²`).
#[derive(Debug, Clone, PartialEq)]
pub struct VersalityReport {
    pub inj: bool,
    pub dbar_rank: usize,
    pub surj_rank: usize,
    pub expected_rank: usize,
    pub gap: f64,
    pub singular_values: Vec<f64>,
    pub passed: bool,
}

pub fn versality_from_dbar(
    chart: &DistributionChart,
    z: &CVector,
    dbar: &CMatrix,
    tol: &Tolerances,
) -> Result<VersalityReport> {
    let n = chart.n();
    let dbar_rank = numerical_rank(dbar, tol.rank);
    let map = versality_map(chart, z, dbar)?;
    let (surj_rank, gap, s) = rank_with_gap(&map, tol.rank, tol.alg);
    let expected_rank = 2 * n * n;
    Ok(VersalityReport {
        inj: dbar_rank == n,
        dbar_rank,
        surj_rank,
        expected_rank,
        gap,
        singular_values: s.into_iter().take(expected_rank + 2).collect(),
        passed: dbar_rank == n && surj_rank == expected_rank && gap >= tol.rank_gap,
    })
}

pub fn versality_check(
    x: &[f64],
    m: &PointwiseACManifold,
    choice: ChartChoice,
    tol: &Tolerances,
) -> Result<VersalityReport> {
    let lift = lift_at(x, m, choice, tol)?;
    versality_from_dbar(&lift.chart, &lift.z0, &lift.dbar, tol)
}
