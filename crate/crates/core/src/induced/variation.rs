use super::embedding::{
    dbar_f, induced_jf_quotient, real_jacobian_fd, FdGraphMap, GraphEmbedding, GraphMap,
    InducedStructureField, QuotientSolver,
};
use crate::distribution::{torsion_operator, DistributionChart};
use crate::error::Result;
use crate::fields::StructureField;
use crate::linalg::{complexify_vector, realify_vector, solve_real, CVector, RMatrix, RVector};
use num_complex::Complex64;
use std::sync::Arc;

/// Infinitesimal deformation `w = u + f_* v` of the embedding: `u = (a(F)η, η)`
/// is a section of `D` along `M` and `v` a vector field on the parameter space.
#[derive(Clone)]
pub struct VariationData {
    /// `η : C^n → C^{N-n}`.
    pub eta: Arc<dyn GraphMap>,
    /// `v : C^n → C^n`, read as a real vector field on `R^{2n}`.
    pub v: Arc<dyn GraphMap>,
}

impl VariationData {
    /// `u(z') = (a(F(z'))η(z'), η(z'))`.
    pub fn u(&self, e: &GraphEmbedding, chart: &DistributionChart, zp: &CVector) -> Result<CVector> {
        let eta = self.eta.eval(zp);
        let a = chart.a(&e.point(zp))?;
        let top = a * &eta;
        Ok(CVector::from_iterator(
            e.ambient_dim(),
            top.iter().chain(eta.iter()).copied(),
        ))
    }
}

/// Step used for derivatives of `J_F` along `v`.
pub const STRUCTURE_FD_STEP: f64 = 1e-3;

/// Closed form `dJ_f(w) = 2 J_f f_*^{-1}θ(∂̄f·, u) + L_v J_f`, where
/// `L_v J = ∂_v J + J·dv - dv·J` (so `2 J ∂̄v = L_v J` with `∂̄v = -½ J L_v J`).
pub fn variation_djf(
    e: &GraphEmbedding,
    chart: &DistributionChart,
    var: &VariationData,
    zp: &CVector,
    rank_tol: f64,
) -> Result<RMatrix> {
    let solver = QuotientSolver::new(e, chart, zp, rank_tol)?;
    let j = induced_jf_quotient(e, chart, zp, rank_tol)?;
    let db = dbar_f(e, chart, zp, rank_tol)?;
    let z = e.point(zp);
    let u = var.u(e, chart, zp)?;
    let two_n = 2 * e.n();
    let mut theta_term = RMatrix::zeros(two_n, two_n);
    for b in 0..two_n {
        let c = torsion_operator(chart, &z, &db.column(b).into_owned(), &u)?;
        let mut v = CVector::zeros(e.ambient_dim());
        v.rows_mut(0, e.n()).copy_from(&c);
        theta_term.set_column(b, &solver.tangent_part(&v));
    }
    let field = InducedStructureField {
        embedding: e,
        chart,
        rank_tol,
        h: STRUCTURE_FD_STEP,
    };
    let x = realify_vector(zp);
    let vx = realify_vector(&var.v.eval(zp));
    let dv = var.v.real_jacobian(zp);
    let lie = field.directional(x.as_slice(), vx.as_slice()) + &j * &dv - &dv * &j;
    Ok(&j * theta_term * 2.0 + lie)
}

/// `J_{f_t}` at `z'` for the deformation `g_t = g + t(η - dg·a(F)η)`,
/// `φ_t = id + t(v + a(F)η)`, i.e. `dφ_t^{-1} J_{F_t}(φ_t) dφ_t`.
pub fn deformed_structure(
    e: &GraphEmbedding,
    chart: &DistributionChart,
    var: &VariationData,
    zp: &CVector,
    t: f64,
    rank_tol: f64,
) -> Result<RMatrix> {
    let n = e.n();
    let base_g = e.g().clone();
    let eta = var.eta.clone();
    let chart_c = chart.clone();
    let e_c = e.clone();
    let a_eta = move |w: &CVector| -> CVector {
        match chart_c.a(&e_c.point(w)) {
            Ok(a) => a * eta.eval(w),
            Err(_) => CVector::from_element(n, Complex64::new(f64::NAN, 0.0)),
        }
    };
    let a_eta = Arc::new(a_eta);
    let eta2 = var.eta.clone();
    let ae = a_eta.clone();
    let gt = FdGraphMap {
        dim_in: n,
        dim_out: e.ambient_dim() - n,
        h: 1e-3,
        f: move |w: &CVector| {
            let corr = eta2.eval(w) - base_g.differential(w, &ae(w));
            base_g.eval(w) + corr * Complex64::new(t, 0.0)
        },
    };
    let et = GraphEmbedding::new(Arc::new(gt), e.base().clone())?;
    let v = var.v.clone();
    let phi = |x: &RVector| -> RVector {
        let w = complexify_vector(x);
        x + realify_vector(&(v.eval(&w) + a_eta(&w))) * t
    };
    let x = realify_vector(zp);
    let dphi = real_jacobian_fd(&phi, &x, 1e-3);
    let moved = complexify_vector(&phi(&x));
    let jt = induced_jf_quotient(&et, chart, &moved, rank_tol)?;
    let two_n = 2 * n;
    let inv = solve_real(&dphi, &RMatrix::identity(two_n, two_n)).ok_or(
        crate::error::Error::RankDeficientEmbedding { sigma_min: 0.0 },
    )?;
    Ok(inv * jt * dphi)
}

/// Finite-difference quotient `(J_{f_t} - J_{f_0}) / t`, both ends computed on the same path.
pub fn variation_fd_quotient(
    e: &GraphEmbedding,
    chart: &DistributionChart,
    var: &VariationData,
    zp: &CVector,
    t: f64,
    rank_tol: f64,
) -> Result<RMatrix> {
    let j0 = deformed_structure(e, chart, var, zp, 0.0, rank_tol)?;
    let jt = deformed_structure(e, chart, var, zp, t, rank_tol)?;
    Ok((jt - j0) / t)
}

/// Errors `|FD(t) - closed form|_max` for each `t`, plus the closed form's
/// anticommutation residual `|J dJ + dJ J|_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub anticommutation: f64,
    pub closed_form_norm: f64,
}

impl VariationReport {
    /// `error(t_0) / error(t_1)` for the first two steps.
    pub fn ratio(&self) -> f64 {
        self.errors[0] / self.errors[1]
    }

    /// Least-squares slope of `log error` against `log t`.
    pub fn slope(&self) -> f64 {
        let xs: Vec<f64> = self.steps.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = self.errors.iter().map(|e| e.ln()).collect();
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    }
}

pub fn variation_report(
    e: &GraphEmbedding,
    chart: &DistributionChart,
    var: &VariationData,
    zp: &CVector,
    steps: &[f64],
    rank_tol: f64,
) -> Result<VariationReport> {
    let closed = variation_djf(e, chart, var, zp, rank_tol)?;
    let j = induced_jf_quotient(e, chart, zp, rank_tol)?;
    let anti = crate::linalg::max_abs(&(&j * &closed + &closed * &j));
    let mut errors = Vec::with_capacity(steps.len());
    for &t in steps {
        let fd = variation_fd_quotient(e, chart, var, zp, t, rank_tol)?;
        errors.push(crate::linalg::max_abs(&(fd - &closed)));
    }
    Ok(VariationReport {
        steps: steps.to_vec(),
        errors,
        anticommutation: anti,
        closed_form_norm: crate::linalg::max_abs(&closed),
    })
}
