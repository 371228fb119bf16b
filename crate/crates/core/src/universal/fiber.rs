use super::manifold::PointwiseACManifold;
use crate::error::{Error, Result};
use crate::linalg::{
    column_span, direct_sum_test, eigen_split, hstack, max_abs, null_space, realify_matrix,
    singular_values, solve_real, standard_structure, to_complex, vstack, CMatrix, CVector,
    ComplexSubspace, LinearComplexStructure, RMatrix, I,
};
use crate::Tolerances;
use num_complex::Complex64;

/// A point `(z, S', S'', Σ', Σ'')` of `Z_{n,k}`.
#[derive(Debug, Clone)]
pub struct UniversalPoint {
    pub z: CVector,
    pub sp: ComplexSubspace,
    pub spp: ComplexSubspace,
    pub sigp: ComplexSubspace,
    pub sigpp: ComplexSubspace,
}

/// Residuals of the defining conditions of a point of `Z_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub dims_ok: bool,
    /// Largest of the inclusion residuals `S' ⊂ Σ'` and `S'' ⊂ Σ''`.
    pub inclusion: f64,
    /// Smallest singular value of `[Σ' | Σ'']`.
    pub direct_sigma: f64,
    /// Largest of `|conj Σ' - Σ''|`, `|conj S' - S''|` and `|Im z|`.
    pub conj_defect: f64,
    pub passed: bool,
}

impl UniversalPoint {
    /// `(n, k)` read off the dimensions.
    pub fn params(&self) -> (usize, usize) {
        let k = self.sigp.dim();
        (k - self.sp.dim(), k)
    }

    pub fn invariants(&self, tol: &Tolerances) -> Result<InvariantReport> {
        let k2 = self.z.len();
        let k = k2 / 2;
        let n = k.saturating_sub(self.sp.dim());
        let dims_ok = k2 % 2 == 0
            && n >= 1
            && self.sigp.dim() == k
            && self.sigpp.dim() == k
            && self.spp.dim() == k - n
            && [&self.sp, &self.spp, &self.sigp, &self.sigpp]
                .iter()
                .all(|s| s.ambient_dim() == k2);
        let inclusion = self
            .sp
            .inclusion_residual(&self.sigp)
            .max(self.spp.inclusion_residual(&self.sigpp));
        let direct = direct_sum_test(&self.sigp, &self.sigpp, tol.rank)?;
        let imag = self.z.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        let conj_defect = self
            .sigp
            .conj()
            .distance(&self.sigpp)
            .max(self.sp.conj().distance(&self.spp))
            .max(imag);
        Ok(InvariantReport {
            dims_ok,
            inclusion,
            direct_sigma: direct.sigma_min,
            conj_defect,
            passed: dims_ok && inclusion <= tol.alg && direct.is_direct && conj_defect <= tol.alg,
        })
    }

    /// The fiber `S' ⊕ Σ''` of the distribution over this point.
    pub fn distribution_fiber(&self, rank_tol: f64) -> Result<DistributionFiber> {
        let horizontal = self.sp.sum(&self.sigpp, rank_tol);
        let (n, k) = self.params();
        if horizontal.dim() + n != 2 * k {
            return Err(Error::RankDeficient {
                rank: horizontal.dim(),
                expected: 2 * k - n,
            });
        }
        Ok(DistributionFiber {
            base: self.clone(),
            horizontal,
        })
    }
}

/// `D_p` projected to the base: the subspace `S' ⊕ Σ''` of `C^{2k}`.
#[derive(Debug, Clone)]
pub struct DistributionFiber {
    pub base: UniversalPoint,
    pub horizontal: ComplexSubspace,
}

impl DistributionFiber {
    /// Complement of `S'` inside `Σ'`, which maps isomorphically onto
    /// `C^{2k} / (S' ⊕ Σ'')`.
    pub fn quotient_complement(&self, rank_tol: f64) -> ComplexSubspace {
        self.base.sp.complement_within(&self.base.sigp, rank_tol)
    }

    pub fn codim(&self) -> usize {
        self.horizontal.ambient_dim() - self.horizontal.dim()
    }
}

struct Frame {
    /// `[T; T]`, `[T; -T]`, `[N; 0]`, `[0; N]` stacked as columns.
    basis: RMatrix,
}

fn lift_frame(x: &[f64], m: &PointwiseACManifold, tol: &Tolerances) -> Result<Frame> {
    let (n, k) = (m.n(), m.k());
    let dg = m.checked_dg(x, tol.rank)?;
    let normal = null_space(&dg.transpose(), tol.rank.max(1e-12));
    if normal.ncols() != k - 2 * n {
        return Err(Error::RankDeficientEmbedding { sigma_min: 0.0 });
    }
    let zn = RMatrix::zeros(k, k - 2 * n);
    let neg = -&dg;
    let basis = hstack(&[
        &vstack(&[&dg, &dg]),
        &vstack(&[&dg, &neg]),
        &vstack(&[&normal, &zn]),
        &vstack(&[&zn, &normal]),
    ]);
    Ok(Frame { basis })
}

/// `J̃(x) = J_X ⊕ (-J_X) ⊕ J_{NX⊕NX}` on `R^{2k}`, where the first summand
/// is the diagonal copy of `dg(TX)`, the second the antidiagonal copy and
/// `J_{NX⊕NX}(u, v) = (-v, u)`.
pub fn lifted_structure(x: &[f64], m: &PointwiseACManifold, tol: &Tolerances) -> Result<RMatrix> {
    let frame = lift_frame(x, m, tol)?;
    Ok(lifted_from_frame(&frame, &m.j_at(x), m.n(), m.k()))
}

fn lifted_from_frame(frame: &Frame, j: &RMatrix, n: usize, k: usize) -> RMatrix {
    let d = 2 * n;
    let r = k - d;
    let mut block = RMatrix::zeros(2 * k, 2 * k);
    block.view_mut((0, 0), (d, d)).copy_from(j);
    block.view_mut((d, d), (d, d)).copy_from(&(-j));
    block
        .view_mut((2 * d, 2 * d), (2 * r, 2 * r))
        .copy_from(&standard_structure(r));
    let inv = frame
        .basis
        .clone()
        .lu()
        .try_inverse()
        .expect("lift frame is invertible when dg has full rank");
    &frame.basis * block * inv
}

/// The lift `f(x) = (G(x), S'_x, S''_x, Σ'_x, Σ''_x)` with `G = (g, g)`,
/// `Σ', Σ''` the `±i` eigenspaces of `J̃(x)` and `S', S''` their
/// intersections with the complexified `TX̄ ⊕ NX ⊕ NX`.
pub fn build_fiber(x: &[f64], m: &PointwiseACManifold, tol: &Tolerances) -> Result<UniversalPoint> {
    let (n, k) = (m.n(), m.k());
    let frame = lift_frame(x, m, tol)?;
    let jt = lifted_from_frame(&frame, &m.j_at(x), n, k);
    let structure = LinearComplexStructure::new(jt, tol.alg)
        .map_err(|e| Error::EigenSplitFailure(e.to_string()))?;
    let split = eigen_split(&structure, tol)?;
    let s_real = frame.basis.columns(2 * n, 2 * k - 2 * n).into_owned();
    let s = ComplexSubspace::span(&to_complex(&s_real), tol.rank);
    let sp = split.plus_i.intersection(&s, tol.rank.max(1e-10));
    let spp = split.minus_i.intersection(&s, tol.rank.max(1e-10));
    if sp.dim() != k - n || spp.dim() != k - n {
        return Err(Error::EigenSplitFailure(format!(
            "S' and S'' must have dimension {}, got {} and {}",
            k - n,
            sp.dim(),
            spp.dim()
        )));
    }
    let g = m.g_at(x);
    let z = CVector::from_iterator(
        2 * k,
        g.iter().chain(g.iter()).map(|&v| Complex64::new(v, 0.0)),
    );
    Ok(UniversalPoint {
        z,
        sp,
        spp,
        sigp: split.plus_i,
        sigpp: split.minus_i,
    })
}

fn dg_lift(dg: &RMatrix) -> CMatrix {
    to_complex(&vstack(&[dg, dg]))
}

/// Smallest singular value of the real system `dG(T_xX) + (S' ⊕ Σ'')`
/// (orthonormal bases on both sides); these real dimensions add to `4k`.
pub fn transversality_sigma(x: &[f64], m: &PointwiseACManifold, tol: &Tolerances) -> Result<f64> {
    let p = build_fiber(x, m, tol)?;
    let fiber = p.distribution_fiber(tol.rank)?;
    let dg = m.checked_dg(x, tol.rank)?;
    Ok(real_transversality(&dg, &fiber, tol.rank))
}

fn real_transversality(dg: &RMatrix, fiber: &DistributionFiber, rank_tol: f64) -> f64 {
    let k2 = fiber.horizontal.ambient_dim();
    let tangent = column_span(&vstack(&[&vstack(&[dg, dg]), &RMatrix::zeros(k2, dg.ncols())]), rank_tol);
    let horizontal = realify_matrix(fiber.horizontal.basis());
    let system = hstack(&[&tangent, &horizontal]);
    if system.ncols() != system.nrows() {
        return 0.0;
    }
    singular_values(&system).last().copied().unwrap_or(0.0)
}

/// `J_f(x)`: the structure induced on `T_xX` by multiplication by `i` in
/// `C^{2k} / (S' ⊕ Σ'')`, computed from the exact `dG(x)`.
pub fn induced_structure_at(
    x: &[f64],
    m: &PointwiseACManifold,
    tol: &Tolerances,
) -> Result<RMatrix> {
    let n = m.n();
    let p = build_fiber(x, m, tol)?;
    let fiber = p.distribution_fiber(tol.rank)?;
    let dg = m.checked_dg(x, tol.rank)?;
    let sigma_min = real_transversality(&dg, &fiber, tol.rank);
    if sigma_min <= tol.rank {
        return Err(Error::NotTransverse { sigma_min });
    }
    let q = fiber.quotient_complement(tol.rank);
    let system = hstack(&[q.basis(), fiber.horizontal.basis()]);
    let dgc = dg_lift(&dg);
    let rhs = hstack(&[&dgc, &(&dgc * I)]);
    let coeffs = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::NotComplementary { sigma_min: 0.0 })?;
    let classes = coeffs.rows(0, n).into_owned();
    let l = realify_columns(&classes.columns(0, 2 * n).into_owned());
    let il = realify_columns(&classes.columns(2 * n, 2 * n).into_owned());
    let jf = solve_real(&l, &il).ok_or(Error::NotTransverse { sigma_min: 0.0 })?;
    let residual = max_abs(&(&jf * &jf + RMatrix::identity(2 * n, 2 * n)));
    if residual > tol.alg {
        return Err(Error::NotAComplexStructure { residual });
    }
    Ok(jf)
}

/// Columns `c_b ∈ C^n` as real vectors `(Re c_b, Im c_b)`.
pub(crate) fn realify_columns(c: &CMatrix) -> RMatrix {
    let n = c.nrows();
    let mut out = RMatrix::zeros(2 * n, c.ncols());
    for (b, col) in c.column_iter().enumerate() {
        for i in 0..n {
            out[(i, b)] = col[i].re;
            out[(n + i, b)] = col[i].im;
        }
    }
    out
}

/// `|Σ p_I²| / Σ |p_I|²` over the Plücker coordinates of the real subspace
/// `S = S' ⊕ S''`, computed as `|det(BᵀB)| / det(BᴴB)` (Cauchy–Binet).
/// Equal to 1 for a real subspace, and 0 exactly on the Plücker quadric.
pub fn plucker_certificate(p: &UniversalPoint, rank_tol: f64) -> f64 {
    let s = p.sp.sum(&p.spp, rank_tol);
    let b = s.basis();
    let bilinear = (b.transpose() * b).determinant().norm();
    let hermitian = (b.adjoint() * b).determinant().re;
    if hermitian <= 0.0 {
        return 0.0;
    }
    bilinear / hermitian
}
