use super::{hstack, singular_values, CVector, ComplexSubspace};
use crate::error::{Error, Result};

/// Outcome of a direct-sum test `A ⊕ B = C^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSumReport {
    pub is_direct: bool,
    /// Smallest singular value of the stacked orthonormal bases.
    pub sigma_min: f64,
}

pub fn direct_sum_test(
    a: &ComplexSubspace,
    b: &ComplexSubspace,
    rank_tol: f64,
) -> Result<DirectSumReport> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    let stacked = hstack(&[a.basis(), b.basis()]);
    let s = singular_values(&stacked);
    let sigma_min = if a.dim() + b.dim() == 0 {
        0.0
    } else {
        // missing columns count as zero singular values
        if stacked.ncols() > stacked.nrows() {
            0.0
        } else {
            *s.last().unwrap_or(&0.0)
        }
    };
    let top = s.first().copied().unwrap_or(0.0);
    let is_direct =
        a.dim() + b.dim() == a.ambient_dim() && top > 0.0 && sigma_min > rank_tol * top;
    Ok(DirectSumReport {
        is_direct,
        sigma_min,
    })
}

/// Representative of `v` modulo `d` inside the complement `q`: the unique
/// `q0 ∈ q` with `v - q0 ∈ d`.
pub fn project_mod(
    v: &CVector,
    d: &ComplexSubspace,
    q: &ComplexSubspace,
    rank_tol: f64,
) -> Result<CVector> {
    if v.len() != d.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: d.ambient_dim(),
            found: v.len(),
        });
    }
    let report = direct_sum_test(q, d, rank_tol)?;
    if !report.is_direct {
        return Err(Error::NotComplementary {
            sigma_min: report.sigma_min,
        });
    }
    let system = hstack(&[q.basis(), d.basis()]);
    let coeffs = system
        .lu()
        .solve(v)
        .ok_or(Error::NotComplementary { sigma_min: 0.0 })?;
    Ok(q.basis() * coeffs.rows(0, q.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::rng::SeededRng;

    #[test]
    fn coordinate_lines_in_c2() {
        let e1 = ComplexSubspace::coordinate(2, &[0]);
        let e2 = ComplexSubspace::coordinate(2, &[1]);
        assert!(direct_sum_test(&e1, &e2, 1e-8).unwrap().is_direct);
        assert!(!direct_sum_test(&e1, &e1, 1e-8).unwrap().is_direct);
        let big = ComplexSubspace::coordinate(3, &[0]);
        assert!(matches!(
            direct_sum_test(&e1, &big, 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn project_mod_fixed_points() {
        let mut rng = SeededRng::new(7);
        let d = ComplexSubspace::from_basis(&rng.complex_matrix(4, 2), 1e-8).unwrap();
        let q = ComplexSubspace::from_basis(&rng.complex_matrix(4, 2), 1e-8).unwrap();
        let in_d = d.basis() * rng.complex_vector(2);
        assert!(project_mod(&in_d, &d, &q, 1e-8).unwrap().norm() < 1e-12);
        let in_q = q.basis() * rng.complex_vector(2);
        assert!((project_mod(&in_q, &d, &q, 1e-8).unwrap() - &in_q).norm() < 1e-12);
    }

    #[test]
    fn project_mod_joint_system_residual() {
        // oracle: solve [Q | D] (alpha, beta) = v directly with an SVD least-squares solve
        let mut rng = SeededRng::new(7);
        let d = ComplexSubspace::from_basis(&rng.complex_matrix(4, 2), 1e-8).unwrap();
        let q = ComplexSubspace::from_basis(&rng.complex_matrix(4, 2), 1e-8).unwrap();
        let v = rng.complex_vector(4);
        let qv = project_mod(&v, &d, &q, 1e-8).unwrap();
        let sys: CMatrix = hstack(&[q.basis(), d.basis()]);
        let sol = sys.svd(true, true).solve(&v, 1e-14).unwrap();
        let dpart = d.basis() * sol.rows(2, 2);
        assert!((&v - &qv - dpart).norm() <= 1e-9);
        assert!(q.contains(&qv, 1e-12));
    }

    #[test]
    fn project_mod_rejects_non_complement() {
        let d = ComplexSubspace::coordinate(3, &[0, 1]);
        let q = ComplexSubspace::coordinate(3, &[1]);
        let v = CVector::from_element(3, num_complex::Complex64::new(1.0, 0.0));
        assert!(matches!(
            project_mod(&v, &d, &q, 1e-8),
            Err(Error::NotComplementary { .. })
        ));
    }
}
