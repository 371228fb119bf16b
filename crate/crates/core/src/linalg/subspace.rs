use super::{column_span, max_abs, null_space, numerical_rank, CMatrix, CVector};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A complex-linear subspace of `C^m`, stored by an orthonormal basis.
///
/// Equality of subspaces is tested through their orthogonal projectors, so
/// the particular basis never matters.
#[derive(Debug, Clone)]
pub struct ComplexSubspace {
    basis: CMatrix,
}

impl ComplexSubspace {
    /// Subspace spanned by the columns of `basis`, which must be independent
    /// (relative rank threshold `rank_tol`).
    pub fn from_basis(basis: &CMatrix, rank_tol: f64) -> Result<Self> {
        let rank = numerical_rank(basis, rank_tol);
        if rank < basis.ncols() {
            return Err(Error::RankDeficient {
                rank,
                expected: basis.ncols(),
            });
        }
        Ok(Self::span(basis, rank_tol))
    }

    /// Column span of `m`; dependent columns are allowed.
    pub fn span(m: &CMatrix, rank_tol: f64) -> Self {
        Self {
            basis: column_span(m, rank_tol),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        Self {
            basis: CMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Span of the coordinate vectors `e_i`, `i ∈ indices`.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut b = CMatrix::zeros(ambient_dim, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            b[(i, c)] = Complex64::new(1.0, 0.0);
        }
        Self { basis: b }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis, one column per dimension.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn conj(&self) -> Self {
        Self {
            basis: self.basis.map(|z| z.conj()),
        }
    }

    /// Distance of `v` from the subspace.
    pub fn residual(&self, v: &CVector) -> f64 {
        let proj = &self.basis * (self.basis.adjoint() * v);
        (v - proj).norm()
    }

    pub fn contains(&self, v: &CVector, tol: f64) -> bool {
        self.residual(v) <= tol * v.norm().max(1.0)
    }

    /// Largest distance of a unit vector of `self` from `other`.
    pub fn inclusion_residual(&self, other: &ComplexSubspace) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let diff = &self.basis - other.projector() * &self.basis;
        max_abs(&diff)
    }

    pub fn is_subspace_of(&self, other: &ComplexSubspace, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim() && self.inclusion_residual(other) <= tol
    }

    /// `|P_self - P_other|_max`, or infinity when dimensions differ.
    pub fn distance(&self, other: &ComplexSubspace) -> f64 {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(self.projector() - other.projector()))
    }

    pub fn subspace_eq(&self, other: &ComplexSubspace, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn intersection(&self, other: &ComplexSubspace, rank_tol: f64) -> Self {
        let stacked = super::hstack(&[&self.basis, &(-other.basis.clone())]);
        let kernel = null_space(&stacked, rank_tol);
        let coeffs = kernel.rows(0, self.dim()).into_owned();
        Self::span(&(&self.basis * coeffs), rank_tol)
    }

    pub fn sum(&self, other: &ComplexSubspace, rank_tol: f64) -> Self {
        Self::span(&super::hstack(&[&self.basis, &other.basis]), rank_tol)
    }

    /// Orthogonal complement in the ambient space.
    pub fn orthogonal_complement(&self, rank_tol: f64) -> Self {
        if self.dim() == 0 {
            return Self::whole(self.ambient_dim());
        }
        Self {
            basis: null_space(&self.basis.adjoint(), rank_tol),
        }
    }

    /// Orthogonal complement of `self` inside `container`.
    pub fn complement_within(&self, container: &ComplexSubspace, rank_tol: f64) -> Self {
        let coeffs = container.basis.adjoint() * &self.basis;
        let kernel = if self.dim() == 0 {
            CMatrix::identity(container.dim(), container.dim())
        } else {
            null_space(&coeffs.adjoint(), rank_tol)
        };
        Self::span(&(&container.basis * kernel), rank_tol)
    }

    /// Replace the basis by `basis * m` for an invertible `m`; the subspace is unchanged.
    pub fn rebased(&self, m: &CMatrix) -> CMatrix {
        &self.basis * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn equality_ignores_basis_choice() {
        let mut rng = SeededRng::new(4);
        let b = rng.complex_matrix(5, 2);
        let s = ComplexSubspace::from_basis(&b, 1e-8).unwrap();
        let m = rng.complex_matrix(2, 2);
        let t = ComplexSubspace::from_basis(&s.rebased(&m), 1e-8).unwrap();
        assert!(s.subspace_eq(&t, 1e-10));
        let other = ComplexSubspace::from_basis(&rng.complex_matrix(5, 2), 1e-8).unwrap();
        assert!(!s.subspace_eq(&other, 1e-6));
    }

    #[test]
    fn dependent_columns_rejected() {
        let mut b = CMatrix::zeros(3, 2);
        b[(0, 0)] = Complex64::new(1.0, 0.0);
        b[(0, 1)] = Complex64::new(0.0, 2.0);
        assert!(matches!(
            ComplexSubspace::from_basis(&b, 1e-8),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn intersection_and_complement_dimensions() {
        let a = ComplexSubspace::coordinate(4, &[0, 1, 2]);
        let b = ComplexSubspace::coordinate(4, &[1, 2, 3]);
        let c = a.intersection(&b, 1e-10);
        assert_eq!(c.dim(), 2);
        assert!(c.subspace_eq(&ComplexSubspace::coordinate(4, &[1, 2]), 1e-12));
        let k = c.complement_within(&a, 1e-10);
        assert!(k.subspace_eq(&ComplexSubspace::coordinate(4, &[0]), 1e-12));
        assert_eq!(a.orthogonal_complement(1e-10).dim(), 1);
    }
}
