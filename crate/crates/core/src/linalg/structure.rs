use super::{
    direct_sum_test, hstack, max_abs, null_space, solve, standard_structure, to_complex, CMatrix,
    ComplexSubspace, RMatrix, I,
};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use num_complex::Complex64;

/// A real matrix `J` on `R^{2m}` with `J^2 = -I`.
#[derive(Debug, Clone)]
pub struct LinearComplexStructure {
    matrix: RMatrix,
}

impl LinearComplexStructure {
    /// Checks squareness, even size, and `|J^2 + I|_max <= alg_tol`.
    pub fn new(matrix: RMatrix, alg_tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "complex structure must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 || matrix.nrows() % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "complex structure needs positive even dimension, got {}",
                matrix.nrows()
            )));
        }
        let residual = square_residual(&matrix);
        if residual > alg_tol {
            return Err(Error::NotAComplexStructure { residual });
        }
        Ok(Self { matrix })
    }

    /// Multiplication by `i` on realified `C^m`.
    pub fn standard(m: usize) -> Self {
        Self {
            matrix: standard_structure(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMatrix {
        self.matrix
    }

    pub fn neg(&self) -> Self {
        Self {
            matrix: -&self.matrix,
        }
    }

    /// `|J^2 + I|_max`.
    pub fn residual(&self) -> f64 {
        square_residual(&self.matrix)
    }
}

fn square_residual(j: &RMatrix) -> f64 {
    let n = j.nrows();
    max_abs(&(j * j + RMatrix::identity(n, n)))
}

/// The `+i` and `-i` eigenspaces of a complexified structure.
#[derive(Debug, Clone)]
pub struct RealSplitting {
    pub plus_i: ComplexSubspace,
    pub minus_i: ComplexSubspace,
}

impl RealSplitting {
    /// Oblique projector onto `plus_i` along `minus_i`.
    pub fn plus_projector(&self) -> Result<CMatrix> {
        let both = hstack(&[self.plus_i.basis(), self.minus_i.basis()]);
        let m = self.plus_i.dim();
        let mut keep = CMatrix::zeros(both.nrows(), both.ncols());
        keep.view_mut((0, 0), (both.nrows(), m))
            .copy_from(self.plus_i.basis());
        let inv = solve(&both, &CMatrix::identity(both.nrows(), both.nrows())).ok_or(
            Error::NotComplementary { sigma_min: 0.0 },
        )?;
        Ok(keep * inv)
    }

    /// `i P_+ - i P_-`, which must reproduce the complexified structure.
    pub fn reassemble(&self) -> Result<CMatrix> {
        let p = self.plus_projector()?;
        let n = p.nrows();
        let q = CMatrix::identity(n, n) - &p;
        Ok(p * I - q * I)
    }

    /// Distance of `minus_i` from the conjugate of `plus_i`.
    pub fn conjugation_defect(&self) -> f64 {
        self.plus_i.conj().distance(&self.minus_i)
    }
}

/// Kernels of `J^C - i` and `J^C + i`, extracted by SVD.
pub fn eigen_split(j: &LinearComplexStructure, tol: &Tolerances) -> Result<RealSplitting> {
    let residual = j.residual();
    if residual > tol.alg {
        return Err(Error::NotAComplexStructure { residual });
    }
    let jc = to_complex(j.matrix());
    let n = jc.nrows();
    let id = CMatrix::identity(n, n);
    // eigenvalues are exactly +-i, so the kernel threshold can be generous
    let kernel_tol = tol.rank.max(1e-6);
    let plus = null_space(&(&jc - &id * I), kernel_tol);
    let minus = null_space(&(&jc + &id * I), kernel_tol);
    if plus.ncols() != minus.ncols() || plus.ncols() * 2 != n {
        return Err(Error::UnbalancedEigenspaces {
            plus: plus.ncols(),
            minus: minus.ncols(),
        });
    }
    let split = RealSplitting {
        plus_i: ComplexSubspace::span(&plus, tol.rank),
        minus_i: ComplexSubspace::span(&minus, tol.rank),
    };
    let report = direct_sum_test(&split.plus_i, &split.minus_i, tol.rank)?;
    if !report.is_direct {
        return Err(Error::NotComplementary {
            sigma_min: report.sigma_min,
        });
    }
    Ok(split)
}

/// `J^C v - i v` residual for a complex vector, used by callers that test membership.
pub fn eigen_residual(j: &RMatrix, v: &super::CVector, sign: f64) -> f64 {
    let jc = to_complex(j);
    (jc * v - v * Complex64::new(0.0, sign)).norm()
}
