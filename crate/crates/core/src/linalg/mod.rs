//! Dense complex linear algebra for small dimensions: subspaces given by
//! orthonormal bases, direct-sum and quotient computations, and the ±i
//! splitting of linear complex structures.
//!
//! Realification convention: `C^m` is identified with `R^{2m}` by
//! `z ↦ (Re z_1, …, Re z_m, Im z_1, …, Im z_m)`, so multiplication by `i`
//! becomes the block matrix `[[0, -I], [I, 0]]`.

mod ops;
mod structure;
mod subspace;

pub use ops::{direct_sum_test, project_mod, DirectSumReport};
pub use structure::{eigen_residual, eigen_split, LinearComplexStructure, RealSplitting};
pub use subspace::ComplexSubspace;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Singular values in decreasing order.
pub fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&top) if top == 0.0 => 0,
        Some(&top) => s.iter().filter(|&&x| x > rel_tol * top).count(),
    }
}

/// Orthonormal basis of the kernel of `m`, using a relative rank threshold.
pub fn null_space<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // pad to square so the SVD returns a full right singular basis
    let padded = if rows < cols {
        let mut p = DMatrix::<T>::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thresh = if top == 0.0 { 0.0 } else { rel_tol * top };
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thresh || top == 0.0)
        .collect();
    let mut out = DMatrix::<T>::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for r in 0..cols {
            out[(r, c)] = v_t[(i, r)].clone().conjugate();
        }
    }
    out
}

/// Orthonormal basis of the column span of `m`.
pub fn column_span<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > rel_tol * top)
        .collect();
    let mut out = DMatrix::<T>::zeros(m.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

pub fn realify_vector(v: &CVector) -> RVector {
    let m = v.len();
    RVector::from_fn(2 * m, |r, _| if r < m { v[r].re } else { v[r - m].im })
}

pub fn complexify_vector(x: &RVector) -> CVector {
    assert!(x.len() % 2 == 0, "realified vectors have even length");
    let m = x.len() / 2;
    CVector::from_fn(m, |r, _| Complex64::new(x[r], x[r + m]))
}

/// Real matrix of a complex-linear map `C^p -> C^m`.
pub fn realify_matrix(a: &CMatrix) -> RMatrix {
    let (m, p) = a.shape();
    let mut out = RMatrix::zeros(2 * m, 2 * p);
    for r in 0..m {
        for c in 0..p {
            let z = a[(r, c)];
            out[(r, c)] = z.re;
            out[(r, c + p)] = -z.im;
            out[(r + m, c)] = z.im;
            out[(r + m, c + p)] = z.re;
        }
    }
    out
}

pub fn to_complex(a: &RMatrix) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Multiplication by `i` on realified `C^m`.
pub fn standard_structure(m: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        j[(k + m, k)] = 1.0;
        j[(k, k + m)] = -1.0;
    }
    j
}

pub fn max_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max)
}

/// Solve a square complex system, returning `None` when it is singular.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    a.clone().lu().solve(b)
}

pub fn solve_real(a: &RMatrix, b: &RMatrix) -> Option<RMatrix> {
    a.clone().lu().solve(b)
}

pub fn hstack<T: ComplexField>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::<T>::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c0), (rows, b.ncols())).copy_from(*b);
        c0 += b.ncols();
    }
    out
}

pub fn vstack<T: ComplexField>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let cols = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::<T>::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((r0, 0), (b.nrows(), cols)).copy_from(*b);
        r0 += b.nrows();
    }
    out
}
