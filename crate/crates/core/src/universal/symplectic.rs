use crate::error::{Error, Result};
use crate::linalg::{hstack, max_abs, null_space, standard_structure, vstack, RMatrix};
use crate::rng::SeededRng;

/// `ω0 = [[0, I], [-I, 0]]`, so that `ω0(ξ, J0 ξ) = |ξ|²` for the standard `J0`.
fn standard_form(n: usize) -> RMatrix {
    -standard_structure(n)
}

/// The ambient symplectic vector space `(V, γ)` with a symplectic
/// inclusion `ι: (T_xX, ω) → (V, γ)` and an anti-symplectic involution `C`
/// of `V` (`C² = I`, `C*γ = -γ`), which identifies `V̄` with `V`.
#[derive(Debug, Clone)]
pub struct NormalData {
    pub gamma: RMatrix,
    pub iota: RMatrix,
    pub involution: RMatrix,
}

impl NormalData {
    /// `V = R^{2m}` with the standard form and `C = diag(I, -I)`.
    pub fn standard(iota: RMatrix) -> Self {
        let m = iota.nrows() / 2;
        let mut c = RMatrix::identity(2 * m, 2 * m);
        for i in m..2 * m {
            c[(i, i)] = -1.0;
        }
        Self {
            gamma: standard_form(m),
            iota,
            involution: c,
        }
    }

    fn validate(&self, omega: &RMatrix, alg_tol: f64) -> Result<()> {
        let v = self.gamma.nrows();
        if self.gamma.shape() != (v, v)
            || self.involution.shape() != (v, v)
            || self.iota.shape() != (v, omega.nrows())
            || v < omega.nrows()
        {
            return Err(Error::ShapeMismatch("normal data shapes do not match".into()));
        }
        let checks = [
            ("γ is not antisymmetric", max_abs(&(&self.gamma + self.gamma.transpose()))),
            (
                "C is not an involution",
                max_abs(&(&self.involution * &self.involution - RMatrix::identity(v, v))),
            ),
            (
                "C is not anti-symplectic",
                max_abs(&(self.involution.transpose() * &self.gamma * &self.involution + &self.gamma)),
            ),
            (
                "ι does not pull γ back to ω",
                max_abs(&(self.iota.transpose() * &self.gamma * &self.iota - omega)),
            ),
        ];
        for (what, residual) in checks {
            if residual > alg_tol {
                return Err(Error::NotCompatible(format!("{what} (residual {residual:e})")));
            }
        }
        Ok(())
    }
}

/// Sign between the two factors of the pairing on `V × V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingSign {
    /// `γ̃ = ½(pr1*γ - pr2*γ)`.
    Difference,
    /// `½(pr1*γ + pr2*γ)`, the negative control.
    Sum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticReport {
    /// `|J̃ᵀ γ̃ J̃ - γ̃|`.
    pub compat_residual: f64,
    /// `|Gᵀ γ̃ G - ω|`.
    pub pullback_residual: f64,
    /// `|J̃² + I|`.
    pub square_residual: f64,
    /// `|J̃ G - G J|`.
    pub lift_residual: f64,
    pub passed: bool,
}

fn check_input(omega: &RMatrix, j: &RMatrix, alg_tol: f64) -> Result<()> {
    let d = omega.nrows();
    if d % 2 != 0 || omega.shape() != (d, d) || j.shape() != (d, d) {
        return Err(Error::ShapeMismatch("ω and J must be square of even size".into()));
    }
    let antisym = max_abs(&(omega + omega.transpose()));
    let square = max_abs(&(j * j + RMatrix::identity(d, d)));
    let invariance = max_abs(&(j.transpose() * omega * j - omega));
    for (what, residual) in [("ω antisymmetry", antisym), ("J^2 = -I", square), ("J*ω = ω", invariance)] {
        if residual > alg_tol {
            return Err(Error::NotCompatible(format!("{what} fails (residual {residual:e})")));
        }
    }
    // ω(ξ, Jξ) > 0: the symmetric part of ωJ is positive definite
    let metric = omega * j;
    let sym = (&metric + metric.transpose()) * 0.5;
    let min_eig = sym.symmetric_eigenvalues().min();
    if min_eig <= 0.0 {
        return Err(Error::NotCompatible(format!("ω(ξ, Jξ) is not positive (eigenvalue {min_eig:e})")));
    }
    Ok(())
}

/// Pointwise model on `V × V`: `G = (ι, Cι)`, the splitting into diagonal
/// `(ιξ, Cιξ)`, antidiagonal `(ιξ, -Cιξ)`, `(NX, 0)` and `(0, C·NX)` with
/// `NX` the `γ`-orthogonal of `ι(T_xX)`, and
/// `J̃ = J ⊕ (-J) ⊕ ((u, Cv) ↦ (-v, Cu))`, which works out to
/// `J̃(ξ1, Cξ2) = (Jξ'_2 - ξ''_2, C(Jξ'_1 + ξ''_1))`.
pub fn symplectic_pointwise_model(
    omega: &RMatrix,
    j: &RMatrix,
    normal: &NormalData,
    sign: PairingSign,
    alg_tol: f64,
) -> Result<SymplecticReport> {
    check_input(omega, j, alg_tol)?;
    normal.validate(omega, alg_tol)?;
    let d = omega.nrows();
    let v = normal.gamma.nrows();
    let iota = &normal.iota;
    let c = &normal.involution;
    let nx = null_space(&(iota.transpose() * &normal.gamma), 1e-12);
    if nx.ncols() != v - d {
        return Err(Error::NotCompatible("γ-orthogonal of ι(T_xX) has the wrong dimension".into()));
    }
    let c_iota = c * iota;
    let zv = RMatrix::zeros(v, v - d);
    let basis = hstack(&[
        &vstack(&[iota, &c_iota]),
        &vstack(&[iota, &(-&c_iota)]),
        &vstack(&[&nx, &zv]),
        &vstack(&[&zv, &(c * &nx)]),
    ]);
    let r = v - d;
    let mut block = RMatrix::zeros(2 * v, 2 * v);
    block.view_mut((0, 0), (d, d)).copy_from(j);
    block.view_mut((d, d), (d, d)).copy_from(&(-j));
    block
        .view_mut((2 * d, 2 * d), (2 * r, 2 * r))
        .copy_from(&standard_structure(r));
    let inv = basis
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::NotCompatible("ι(T_xX) and NX are not complementary".into()))?;
    let jt = &basis * block * inv;
    let second = match sign {
        PairingSign::Difference => -&normal.gamma,
        PairingSign::Sum => normal.gamma.clone(),
    };
    let mut gt = RMatrix::zeros(2 * v, 2 * v);
    gt.view_mut((0, 0), (v, v)).copy_from(&(&normal.gamma * 0.5));
    gt.view_mut((v, v), (v, v)).copy_from(&(second * 0.5));
    let g = vstack(&[iota, &c_iota]);
    let compat_residual = max_abs(&(jt.transpose() * &gt * &jt - &gt));
    let pullback_residual = max_abs(&(g.transpose() * &gt * &g - omega));
    let square_residual = max_abs(&(&jt * &jt + RMatrix::identity(2 * v, 2 * v)));
    let lift_residual = max_abs(&(&jt * &g - &g * j));
    let passed = [compat_residual, pullback_residual, square_residual, lift_residual]
        .iter()
        .all(|&r| r <= alg_tol);
    Ok(SymplecticReport {
        compat_residual,
        pullback_residual,
        square_residual,
        lift_residual,
        passed,
    })
}

/// A random compatible triple: `ω = P^{-T} ω0 P^{-1}`, `J = P J0 P^{-1}`,
/// and `ι = S E P^{-1}` into standard `R^{2m}`, with `E` the standard
/// symplectic inclusion and `S` a product of symplectic shears.
pub fn random_compatible_input(n: usize, m: usize, rng: &mut SeededRng) -> Result<(RMatrix, RMatrix, NormalData)> {
    if n < 1 || m < n {
        return Err(Error::InvalidParams(format!("need m >= n >= 1, got n={n}, m={m}")));
    }
    let d = 2 * n;
    let p = RMatrix::identity(d, d) + rng.real_matrix(d, d) * 0.3;
    let pinv = p
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParams("singular random frame".into()))?;
    let omega = pinv.transpose() * standard_form(n) * &pinv;
    let j = &p * standard_structure(n) * &pinv;
    let mut e = RMatrix::zeros(2 * m, d);
    for i in 0..n {
        e[(i, i)] = 1.0;
        e[(m + i, n + i)] = 1.0;
    }
    let shear = |rng: &mut SeededRng, lower: bool| {
        let a = rng.real_matrix(m, m) * 0.4;
        let sym = (&a + a.transpose()) * 0.5;
        let mut s = RMatrix::identity(2 * m, 2 * m);
        if lower {
            s.view_mut((m, 0), (m, m)).copy_from(&sym);
        } else {
            s.view_mut((0, m), (m, m)).copy_from(&sym);
        }
        s
    };
    let s = shear(rng, false) * shear(rng, true) * shear(rng, false);
    let iota = s * e * pinv;
    Ok((omega, j, NormalData::standard(iota)))
}
