use super::trig::{jacobian, TrigPolyField};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, standard_structure, RMatrix, RVector};
use crate::rng::SeededRng;

/// A field of real `2n × 2n` matrices on a chart of `R^{2n}` together with
/// its derivative along constant directions.
pub trait StructureField: Sync {
    fn real_dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> RMatrix;

    /// `d/dt J(x + t v)` at `t = 0`.
    fn directional(&self, x: &[f64], v: &[f64]) -> RMatrix;
}

/// Wraps a closure and differentiates it by central differences.
pub struct FdStructureField<F> {
    pub dim: usize,
    pub h: f64,
    pub f: F,
}

impl<F: Fn(&[f64]) -> RMatrix + Sync> StructureField for FdStructureField<F> {
    fn real_dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> RMatrix {
        (self.f)(x)
    }

    fn directional(&self, x: &[f64], v: &[f64]) -> RMatrix {
        let shift = |s: f64| -> Vec<f64> { x.iter().zip(v).map(|(a, b)| a + s * b).collect() };
        let h = self.h;
        // fourth-order stencil
        ((self.f)(&shift(-2.0 * h)) - (self.f)(&shift(2.0 * h))
            + ((self.f)(&shift(h)) - (self.f)(&shift(-h))) * 8.0)
            / (12.0 * h)
    }
}

/// An almost complex structure on `T^{2n}` given by a trig-poly matrix field.
#[derive(Debug, Clone)]
pub struct AlmostComplexField {
    n: usize,
    j: TrigPolyField,
}

impl AlmostComplexField {
    /// Wrap `j`, checking its shape and `J^2 = -I` at the given sample points.
    pub fn new(j: TrigPolyField, samples: &[Vec<f64>], alg_tol: f64) -> Result<Self> {
        let d = j.dim();
        if d == 0 || d % 2 != 0 || j.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "almost complex field must be a {d}x{d} field on T^{d} with d even, got {:?}",
                j.shape()
            )));
        }
        let field = Self { n: d / 2, j };
        for x in samples {
            let residual = field.square_residual(x);
            if residual > alg_tol {
                return Err(Error::NotAComplexStructure { residual });
            }
        }
        Ok(field)
    }

    /// Translation-invariant standard structure on `T^{2n}`.
    pub fn standard(n: usize) -> Self {
        Self::constant(&standard_structure(n))
    }

    pub fn constant(j0: &RMatrix) -> Self {
        Self {
            n: j0.nrows() / 2,
            j: TrigPolyField::constant(j0, j0.nrows()),
        }
    }

    /// `J = P J_0 P^{-1}` with `P = I + εU(x)` and `U` strictly upper
    /// triangular. `U` is nilpotent, so `P^{-1} = Σ_k (-εU)^k` is a finite
    /// sum and `J` is an exact trig polynomial with `J^2 = -I` identically.
    pub fn nilpotent_conjugate(
        n: usize,
        eps: f64,
        max_degree: i32,
        n_terms: usize,
        rng: &mut SeededRng,
    ) -> Self {
        let d = 2 * n;
        let u = TrigPolyField::random(d, d, d, max_degree, n_terms, 1.0, rng).masked(|r, c| c > r);
        let id = TrigPolyField::constant(&RMatrix::identity(d, d), d);
        let p = id.add(&u.scale(eps));
        let step = u.scale(-eps);
        let mut pinv = id.clone();
        let mut power = id;
        for _ in 1..d {
            power = power.mul(&step);
            pinv = pinv.add(&power);
        }
        let mut j = p.mul(&pinv.left_mul_const(&standard_structure(n)));
        j.prune(1e-16);
        Self { n, j }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &TrigPolyField {
        &self.j
    }

    pub fn is_constant(&self) -> bool {
        (0..2 * self.n).all(|i| self.j.partial(i).coefficient_norm() == 0.0)
    }

    pub fn square_residual(&self, x: &[f64]) -> f64 {
        let j = self.j.eval(x);
        let d = j.nrows();
        max_abs(&(&j * &j + RMatrix::identity(d, d)))
    }
}

impl StructureField for AlmostComplexField {
    fn real_dim(&self) -> usize {
        2 * self.n
    }

    fn value(&self, x: &[f64]) -> RMatrix {
        self.j.eval(x)
    }

    fn directional(&self, x: &[f64], v: &[f64]) -> RMatrix {
        let mut out = RMatrix::zeros(2 * self.n, 2 * self.n);
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                out += self.j.partial(i).eval(x) * vi;
            }
        }
        out
    }
}

/// Value and Jacobian at a point.
struct Jet {
    value: RVector,
    jac: RMatrix,
}

fn bracket(a: &Jet, b: &Jet) -> RVector {
    &b.jac * &a.value - &a.jac * &b.value
}

/// Jet of `J·X` at `x`.
fn apply_structure(j: &AlmostComplexField, x: &[f64], xj: &Jet) -> Jet {
    let jx = j.value(x);
    let mut jac = &jx * &xj.jac;
    for i in 0..xj.value.len() {
        let di = j.field().partial(i).eval(x);
        let col = jac.column(i) + di * &xj.value;
        jac.set_column(i, &col);
    }
    Jet {
        value: &jx * &xj.value,
        jac,
    }
}

fn four_bracket(j: &AlmostComplexField, x: &[f64], z: &Jet, e: &Jet) -> RVector {
    let jz = apply_structure(j, x, z);
    let je = apply_structure(j, x, e);
    let jx = j.value(x);
    bracket(z, e) - bracket(&jz, &je) + &jx * bracket(z, &je) + &jx * bracket(&jz, e)
}

/// `N_J(ζ, η) = [ζ,η] - [Jζ,Jη] + J[ζ,Jη] + J[Jζ,η]` at `x`, with `ζ`, `η`
/// extended as constant vector fields and all brackets exact.
pub fn nijenhuis_direct(
    j: &AlmostComplexField,
    x: &[f64],
    zeta: &RVector,
    eta: &RVector,
    alg_tol: f64,
) -> Result<RVector> {
    let residual = j.square_residual(x);
    if residual > alg_tol {
        return Err(Error::NotAComplexStructure { residual });
    }
    let d = j.real_dim();
    let constant = |v: &RVector| Jet {
        value: v.clone(),
        jac: RMatrix::zeros(d, d),
    };
    Ok(four_bracket(j, x, &constant(zeta), &constant(eta)))
}

/// Four-bracket expression with arbitrary trig-poly extensions `z`, `e`.
pub fn nijenhuis_with_extensions(
    j: &AlmostComplexField,
    x: &[f64],
    z: &TrigPolyField,
    e: &TrigPolyField,
) -> RVector {
    let jet = |f: &TrigPolyField| Jet {
        value: RVector::from_vec(f.eval_vector(x)),
        jac: jacobian(f, x),
    };
    four_bracket(j, x, &jet(z), &jet(e))
}

/// Four-bracket Nijenhuis tensor of any [`StructureField`], with constant
/// extensions: `-(∂_{Jζ}J)η + (∂_{Jη}J)ζ + J(∂_ζ J)η - J(∂_η J)ζ`.
pub fn nijenhuis_of_field<F: StructureField + ?Sized>(
    f: &F,
    x: &[f64],
    zeta: &RVector,
    eta: &RVector,
) -> RVector {
    let j = f.value(x);
    let jz = &j * zeta;
    let je = &j * eta;
    let d = |v: &RVector| f.directional(x, v.as_slice());
    -(d(&jz) * eta) + d(&je) * zeta + &j * (d(zeta) * eta) - &j * (d(eta) * zeta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorialityReport {
    pub max_deviation: f64,
    pub pairs_checked: usize,
    pub passed: bool,
}

/// Compare the four-bracket expression for constant extensions with
/// extensions `ζ + Σ_i sin(y_i - x_i) r_i`, which agree with `ζ` at `x`.
pub fn verify_tensoriality(
    j: &AlmostComplexField,
    x: &[f64],
    seed: u64,
    fd_tol: f64,
) -> TensorialityReport {
    let d = j.real_dim();
    let mut rng = SeededRng::new(seed);
    let pairs = 4;
    let mut worst: f64 = 0.0;
    let extend = |v: &RVector, rng: &mut SeededRng| {
        let mut f = TrigPolyField::constant_vector(v.as_slice(), d);
        for i in 0..d {
            let r = rng.real_matrix(d, 1);
            let mut freq = vec![0; d];
            freq[i] = 1;
            // sin(y_i - x_i) = cos(x_i) sin(y_i) - sin(x_i) cos(y_i)
            f.add_term(&freq, &(&r * (-x[i].sin())), &(&r * x[i].cos()));
        }
        f
    };
    for _ in 0..pairs {
        let zeta = rng.real_vector(d);
        let eta = rng.real_vector(d);
        let base = nijenhuis_with_extensions(
            j,
            x,
            &TrigPolyField::constant_vector(zeta.as_slice(), d),
            &TrigPolyField::constant_vector(eta.as_slice(), d),
        );
        let z = extend(&zeta, &mut rng);
        let e = extend(&eta, &mut rng);
        let other = nijenhuis_with_extensions(j, x, &z, &e);
        let scale = base.norm().max(1.0);
        worst = worst.max((base - other).norm() / scale);
    }
    TensorialityReport {
        max_deviation: worst,
        pairs_checked: pairs,
        passed: worst <= fd_tol,
    }
}
