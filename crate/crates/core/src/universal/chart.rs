use super::fiber::{build_fiber, UniversalPoint};
use super::manifold::PointwiseACManifold;
use crate::distribution::{DistributionChart, HolomorphicMatrixMap};
use crate::error::{Error, Result};
use crate::linalg::{hstack, null_space, singular_values, vstack, CMatrix, CVector, ComplexSubspace};
use crate::rng::SeededRng;
use crate::Tolerances;
use nalgebra::{Dyn, LU};
use num_complex::Complex64;
use std::sync::Arc;

/// How the fixed complements of the graph charts are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartChoice {
    /// Orthogonal complements from the SVD of the base subspaces.
    Orthogonal,
    /// Orthogonal complements sheared by a seeded random map into the base
    /// subspace, still complementary.
    Random(u64),
}

/// Graph/flag coordinates on `Z_{n,k}` centred at a point `p0`.
///
/// Coordinates are `z = (w, A1, B1, A2, B2)` (matrices row-major):
/// `G = G0 + [K0 | R] w`, `Σ' = span(P1 + C1 A1)`,
/// `S' = span((P1 + C1 A1)[I; B1])`, and likewise `Σ'', S''` with index 2.
/// Here `P1 = [Q_S' | K0]` is a basis of `Σ'_0` adapted to `S'_0`,
/// `R = [Q_S' | P2]` spans the horizontal fiber `S'_0 ⊕ Σ''_0`, and the first
/// `n` coordinates `w'` are transverse to `D`. The distribution is
/// `w' = a(z) η` with `a = [a_base | 0]` and `a_base` the leading `n` rows of
/// `[-K0 | W(z)]^{-1} R`, `W(z) = [(P1 + C1 A1)[I; B1] | P2 + C2 A2]`.
#[derive(Debug, Clone)]
pub struct UniversalChart {
    n: usize,
    k: usize,
    g0: CVector,
    p1: CMatrix,
    c1: CMatrix,
    p2: CMatrix,
    c2: CMatrix,
    k0: CMatrix,
    r: CMatrix,
    base_lu: LU<Complex64, Dyn, Dyn>,
}

struct Unpacked {
    a1: CMatrix,
    b1: CMatrix,
    a2: CMatrix,
}

fn sheared(perp: &CMatrix, base: &CMatrix, rng: Option<&mut SeededRng>) -> CMatrix {
    match rng {
        None => perp.clone(),
        Some(rng) => perp + base * rng.complex_matrix(base.ncols(), perp.ncols()) * Complex64::new(0.5, 0.0),
    }
}

fn row_major(m: &CMatrix) -> impl Iterator<Item = Complex64> + '_ {
    (0..m.nrows()).flat_map(move |r| (0..m.ncols()).map(move |c| m[(r, c)]))
}

fn from_row_major(z: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, c| z[r * cols + c])
}

fn degenerate(what: &str) -> Error {
    Error::ChartDegeneracy(what.to_string())
}

impl UniversalChart {
    pub fn new(p: &UniversalPoint, choice: ChartChoice, rank_tol: f64) -> Result<Self> {
        let (n, k) = p.params();
        let mut rng = match choice {
            ChartChoice::Orthogonal => None,
            ChartChoice::Random(seed) => Some(SeededRng::new(seed)),
        };
        let split = |sub: &ComplexSubspace, sigma: &ComplexSubspace, rng: Option<&mut SeededRng>| {
            let qs = sub.basis().clone();
            let qk = sub.complement_within(sigma, rank_tol).basis().clone();
            let mut rng = rng;
            let qk = sheared(&qk, &qs, rng.as_deref_mut());
            let perp = null_space(&sigma.basis().adjoint(), rank_tol.max(1e-12));
            let c = sheared(&perp, sigma.basis(), rng);
            (qs, qk, c)
        };
        let (qs1, k0, c1) = split(&p.sp, &p.sigp, rng.as_mut());
        let (qs2, qk2, c2) = split(&p.spp, &p.sigpp, rng.as_mut());
        if k0.ncols() != n || c1.ncols() != k || qk2.ncols() != n || c2.ncols() != k {
            return Err(degenerate("complement dimensions do not match (n, k)"));
        }
        let p1 = hstack(&[&qs1, &k0]);
        let p2 = hstack(&[&qs2, &qk2]);
        let r = hstack(&[&qs1, &p2]);
        let kr = hstack(&[&k0, &r]);
        let s = singular_values(&kr);
        if s.last().copied().unwrap_or(0.0) <= rank_tol * s[0] {
            return Err(degenerate("S' ⊕ Σ'' and the transverse block are not complementary"));
        }
        Ok(Self {
            n,
            k,
            g0: p.z.clone(),
            p1,
            c1,
            p2,
            c2,
            k0,
            r,
            base_lu: kr.lu(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        2 * self.k + 2 * (self.k * self.k + self.n * (self.k - self.n))
    }

    fn graph(&self, p0: &CMatrix, c: &CMatrix, sigma: &CMatrix) -> Result<CMatrix> {
        let k = self.k;
        let coeffs = hstack(&[p0, c])
            .lu()
            .solve(sigma)
            .ok_or_else(|| degenerate("graph reference is singular"))?;
        let x = coeffs.rows(0, k).into_owned();
        let y = coeffs.rows(k, k).into_owned();
        let xinv = x.try_inverse().ok_or_else(|| degenerate("subspace is not a graph over the base"))?;
        Ok(y * xinv)
    }

    fn flag(&self, base: &CMatrix, s: &CMatrix) -> Result<CMatrix> {
        let m = self.k - self.n;
        let coeffs = base
            .clone()
            .svd(true, true)
            .solve(s, 1e-14)
            .map_err(|e| degenerate(e))?;
        let top = coeffs.rows(0, m).into_owned();
        let bottom = coeffs.rows(m, self.n).into_owned();
        let tinv = top.try_inverse().ok_or_else(|| degenerate("flag is not a graph over S'_0"))?;
        Ok(bottom * tinv)
    }

    /// Chart coordinates of the point `q`.
    pub fn coordinates(&self, q: &UniversalPoint) -> Result<CVector> {
        let w = self
            .base_lu
            .solve(&(&q.z - &self.g0))
            .ok_or_else(|| degenerate("base frame is singular"))?;
        let a1 = self.graph(&self.p1, &self.c1, q.sigp.basis())?;
        let a2 = self.graph(&self.p2, &self.c2, q.sigpp.basis())?;
        let b1 = self.flag(&(&self.p1 + &self.c1 * &a1), q.sp.basis())?;
        let b2 = self.flag(&(&self.p2 + &self.c2 * &a2), q.spp.basis())?;
        let out: Vec<Complex64> = w
            .iter()
            .copied()
            .chain(row_major(&a1))
            .chain(row_major(&b1))
            .chain(row_major(&a2))
            .chain(row_major(&b2))
            .collect();
        Ok(CVector::from_vec(out))
    }

    /// Coordinates of the lift `f(x)`.
    pub fn lift_coordinates(
        &self,
        x: &[f64],
        m: &PointwiseACManifold,
        tol: &Tolerances,
    ) -> Result<CVector> {
        self.coordinates(&build_fiber(x, m, tol)?)
    }

    fn unpack(&self, z: &CVector) -> Unpacked {
        let (n, k) = (self.n, self.k);
        let s = z.as_slice();
        let mut o = 2 * k;
        let a1 = from_row_major(&s[o..], k, k);
        o += k * k;
        let b1 = from_row_major(&s[o..], n, k - n);
        o += n * (k - n);
        let a2 = from_row_major(&s[o..], k, k);
        Unpacked { a1, b1, a2 }
    }

    fn flag_frame(&self, u: &Unpacked) -> CMatrix {
        let (n, k) = (self.n, self.k);
        vstack(&[&CMatrix::identity(k - n, k - n), &u.b1])
    }

    fn horizontal_frame(&self, u: &Unpacked) -> CMatrix {
        let first = (&self.p1 + &self.c1 * &u.a1) * self.flag_frame(u);
        let second = &self.p2 + &self.c2 * &u.a2;
        hstack(&[&first, &second])
    }

    /// LU of `[-K0 | W(z)]` and the solution `X = [-K0 | W]^{-1} R`.
    fn solve_system(&self, z: &CVector) -> Result<(LU<Complex64, Dyn, Dyn>, CMatrix, Unpacked)> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let u = self.unpack(z);
        let system = hstack(&[&(-&self.k0), &self.horizontal_frame(&u)]);
        let lu = system.lu();
        let x = lu
            .solve(&self.r)
            .ok_or_else(|| degenerate("horizontal frame lost transversality"))?;
        Ok((lu, x, u))
    }

    fn pad(&self, base: CMatrix) -> CMatrix {
        let mut a = CMatrix::zeros(self.n, self.dim() - self.n);
        a.view_mut((0, 0), (self.n, 2 * self.k - self.n)).copy_from(&base);
        a
    }

    pub fn into_distribution_chart(self, base: CVector) -> Result<DistributionChart> {
        // coordinates stay well inside the graph domain near the base point
        Ok(DistributionChart::from_graph(self.n, Arc::new(self), base)?.with_radius(1.0))
    }
}

impl HolomorphicMatrixMap for UniversalChart {
    fn ambient_dim(&self) -> usize {
        self.dim()
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.dim() - self.n)
    }

    fn eval(&self, z: &CVector) -> Result<CMatrix> {
        let (_, x, _) = self.solve_system(z)?;
        Ok(self.pad(x.rows(0, self.n).into_owned()))
    }

    fn has_exact_partials(&self) -> bool {
        true
    }

    /// `∂_j X = -M^{-1} (∂_j W) X''` with `X''` the rows of `X` after the first `n`.
    fn partial(&self, z: &CVector, j: usize) -> Result<CMatrix> {
        let (n, k) = (self.n, self.k);
        let (lu, x, u) = self.solve_system(z)?;
        let m = k - n;
        let mut dw = CMatrix::zeros(2 * k, 2 * k - n);
        let o_a1 = 2 * k;
        let o_b1 = o_a1 + k * k;
        let o_a2 = o_b1 + n * m;
        let o_b2 = o_a2 + k * k;
        if (o_a1..o_b1).contains(&j) {
            let (r, c) = ((j - o_a1) / k, (j - o_a1) % k);
            let row = self.flag_frame(&u).row(c).into_owned();
            dw.view_mut((0, 0), (2 * k, m))
                .copy_from(&(self.c1.column(r) * row));
        } else if (o_b1..o_a2).contains(&j) {
            let (r, c) = ((j - o_b1) / m, (j - o_b1) % m);
            let col = (&self.p1 + &self.c1 * &u.a1).column(m + r).into_owned();
            dw.set_column(c, &col);
        } else if (o_a2..o_b2).contains(&j) {
            let (r, c) = ((j - o_a2) / k, (j - o_a2) % k);
            dw.set_column(m + c, &self.c2.column(r));
        } else if j >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: j,
            });
        }
        let rhs = -(dw * x.rows(n, 2 * k - n));
        let dx = lu
            .solve(&rhs)
            .ok_or_else(|| degenerate("horizontal frame lost transversality"))?;
        Ok(self.pad(dx.rows(0, n).into_owned()))
    }
}

/// The chart of `Z_{n,k}` at `p` with orthogonal complements, centred at
/// the coordinates of `p` (where `a = 0`).
pub fn universal_chart(p: &UniversalPoint, tol: &Tolerances) -> Result<DistributionChart> {
    let chart = UniversalChart::new(p, ChartChoice::Orthogonal, tol.rank)?;
    let z0 = chart.coordinates(p)?;
    chart.into_distribution_chart(z0)
}
