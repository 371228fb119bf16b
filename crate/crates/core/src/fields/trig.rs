use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::rng::SeededRng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Coefficients of `cos(ν·x)` and `sin(ν·x)` for one frequency.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    cos: RMatrix,
    sin: RMatrix,
}

/// Matrix-valued trigonometric polynomial on `T^d`:
/// `F(x) = Σ_ν C_ν cos(ν·x) + S_ν sin(ν·x)`.
///
/// Frequencies are stored in canonical form (first nonzero entry positive),
/// so `ν` and `-ν` never appear as separate keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolyJson", into = "TrigPolyJson")]
pub struct TrigPolyField {
    rows: usize,
    cols: usize,
    dim: usize,
    terms: BTreeMap<Vec<i32>, Term>,
}

fn canonical(freq: &[i32]) -> (Vec<i32>, f64) {
    match freq.iter().find(|&&f| f != 0) {
        Some(&f) if f < 0 => (freq.iter().map(|x| -x).collect(), -1.0),
        _ => (freq.to_vec(), 1.0),
    }
}

fn dot(freq: &[i32], x: &[f64]) -> f64 {
    freq.iter().zip(x).map(|(&f, &xi)| f as f64 * xi).sum()
}

impl TrigPolyField {
    pub fn zero(rows: usize, cols: usize, dim: usize) -> Self {
        Self {
            rows,
            cols,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(value: &RMatrix, dim: usize) -> Self {
        let mut f = Self::zero(value.nrows(), value.ncols(), dim);
        f.add_term(&vec![0; dim], value, &RMatrix::zeros(value.nrows(), value.ncols()));
        f
    }

    /// Constant vector field `v` on `T^dim`, as a `len × 1` field.
    pub fn constant_vector(v: &[f64], dim: usize) -> Self {
        Self::constant(&RMatrix::from_column_slice(v.len(), 1, v), dim)
    }

    /// Add `C cos(ν·x) + S sin(ν·x)`.
    pub fn add_term(&mut self, freq: &[i32], cos: &RMatrix, sin: &RMatrix) {
        assert_eq!(freq.len(), self.dim, "frequency length must equal the torus dimension");
        assert_eq!(cos.shape(), (self.rows, self.cols));
        assert_eq!(sin.shape(), (self.rows, self.cols));
        let (key, sign) = canonical(freq);
        let zero_freq = key.iter().all(|&f| f == 0);
        let entry = self.terms.entry(key).or_insert_with(|| Term {
            cos: RMatrix::zeros(cos.nrows(), cos.ncols()),
            sin: RMatrix::zeros(cos.nrows(), cos.ncols()),
        });
        entry.cos += cos;
        if !zero_freq {
            entry.sin += sin * sign;
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest `|ν_i|` over all stored frequencies.
    pub fn degree(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|f| f.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> RMatrix {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        let mut out = RMatrix::zeros(self.rows, self.cols);
        for (freq, t) in &self.terms {
            let phase = dot(freq, x);
            let (s, c) = phase.sin_cos();
            out += &t.cos * c + &t.sin * s;
        }
        out
    }

    /// Value of a `len × 1` field as a plain vector.
    pub fn eval_vector(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x).iter().copied().collect()
    }

    /// Exact partial derivative `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.rows, self.cols, self.dim);
        for (freq, t) in &self.terms {
            let nu = freq[i] as f64;
            if nu == 0.0 {
                continue;
            }
            out.terms.insert(
                freq.clone(),
                Term {
                    cos: &t.sin * nu,
                    sin: &t.cos * (-nu),
                },
            );
        }
        out
    }

    /// Derivative along the constant direction `v`.
    pub fn directional(&self, v: &[f64]) -> Self {
        let mut out = Self::zero(self.rows, self.cols, self.dim);
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                out = out.add(&self.partial(i).scale(vi));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in field sum");
        assert_eq!(self.dim, other.dim, "torus dimension mismatch in field sum");
        let mut out = self.clone();
        for (freq, t) in &other.terms {
            out.add_term(freq, &t.cos, &t.sin);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for t in out.terms.values_mut() {
            t.cos *= s;
            t.sin *= s;
        }
        out
    }

    /// Left-multiply every coefficient by a constant matrix.
    pub fn left_mul_const(&self, m: &RMatrix) -> Self {
        let mut out = Self::zero(m.nrows(), self.cols, self.dim);
        for (freq, t) in &self.terms {
            out.terms.insert(
                freq.clone(),
                Term {
                    cos: m * &t.cos,
                    sin: m * &t.sin,
                },
            );
        }
        out
    }

    /// Pointwise product of coefficient matrices, combined by `combine`.
    fn product_with(
        &self,
        other: &Self,
        rows: usize,
        cols: usize,
        combine: impl Fn(&RMatrix, &RMatrix) -> RMatrix,
    ) -> Self {
        assert_eq!(self.dim, other.dim, "torus dimension mismatch in field product");
        let mut out = Self::zero(rows, cols, self.dim);
        for (fa, a) in &self.terms {
            for (fb, b) in &other.terms {
                let plus: Vec<i32> = fa.iter().zip(fb).map(|(x, y)| x + y).collect();
                let minus: Vec<i32> = fa.iter().zip(fb).map(|(x, y)| x - y).collect();
                let cc = combine(&a.cos, &b.cos);
                let ss = combine(&a.sin, &b.sin);
                let sc = combine(&a.sin, &b.cos);
                let cs = combine(&a.cos, &b.sin);
                // cos a cos b = ½[cos(a-b) + cos(a+b)], sin a sin b = ½[cos(a-b) - cos(a+b)]
                // sin a cos b = ½[sin(a+b) + sin(a-b)], cos a sin b = ½[sin(a+b) - sin(a-b)]
                let cos_plus = (&cc - &ss) * 0.5;
                let cos_minus = (&cc + &ss) * 0.5;
                let sin_plus = (&sc + &cs) * 0.5;
                let sin_minus = (&sc - &cs) * 0.5;
                out.add_term(&plus, &cos_plus, &sin_plus);
                out.add_term(&minus, &cos_minus, &sin_minus);
            }
        }
        out.prune(0.0);
        out
    }

    /// Matrix product `self(x) · other(x)`, exact.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch in field product");
        self.product_with(other, self.rows, other.cols, |a, b| a * b)
    }

    /// Product with a scalar (`1 × 1`) field.
    pub fn mul_scalar_field(&self, s: &Self) -> Self {
        assert_eq!(s.shape(), (1, 1), "scalar field must be 1x1");
        self.product_with(s, self.rows, self.cols, |a, b| a * b[(0, 0)])
    }

    /// The `(r, c)` entry as a scalar field.
    pub fn entry(&self, r: usize, c: usize) -> Self {
        let mut out = Self::zero(1, 1, self.dim);
        for (freq, t) in &self.terms {
            out.terms.insert(
                freq.clone(),
                Term {
                    cos: RMatrix::from_element(1, 1, t.cos[(r, c)]),
                    sin: RMatrix::from_element(1, 1, t.sin[(r, c)]),
                },
            );
        }
        out
    }

    /// Keep only the entries `(r, c)` selected by `keep`; others become zero.
    pub fn masked(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut out = self.clone();
        for t in out.terms.values_mut() {
            for r in 0..self.rows {
                for c in 0..self.cols {
                    if !keep(r, c) {
                        t.cos[(r, c)] = 0.0;
                        t.sin[(r, c)] = 0.0;
                    }
                }
            }
        }
        out.prune(0.0);
        out
    }

    /// Drop terms whose coefficients are all at most `tol` in magnitude.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, t| {
            t.cos.iter().chain(t.sin.iter()).any(|x| x.abs() > tol)
        });
    }

    /// Largest absolute coefficient; zero iff the field vanishes identically.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|t| t.cos.iter().chain(t.sin.iter()))
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Random field with `n_terms` frequencies, each `|ν_i| ≤ max_degree`,
    /// and coefficients uniform in `[-amplitude, amplitude]`.
    pub fn random(
        rows: usize,
        cols: usize,
        dim: usize,
        max_degree: i32,
        n_terms: usize,
        amplitude: f64,
        rng: &mut SeededRng,
    ) -> Self {
        let mut f = Self::zero(rows, cols, dim);
        let span = (2 * max_degree + 1) as usize;
        for _ in 0..n_terms {
            let freq: Vec<i32> = (0..dim).map(|_| rng.index(span) as i32 - max_degree).collect();
            let c = rng.real_matrix(rows, cols) * amplitude;
            let s = rng.real_matrix(rows, cols) * amplitude;
            f.add_term(&freq, &c, &s);
        }
        f
    }
}

/// Jacobian `DV(x)` of a vector field (`len × 1`), column `i` = `∂_i V(x)`.
pub fn jacobian(v: &TrigPolyField, x: &[f64]) -> RMatrix {
    let (rows, _) = v.shape();
    let mut out = RMatrix::zeros(rows, v.dim());
    for i in 0..v.dim() {
        out.set_column(i, &v.partial(i).eval(x).column(0));
    }
    out
}

/// Lie bracket `[V, W] = DW·V - DV·W` of vector fields on the same torus.
pub fn lie_bracket(v: &TrigPolyField, w: &TrigPolyField) -> Result<TrigPolyField> {
    let d = v.dim();
    if v.shape() != (d, 1) || w.shape() != (d, 1) || w.dim() != d {
        return Err(Error::ShapeMismatch(format!(
            "lie_bracket needs two {d}x1 vector fields on T^{d}, got {:?} and {:?} on T^{}",
            v.shape(),
            w.shape(),
            w.dim()
        )));
    }
    let mut out = TrigPolyField::zero(d, 1, d);
    for i in 0..d {
        let vi = v.entry(i, 0);
        let wi = w.entry(i, 0);
        out = out
            .add(&w.partial(i).mul_scalar_field(&vi))
            .sub(&v.partial(i).mul_scalar_field(&wi));
    }
    out.prune(1e-15);
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    freq: Vec<i32>,
    #[serde(default)]
    cos: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    sin: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigPolyJson {
    shape: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    terms: Vec<TermJson>,
}

fn rows_to_matrix(rows: &[Vec<f64>], shape: (usize, usize)) -> std::result::Result<RMatrix, String> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(format!(
            "coefficient matrix does not have shape {}x{}",
            shape.0, shape.1
        ));
    }
    Ok(RMatrix::from_fn(shape.0, shape.1, |r, c| rows[r][c]))
}

fn matrix_to_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

impl TryFrom<TrigPolyJson> for TrigPolyField {
    type Error = String;

    fn try_from(j: TrigPolyJson) -> std::result::Result<Self, String> {
        let shape = (j.shape[0], j.shape[1]);
        let dim = match (j.dim, j.terms.first()) {
            (Some(d), _) => d,
            (None, Some(t)) => t.freq.len(),
            (None, None) => return Err("field with no terms must state \"dim\"".into()),
        };
        let mut f = TrigPolyField::zero(shape.0, shape.1, dim);
        for t in &j.terms {
            if t.freq.len() != dim {
                return Err(format!(
                    "frequency {:?} has length {}, expected {dim}",
                    t.freq,
                    t.freq.len()
                ));
            }
            let zero = RMatrix::zeros(shape.0, shape.1);
            let c = match &t.cos {
                Some(rows) => rows_to_matrix(rows, shape)?,
                None => zero.clone(),
            };
            let s = match &t.sin {
                Some(rows) => rows_to_matrix(rows, shape)?,
                None => zero,
            };
            f.add_term(&t.freq, &c, &s);
        }
        Ok(f)
    }
}

impl From<TrigPolyField> for TrigPolyJson {
    fn from(f: TrigPolyField) -> Self {
        TrigPolyJson {
            shape: [f.rows, f.cols],
            dim: if f.terms.is_empty() { Some(f.dim) } else { None },
            terms: f
                .terms
                .iter()
                .map(|(freq, t)| TermJson {
                    freq: freq.clone(),
                    cos: Some(matrix_to_rows(&t.cos)),
                    sin: Some(matrix_to_rows(&t.sin)),
                })
                .collect(),
        }
    }
}
