//! The combinatorial conditions on `(m, N, E, ℓ)` that define LVMB
//! manifolds, and the commuting diagonal fields `ζ_j = Σ_k λ_jk z_k ∂/∂z_k`.
//!
//! A linear form `ℓ_k(w) = Σ_j c_jk w_j` on `C^m` is identified with the
//! point `(Re c_k, Im c_k) ∈ R^{2m}`.

mod lp;

pub use lp::{maximize, LpOutcome};

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::linalg::{numerical_rank, CMatrix, CVector, RMatrix, RVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Minimal margin for an interior overlap.
pub const MARGIN_TOL: f64 = 1e-9;

/// A linear form on `C^m`: `m` complex coefficients as `[re, im]`. For
/// `m = 1` a bare `[re, im]` pair is accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LinearForm {
    Scalar([f64; 2]),
    Vector(Vec<[f64; 2]>),
}

impl LinearForm {
    pub fn coefficients(&self) -> Vec<Complex64> {
        match self {
            LinearForm::Scalar([re, im]) => vec![Complex64::new(*re, *im)],
            LinearForm::Vector(v) => v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LvmbData {
    pub m: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "E")]
    pub e: Vec<Vec<usize>>,
    pub ell: Vec<LinearForm>,
}

impl LvmbData {
    /// Build from complex coefficient lists, one per form.
    pub fn new(m: usize, e: Vec<Vec<usize>>, ell: &[Vec<Complex64>]) -> Result<Self> {
        let data = Self {
            m,
            big_n: ell.len().saturating_sub(1),
            e,
            ell: ell
                .iter()
                .map(|c| LinearForm::Vector(c.iter().map(|z| [z.re, z.im]).collect()))
                .collect(),
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.big_n < 2 * self.m {
            return Err(Error::InvalidParams(format!(
                "need m >= 1 and N >= 2m, got m={}, N={}",
                self.m, self.big_n
            )));
        }
        if self.ell.len() != self.big_n + 1 {
            return Err(Error::InvalidParams(format!(
                "need N+1 = {} linear forms, got {}",
                self.big_n + 1,
                self.ell.len()
            )));
        }
        if let Some(k) = self.ell.iter().position(|f| f.coefficients().len() != self.m) {
            return Err(Error::InvalidParams(format!("form {k} does not have m = {} coefficients", self.m)));
        }
        if self.e.is_empty() {
            return Err(Error::InvalidParams("E must be nonempty".into()));
        }
        for set in &self.e {
            let distinct: BTreeSet<usize> = set.iter().copied().collect();
            if distinct.len() != 2 * self.m + 1 || set.len() != 2 * self.m + 1 {
                return Err(Error::InvalidParams(format!(
                    "members of E must have 2m+1 = {} distinct indices, got {set:?}",
                    2 * self.m + 1
                )));
            }
            if distinct.iter().any(|&k| k > self.big_n) {
                return Err(Error::InvalidParams(format!("index out of range 0..={} in {set:?}", self.big_n)));
            }
        }
        Ok(())
    }

    /// `ℓ_k` as a point of `R^{2m}`.
    pub fn point(&self, k: usize) -> RVector {
        let c = self.ell[k].coefficients();
        let m = self.m;
        RVector::from_fn(2 * m, |i, _| if i < m { c[i].re } else { c[i - m].im })
    }

    fn members(&self) -> BTreeSet<BTreeSet<usize>> {
        self.e.iter().map(|s| s.iter().copied().collect()).collect()
    }
}

/// Verdict for one pair of index sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub j1: Vec<usize>,
    pub j2: Vec<usize>,
    pub overlap: bool,
    /// Optimal common barycentric margin; `None` when the hulls are disjoint.
    pub margin: Option<f64>,
    /// A common interior point in `R^{2m}` when `overlap`.
    pub witness: Option<Vec<f64>>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionI {
    pub holds: bool,
    pub pairs: Vec<PairVerdict>,
}

/// Whether the interiors of `hull(p)` and `hull(q)` meet: maximize `ε` with
/// barycentric weights `λ_j = ε + λ'_j`, `μ_j = ε + μ'_j`, `Σλ = Σμ = 1`,
/// `Σλ_j p_j = Σμ_j q_j`. Returns the margin and the common point.
pub fn hull_overlap(p: &[RVector], q: &[RVector], indices: (&[usize], &[usize])) -> Result<Option<(f64, RVector)>> {
    for (pts, idx) in [(p, indices.0), (q, indices.1)] {
        if !full_dimensional(pts) {
            return Err(Error::DegenerateHull(idx.to_vec()));
        }
    }
    let d = p[0].len();
    let (a_len, b_len) = (p.len(), q.len());
    let cols = a_len + b_len + 1;
    let eps_col = cols - 1;
    let mut a = RMatrix::zeros(2 + d, cols);
    let mut b = RVector::zeros(2 + d);
    for j in 0..a_len {
        a[(0, j)] = 1.0;
    }
    a[(0, eps_col)] = a_len as f64;
    b[0] = 1.0;
    for j in 0..b_len {
        a[(1, a_len + j)] = 1.0;
    }
    a[(1, eps_col)] = b_len as f64;
    b[1] = 1.0;
    for r in 0..d {
        let mut eps_coeff = 0.0;
        for (j, pt) in p.iter().enumerate() {
            a[(2 + r, j)] = pt[r];
            eps_coeff += pt[r];
        }
        for (j, pt) in q.iter().enumerate() {
            a[(2 + r, a_len + j)] = -pt[r];
            eps_coeff -= pt[r];
        }
        a[(2 + r, eps_col)] = eps_coeff;
    }
    let mut c = RVector::zeros(cols);
    c[eps_col] = 1.0;
    match maximize(&a, &b, &c) {
        LpOutcome::Optimal { x, value } => {
            let eps = value;
            let mut w = RVector::zeros(d);
            for (j, pt) in p.iter().enumerate() {
                w += pt * (x[j] + eps);
            }
            Ok(Some((eps, w)))
        }
        LpOutcome::Infeasible => Ok(None),
        // ε ≤ 1/|J| always, so the problem is bounded
        LpOutcome::Unbounded => unreachable!("hull margin is bounded"),
    }
}

fn full_dimensional(pts: &[RVector]) -> bool {
    let d = pts[0].len();
    let diffs = RMatrix::from_fn(d, pts.len() - 1, |r, c| pts[c + 1][r] - pts[0][r]);
    numerical_rank(&diffs, 1e-9) == d
}

fn pairs(e: &[Vec<usize>]) -> Vec<(usize, usize)> {
    if e.len() == 1 {
        return vec![(0, 0)];
    }
    (0..e.len())
        .flat_map(|a| ((a + 1)..e.len()).map(move |b| (a, b)))
        .collect()
}

/// Condition (i): for every pair `J1, J2 ∈ E` the convex hulls of
/// `{ℓ_j}_{j∈J1}` and `{ℓ_j}_{j∈J2}` overlap on a nonempty open set.
/// Distinct unordered pairs are checked; a single set is paired with itself.
pub fn check_condition_i(data: &LvmbData) -> Result<ConditionI> {
    data.validate()?;
    let points: Vec<RVector> = (0..=data.big_n).map(|k| data.point(k)).collect();
    let verdicts = par_map(&pairs(&data.e), |&(a, b)| {
        let (j1, j2) = (&data.e[a], &data.e[b]);
        let p: Vec<RVector> = j1.iter().map(|&k| points[k].clone()).collect();
        let q: Vec<RVector> = j2.iter().map(|&k| points[k].clone()).collect();
        let base = PairVerdict {
            j1: j1.clone(),
            j2: j2.clone(),
            overlap: false,
            margin: None,
            witness: None,
            degenerate: false,
        };
        match hull_overlap(&p, &q, (j1, j2)) {
            Err(_) => PairVerdict {
                degenerate: true,
                ..base
            },
            Ok(None) => base,
            Ok(Some((eps, w))) => {
                let overlap = eps > MARGIN_TOL;
                PairVerdict {
                    overlap,
                    margin: Some(eps),
                    witness: overlap.then(|| w.iter().copied().collect()),
                    ..base
                }
            }
        }
    });
    Ok(ConditionI {
        holds: verdicts.iter().all(|v| v.overlap),
        pairs: verdicts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionII {
    pub holds: bool,
    /// First `(J, k)` with no `k' ∈ J` such that `(J \ {k'}) ∪ {k} ∈ E`.
    pub counterexample: Option<(Vec<usize>, usize)>,
}

/// Condition (ii), by exhaustive enumeration over `J ∈ E` and `k ∈ 0..=N`.
pub fn check_condition_ii(data: &LvmbData) -> Result<ConditionII> {
    data.validate()?;
    let members = data.members();
    for set in &members {
        for k in 0..=data.big_n {
            let ok = set.iter().any(|&kp| {
                let mut swapped = set.clone();
                swapped.remove(&kp);
                swapped.insert(k);
                members.contains(&swapped)
            });
            if !ok {
                return Ok(ConditionII {
                    holds: false,
                    counterexample: Some((set.iter().copied().collect(), k)),
                });
            }
        }
    }
    Ok(ConditionII {
        holds: true,
        counterexample: None,
    })
}

/// The fields `ζ_j = Σ_k λ_jk z_k ∂/∂z_k` on `C^{N+1}`, `λ_jk = ∂ℓ_k/∂w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingField {
    pub lambda: CMatrix,
}

impl KillingField {
    pub fn count(&self) -> usize {
        self.lambda.nrows()
    }

    /// `ζ_j(z) = (λ_j0 z_0, …, λ_jN z_N)`.
    pub fn eval(&self, j: usize, z: &CVector) -> CVector {
        CVector::from_fn(z.len(), |k, _| self.lambda[(j, k)] * z[k])
    }

    /// Coefficients `c_k` of `[ζ_j, ζ_l] = Σ_k c_k z_k ∂/∂z_k`: for diagonal
    /// linear fields `c_k = λ_lk λ_jk - λ_jk λ_lk`.
    pub fn bracket_coefficients(&self, j: usize, l: usize) -> CVector {
        CVector::from_fn(self.lambda.ncols(), |k, _| {
            self.lambda[(l, k)] * self.lambda[(j, k)] - self.lambda[(j, k)] * self.lambda[(l, k)]
        })
    }
}

pub fn killing_fields(data: &LvmbData) -> Result<KillingField> {
    data.validate()?;
    let forms: Vec<Vec<Complex64>> = data.ell.iter().map(|f| f.coefficients()).collect();
    Ok(KillingField {
        lambda: CMatrix::from_fn(data.m, data.big_n + 1, |j, k| forms[k][j]),
    })
}

/// Seeded random instance with `|E| = sets` members drawn uniformly.
pub fn random_instance(m: usize, big_n: usize, sets: usize, rng: &mut crate::rng::SeededRng) -> Result<LvmbData> {
    let ell: Vec<Vec<Complex64>> = (0..=big_n).map(|_| (0..m).map(|_| rng.complex()).collect()).collect();
    let size = 2 * m + 1;
    let mut e = Vec::with_capacity(sets);
    for _ in 0..sets {
        let mut pool: Vec<usize> = (0..=big_n).collect();
        let mut pick = Vec::with_capacity(size);
        for _ in 0..size {
            let i = rng.index(pool.len());
            pick.push(pool.swap_remove(i));
        }
        pick.sort_unstable();
        e.push(pick);
    }
    LvmbData::new(m, e, &ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn scalar(values: &[(f64, f64)]) -> Vec<Vec<Complex64>> {
        values.iter().map(|&(re, im)| vec![Complex64::new(re, im)]).collect()
    }

    #[test]
    fn shared_edge_is_not_an_open_overlap() {
        let ell = scalar(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let data = LvmbData::new(1, vec![vec![0, 1, 2], vec![1, 2, 3]], &ell).unwrap();
        let rep = check_condition_i(&data).unwrap();
        assert!(!rep.holds);
        assert!(!rep.pairs[0].overlap);
    }

    #[test]
    fn overlapping_triangles_give_an_interior_witness() {
        let ell = scalar(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.3, 0.3)]);
        let data = LvmbData::new(1, vec![vec![0, 1, 2], vec![1, 2, 3]], &ell).unwrap();
        let rep = check_condition_i(&data).unwrap();
        assert!(rep.holds);
        let w = rep.pairs[0].witness.clone().unwrap();
        // strictly inside both triangles
        assert!(w[0] > 0.0 && w[1] > 0.0 && w[0] + w[1] < 1.0);
        let m = RMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.3, 0.0, 1.0, 0.3, 1.0, 1.0, 1.0]);
        let bary = m.lu().solve(&RVector::from_vec(vec![w[0], w[1], 1.0])).unwrap();
        assert!(bary.iter().all(|&t| t > 1e-9), "{bary:?}");
    }

    #[test]
    fn single_set_pairs_with_itself() {
        let ell = scalar(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let data = LvmbData::new(1, vec![vec![0, 1, 2]], &ell).unwrap();
        assert!(check_condition_i(&data).unwrap().holds);
    }

    #[test]
    fn degenerate_hull_fails_and_is_flagged() {
        let ell = scalar(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0)]);
        let data = LvmbData::new(1, vec![vec![0, 1, 2], vec![1, 2, 3]], &ell).unwrap();
        let rep = check_condition_i(&data).unwrap();
        assert!(!rep.holds && rep.pairs[0].degenerate);
    }

    #[test]
    fn condition_ii_examples() {
        let ell = scalar(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let full = LvmbData::new(1, vec![vec![0, 1, 2]], &ell[..3]).unwrap();
        assert!(check_condition_ii(&full).unwrap().holds);
        let short = LvmbData::new(1, vec![vec![0, 1, 2]], &ell).unwrap();
        let rep = check_condition_ii(&short).unwrap();
        assert_eq!(rep.counterexample, Some((vec![0, 1, 2], 3)));
    }

    #[test]
    fn exchange_closed_family_satisfies_condition_ii() {
        // all 3-subsets of {0..4}
        let mut e = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                for c in b + 1..5 {
                    e.push(vec![a, b, c]);
                }
            }
        }
        let mut rng = SeededRng::new(2);
        let ell: Vec<Vec<Complex64>> = (0..5).map(|_| vec![rng.complex()]).collect();
        let data = LvmbData::new(1, e, &ell).unwrap();
        assert!(check_condition_ii(&data).unwrap().holds);
    }

    #[test]
    fn killing_coefficients_and_brackets() {
        let ell = scalar(&[(1.0, 0.0), (0.0, 2.0), (-1.0, 1.0)]);
        let data = LvmbData::new(1, vec![vec![0, 1, 2]], &ell).unwrap();
        let k = killing_fields(&data).unwrap();
        assert_eq!(k.lambda[(0, 1)], Complex64::new(0.0, 2.0));
        let mut rng = SeededRng::new(3);
        let data = random_instance(2, 6, 3, &mut rng).unwrap();
        let k = killing_fields(&data).unwrap();
        for j in 0..2 {
            for l in 0..2 {
                assert!(k.bracket_coefficients(j, l).iter().all(|c| c.norm() == 0.0));
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let text = r#"{"m":1,"N":3,"E":[[0,1,2],[1,2,3]],"ell":[[0,0],[1,0],[0,1],[1,1]]}"#;
        let data: LvmbData = serde_json::from_str(text).unwrap();
        data.validate().unwrap();
        assert_eq!(data.point(3).as_slice(), &[1.0, 1.0]);
        let bad: LvmbData = serde_json::from_str(r#"{"m":1,"N":3,"E":[[0,1]],"ell":[[0,0],[1,0],[0,1],[1,1]]}"#).unwrap();
        assert!(matches!(bad.validate(), Err(Error::InvalidParams(_))));
        let m2 = r#"{"m":2,"N":4,"E":[[0,1,2,3,4]],"ell":[[[1,0],[0,0]],[[0,0],[1,0]],[[0,1],[0,0]],[[0,0],[0,1]],[[-1,-1],[-1,-1]]]}"#;
        let data: LvmbData = serde_json::from_str(m2).unwrap();
        data.validate().unwrap();
        assert!(check_condition_i(&data).unwrap().holds);
    }
}
