//! Dense two-phase simplex for `max cᵀx` subject to `Ax = b`, `x ≥ 0`,
//! with Bland's rule. Intended for the tiny systems of the hull tests.

use crate::linalg::{RMatrix, RVector};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: RVector, value: f64 },
    Infeasible,
    Unbounded,
}

const EPS: f64 = 1e-11;

struct Tableau {
    t: RMatrix,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    allowed: Vec<bool>,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.t.nrows() - 1
    }

    fn rhs(&self) -> usize {
        self.t.ncols() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[(r, c)];
        let width = self.t.ncols();
        for j in 0..width {
            self.t[(r, j)] /= p;
        }
        for i in 0..self.t.nrows() {
            if i != r {
                let f = self.t[(i, c)];
                if f != 0.0 {
                    for j in 0..width {
                        let v = self.t[(r, j)];
                        self.t[(i, j)] -= f * v;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Iterate until optimal; `false` if unbounded.
    fn run(&mut self) -> bool {
        let obj = self.rows();
        let rhs = self.rhs();
        loop {
            let entering = (0..rhs).find(|&j| self.allowed[j] && self.t[(obj, j)] < -EPS);
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..obj {
                let a = self.t[(i, c)];
                if a > EPS {
                    let ratio = self.t[(i, rhs)] / a;
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => ratio < r - EPS || (ratio <= r + EPS && self.basis[i] < b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn maximize(a: &RMatrix, b: &RVector, c: &RVector) -> LpOutcome {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    // phase 1 on [A | I] with b ≥ 0
    let mut t = RMatrix::zeros(m + 1, n + m + 1);
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = s * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, n + m)] = s * b[i];
    }
    for j in 0..n {
        t[(m, j)] = -(0..m).map(|i| t[(i, j)]).sum::<f64>();
    }
    t[(m, n + m)] = -(0..m).map(|i| t[(i, n + m)]).sum::<f64>();
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        allowed: vec![true; n + m],
    };
    tab.run();
    let scale = 1.0 + b.amax();
    if tab.t[(m, n + m)] < -1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // drive artificials out of the basis where possible
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| tab.t[(r, j)].abs() > 1e-9) {
                tab.pivot(r, c);
            }
        }
    }
    for j in n..n + m {
        tab.allowed[j] = false;
    }
    // phase 2 objective row: z - cᵀx = 0, reduced against the basis
    for j in 0..=n + m {
        tab.t[(m, j)] = if j < n { -c[j] } else { 0.0 };
    }
    for r in 0..m {
        let bcol = tab.basis[r];
        let f = tab.t[(m, bcol)];
        if f != 0.0 {
            for j in 0..=n + m {
                let v = tab.t[(r, j)];
                tab.t[(m, j)] -= f * v;
            }
        }
    }
    if !tab.run() {
        return LpOutcome::Unbounded;
    }
    let mut x = RVector::zeros(n);
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[(r, n + m)];
        }
    }
    let value = c.dot(&x);
    LpOutcome::Optimal { x, value }
}
