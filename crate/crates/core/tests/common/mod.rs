//! Independent oracles for the acceptance suite: convex polygon clipping,
//! frame brackets of adapted charts, and a finite-difference four-bracket.

#![allow(dead_code)]

use acs_verify::distribution::DistributionChart;
use acs_verify::linalg::{CMatrix, CVector, RMatrix, RVector};
use num_complex::Complex64;

pub type Point = [f64; 2];

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

pub fn area(poly: &[Point]) -> f64 {
    let k = poly.len();
    if k < 3 {
        return 0.0;
    }
    (0..k)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % k]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Sutherland–Hodgman: clip `subject` against the convex counter-clockwise `clip`.
pub fn clip(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    let k = clip.len();
    for i in 0..k {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % k]);
        let input = std::mem::take(&mut out);
        let inside = |p: Point| cross(a, b, p) >= 0.0;
        let intersect = |p: Point, q: Point| {
            let (dp, dq) = (cross(a, b, p), cross(a, b, q));
            let t = dp / (dp - dq);
            [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
        };
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            match (inside(cur), inside(prev)) {
                (true, true) => out.push(cur),
                (true, false) => {
                    out.push(intersect(prev, cur));
                    out.push(cur);
                }
                (false, true) => out.push(intersect(prev, cur)),
                (false, false) => {}
            }
        }
    }
    out
}

/// Area of the intersection of the convex hulls of two planar point sets.
pub fn hull_intersection_area(p: &[Point], q: &[Point]) -> f64 {
    let (hp, hq) = (convex_hull(p), convex_hull(q));
    if hp.len() < 3 || hq.len() < 3 {
        return 0.0;
    }
    area(&clip(&hp, &hq))
}

/// Fourth-order central difference of `a` along the complex direction `w`.
fn da_fd(chart: &DistributionChart, z: &CVector, w: &CVector, h: f64) -> CMatrix {
    let at = |s: f64| chart.a(&(z + w * Complex64::new(s * h, 0.0))).expect("point inside chart");
    (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * Complex64::new(8.0, 0.0)) / Complex64::new(12.0 * h, 0.0)
}

/// Frame field `e_j = ∂/∂z_{n+j} + Σ_i a_{ij}(z) ∂/∂z_i` at `z`.
pub fn frame(chart: &DistributionChart, z: &CVector, j: usize) -> CVector {
    let n = chart.n();
    let a = chart.a(z).expect("point inside chart");
    let mut e = CVector::zeros(chart.ambient_dim());
    e.rows_mut(0, n).copy_from(&a.column(j));
    e[n + j] = Complex64::new(1.0, 0.0);
    e
}

/// `[e_j, e_k]` at `z`: only the leading `n` components are nonzero because
/// the trailing components of every frame field are constant.
pub fn frame_bracket(chart: &DistributionChart, z: &CVector, j: usize, k: usize, h: f64) -> CVector {
    let (ej, ek) = (frame(chart, z, j), frame(chart, z, k));
    let djk = da_fd(chart, z, &ej, h).column(k).into_owned();
    let dkj = da_fd(chart, z, &ek, h).column(j).into_owned();
    djk - dkj
}

/// Four-bracket `N(ζ, η)` of a matrix field `j` with constant extensions,
/// derivatives by a fourth-order stencil of step `h`.
pub fn four_bracket(j: &dyn Fn(&RVector) -> RMatrix, x: &RVector, zeta: &RVector, eta: &RVector, h: f64) -> RVector {
    let d = |v: &RVector| -> RMatrix {
        let at = |s: f64| j(&(x + v * (s * h)));
        (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) / (12.0 * h)
    };
    let jx = j(x);
    let (jz, je) = (&jx * zeta, &jx * eta);
    // [ζ,η] = 0, [Jζ,Jη] = (∂_{Jζ}J)η - (∂_{Jη}J)ζ, [ζ,Jη] = (∂_ζ J)η, [Jζ,η] = -(∂_η J)ζ
    let bracket_jj = d(&jz) * eta - d(&je) * zeta;
    let bracket_zj = d(zeta) * eta;
    let bracket_jz = -(d(eta) * zeta);
    -bracket_jj + &jx * bracket_zj + &jx * bracket_jz
}
