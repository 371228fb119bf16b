use super::*;
use crate::distribution::{ClosureMap, DistributionChart, Monomial, PolynomialMatrix};
use crate::fields::nijenhuis_of_field;
use crate::linalg::{max_abs, standard_structure, CMatrix, CVector, RMatrix, RVector};
use crate::rng::SeededRng;
use num_complex::Complex64;
use std::sync::Arc;

const RANK: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn example_chart() -> DistributionChart {
    let p = PolynomialMatrix {
        n: 1,
        big_n: 3,
        monomials: vec![Monomial {
            i: 1,
            j: 2,
            powers: vec![0, 0, 1],
            coeff: [1.0, 0.0],
        }],
    };
    DistributionChart::from_graph(1, Arc::new(p), CVector::zeros(3)).unwrap()
}

fn graph(g: ComplexPolyMap) -> GraphEmbedding {
    let n = g.dim_in;
    GraphEmbedding::new(Arc::new(g), CVector::zeros(n)).unwrap()
}

#[test]
fn constant_graph_gives_standard_structure() {
    let inst = random_instance(&InstanceParams::default(), 1).unwrap();
    let mut g = ComplexPolyMap::zero(2, 3);
    g.push(0, vec![0, 0], vec![0, 0], c(0.05, 0.02));
    let e = graph(g);
    for zp in [CVector::zeros(2), inst.point.clone()] {
        let j = induced_jf_quotient(&e, &inst.chart, &zp, RANK).unwrap();
        assert!(max_abs(&(j - standard_structure(2))) < 1e-12);
    }
}

#[test]
fn flat_distribution_gives_standard_structure() {
    let zero = PolynomialMatrix { n: 2, big_n: 5, monomials: vec![] };
    let chart = DistributionChart::from_graph(2, Arc::new(zero), CVector::zeros(5)).unwrap();
    let inst = random_instance(&InstanceParams::default(), 2).unwrap();
    let j = induced_jf_formula(&inst.embedding, &chart, &inst.point, RANK).unwrap();
    assert_eq!(j, standard_structure(2));
}

#[test]
fn example_n1_quotient_vs_formula() {
    let chart = example_chart();
    let mut g = ComplexPolyMap::zero(1, 2);
    g.push(0, vec![0], vec![1], c(0.3, 0.0));
    let e = graph(g);
    let zp = CVector::from_element(1, c(0.1, -0.05));
    let q = induced_jf_quotient(&e, &chart, &zp, RANK).unwrap();
    let f = induced_jf_formula(&e, &chart, &zp, RANK).unwrap();
    assert!(max_abs(&(&q - &f)) <= 1e-8);
    assert!(max_abs(&(&q * &q + RMatrix::identity(2, 2))) <= 1e-9);
}

#[test]
fn quotient_and_formula_agree_on_random_instances() {
    for seed in 0..5 {
        let inst = random_instance(&InstanceParams::default(), seed).unwrap();
        let q = induced_jf_quotient(&inst.embedding, &inst.chart, &inst.point, RANK).unwrap();
        let f = induced_jf_formula(&inst.embedding, &inst.chart, &inst.point, RANK).unwrap();
        assert!(max_abs(&(&q - &f)) <= 1e-8, "seed {seed}");
        assert!(max_abs(&(&q * &q + RMatrix::identity(4, 4))) <= 1e-9);
        assert!(max_abs(&(&q - standard_structure(2))) > 1e-3, "J_F should be nontrivial");
    }
}

#[test]
fn base_point_structure_is_i() {
    let inst = random_instance(&InstanceParams::default(), 3).unwrap();
    let j = induced_jf_quotient(&inst.embedding, &inst.chart, &CVector::zeros(2), RANK).unwrap();
    assert!(max_abs(&(j - standard_structure(2))) < 1e-12);
}

#[test]
fn dbar_cases() {
    // holomorphic g, flat distribution
    let zero = PolynomialMatrix { n: 1, big_n: 3, monomials: vec![] };
    let flat = DistributionChart::from_graph(1, Arc::new(zero), CVector::zeros(3)).unwrap();
    let mut g = ComplexPolyMap::zero(1, 2);
    g.push(0, vec![2], vec![0], c(0.4, 0.1));
    g.push(1, vec![1], vec![0], c(-0.2, 0.3));
    let zp = CVector::from_element(1, c(0.1, 0.2));
    assert!(max_abs(&dbar_f(&graph(g), &flat, &zp, RANK).unwrap()) < 1e-14);

    // g = (0.3 z̄, 0): at the centre ∂̄F = (0, ∂̄g) with rank 1
    let mut g = ComplexPolyMap::zero(1, 2);
    g.push(0, vec![0], vec![1], c(0.3, 0.0));
    let e = graph(g);
    let db = dbar_f(&e, &example_chart(), &CVector::zeros(1), RANK).unwrap();
    assert_eq!(crate::linalg::numerical_rank(&db, 1e-8), 1);
    // ∂̄F·ξ = (0, 0.3·conj(ξ), 0) for ξ = 1 and ξ = i
    assert!((db[(1, 0)] - c(0.3, 0.0)).norm() < 1e-14);
    assert!((db[(1, 1)] - c(0.0, -0.3)).norm() < 1e-14);
    assert!(db[(0, 0)].norm() < 1e-14 && db[(2, 1)].norm() < 1e-14);

    let inst = random_instance(&InstanceParams::default(), 13).unwrap();
    assert!(dbar_fiber_residual(&inst.embedding, &inst.chart, &inst.point, RANK).unwrap() <= 1e-8);
}

fn direct_nijenhuis(inst: &InducedInstance, zeta: &RVector, eta: &RVector) -> RVector {
    let field = InducedStructureField {
        embedding: &inst.embedding,
        chart: &inst.chart,
        rank_tol: RANK,
        h: 1e-3,
    };
    let x = crate::linalg::realify_vector(&inst.point);
    nijenhuis_of_field(&field, x.as_slice(), zeta, eta)
}

#[test]
fn nijenhuis_identity_random() {
    let inst = random_instance(&InstanceParams::default(), 19).unwrap();
    let mut rng = SeededRng::new(19);
    for _ in 0..5 {
        let z = rng.real_vector(4);
        let e = rng.real_vector(4);
        let d = direct_nijenhuis(&inst, &z, &e);
        let t = nijenhuis_via_torsion(&inst.embedding, &inst.chart, &inst.point, &z, &e, RANK).unwrap();
        assert!((&d - &t).norm() <= 1e-4 * d.norm().max(1e-12) + 1e-10, "{d} vs {t}");
        assert!(d.norm() > 1e-4);
    }
}

#[test]
fn nijenhuis_vanishes_for_foliations() {
    let mut inst = random_instance(&InstanceParams::default(), 20).unwrap();
    // a depending on z'' only through a single column commutes: use a ≡ A z' linear in z'
    let lin = PolynomialMatrix {
        n: 2,
        big_n: 5,
        monomials: vec![Monomial { i: 1, j: 3, powers: vec![1, 0, 0, 0, 0], coeff: [0.4, 0.1] }],
    };
    inst.chart = DistributionChart::from_graph(2, Arc::new(lin), CVector::zeros(5)).unwrap();
    let z = RVector::from_vec(vec![0.3, -0.2, 0.9, 0.1]);
    let e = RVector::from_vec(vec![-0.5, 0.4, 0.2, 0.7]);
    let t = nijenhuis_via_torsion(&inst.embedding, &inst.chart, &inst.point, &z, &e, RANK).unwrap();
    let d = direct_nijenhuis(&inst, &z, &e);
    assert!(t.norm() < 1e-12);
    assert!(d.norm() < 1e-8);
}

#[test]
fn variation_formula_converges_linearly() {
    let params = InstanceParams { n: 1, big_n: 3, ..InstanceParams::default() };
    let inst = random_instance(&params, 17).unwrap();
    let r = variation_report(&inst.embedding, &inst.chart, &inst.variation, &inst.point, &[1e-3, 1e-4], RANK).unwrap();
    assert!(r.anticommutation <= 1e-9, "{r:?}");
    assert!((8.0..=12.0).contains(&r.ratio()), "{r:?}");
    assert!(r.errors[1] <= 1e-3, "{r:?}");
}

#[test]
fn variation_n2() {
    let inst = random_instance(&InstanceParams::default(), 4).unwrap();
    let r = variation_report(&inst.embedding, &inst.chart, &inst.variation, &inst.point, &[1e-3, 1e-4], RANK).unwrap();
    assert!(r.anticommutation <= 1e-9, "{r:?}");
    assert!((8.0..=12.0).contains(&r.ratio()), "{r:?}");
    assert!(r.errors[1] <= 1e-3, "{r:?}");
}

#[test]
fn variation_trivial_and_v_only() {
    let zero = PolynomialMatrix { n: 2, big_n: 5, monomials: vec![] };
    let flat = DistributionChart::from_graph(2, Arc::new(zero), CVector::zeros(5)).unwrap();
    let mut inst = random_instance(&InstanceParams::default(), 5).unwrap();
    inst.chart = flat;
    inst.variation.v = Arc::new(ComplexPolyMap::zero(2, 2));
    let dj = variation_djf(&inst.embedding, &inst.chart, &inst.variation, &inst.point, RANK).unwrap();
    assert!(max_abs(&dj) < 1e-10);

    let mut inst = random_instance(&InstanceParams::default(), 6).unwrap();
    inst.variation.eta = Arc::new(ComplexPolyMap::zero(2, 3));
    let r = variation_report(&inst.embedding, &inst.chart, &inst.variation, &inst.point, &[1e-3, 1e-4], RANK).unwrap();
    assert!((8.0..=12.0).contains(&r.ratio()), "{r:?}");
}

#[test]
fn transversality_cases() {
    let zero = PolynomialMatrix { n: 1, big_n: 2, monomials: vec![] };
    let flat = DistributionChart::from_graph(1, Arc::new(zero), CVector::zeros(2)).unwrap();
    let e = graph(ComplexPolyMap::zero(1, 1));
    let r = transversality_report(&e, &flat, &[CVector::zeros(1)], RANK);
    assert!(r.all_transverse && (r.min_sigma - 1.0).abs() < 1e-12);

    // D spanned by ∂1 + ∂2 direction scaled so that M = {z2 = z1} is tangent to D
    let tangent = ClosureMap {
        ambient_dim: 2,
        shape: (1, 1),
        f: |_: &CVector| CMatrix::from_element(1, 1, c(1.0, 0.0)),
    };
    let d = DistributionChart::from_graph(1, Arc::new(tangent), CVector::zeros(2)).unwrap();
    let mut g = ComplexPolyMap::zero(1, 1);
    g.push(0, vec![1], vec![0], c(1.0, 0.0));
    let r = transversality_report(&graph(g.clone()), &d, &[CVector::zeros(1)], RANK);
    assert!(!r.all_transverse);
    assert!(matches!(
        induced_jf_quotient(&graph(g), &d, &CVector::zeros(1), RANK),
        Err(crate::Error::NotTransverse { .. })
    ));
}
