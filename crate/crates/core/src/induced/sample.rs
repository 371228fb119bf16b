use super::embedding::GraphEmbedding;
use super::poly::ComplexPolyMap;
use super::variation::VariationData;
use crate::distribution::{DistributionChart, PolynomialMatrix};
use crate::error::Result;
use crate::linalg::CVector;
use crate::rng::SeededRng;
use num_complex::Complex64;
use std::sync::Arc;

/// A random transverse configuration: polynomial `a` with `a(0) = 0`, a graph
/// through the origin with a genuinely non-holomorphic part, a variation, and
/// an evaluation point off the centre.
#[derive(Clone)]
pub struct InducedInstance {
    pub embedding: GraphEmbedding,
    pub chart: DistributionChart,
    pub variation: VariationData,
    pub point: CVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceParams {
    pub n: usize,
    pub big_n: usize,
    /// Coefficient scale of `a`.
    pub a_scale: f64,
    /// Coefficient scale of `g`.
    pub g_scale: f64,
    /// Coefficient scale of `η` and `v`.
    pub variation_scale: f64,
    /// Distance of the evaluation point from the centre.
    pub offset: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            n: 2,
            big_n: 5,
            a_scale: 0.5,
            g_scale: 0.4,
            variation_scale: 0.3,
            offset: 0.1,
        }
    }
}

pub fn random_instance(params: &InstanceParams, seed: u64) -> Result<InducedInstance> {
    let mut rng = SeededRng::new(seed);
    let (n, big_n) = (params.n, params.big_n);
    let m = big_n - n;
    let a = PolynomialMatrix::random(n, big_n, 2, 2 * n * m, params.a_scale, &mut rng);
    let chart = DistributionChart::from_graph(n, Arc::new(a), CVector::zeros(big_n))?;
    let lin = rng.complex_matrix(m, n) * Complex64::new(params.g_scale, 0.0);
    let anti = rng.complex_matrix(m, n) * Complex64::new(params.g_scale, 0.0);
    let g = ComplexPolyMap::affine(&lin, &anti, &CVector::zeros(m)).add(&ComplexPolyMap::random(
        n,
        m,
        2,
        m + n,
        params.g_scale,
        &mut rng,
    ));
    let embedding = GraphEmbedding::new(Arc::new(g), CVector::zeros(n))?;
    let s = Complex64::new(params.variation_scale, 0.0);
    let eta = ComplexPolyMap::affine(
        &(rng.complex_matrix(m, n) * s),
        &(rng.complex_matrix(m, n) * s),
        &(rng.complex_vector(m) * s),
    )
    .add(&ComplexPolyMap::random(n, m, 2, m, params.variation_scale, &mut rng));
    let v = ComplexPolyMap::affine(
        &(rng.complex_matrix(n, n) * s),
        &(rng.complex_matrix(n, n) * s),
        &(rng.complex_vector(n) * s),
    )
    .add(&ComplexPolyMap::random(n, n, 2, n, params.variation_scale, &mut rng));
    let dir = rng.complex_vector(n);
    let point = &dir * Complex64::new(params.offset / dir.norm(), 0.0);
    Ok(InducedInstance {
        embedding,
        chart,
        variation: VariationData {
            eta: Arc::new(eta),
            v: Arc::new(v),
        },
        point,
    })
}
