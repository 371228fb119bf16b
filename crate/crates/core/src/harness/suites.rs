//! Per-kind payloads and check implementations.

use super::{Evaluation, Kind, Outcome, Samples};
use crate::distribution::{frame_bracket_torsion, torsion_at, DistributionChart, PolynomialMatrix};
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::fields::{
    nijenhuis_direct, nijenhuis_of_field, verify_tensoriality, AlmostComplexField, FdStructureField, TorusChart,
    TrigPolyField,
};
use crate::induced::{
    dbar_f, dbar_fiber_residual, induced_jf_formula, induced_jf_quotient, nijenhuis_via_torsion, random_instance,
    transversality_report, variation_report, InducedInstance, InducedStructureField, InstanceParams, VariationReport,
};
use crate::linalg::{complexify_vector, max_abs, realify_vector, singular_values, CVector, RMatrix, RVector};
use crate::lvmb::{check_condition_i, check_condition_ii, killing_fields, LvmbData};
use crate::rng::SeededRng;
use crate::tolerance::Tolerances;
use crate::universal::{
    build_fiber, dimension_universal, induced_structure_at, lift_at, plucker_certificate,
    random_compatible_input, symplectic_pointwise_model, transversality_sigma, universal_chart, versality_from_dbar, ChartChoice,
    PairingSign, PointwiseACManifold, SymplecticReport, UniversalLift, VersalityReport,
};
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

/// Random vector pairs per sample for Nijenhuis comparisons.
const NIJENHUIS_PAIRS: usize = 2;
/// Samples used for the second-chart versality comparison.
const CHART_INDEPENDENCE_SAMPLES: usize = 8;
/// Step of the frame-bracket oracle.
const BRACKET_STEP: f64 = 1e-4;
/// Step of the finite-difference four-bracket oracles.
const STRUCTURE_STEP: f64 = 1e-3;
/// Steps of the variation difference quotient.
const VARIATION_STEPS: [f64; 2] = [1e-3, 1e-4];
/// Linear convergence: the error ratio must lie in `10 ± 2`.
const VARIATION_RATE_BAND: f64 = 2.0;
/// Lower bound on the sign-flipped residual of the symplectic control.
const CONTROL_THRESHOLD: f64 = 1e-3;

fn schema(msg: impl std::fmt::Display) -> Error {
    Error::Schema(msg.to_string())
}

fn parse<T: serde::de::DeserializeOwned>(payload: &serde_json::Value) -> Result<T> {
    serde_json::from_value(payload.clone()).map_err(|e| schema(format!("payload: {e}")))
}

/// Largest value; NaN is sticky so undefined quantities fail.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn least(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(f64::INFINITY, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.min(v) })
}

fn collect<T>(values: Vec<Result<T>>) -> Result<Vec<T>> {
    values.into_iter().collect()
}

fn relative(diff: f64, reference: f64, floor: f64) -> f64 {
    diff / reference.max(floor)
}

fn measured(value: f64, tolerance: f64, samples: usize) -> Result<Evaluation> {
    Ok(Evaluation::Measured(Outcome::new(value, tolerance, samples)))
}

/// Random `J = P J_0 P^{-1}` with `P = I + εU`, `U` nilpotent trig-poly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub eps: f64,
    #[serde(default = "default_degree")]
    pub max_degree: i32,
    #[serde(default = "default_terms")]
    pub terms: usize,
}

fn default_degree() -> i32 {
    2
}

fn default_terms() -> usize {
    4
}

fn structure(
    n: usize,
    j: Option<&TrigPolyField>,
    perturbation: Option<&Perturbation>,
    seed: u64,
    points: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<AlmostComplexField> {
    match (j, perturbation) {
        (Some(_), Some(_)) => Err(schema("payload: give either J or perturbation, not both")),
        (Some(j), None) => {
            if j.dim() != 2 * n {
                return Err(schema(format!("payload: J must live on T^{}", 2 * n)));
            }
            AlmostComplexField::new(j.clone(), points, tol.alg)
        }
        (None, Some(p)) => Ok(AlmostComplexField::nilpotent_conjugate(
            n,
            p.eps,
            p.max_degree,
            p.terms,
            &mut SeededRng::substream(seed, 1),
        )),
        (None, None) => Ok(AlmostComplexField::standard(n)),
    }
}

fn torus_points(samples: Option<&Samples>, limit: Option<usize>, dim: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let torus = TorusChart::new(dim);
    let mut points = match samples {
        None => torus.random_points(4, &mut SeededRng::substream(seed, 2)),
        Some(Samples::Random { random }) => torus.random_points(*random, &mut SeededRng::substream(seed, 2)),
        Some(Samples::Grid(g)) => {
            if g.dims != dim {
                return Err(schema(format!("grid dims must be {dim}, got {}", g.dims)));
            }
            torus.grid(&g.counts)
        }
        Some(Samples::Points(p)) => {
            if let Some(bad) = p.iter().find(|x| x.len() != dim) {
                return Err(schema(format!("sample points must have {dim} coordinates, got {}", bad.len())));
            }
            p.clone()
        }
    };
    if let Some(k) = limit {
        points.truncate(k);
    }
    if points.is_empty() {
        return Err(schema("scenario has no sample points"));
    }
    Ok(points)
}

fn sample_count(samples: Option<&Samples>, default: usize, what: &str) -> Result<usize> {
    match samples {
        None => Ok(default),
        Some(Samples::Random { random }) if *random > 0 => Ok(*random),
        Some(_) => Err(schema(format!("{what} scenarios take samples of the form {{\"random\": count}}"))),
    }
}

pub(crate) enum Suite {
    Universal(Box<UniversalSuite>),
    Induced(Box<InducedSuite>),
    Lvmb(Box<LvmbSuite>),
    Symplectic(Box<SymplecticSuite>),
    Fields(Box<FieldsSuite>),
}

pub(crate) fn prepare(
    kind: Kind,
    payload: &serde_json::Value,
    seed: u64,
    samples: Option<&Samples>,
    limit: Option<usize>,
    tol: &Tolerances,
) -> Result<Suite> {
    Ok(match kind {
        Kind::Universal => Suite::Universal(Box::new(UniversalSuite::new(parse(payload)?, seed, samples, limit, tol)?)),
        Kind::Induced => Suite::Induced(Box::new(InducedSuite::new(parse(payload)?, seed, samples, limit)?)),
        Kind::Lvmb => {
            if samples.is_some() {
                return Err(schema("lvmb scenarios take no samples"));
            }
            Suite::Lvmb(Box::new(LvmbSuite::new(parse(payload)?)?))
        }
        Kind::Symplectic => Suite::Symplectic(Box::new(SymplecticSuite::new(parse(payload)?, seed, samples)?)),
        Kind::Fields => Suite::Fields(Box::new(FieldsSuite::new(parse(payload)?, seed, samples, limit, tol)?)),
    })
}

impl Suite {
    pub(crate) fn evaluate(&self, id: &str, tol: &Tolerances) -> Result<Evaluation> {
        match self {
            Suite::Universal(s) => s.evaluate(id, tol),
            Suite::Induced(s) => s.evaluate(id, tol),
            Suite::Lvmb(s) => s.evaluate(id, tol),
            Suite::Symplectic(s) => s.evaluate(id, tol),
            Suite::Fields(s) => s.evaluate(id, tol),
        }
    }
}

fn unknown(id: &str) -> Result<Evaluation> {
    Err(Error::InvalidParams(format!("check {id} is not implemented for this kind")))
}

// ---------------------------------------------------------------- universal

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniversalPayload {
    pub n: usize,
    /// Target dimension of `g`; defaults to `4n`, zero-padded when larger.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub g: Option<TrigPolyField>,
    #[serde(default, rename = "J")]
    pub j: Option<TrigPolyField>,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    /// Seed of the sheared chart used for the chart-independence check.
    #[serde(default)]
    pub chart_seed: Option<u64>,
}

pub(crate) struct UniversalSuite {
    m: PointwiseACManifold,
    points: Vec<Vec<f64>>,
    seed: u64,
    chart_seed: u64,
    tol: Tolerances,
    lifts: OnceLock<Vec<Result<UniversalLift>>>,
    versality: OnceLock<Vec<Result<VersalityReport>>>,
}

impl UniversalSuite {
    fn new(p: UniversalPayload, seed: u64, samples: Option<&Samples>, limit: Option<usize>, tol: &Tolerances) -> Result<Self> {
        let n = p.n;
        if n == 0 {
            return Err(schema("payload: n must be positive"));
        }
        let points = torus_points(samples, limit, 2 * n, seed)?;
        let g = match p.g {
            Some(g) => g,
            None => {
                let k = p.k.unwrap_or(4 * n);
                if k < 4 * n {
                    return Err(schema(format!("payload: the default embedding needs k >= {}", 4 * n)));
                }
                let pad = RMatrix::from_fn(k, 4 * n, |r, c| if r == c { 1.0 } else { 0.0 });
                PointwiseACManifold::torus_embedding(n).left_mul_const(&pad)
            }
        };
        if p.k.is_some_and(|k| k != g.shape().0) {
            return Err(schema("payload: k does not match the rows of g"));
        }
        let j = structure(n, p.j.as_ref(), p.perturbation.as_ref(), seed, &points, tol)?;
        let m = PointwiseACManifold::new(g, j)?;
        dimension_universal(m.n(), m.k())?;
        Ok(Self {
            m,
            points,
            seed,
            chart_seed: p.chart_seed.unwrap_or(seed.wrapping_add(1)),
            tol: *tol,
            lifts: OnceLock::new(),
            versality: OnceLock::new(),
        })
    }

    fn lifts(&self) -> Result<Vec<&UniversalLift>> {
        let lifts = self
            .lifts
            .get_or_init(|| par_map(&self.points, |x| lift_at(x, &self.m, ChartChoice::Orthogonal, &self.tol)));
        lifts.iter().map(|l| l.as_ref().map_err(Clone::clone)).collect()
    }

    fn versality(&self) -> Result<Vec<&VersalityReport>> {
        let lifts = self.lifts()?;
        let reports = self
            .versality
            .get_or_init(|| par_map(&lifts, |l| versality_from_dbar(&l.chart, &l.z0, &l.dbar, &self.tol)));
        reports.iter().map(|r| r.as_ref().map_err(Clone::clone)).collect()
    }

    fn rank_defect(&self, r: &VersalityReport) -> f64 {
        (r.dbar_rank.abs_diff(self.m.n()) + r.surj_rank.abs_diff(r.expected_rank)) as f64
    }

    /// `max |N_J|` over coordinate pairs at the samples.
    fn nijenhuis_size(&self, tol: &Tolerances) -> Result<f64> {
        let d = 2 * self.m.n();
        let values = par_map(&self.points, |x| -> Result<f64> {
            let mut w: f64 = 0.0;
            for a in 0..d {
                for b in (a + 1)..d {
                    let (ea, eb) = (RVector::from_fn(d, |i, _| (i == a) as u8 as f64), RVector::from_fn(d, |i, _| (i == b) as u8 as f64));
                    w = w.max(nijenhuis_direct(self.m.structure(), x, &ea, &eb, tol.alg)?.amax());
                }
            }
            Ok(w)
        });
        Ok(worst(collect(values)?))
    }

    fn evaluate(&self, id: &str, tol: &Tolerances) -> Result<Evaluation> {
        let m = &self.m;
        let pts = &self.points;
        let count = pts.len();
        match id {
            "universal.dimension" => {
                let expected = dimension_universal(m.n(), m.k())?;
                let found = universal_chart(&build_fiber(&pts[0], m, tol)?, tol)?.ambient_dim();
                Ok(Evaluation::Measured(
                    Outcome::new(expected.abs_diff(found) as f64, 0.0, 1)
                        .with_message(format!("N = {found}, formula {expected}")),
                ))
            }
            "universal.fiber_invariants" => {
                let values = par_map(pts, |x| -> Result<f64> {
                    let r = build_fiber(x, m, tol)?.invariants(tol)?;
                    Ok(if r.dims_ok && r.direct_sigma > tol.rank {
                        r.inclusion.max(r.conj_defect)
                    } else {
                        f64::INFINITY
                    })
                });
                measured(worst(collect(values)?), tol.alg, count)
            }
            "universal.reconstruction" => {
                let values = par_map(pts, |x| -> Result<f64> {
                    Ok(max_abs(&(induced_structure_at(x, m, tol)? - m.j_at(x))))
                });
                measured(worst(collect(values)?), tol.reconstruction, count)
            }
            "universal.transversality" => {
                let values = par_map(pts, |x| transversality_sigma(x, m, tol));
                measured(least(collect(values)?), tol.rank, count)
            }
            "universal.plucker" => {
                let values = par_map(pts, |x| -> Result<f64> {
                    Ok((1.0 - plucker_certificate(&build_fiber(x, m, tol)?, tol.rank)).abs())
                });
                measured(worst(collect(values)?), tol.alg, count)
            }
            "universal.chart_lift" => {
                let lifts = self.lifts()?;
                let v = worst(lifts.iter().zip(pts).map(|(l, x)| l.jf_residual(&m.j_at(x))));
                measured(v, tol.fd, count)
            }
            "universal.versality_rank" => {
                let reports = self.versality()?;
                let v = worst(reports.iter().map(|r| self.rank_defect(r)));
                let r0 = reports[0];
                Ok(Evaluation::Measured(Outcome::new(v, 0.0, count).with_message(format!(
                    "rank ∂̄f = {}, rank θ(∂̄f, ·) = {} (expected {}, {})",
                    r0.dbar_rank,
                    r0.surj_rank,
                    m.n(),
                    r0.expected_rank
                ))))
            }
            "universal.versality_gap" => {
                let reports = self.versality()?;
                measured(least(reports.iter().map(|r| r.gap)), tol.rank_gap, count)
            }
            "universal.chart_independence" => {
                let reports = self.versality()?;
                let k = count.min(CHART_INDEPENDENCE_SAMPLES);
                let other = par_map(&pts[..k], |x| -> Result<VersalityReport> {
                    let l = lift_at(x, m, ChartChoice::Random(self.chart_seed), tol)?;
                    versality_from_dbar(&l.chart, &l.z0, &l.dbar, tol)
                });
                let other = collect(other)?;
                let v = worst(other.iter().zip(&reports).map(|(a, b)| {
                    (a.dbar_rank.abs_diff(b.dbar_rank) + a.surj_rank.abs_diff(b.surj_rank)) as f64
                }));
                measured(v, 0.0, k)
            }
            "universal.isotropy" => {
                if m.n() > 1 && self.nijenhuis_size(tol)? > tol.alg {
                    return Ok(Evaluation::Skipped("J_X is not integrable at the samples".into()));
                }
                let lifts = self.lifts()?;
                let values = par_map(&lifts, |l| -> Result<f64> { Ok(l.isotropy(tol)?.max_residual) });
                measured(worst(collect(values)?), tol.fd, count)
            }
            "universal.nijenhuis" => {
                let lifts = self.lifts()?;
                let d = 2 * m.n();
                let jobs: Vec<(usize, u64)> = (0..count).flat_map(|i| (0..NIJENHUIS_PAIRS as u64).map(move |p| (i, p))).collect();
                let values = par_map(&jobs, |&(i, p)| -> Result<f64> {
                    let mut rng = SeededRng::substream(self.seed, 100 + (i as u64) * NIJENHUIS_PAIRS as u64 + p);
                    let (zeta, eta) = (rng.real_vector(d), rng.real_vector(d));
                    let direct = nijenhuis_direct(m.structure(), &pts[i], &zeta, &eta, tol.alg)?;
                    let via = lifts[i].nijenhuis(&zeta, &eta)?;
                    Ok(relative((&direct - via).norm(), direct.norm(), 1.0))
                });
                let tolerance = if m.structure().is_constant() { tol.reconstruction } else { tol.fd };
                measured(worst(collect(values)?), tolerance, jobs.len())
            }
            "universal.torsion_bracket" => {
                let l = self.lifts()?[0];
                let theta = torsion_at(&l.chart, &l.z0, tol.alg)?;
                let oracle = frame_bracket_torsion(&l.chart, &l.z0, BRACKET_STEP)?;
                measured(theta.relative_distance(&oracle), tol.torsion, 1)
            }
            _ => unknown(id),
        }
    }
}

// ------------------------------------------------------------------ induced

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InducedChart {
    /// Random polynomial `a` from the instance generator.
    #[default]
    Random,
    /// `a ≡ 0`: the flat foliation `D = span ∂/∂z''`.
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InducedPayload {
    #[serde(default = "default_induced_n")]
    pub n: usize,
    #[serde(default = "default_induced_big_n", rename = "N")]
    pub big_n: usize,
    #[serde(default)]
    pub a_scale: Option<f64>,
    #[serde(default)]
    pub g_scale: Option<f64>,
    #[serde(default)]
    pub variation_scale: Option<f64>,
    #[serde(default)]
    pub offset: Option<f64>,
    /// Number of random instances, seeded from the scenario seed.
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Random vector pairs per evaluation point for the Nijenhuis identity.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub chart: InducedChart,
}

fn default_induced_n() -> usize {
    2
}

fn default_induced_big_n() -> usize {
    5
}

fn default_instances() -> usize {
    1
}

fn default_pairs() -> usize {
    5
}

struct Evaluated {
    inst: InducedInstance,
    points: Vec<CVector>,
    flat: bool,
}

pub(crate) struct InducedSuite {
    cases: Vec<Evaluated>,
    pairs: usize,
    seed: u64,
    variation: OnceLock<Vec<Result<VariationReport>>>,
}

impl InducedSuite {
    fn new(p: InducedPayload, seed: u64, samples: Option<&Samples>, limit: Option<usize>) -> Result<Self> {
        let d = InstanceParams::default();
        let params = InstanceParams {
            n: p.n,
            big_n: p.big_n,
            a_scale: p.a_scale.unwrap_or(d.a_scale),
            g_scale: p.g_scale.unwrap_or(d.g_scale),
            variation_scale: p.variation_scale.unwrap_or(d.variation_scale),
            offset: p.offset.unwrap_or(d.offset),
        };
        if p.n == 0 || p.big_n <= p.n || p.instances == 0 {
            return Err(schema("payload: need N > n >= 1 and at least one instance"));
        }
        let explicit: Option<Vec<CVector>> = match samples {
            Some(Samples::Points(pts)) => {
                if let Some(bad) = pts.iter().find(|x| x.len() != 2 * p.n) {
                    return Err(schema(format!("sample points must have {} coordinates, got {}", 2 * p.n, bad.len())));
                }
                Some(pts.iter().map(|x| complexify_vector(&RVector::from_column_slice(x))).collect())
            }
            Some(Samples::Grid(_)) => return Err(schema("induced scenarios take random or explicit samples")),
            _ => None,
        };
        let per_instance = match samples {
            Some(Samples::Random { random }) => *random,
            _ => 1,
        };
        let mut cases = Vec::with_capacity(p.instances);
        for i in 0..p.instances {
            let mut inst = random_instance(&params, SeededRng::substream(seed, i as u64).next_u64())?;
            if p.chart == InducedChart::Flat {
                let zero = PolynomialMatrix {
                    n: p.n,
                    big_n: p.big_n,
                    monomials: vec![],
                };
                inst.chart = DistributionChart::from_graph(p.n, Arc::new(zero), CVector::zeros(p.big_n))?;
            }
            let mut points = match &explicit {
                Some(pts) => pts.clone(),
                None => {
                    let mut rng = SeededRng::substream(seed, 1000 + i as u64);
                    let mut pts = vec![inst.point.clone()];
                    while pts.len() < per_instance {
                        let dir = rng.complex_vector(p.n);
                        pts.push(&dir * num_complex::Complex64::new(params.offset / dir.norm(), 0.0));
                    }
                    pts
                }
            };
            if let Some(k) = limit {
                points.truncate(k.max(1));
            }
            cases.push(Evaluated {
                inst,
                points,
                flat: p.chart == InducedChart::Flat,
            });
        }
        Ok(Self {
            cases,
            pairs: p.pairs,
            seed,
            variation: OnceLock::new(),
        })
    }

    fn jobs(&self) -> Vec<(&Evaluated, &CVector)> {
        self.cases.iter().flat_map(|c| c.points.iter().map(move |z| (c, z))).collect()
    }

    fn variation(&self, tol: &Tolerances) -> Result<Vec<&VariationReport>> {
        let reports = self.variation.get_or_init(|| {
            par_map(&self.jobs(), |(c, z)| {
                variation_report(&c.inst.embedding, &c.inst.chart, &c.inst.variation, z, &VARIATION_STEPS, tol.rank)
            })
        });
        reports.iter().map(|r| r.as_ref().map_err(Clone::clone)).collect()
    }

    fn evaluate(&self, id: &str, tol: &Tolerances) -> Result<Evaluation> {
        let jobs = self.jobs();
        let count = jobs.len();
        let sweep = |f: &(dyn Fn(&Evaluated, &CVector) -> Result<f64> + Sync)| -> Result<Vec<f64>> {
            collect(par_map(&jobs, |(c, z)| f(c, z)))
        };
        match id {
            "induced.jf_square" => {
                let v = sweep(&|c, z| {
                    let j = induced_jf_quotient(&c.inst.embedding, &c.inst.chart, z, tol.rank)?;
                    let d = j.nrows();
                    Ok(max_abs(&(&j * &j + RMatrix::identity(d, d))))
                })?;
                measured(worst(v), tol.alg, count)
            }
            "induced.jf_formula" => {
                let v = sweep(&|c, z| {
                    let q = induced_jf_quotient(&c.inst.embedding, &c.inst.chart, z, tol.rank)?;
                    let f = induced_jf_formula(&c.inst.embedding, &c.inst.chart, z, tol.rank)?;
                    Ok(max_abs(&(q - f)))
                })?;
                measured(worst(v), tol.reconstruction, count)
            }
            "induced.transversality" => {
                let v = sweep(&|c, z| {
                    Ok(transversality_report(&c.inst.embedding, &c.inst.chart, std::slice::from_ref(z), tol.rank).min_sigma)
                })?;
                measured(least(v), tol.rank, count)
            }
            "induced.dbar_fiber" => {
                let v = sweep(&|c, z| dbar_fiber_residual(&c.inst.embedding, &c.inst.chart, z, tol.rank))?;
                measured(worst(v), tol.reconstruction, count)
            }
            "induced.nijenhuis" => {
                let pairs: Vec<(usize, usize)> =
                    (0..count).flat_map(|i| (0..self.pairs).map(move |p| (i, p))).collect();
                let values = par_map(&pairs, |&(i, p)| -> Result<f64> {
                    let (c, z) = jobs[i];
                    let d = 2 * c.inst.chart.n();
                    let mut rng = SeededRng::substream(self.seed, 5000 + (i * self.pairs + p) as u64);
                    let (zeta, eta) = (rng.real_vector(d), rng.real_vector(d));
                    let field = InducedStructureField {
                        embedding: &c.inst.embedding,
                        chart: &c.inst.chart,
                        rank_tol: tol.rank,
                        h: STRUCTURE_STEP,
                    };
                    let direct = nijenhuis_of_field(&field, realify_vector(z).as_slice(), &zeta, &eta);
                    let via = nijenhuis_via_torsion(&c.inst.embedding, &c.inst.chart, z, &zeta, &eta, tol.rank)?;
                    Ok(relative((&direct - via).norm(), direct.norm(), 1e-6))
                });
                measured(worst(collect(values)?), tol.fd, pairs.len())
            }
            "induced.variation_rate" => {
                let r = self.variation(tol)?;
                let v = worst(r.iter().map(|r| (r.ratio() - 10.0).abs()));
                let ratios: Vec<String> = r.iter().map(|r| format!("{:.3}", r.ratio())).collect();
                Ok(Evaluation::Measured(
                    Outcome::new(v, VARIATION_RATE_BAND, count).with_message(format!("error ratios {}", ratios.join(", "))),
                ))
            }
            "induced.variation_error" => {
                let r = self.variation(tol)?;
                measured(worst(r.iter().map(|r| r.errors[VARIATION_STEPS.len() - 1])), tol.variation, count)
            }
            "induced.variation_anticommutation" => {
                let r = self.variation(tol)?;
                measured(worst(r.iter().map(|r| r.anticommutation)), tol.alg, count)
            }
            "induced.torsion_double_entry" => {
                let v = sweep(&|c, z| {
                    let local = c.inst.chart.recenter(&c.inst.embedding.point(z))?;
                    let theta = torsion_at(&local, local.base(), tol.alg)?;
                    let oracle = frame_bracket_torsion(&local, local.base(), BRACKET_STEP)?;
                    Ok(theta.relative_distance(&oracle))
                })?;
                measured(worst(v), tol.torsion, count)
            }
            "induced.torsion_antisymmetry" => {
                let v = sweep(&|c, z| {
                    let local = c.inst.chart.recenter(&c.inst.embedding.point(z))?;
                    let theta = torsion_at(&local, local.base(), tol.alg)?;
                    let (n, big_n) = (theta.n(), theta.ambient_dim());
                    let mut w: f64 = 0.0;
                    for i in 0..n {
                        for j in n..big_n {
                            for k in n..big_n {
                                w = w.max((theta.get(i, j, k) + theta.get(i, k, j)).norm());
                            }
                        }
                    }
                    Ok(w)
                })?;
                measured(worst(v), 0.0, count)
            }
            "induced.foliation_versality" => {
                if self.cases.iter().any(|c| !c.flat) {
                    return Ok(Evaluation::Skipped("chart is not a foliation".into()));
                }
                let v = sweep(&|c, z| {
                    let db = dbar_f(&c.inst.embedding, &c.inst.chart, z, tol.rank)?;
                    let map = crate::universal::versality_map(&c.inst.chart, &c.inst.embedding.point(z), &db)?;
                    Ok(singular_values(&map).first().copied().unwrap_or(0.0))
                })?;
                measured(worst(v), tol.alg, count)
            }
            _ => unknown(id),
        }
    }
}

// --------------------------------------------------------------- symplectic

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymplecticPayload {
    #[serde(default = "default_sym_n")]
    pub n: usize,
    #[serde(default = "default_sym_m")]
    pub m: usize,
}

fn default_sym_n() -> usize {
    1
}

fn default_sym_m() -> usize {
    2
}

pub(crate) struct SymplecticSuite {
    reports: Vec<SymplecticReport>,
    controls: Vec<SymplecticReport>,
}

impl SymplecticSuite {
    fn new(p: SymplecticPayload, seed: u64, samples: Option<&Samples>) -> Result<Self> {
        let count = sample_count(samples, 3, "symplectic")?;
        let mut reports = Vec::with_capacity(count);
        let mut controls = Vec::with_capacity(count);
        for i in 0..count {
            let (omega, j, normal) = random_compatible_input(p.n, p.m, &mut SeededRng::substream(seed, i as u64))
                .map_err(|e| schema(format!("payload: {e}")))?;
            reports.push(symplectic_pointwise_model(&omega, &j, &normal, PairingSign::Difference, 1e-9)?);
            controls.push(symplectic_pointwise_model(&omega, &j, &normal, PairingSign::Sum, 1e-9)?);
        }
        Ok(Self { reports, controls })
    }

    fn evaluate(&self, id: &str, tol: &Tolerances) -> Result<Evaluation> {
        let r = &self.reports;
        let count = r.len();
        match id {
            "symplectic.compatibility" => measured(worst(r.iter().map(|r| r.compat_residual)), tol.symplectic, count),
            "symplectic.pullback" => measured(worst(r.iter().map(|r| r.pullback_residual)), tol.symplectic, count),
            "symplectic.square" => measured(worst(r.iter().map(|r| r.square_residual)), tol.alg, count),
            "symplectic.lift" => measured(worst(r.iter().map(|r| r.lift_residual)), tol.alg, count),
            "symplectic.negative_control" => measured(
                least(self.controls.iter().map(|c| c.compat_residual.max(c.pullback_residual))),
                CONTROL_THRESHOLD,
                count,
            ),
            _ => unknown(id),
        }
    }
}

// ------------------------------------------------------------------- fields

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsPayload {
    pub n: usize,
    #[serde(default, rename = "J")]
    pub j: Option<TrigPolyField>,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
}

pub(crate) struct FieldsSuite {
    j: AlmostComplexField,
    points: Vec<Vec<f64>>,
    seed: u64,
}

impl FieldsSuite {
    fn new(p: FieldsPayload, seed: u64, samples: Option<&Samples>, limit: Option<usize>, tol: &Tolerances) -> Result<Self> {
        if p.n == 0 {
            return Err(schema("payload: n must be positive"));
        }
        let points = torus_points(samples, limit, 2 * p.n, seed)?;
        let j = structure(p.n, p.j.as_ref(), p.perturbation.as_ref(), seed, &points, tol)?;
        Ok(Self { j, points, seed })
    }

    fn pair_sweep(&self, f: impl Fn(&[f64], &RVector, &RVector) -> Result<f64> + Sync) -> Result<(f64, usize)> {
        let d = 2 * self.j.n();
        let jobs: Vec<(usize, usize)> =
            (0..self.points.len()).flat_map(|i| (0..NIJENHUIS_PAIRS).map(move |p| (i, p))).collect();
        let values = par_map(&jobs, |&(i, p)| {
            let mut rng = SeededRng::substream(self.seed, 200 + (i * NIJENHUIS_PAIRS + p) as u64);
            let (zeta, eta) = (rng.real_vector(d), rng.real_vector(d));
            f(&self.points[i], &zeta, &eta)
        });
        Ok((worst(collect(values)?), jobs.len()))
    }

    fn evaluate(&self, id: &str, tol: &Tolerances) -> Result<Evaluation> {
        let j = &self.j;
        let count = self.points.len();
        match id {
            "fields.square" => measured(worst(self.points.iter().map(|x| j.square_residual(x))), tol.alg, count),
            "fields.nijenhuis_fd" => {
                let fd = FdStructureField {
                    dim: 2 * j.n(),
                    h: STRUCTURE_STEP,
                    f: |x: &[f64]| j.field().eval(x),
                };
                let (v, k) = self.pair_sweep(|x, z, e| {
                    let exact = nijenhuis_direct(j, x, z, e, tol.alg)?;
                    let oracle = nijenhuis_of_field(&fd, x, z, e);
                    Ok(relative((&exact - oracle).norm(), exact.norm(), 1.0))
                })?;
                measured(v, tol.fd, k)
            }
            "fields.tensoriality" => {
                let values = par_map(&self.points, |x| verify_tensoriality(j, x, self.seed, tol.fd).max_deviation);
                measured(worst(values), tol.fd, count)
            }
            "fields.nijenhuis_antisymmetry" => {
                let (v, k) = self.pair_sweep(|x, z, e| {
                    let a = nijenhuis_direct(j, x, z, e, tol.alg)?;
                    let b = nijenhuis_direct(j, x, e, z, tol.alg)?;
                    Ok(relative((&a + b).norm(), a.norm(), 1.0))
                })?;
                measured(v, tol.alg, k)
            }
            "fields.nijenhuis_antilinear" => {
                let (v, k) = self.pair_sweep(|x, z, e| {
                    let jx = j.field().eval(x);
                    let a = nijenhuis_direct(j, x, &(&jx * z), e, tol.alg)?;
                    let b = nijenhuis_direct(j, x, z, e, tol.alg)?;
                    Ok(relative((a + &jx * &b).norm(), b.norm(), 1.0))
                })?;
                measured(v, tol.alg, k)
            }
            _ => unknown(id),
        }
    }
}

// --------------------------------------------------------------------- lvmb

/// Expected verdicts; each condition is expected to hold when absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LvmbExpect {
    #[serde(default)]
    pub condition_i: Option<bool>,
    #[serde(default)]
    pub condition_ii: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LvmbPayload {
    pub instance: LvmbData,
    #[serde(default)]
    pub expect: LvmbExpect,
}

pub(crate) struct LvmbSuite {
    data: LvmbData,
    expect: LvmbExpect,
}

impl LvmbSuite {
    fn new(p: LvmbPayload) -> Result<Self> {
        p.instance.validate().map_err(|e| schema(format!("payload: {e}")))?;
        Ok(Self {
            data: p.instance,
            expect: p.expect,
        })
    }

    fn evaluate(&self, id: &str, tol: &Tolerances) -> Result<Evaluation> {
        match id {
            "lvmb.condition_i" => {
                let r = check_condition_i(&self.data)?;
                let expected = self.expect.condition_i.unwrap_or(true);
                let degenerate = r.pairs.iter().filter(|p| p.degenerate).count();
                Ok(Evaluation::Measured(
                    Outcome::new((r.holds != expected) as u8 as f64, 0.0, r.pairs.len()).with_message(format!(
                        "holds = {}, expected {expected}, degenerate pairs {degenerate}",
                        r.holds
                    )),
                ))
            }
            "lvmb.condition_ii" => {
                let r = check_condition_ii(&self.data)?;
                let expected = self.expect.condition_ii.unwrap_or(true);
                let detail = match &r.counterexample {
                    Some((set, k)) => format!(", counterexample J = {set:?}, k = {k}"),
                    None => String::new(),
                };
                Ok(Evaluation::Measured(
                    Outcome::new((r.holds != expected) as u8 as f64, 0.0, self.data.e.len())
                        .with_message(format!("holds = {}, expected {expected}{detail}", r.holds)),
                ))
            }
            "lvmb.killing_commute" => {
                let k = killing_fields(&self.data)?;
                let mut w: f64 = 0.0;
                for a in 0..k.count() {
                    for b in 0..k.count() {
                        w = w.max(k.bracket_coefficients(a, b).camax());
                    }
                }
                measured(w, tol.alg, k.count() * k.count())
            }
            _ => unknown(id),
        }
    }
}
