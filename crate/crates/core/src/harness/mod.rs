//! Scenario files, the check registry, and JSON-lines reports.
//!
//! A scenario names a kind, a seed, optional samples and tolerance
//! overrides, and a kind-specific payload. Running it evaluates every
//! registered check of that kind (or the listed subset) and produces one
//! record per check followed by an aggregate object. Checks run in parallel
//! and are reported in registry order; wall times are only recorded on
//! request, so reports are byte-identical across runs.

mod registry;
mod suites;

pub use registry::{checks_for, lookup, registry, Bound, CheckInfo};
pub use suites::{FieldsPayload, InducedPayload, LvmbExpect, LvmbPayload, Perturbation, SymplecticPayload, UniversalPayload};

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::tolerance::Tolerances;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Universal,
    Induced,
    Lvmb,
    Symplectic,
    Fields,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Universal, Kind::Induced, Kind::Lvmb, Kind::Symplectic, Kind::Fields];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Universal => "universal",
            Kind::Induced => "induced",
            Kind::Lvmb => "lvmb",
            Kind::Symplectic => "symplectic",
            Kind::Fields => "fields",
        }
    }
}

/// Regular grid of sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dims: usize,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    Grid(GridSpec),
    Random {
        random: usize,
    },
    Points(Vec<Vec<f64>>),
}

impl Samples {
    /// Apply a `--samples` override: random counts are replaced, grids and
    /// point lists are truncated.
    pub fn limited(&self, count: usize) -> Samples {
        match self {
            Samples::Random { .. } => Samples::Random { random: count },
            Samples::Grid(_) | Samples::Points(_) => self.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub kind: Kind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Samples>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    /// Subset of registered check ids; all checks of the kind when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub tol_scale: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Record wall times (makes reports non-reproducible).
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    #[serde(rename = "type")]
    pub record_type: &'static str,
    pub scenario: String,
    pub check: &'static str,
    pub name: &'static str,
    pub identity: &'static str,
    pub status: Status,
    pub max_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub bound: Bound,
    pub samples_checked: usize,
    pub wall_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    #[serde(rename = "type")]
    pub record_type: &'static str,
    pub scenario: String,
    pub kind: Kind,
    pub seed: u64,
    pub verdict: Status,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub skipped: usize,
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
    pub aggregate: Aggregate,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.aggregate.verdict == Status::Pass
    }

    pub fn record(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    /// One JSON object per line, the aggregate last.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.aggregate).expect("aggregate serializes"));
        out.push('\n');
        out
    }
}

/// Measured value of one check, before comparison with its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Outcome {
    pub value: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub message: Option<String>,
}

impl Outcome {
    pub fn new(value: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            value,
            tolerance,
            samples,
            message: None,
        }
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = Some(message.into());
        self
    }
}

/// Result of evaluating one check: a measurement, or a reason to skip.
pub(crate) enum Evaluation {
    Measured(Outcome),
    Skipped(String),
}

fn schema(msg: impl std::fmt::Display) -> Error {
    Error::Schema(msg.to_string())
}

/// Parse scenario text. Syntax and type errors carry the line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let s: Scenario = serde_json::from_str(text).map_err(schema)?;
    validate(&s)?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Schema(m) => schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn validate(s: &Scenario) -> Result<()> {
    if s.id.trim().is_empty() {
        return Err(schema("scenario id must be non-empty"));
    }
    if let Some(Samples::Grid(g)) = &s.samples {
        if g.counts.len() != g.dims || g.counts.contains(&0) {
            return Err(schema(format!(
                "grid needs {} positive counts, got {:?}",
                g.dims, g.counts
            )));
        }
    }
    if let Some(checks) = &s.checks {
        for id in checks {
            match lookup(id) {
                Some(c) if c.kind == s.kind => {}
                Some(_) => return Err(schema(format!("check {id} does not belong to kind {}", s.kind.as_str()))),
                None => return Err(schema(format!("unknown check {id}"))),
            }
        }
    }
    Ok(())
}

fn selected(s: &Scenario) -> Vec<&'static CheckInfo> {
    checks_for(s.kind)
        .filter(|c| s.checks.as_ref().is_none_or(|list| list.iter().any(|id| id == c.id)))
        .collect()
}

/// Evaluate every selected check of `scenario`.
///
/// Payload errors are schema errors; numerical failures inside a check are
/// recorded with status `error`.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<Report> {
    let start = Instant::now();
    let seed = options.seed.unwrap_or(scenario.seed);
    let base = scenario.tolerances.unwrap_or_default();
    let tol = options.tol_scale.map_or(base, |s| base.scaled(s));
    let samples = match (options.samples, &scenario.samples) {
        (Some(k), Some(s)) => Some(s.limited(k)),
        (Some(k), None) => Some(Samples::Random { random: k }),
        (None, s) => s.clone(),
    };
    let truncate = options.samples;
    let suite = suites::prepare(scenario.kind, &scenario.payload, seed, samples.as_ref(), truncate, &tol)?;
    let checks = selected(scenario);
    let records = par_map(&checks, |info| {
        let t0 = Instant::now();
        let evaluation = suite.evaluate(info.id, &tol);
        let wall_time = options.timing.then(|| t0.elapsed().as_secs_f64());
        let mut rec = CheckRecord {
            record_type: "check",
            scenario: scenario.id.clone(),
            check: info.id,
            name: info.name,
            identity: info.identity,
            status: Status::Error,
            max_residual: None,
            tolerance: None,
            bound: info.bound,
            samples_checked: 0,
            wall_time,
            message: None,
        };
        match evaluation {
            Ok(Evaluation::Measured(o)) => {
                rec.status = if info.bound.accepts(o.value, o.tolerance) {
                    Status::Pass
                } else {
                    Status::Fail
                };
                rec.max_residual = Some(o.value).filter(|v| v.is_finite());
                rec.tolerance = Some(o.tolerance);
                rec.samples_checked = o.samples;
                rec.message = o.message;
            }
            Ok(Evaluation::Skipped(why)) => {
                rec.status = Status::Skip;
                rec.message = Some(why);
            }
            Err(e) => rec.message = Some(e.to_string()),
        }
        rec
    });
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let (passed, failed, errors, skipped) = (
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Error),
        count(Status::Skip),
    );
    let aggregate = Aggregate {
        record_type: "aggregate",
        scenario: scenario.id.clone(),
        kind: scenario.kind,
        seed,
        verdict: if failed + errors == 0 && passed > 0 {
            Status::Pass
        } else {
            Status::Fail
        },
        checks: records.len(),
        passed,
        failed,
        errors,
        skipped,
        wall_time: options.timing.then(|| start.elapsed().as_secs_f64()),
    };
    Ok(Report { records, aggregate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvmb_scenario(extra: &str) -> String {
        format!(
            r#"{{"id": "t", "kind": "lvmb", "seed": 1 {extra},
               "payload": {{"instance": {{"m": 1, "N": 3, "E": [[0, 1, 2], [1, 2, 3]],
                 "ell": [[0, 0], [1, 0], [0, 1], [0.3, 0.3]]}},
                 "expect": {{"condition_i": true}}}}}}"#
        )
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_scenario("{\n  \"id\": \"x\",\n  \"kind\": universal\n}").unwrap_err();
        let Error::Schema(msg) = err else { panic!() };
        assert!(msg.contains("line 3") && msg.contains("column"), "{msg}");
    }

    #[test]
    fn unknown_fields_and_checks_are_rejected() {
        assert!(matches!(parse_scenario(&lvmb_scenario(r#", "bogus": 1"#)), Err(Error::Schema(_))));
        assert!(matches!(
            parse_scenario(&lvmb_scenario(r#", "checks": ["universal.plucker"]"#)),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            parse_scenario(&lvmb_scenario(r#", "checks": ["lvmb.nope"]"#)),
            Err(Error::Schema(_))
        ));
        let bad_grid = r#"{"id":"g","kind":"fields","seed":0,"samples":{"dims":2,"counts":[3]},"payload":{"n":1}}"#;
        assert!(matches!(parse_scenario(bad_grid), Err(Error::Schema(_))));
    }

    #[test]
    fn samples_forms_parse() {
        let g: Samples = serde_json::from_str(r#"{"dims": 2, "counts": [3, 4]}"#).unwrap();
        assert_eq!(g, Samples::Grid(GridSpec { dims: 2, counts: vec![3, 4] }));
        let r: Samples = serde_json::from_str(r#"{"random": 5}"#).unwrap();
        assert_eq!(r, Samples::Random { random: 5 });
        let p: Samples = serde_json::from_str("[[0.1, 0.2]]").unwrap();
        assert_eq!(p, Samples::Points(vec![vec![0.1, 0.2]]));
        assert_eq!(r.limited(2), Samples::Random { random: 2 });
    }

    #[test]
    fn lvmb_run_and_determinism() {
        let s = parse_scenario(&lvmb_scenario("")).unwrap();
        let a = run_scenario(&s, &RunOptions::default()).unwrap();
        let b = run_scenario(&s, &RunOptions::default()).unwrap();
        assert!(a.passed(), "{}", a.to_jsonl());
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        let text = a.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), a.records.len() + 1);
        for l in &lines {
            let _: serde_json::Value = serde_json::from_str(l).unwrap();
        }
        assert!(lines.last().unwrap().contains("\"aggregate\""));
        assert!(a.records.iter().all(|r| r.wall_time.is_none()));
    }

    #[test]
    fn selected_subset_in_registry_order() {
        let s = parse_scenario(&lvmb_scenario(r#", "checks": ["lvmb.killing_commute", "lvmb.condition_i"]"#)).unwrap();
        let r = run_scenario(&s, &RunOptions::default()).unwrap();
        let ids: Vec<&str> = r.records.iter().map(|r| r.check).collect();
        assert_eq!(ids, ["lvmb.condition_i", "lvmb.killing_commute"]);
    }

    #[test]
    fn payload_errors_are_schema_errors() {
        let s = parse_scenario(r#"{"id":"x","kind":"symplectic","seed":0,"payload":{"n":1,"mm":2}}"#).unwrap();
        assert!(matches!(run_scenario(&s, &RunOptions::default()), Err(Error::Schema(_))));
    }

    #[test]
    fn forced_tight_tolerance_fails_in_a_controlled_way() {
        let text = r#"{"id":"tight","kind":"symplectic","seed":3,"samples":{"random":1},
                       "tolerances":{"symplectic":1e-16,"alg":1e-16},"payload":{"n":1,"m":2}}"#;
        let s = parse_scenario(text).unwrap();
        let r = run_scenario(&s, &RunOptions::default()).unwrap();
        assert!(!r.passed());
        assert!(r.records.iter().any(|c| c.status == Status::Fail));
        assert!(r.records.iter().all(|c| c.status != Status::Error));
    }
}
