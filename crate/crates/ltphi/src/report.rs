//! Report types and their JSON form.
//!
//! Rationals are strings `"a/b"`, with `"inf"` for a residual that vanishes
//! identically. Scalars are `{v, unit, prec}` with `unit` the power-basis
//! coordinates of the unit part mod `pi^(prec - v)`.

use std::collections::BTreeMap;

use ltphi_core::arith::INF;
use ltphi_core::herr::{CohomologyReport, DegreeReport, Variant};
use ltphi_core::{Scalar, Q};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub fn q_json(x: Q) -> Value {
    if x >= Q::from_integer(INF as i64) {
        Value::from("inf")
    } else if x.is_integer() {
        Value::from(x.numer().to_string())
    } else {
        Value::from(format!("{}/{}", x.numer(), x.denom()))
    }
}

pub fn qs_json(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(|x| q_json(*x)).collect())
}

pub fn scalar_json(s: &Scalar) -> Value {
    if s.is_zero() {
        return json!({ "v": "inf", "unit": [], "prec": s.prec() });
    }
    let d = s.field().d;
    json!({ "v": s.v(), "unit": &s.unit_coords()[..d], "prec": s.prec() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail { witness: String },
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive { diagnostics: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail { .. } => "FAIL",
            Verdict::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    /// Acceptance criterion the check belongs to.
    pub criterion: u32,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub details: BTreeMap<String, Value>,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, criterion: u32) -> CheckResult {
        CheckResult { id: id.into(), criterion, verdict: Verdict::Pass, details: BTreeMap::new() }
    }

    pub fn detail(mut self, key: &str, v: impl Into<Value>) -> CheckResult {
        self.details.insert(key.into(), v.into());
        self
    }

    /// Fails with `witness` unless `ok`; an earlier failure is kept.
    pub fn require(mut self, ok: bool, witness: impl FnOnce() -> String) -> CheckResult {
        if !ok && !matches!(self.verdict, Verdict::Fail { .. }) {
            self.verdict = Verdict::Fail { witness: witness() };
        }
        self
    }

    pub fn inconclusive(mut self, diagnostics: impl Into<String>) -> CheckResult {
        if self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive { diagnostics: diagnostics.into() };
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub config: RunConfig,
    /// Sorted by id.
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
    /// `PASS` iff no check failed.
    pub verdict: &'static str,
}

impl VerifyReport {
    pub fn new(suite: &str, config: &RunConfig, mut checks: Vec<CheckResult>) -> VerifyReport {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let count = |l: &str| checks.iter().filter(|c| c.verdict.label() == l).count();
        let summary = Summary { pass: count("PASS"), fail: count("FAIL"), inconclusive: count("INCONCLUSIVE") };
        let verdict = if summary.fail == 0 { "PASS" } else { "FAIL" };
        VerifyReport { suite: suite.into(), seed: config.seed, config: config.clone(), checks, summary, verdict }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn degree_json(d: &DegreeReport) -> Value {
    json!({
        "elementary_divisors": qs_json(&d.elementary_divisors),
        "rank": d.rank,
        "slack": d.slack.to_string(),
        "generators": d.generators,
    })
}

/// Cohomology with the provenance of the run that produced it.
pub fn cohomology_json(r: &CohomologyReport, provenance: Value, verdict: &str) -> Value {
    let variant = match r.variant {
        Variant::Phi => "phi",
        Variant::Psi => "psi",
    };
    let h0: Vec<Vec<Value>> = (0..r.h0_basis.cols()).map(|j| r.h0_basis.col(j).iter().map(scalar_json).collect()).collect();
    json!({
        "0": degree_json(&r.degrees[0]),
        "1": degree_json(&r.degrees[1]),
        "2": degree_json(&r.degrees[2]),
        "h0_generators": h0,
        "h0_eps_rank": r.h0_eps_rank,
        "diagnostics": {
            "d2d1_residual": q_json(r.d2d1_residual),
            "leak": q_json(r.leak),
        },
        "variant": variant,
        "level": r.level,
        "windows": r.windows,
        "precision": r.precision,
        "provenance": provenance,
        "verdict": verdict,
    })
}
