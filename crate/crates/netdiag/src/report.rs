//! Machine-readable verification reports.
//!
//! Reports serialize to versioned JSON (`"schema": 1`) with floats printed
//! at 17 significant digits and element encodings embedded as strings. For a
//! fixed seed and version the bytes are identical across runs and across the
//! rayon/sequential builds; wall time therefore goes to the console, never
//! into the JSON.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::convergence::Mode;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits: 1 leading + 16 after the point in scientific form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return fmt_f64(*x).serialize(s);
    }
    let n: serde_json::Number = fmt_f64(*x)
        .parse()
        .map_err(|e| serde::ser::Error::custom(format!("bad float literal: {e}")))?;
    n.serialize(s)
}

pub fn ser_f64_vec<S: Serializer>(xs: &Vec<f64>, s: S) -> Result<S::Ok, S::Error> {
    struct W(f64);
    impl Serialize for W {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ser_f64(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&W(x))?;
    }
    seq.end()
}

/// One verified tolerance on one level: the certificate anchor, its
/// transport into the diagonal tail, and the worst sampled residual.
#[derive(Debug, Clone, Serialize)]
pub struct TailEntry {
    #[serde(serialize_with = "ser_f64")]
    pub eps: f64,
    pub anchor: Option<String>,
    pub theta: Option<String>,
    pub checked: usize,
    #[serde(serialize_with = "ser_f64")]
    pub max_residual: f64,
    pub law_violations: usize,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelOutcome {
    pub level: usize,
    pub label: String,
    pub mode: Option<Mode>,
    pub limit: String,
    pub entries: Vec<TailEntry>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalReport {
    pub depth: usize,
    pub seed: u64,
    pub root_law_checked: usize,
    pub root_law_violations: usize,
    pub levels: Vec<LevelOutcome>,
    pub errors: Vec<String>,
    pub pass: bool,
}

/// Pass/fail verdict of a named scenario check with optional numeric
/// evidence (value against bound).
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub detail: String,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64")]
    pub bound: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn le(name: &str, detail: String, value: f64, bound: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            detail,
            value,
            bound,
            pass: value <= bound,
        }
    }

    pub fn flag(name: &str, detail: String, pass: bool) -> Self {
        CheckResult {
            name: name.to_string(),
            detail,
            value: if pass { 1.0 } else { 0.0 },
            bound: 1.0,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub scenario: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub expected_failure: bool,
    pub diagonal: Option<DiagonalReport>,
    pub checks: Vec<CheckResult>,
    pub verdict: String,
    pub pass: bool,
}

impl ScenarioReport {
    pub fn new(scenario: &str, seed: u64) -> Self {
        ScenarioReport {
            schema: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            parameters: BTreeMap::new(),
            seed,
            expected_failure: false,
            diagonal: None,
            checks: Vec::new(),
            verdict: "fail".into(),
            pass: false,
        }
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// Overall verdict: conjunction of the diagonal levels and the checks.
    pub fn finalize(&mut self) {
        let diag_ok = self.diagonal.as_ref().map_or(true, |d| d.pass);
        let checks_ok = self.checks.iter().all(|c| c.pass);
        self.pass = diag_ok && checks_ok;
        self.verdict = if self.pass { "pass" } else { "fail" }.into();
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleViolation {
    pub chain: String,
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub schema: u32,
    pub scenario: String,
    pub max_stage_size: usize,
    pub max_depth: usize,
    pub sets_enumerated: usize,
    pub maps_enumerated: usize,
    pub chains_checked: usize,
    pub violations: Vec<OracleViolation>,
    pub mutation_violations: usize,
    pub mutation_caught: bool,
    pub pass: bool,
}

impl OracleReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Exit code contract: 0 pass (or expected failure behaving as expected),
/// 2 verdict failure, 3 extraction/witness error.
pub fn exit_code(pass: bool, had_errors: bool) -> i32 {
    if had_errors {
        3
    } else if pass {
        0
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_print_17_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        let third: f64 = 1.0 / 3.0;
        let round: f64 = fmt_f64(third).parse().unwrap();
        assert_eq!(round, third);
    }

    #[test]
    fn report_json_is_stable_and_versioned() {
        let mut r = ScenarioReport::new("demo", 7);
        r.param("k", 4);
        r.checks.push(CheckResult::le("bound", "x <= 1".into(), 0.25, 1.0));
        r.finalize();
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["verdict"], "pass");
    }
}
