use std::collections::BTreeMap;

use chsh_zn::checks::criterion_number;
use serde::Serialize;
use serde_json::Value;

/// How `value` was compared with `expected`.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value − expected| ≤ tolerance`.
    Within,
    /// `value ≤ expected + tolerance`.
    AtMost,
    /// `value ≥ expected − tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    /// Acceptance check this result belongs to.
    pub check: &'static str,
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(check: &'static str, name: impl Into<String>, value: f64, expected: f64, comparison: Comparison, tolerance: f64) -> Self {
        let passed = match comparison {
            Comparison::Within => (value - expected).abs() <= tolerance,
            Comparison::AtMost => value <= expected + tolerance,
            Comparison::AtLeast => value >= expected - tolerance,
        };
        Self {
            check,
            criterion: criterion_number(check).expect("check names come from the criteria table"),
            name: name.into(),
            value,
            expected,
            comparison,
            tolerance,
            passed,
        }
    }

    pub fn within(check: &'static str, name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(check, name, value, expected, Comparison::Within, tolerance)
    }

    /// A residual that must not exceed `tolerance`.
    pub fn residual(check: &'static str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(check, name, value, 0.0, Comparison::AtMost, tolerance)
    }

    pub fn at_most(check: &'static str, name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(check, name, value, bound, Comparison::AtMost, tolerance)
    }

    pub fn at_least(check: &'static str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(check, name, value, bound, Comparison::AtLeast, 0.0)
    }

    /// An exact yes/no fact, reported as 1 (true) or 0 (false) against 1.
    pub fn holds(check: &'static str, name: impl Into<String>, fact: bool) -> Self {
        Self::new(check, name, if fact { 1.0 } else { 0.0 }, 1.0, Comparison::Within, 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    pub passed: bool,
    pub seed: Option<u64>,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            results: Vec::new(),
            data: None,
            passed: true,
            seed: None,
            wall_time: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters
            .insert(key.into(), serde_json::to_value(value).expect("parameters serialize"));
        self
    }

    pub fn push(&mut self, r: CheckResult) {
        self.passed &= r.passed;
        self.results.push(r);
    }

    pub fn data(&mut self, value: impl Serialize) {
        self.data = Some(serde_json::to_value(value).expect("report data serializes"));
    }
}
