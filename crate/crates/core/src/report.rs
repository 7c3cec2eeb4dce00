//! Structured pass/fail reports shared by the condition checks and the verification suites.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One checked condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub condition: String,
    pub pass: bool,
    pub measured_constant: Option<f64>,
    pub grid_size: usize,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self { schema_version: SCHEMA_VERSION, subject: subject.into(), seed: None, checks: Vec::new() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(
        &mut self,
        condition: impl Into<String>,
        pass: bool,
        measured_constant: Option<f64>,
        grid_size: usize,
        tolerance: f64,
        detail: impl Into<String>,
    ) {
        self.checks.push(Check {
            condition: condition.into(),
            pass,
            measured_constant,
            grid_size,
            tolerance,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, condition: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut report = VerificationReport::new("demo").with_seed(3);
        report.push("C1", true, None, 16, 1e-12, "");
        report.push("C2", false, Some(3.5), 16, 1e-9, "violated at s=0.5");
        let text = report.to_json().unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(!back.passed());
        assert_eq!(back.failures().count(), 1);
        assert_eq!(back.check("C2").unwrap().measured_constant, Some(3.5));
    }
}
