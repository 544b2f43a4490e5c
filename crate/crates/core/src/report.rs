//! Check results and the JSON verification report.

use std::collections::BTreeMap;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Number of cases examined (generators, points, sample pairs).
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// An ordered list of named check outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Checks(pub Vec<CheckResult>);

impl Checks {
    pub fn new() -> Self {
        Checks(Vec::new())
    }

    pub fn pass(&mut self, name: impl Into<String>, cases: u64) {
        self.0.push(CheckResult { name: name.into(), passed: true, cases, witness: None });
    }

    pub fn fail(&mut self, name: impl Into<String>, cases: u64, witness: impl Into<String>) {
        self.0.push(CheckResult { name: name.into(), passed: false, cases, witness: Some(witness.into()) });
    }

    /// Records a pass when `witness` is `None`.
    pub fn record(&mut self, name: impl Into<String>, cases: u64, witness: Option<String>) {
        match witness {
            None => self.pass(name, cases),
            Some(w) => self.fail(name, cases, w),
        }
    }

    pub fn extend(&mut self, prefix: &str, other: Checks) {
        for mut c in other.0 {
            c.name = format!("{prefix}{}", c.name);
            self.0.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.0.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.0.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub instance: BTreeMap<String, String>,
    pub status: Status,
    pub witnesses: Vec<String>,
    pub trials: u64,
    pub seed: u64,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn from_checks(
        suite: &str,
        instance: BTreeMap<String, String>,
        checks: Checks,
        trials: u64,
        seed: u64,
    ) -> Self {
        let status = if checks.all_passed() { Status::Pass } else { Status::Fail };
        let witnesses = checks
            .failures()
            .map(|c| format!("{}: {}", c.name, c.witness.as_deref().unwrap_or("")))
            .collect();
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            instance,
            status,
            witnesses,
            trials,
            seed,
            checks,
            notes: Vec::new(),
        }
    }

    pub fn skipped(suite: &str, instance: BTreeMap<String, String>, note: &str, trials: u64, seed: u64) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            instance,
            status: Status::Skipped,
            witnesses: Vec::new(),
            trials,
            seed,
            checks: Checks::new(),
            notes: vec![note.to_string()],
        }
    }
}
