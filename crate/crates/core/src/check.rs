//! Tallies for mechanical verification runs.

use serde::Serialize;

const MAX_WITNESSES: usize = 5;

/// Outcome of one named identity checked over many instances.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub instances: u64,
    pub failures: u64,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>) -> Self {
        CheckResult { name: name.into(), ..Default::default() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Count one instance; `witness` is only evaluated on failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    pub fn merge(&mut self, other: CheckResult) {
        self.instances += other.instances;
        self.failures += other.failures;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// A list of named checks.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn total_instances(&self) -> u64 {
        self.checks.iter().map(|c| c.instances).sum()
    }
}
