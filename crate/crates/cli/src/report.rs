//! Suite and command reports.

use serde::Serialize;
use serde_json::Value;

use crate::settings::Settings;

pub const SCHEMA: u32 = 1;

/// How the expected value of a case was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A symbolic proof about the name's tail.
    Structural,
    /// A closed-form value computed independently of the code under test.
    ClosedForm,
    /// Exhaustive enumeration over a finite family.
    Enumeration,
    /// An algebraic law checked on instances.
    Law,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Structural => "structural",
            Provenance::ClosedForm => "closed-form",
            Provenance::Enumeration => "enumeration",
            Provenance::Law => "law",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRecord {
    pub key: String,
    pub inputs: Value,
    pub expected: Value,
    pub actual: Value,
    pub provenance: Provenance,
    pub pass: bool,
}

impl CaseRecord {
    pub fn new(key: impl Into<String>, provenance: Provenance, inputs: Value, expected: Value, actual: Value) -> Self {
        let pass = expected == actual;
        CaseRecord {
            key: key.into(),
            inputs,
            expected,
            actual,
            provenance,
            pass,
        }
    }

    /// A case whose pass condition is not equality of the two values.
    pub fn judged(
        key: impl Into<String>,
        provenance: Provenance,
        inputs: Value,
        expected: Value,
        actual: Value,
        pass: bool,
    ) -> Self {
        CaseRecord {
            key: key.into(),
            inputs,
            expected,
            actual,
            provenance,
            pass,
        }
    }
}

/// Counts checks and keeps the first few failures.
#[derive(Debug, Default)]
pub struct Tally {
    pub checked: u64,
    pub failures: Vec<String>,
    pub failed: u64,
}

const KEPT_FAILURES: usize = 5;

impl Tally {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(what());
            }
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
        self
    }

    pub fn into_case(self, key: impl Into<String>, provenance: Provenance, inputs: Value, claim: &str) -> CaseRecord {
        let pass = self.failed == 0 && self.checked > 0;
        CaseRecord::judged(
            key,
            provenance,
            inputs,
            serde_json::json!({ "claim": claim, "failed": 0 }),
            serde_json::json!({ "checked": self.checked, "failed": self.failed, "failures": self.failures }),
            pass,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub config: Settings,
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<CaseRecord>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str, settings: &Settings, mut cases: Vec<CaseRecord>, notes: Vec<String>) -> Self {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        let passed = cases.iter().filter(|c| c.pass).count();
        SuiteReport {
            schema: SCHEMA,
            suite: suite.to_string(),
            seed: settings.seed,
            config: settings.clone(),
            failed: cases.len() - passed,
            passed,
            cases,
            notes,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0 && !self.cases.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("suite\tkey\tprovenance\tpass\tinputs\texpected\tactual\n");
        for c in &self.cases {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                self.suite,
                c.key,
                c.provenance.as_str(),
                c.pass,
                c.inputs,
                c.expected,
                c.actual
            ));
        }
        out
    }
}

/// Report of a single command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandReport {
    pub schema: u32,
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    /// How the result was obtained: proof class or certificate kind.
    pub provenance: String,
}

impl CommandReport {
    pub fn new(command: &str, inputs: Value, result: Value, provenance: impl Into<String>) -> Self {
        CommandReport {
            schema: SCHEMA,
            command: command.to_string(),
            inputs,
            result,
            provenance: provenance.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("command\t{}\nprovenance\t{}\n", self.command, self.provenance);
        if let Value::Object(map) = &self.inputs {
            for (k, v) in map {
                out.push_str(&format!("input.{k}\t{v}\n"));
            }
        }
        match &self.result {
            Value::Object(map) => {
                for (k, v) in map {
                    out.push_str(&format!("{k}\t{v}\n"));
                }
            }
            v => out.push_str(&format!("result\t{v}\n")),
        }
        out
    }
}
