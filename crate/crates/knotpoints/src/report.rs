//! The JSON run report every CLI command emits.
//!
//! Reports carry no wall-clock or host data, so a fixed command line and
//! fixed input files always produce the same bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bmgame::NamedVerdict;
use crate::error::Error;
use crate::indexcomb::Verdict;

pub const SCHEMA: &str = "knotpoints.run-report/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// No check failed but at least one enclosure could not decide.
    Undecided,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Slack by which a passing inequality holds, when it is measured.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check { name: name.into(), verdict, margin: None }
    }

    pub fn with_margin(mut self, margin: impl Into<String>) -> Self {
        self.margin = Some(margin.into());
        self
    }
}

impl From<NamedVerdict> for Check {
    fn from(v: NamedVerdict) -> Self {
        Check::new(v.name, v.verdict)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ReportError {
    fn from(e: &Error) -> Self {
        ReportError { kind: e.kind().into(), message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: Vec<String>,
    /// SHA-256 over the command words and the bytes of every input file.
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub status: Status,
    pub outputs: serde_json::Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<ReportError>,
}

impl RunReport {
    pub fn new(command: Vec<String>, inputs: &[Vec<u8>]) -> Self {
        let mut h = Sha256::new();
        for w in &command {
            h.update(w.as_bytes());
            h.update([0u8]);
        }
        for bytes in inputs {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        RunReport {
            schema: SCHEMA.into(),
            command,
            inputs_digest: format!("{:x}", h.finalize()),
            seed: None,
            status: Status::Pass,
            outputs: serde_json::Value::Null,
            checks: Vec::new(),
            error: None,
        }
    }

    /// Recomputes `status` from the checks; a recorded error dominates.
    pub fn settle(&mut self) {
        self.status = if self.error.is_some() {
            Status::Error
        } else if self.checks.iter().any(|c| c.verdict.is_fail()) {
            Status::Fail
        } else if self.checks.iter().any(|c| !c.verdict.is_pass()) {
            Status::Undecided
        } else {
            Status::Pass
        };
    }

    /// 0 when nothing failed, 1 on a failed check or a failed computation,
    /// 2 when the input itself was rejected.
    pub fn exit_code(&self) -> i32 {
        match (&self.status, &self.error) {
            (_, Some(e)) if matches!(e.kind.as_str(), "input" | "argument" | "domain") => 2,
            (Status::Pass | Status::Undecided, None) => 0,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_and_exit_codes() {
        let mut r = RunReport::new(vec!["x".into()], &[b"abc".to_vec()]);
        r.settle();
        assert_eq!((r.status.clone(), r.exit_code()), (Status::Pass, 0));
        r.checks.push(Check::new("u", Verdict::Undecided { witness: "w".into() }));
        r.settle();
        assert_eq!((r.status.clone(), r.exit_code()), (Status::Undecided, 0));
        r.checks.push(Check::new("f", Verdict::Fail { witness: "w".into() }));
        r.settle();
        assert_eq!(r.exit_code(), 1);
        r.error = Some((&Error::Input("bad".into())).into());
        r.settle();
        assert_eq!((r.status.clone(), r.exit_code()), (Status::Error, 2));
        r.error = Some((&Error::Resource("cap".into())).into());
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn digest_depends_on_inputs() {
        let a = RunReport::new(vec!["nset".into()], &[b"1".to_vec()]);
        let b = RunReport::new(vec!["nset".into()], &[b"2".to_vec()]);
        let c = RunReport::new(vec!["nset".into()], &[b"1".to_vec()]);
        assert_ne!(a.inputs_digest, b.inputs_digest);
        assert_eq!(a.inputs_digest, c.inputs_digest);
    }
}
