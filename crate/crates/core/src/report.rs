//! Check results and the JSON report schema shared by the verifiers and the CLI.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::HallError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not decided because an enumeration bound was hit.
    Bound,
    /// Not decided because of any other error.
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Bound => "bound",
            Status::Error => "error",
        };
        f.write_str(s)
    }
}

/// One verified identity: both sides and their difference, rendered as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
}

impl Check {
    /// Compares two renderings of normalized elements; `residual` is the rendered difference.
    pub fn compare(id: impl Into<String>, lhs: String, rhs: String, residual: String, equal: bool) -> Check {
        Check { id: id.into(), status: if equal { Status::Pass } else { Status::Fail }, lhs, rhs, residual }
    }

    pub fn from_error(id: impl Into<String>, e: &HallError) -> Check {
        Check {
            id: id.into(),
            status: if e.is_bound() { Status::Bound } else { Status::Error },
            lhs: String::new(),
            rhs: String::new(),
            residual: e.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Builds a check from a fallible computation of `(lhs, rhs, residual, equal)`.
pub fn check_with(id: impl Into<String>, f: impl FnOnce() -> Result<(String, String, String, bool), HallError>) -> Check {
    let id = id.into();
    match f() {
        Ok((l, r, res, eq)) => Check::compare(id, l, r, res, eq),
        Err(e) => Check::from_error(id, &e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub config: serde_json::Value,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| matches!(c.status, Status::Fail | Status::Error))
    }

    pub fn any_bound(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Bound)
    }

    /// Plain-text table: one line per check.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<width$}  {}", c.id, c.status));
            if c.status != Status::Pass && !c.residual.is_empty() {
                out.push_str(&format!("  residual: {}", c.residual));
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        out.push_str(&format!("{}: {passed}/{} passed\n", self.suite, self.checks.len()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let r = Report {
            suite: "relations".into(),
            checks: vec![
                Check::compare("E03[1,1]", "a".into(), "a".into(), "0".into(), true),
                Check::from_error("serre", &HallError::EnumerationTooLarge("x".into())),
            ],
            config: serde_json::json!({"p": 2}),
        };
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"status\":\"bound\""));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(!r.all_passed());
        assert!(!r.any_failed());
        assert!(r.any_bound());
        assert!(r.table().contains("1/2 passed"));
    }
}
