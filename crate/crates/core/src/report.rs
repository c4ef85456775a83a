//! Check verdicts and suite reports.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Undecidable,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undecidable => "undecidable",
        })
    }
}

/// Outcome of one verification.
///
/// `certified` counts the coefficients (or scalar identities) that were
/// compared exactly. `Undecidable` means no comparison could be certified
/// at the configured truncation; it never stands in for a failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub certified: usize,
    pub witness: String,
}

impl Verdict {
    pub fn pass(certified: usize, witness: impl Into<String>) -> Self {
        Verdict {
            status: Status::Pass,
            certified,
            witness: witness.into(),
        }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Verdict {
            status: Status::Fail,
            certified: 0,
            witness: witness.into(),
        }
    }

    pub fn undecidable(witness: impl Into<String>) -> Self {
        Verdict {
            status: Status::Undecidable,
            certified: 0,
            witness: witness.into(),
        }
    }

    /// Maps truncation errors to `Undecidable` and other errors to `Fail`.
    pub fn from_result(r: Result<Verdict>) -> Verdict {
        match r {
            Ok(v) => v,
            Err(Error::Truncation(m)) => Verdict::undecidable(m),
            Err(e) => Verdict::fail(e.to_string()),
        }
    }

    /// A pass if `ok`, otherwise a failure with `witness`.
    pub fn expect(ok: bool, witness: impl Into<String>) -> Verdict {
        if ok {
            Verdict::pass(1, "")
        } else {
            Verdict::fail(witness)
        }
    }

    /// Outcome of a negative control: the check `v` ran on an object that
    /// must be rejected. Acceptance on a finite window is inconclusive.
    pub fn refutes(v: Verdict, what: &str) -> Verdict {
        match v.status {
            Status::Fail => Verdict::pass(1, ""),
            Status::Pass => Verdict::undecidable(format!("{what} not rejected on this window")),
            Status::Undecidable => v,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// Conjunction: the worst status wins, certified counts add up.
    pub fn all(parts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::pass(0, "");
        let mut witnesses = Vec::new();
        for v in parts {
            if v.status > out.status {
                out.status = v.status;
                witnesses.clear();
            }
            if v.status == out.status && !v.witness.is_empty() && witnesses.len() < 3 {
                witnesses.push(v.witness.clone());
            }
            out.certified += v.certified;
        }
        out.witness = witnesses.join("; ");
        out
    }
}

/// One line of a suite report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub certified: usize,
    pub witness: String,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    /// 0 if everything passed, 1 on any failure, 3 if some check was
    /// undecidable and none failed.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undecidable => 3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("suite {}\n", self.suite);
        for c in &self.checks {
            s.push_str(&format!(
                "{:<12} {:<44} certified={:<7} {}ms  {}\n",
                c.status.to_string(),
                c.id,
                c.certified,
                c.wall_ms,
                c.witness
            ));
        }
        s.push_str(&format!("overall: {}\n", self.status()));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_wins() {
        let v = Verdict::all([Verdict::pass(3, ""), Verdict::undecidable("w"), Verdict::pass(2, "")]);
        assert_eq!(v.status, Status::Undecidable);
        assert_eq!(v.certified, 5);
        let v = Verdict::all([Verdict::undecidable("w"), Verdict::fail("x")]);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness, "x");
    }

    #[test]
    fn truncation_maps_to_undecidable() {
        let v = Verdict::from_result(Err(Error::truncation("t")));
        assert_eq!(v.status, Status::Undecidable);
        let v = Verdict::from_result(Err(Error::domain("d")));
        assert_eq!(v.status, Status::Fail);
    }
}
