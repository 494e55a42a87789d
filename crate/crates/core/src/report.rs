use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of checking a law over a family of instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub suite: String,
    pub claim: String,
    pub status: Status,
    pub attempted: u64,
    pub passed: u64,
    /// First failing instance and locus, in instance order.
    pub witness: Option<String>,
    /// Supporting observations (expected counterexamples, counts).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
    pub duration_ms: u64,
}

impl LawReport {
    pub fn new(suite: impl Into<String>, claim: impl Into<String>) -> Self {
        LawReport {
            suite: suite.into(),
            claim: claim.into(),
            status: Status::Pass,
            attempted: 0,
            passed: 0,
            witness: None,
            details: Vec::new(),
            duration_ms: 0,
        }
    }

    pub fn skipped(
        suite: impl Into<String>,
        claim: impl Into<String>,
        why: impl Into<String>,
    ) -> Self {
        let mut r = LawReport::new(suite, claim);
        r.status = Status::Skipped;
        r.details.push(why.into());
        r
    }

    /// Records one instance; the first failure becomes the witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.attempted += 1;
        if ok {
            self.passed += 1;
        } else {
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
            self.status = Status::Fail;
        }
    }

    /// Folds per-instance outcomes produced in instance order.
    pub fn record_all<I>(&mut self, outcomes: I)
    where
        I: IntoIterator<Item = Result<(), String>>,
    {
        for o in outcomes {
            match o {
                Ok(()) => self.record(true, String::new),
                Err(w) => self.record(false, || w),
            }
        }
    }

    pub fn fail(&mut self, witness: impl Into<String>) {
        self.status = Status::Fail;
        if self.witness.is_none() {
            self.witness = Some(witness.into());
        }
    }

    pub fn detail(&mut self, d: impl Into<String>) {
        self.details.push(d.into());
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    /// Same report with the timing field cleared, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        LawReport {
            duration_ms: 0,
            ..self.clone()
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_failure_is_kept() {
        let mut r = LawReport::new("s", "c");
        r.record_all(vec![Ok(()), Err("a".into()), Err("b".into())]);
        assert_eq!(r.attempted, 3);
        assert_eq!(r.passed, 1);
        assert_eq!(r.witness.as_deref(), Some("a"));
        assert!(r.is_fail());
        let line = r.to_json_line();
        let back: LawReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }
}
