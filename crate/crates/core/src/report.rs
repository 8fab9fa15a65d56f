//! Report plumbing shared by every checker.
//!
//! Checkers accumulate violations instead of aborting on the first failure, so
//! a corrupted structure yields a full list of broken laws with witnesses.

use serde::Serialize;
use std::fmt;

/// One violated law together with the witness tuple that breaks it.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub law: String,
    pub witness: String,
}

/// Outcome of checking one structure against a family of laws.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub subject: String,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn new(subject: impl Into<String>) -> Self {
        CheckReport { subject: subject.into(), violations: Vec::new() }
    }

    pub fn violate(&mut self, law: &str, witness: impl Into<String>) {
        self.violations.push(Violation { law: law.to_string(), witness: witness.into() });
    }

    /// Records a violation only if `ok` is false; returns `ok` unchanged.
    pub fn check(&mut self, ok: bool, law: &str, witness: impl FnOnce() -> String) -> bool {
        if !ok {
            self.violations.push(Violation { law: law.to_string(), witness: witness() });
        }
        ok
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.violations.extend(other.violations);
    }

    /// Panics with the full violation list unless the report is clean.
    /// Intended for tests and for constructors whose input is trusted.
    pub fn expect_clean(&self) {
        assert!(self.passed(), "{self}");
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "{}: ok", self.subject);
        }
        writeln!(f, "{}: {} violation(s)", self.subject, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.law, v.witness)?;
        }
        Ok(())
    }
}

/// Verdict for one named law, as produced by the theorem battery.
#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub name: String,
    pub passed: bool,
    /// Witness of the first failure, if any.
    pub witness: Option<String>,
    /// Set when the law's hypotheses do not apply to the structure at hand.
    pub skipped: Option<String>,
}

impl LawReport {
    pub fn pass(name: impl Into<String>) -> Self {
        LawReport { name: name.into(), passed: true, witness: None, skipped: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        LawReport { name: name.into(), passed: false, witness: Some(witness.into()), skipped: None }
    }

    pub fn skip(name: impl Into<String>, why: impl Into<String>) -> Self {
        LawReport { name: name.into(), passed: true, witness: None, skipped: Some(why.into()) }
    }

    pub fn from_report(name: impl Into<String>, report: &CheckReport) -> Self {
        if report.passed() {
            Self::pass(name)
        } else {
            let v = &report.violations[0];
            Self::fail(name, format!("{}: {}", v.law, v.witness))
        }
    }
}
