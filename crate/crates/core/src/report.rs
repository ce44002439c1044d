//! Pass/fail records for the identities checked by the verifiers.

use serde::Serialize;

use crate::error::{Error, Result};

/// One side of a checked identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v:e}"),
            Value::Bool(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub pass: bool,
}

impl IdentityCheck {
    /// Exact equality of two sides.
    pub fn equal(name: impl Into<String>, lhs: impl Into<Value>, rhs: impl Into<Value>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        Self {
            name: name.into(),
            pass: lhs == rhs,
            lhs,
            rhs,
        }
    }

    /// `value ≤ bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            lhs: Value::Real(value),
            rhs: Value::Real(bound),
            pass: value <= bound,
        }
    }
}

impl std::fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "pass" } else { "FAIL" };
        write!(f, "{}: {} vs {} [{}]", self.name, self.lhs, self.rhs, verdict)
    }
}

/// Ordered list of identity checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: IdentityCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `Ok(self)` if every check passed, otherwise a `FormulaViolation`
    /// naming the first failing identity.
    pub fn ensure(self) -> Result<Self> {
        let failure = self.failures().next().map(|c| c.to_string());
        match failure {
            None => Ok(self),
            Some(msg) => Err(Error::FormulaViolation(msg)),
        }
    }
}
