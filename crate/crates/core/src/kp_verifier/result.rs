use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::linalg::Matrix;
use crate::scalar::{format_rational, Rational, Ring};
use crate::tensor::TensorOperator;

/// Default relative tolerance for float-mode checks.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// One sub-identity of a check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Component {
    pub label: String,
    pub residual: f64,
    pub passed: bool,
    /// Graded against the check tolerance rather than a fixed one.
    #[serde(skip)]
    pub graded: bool,
}

/// Outcome of one identity check.
///
/// In exact mode `residual` is the number of nonzero entries of the
/// difference operator and the tolerance is zero. In float mode it is the
/// largest entry magnitude relative to the size of the terms.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub exact: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub components: Vec<Component>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl CheckResult {
    pub fn failed(name: &str, reason: String) -> Self {
        let mut params = BTreeMap::new();
        params.insert("error".to_string(), reason);
        CheckResult {
            name: name.to_string(),
            params,
            exact: true,
            residual: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            components: Vec::new(),
            elapsed_ms: None,
        }
    }

    /// Re-grades a float-mode result against `tol`; exact results and
    /// components with their own tolerance are left alone.
    pub fn regrade(&mut self, tol: f64) {
        if self.exact {
            return;
        }
        self.tolerance = tol;
        for c in self.components.iter_mut().filter(|c| c.graded) {
            c.passed = c.residual <= tol;
        }
        self.passed = !self.components.is_empty() && self.components.iter().all(|c| c.passed);
    }

    /// One-line summary for terminal output.
    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mode = if self.exact { "exact" } else { "float" };
        format!("[{status}] {} ({mode}, residual {:e}, {} components)", self.name, self.residual, self.components.len())
    }
}

/// Accumulates residual components for one check.
#[derive(Clone, Debug)]
pub struct Recorder {
    name: String,
    exact: bool,
    tolerance: f64,
    params: BTreeMap<String, String>,
    components: Vec<Component>,
    started: Instant,
}

impl Recorder {
    pub fn new<R: Ring>(name: &str) -> Self {
        Recorder {
            name: name.to_string(),
            exact: R::EXACT,
            tolerance: if R::EXACT { 0.0 } else { FLOAT_TOLERANCE },
            params: BTreeMap::new(),
            components: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        if !self.exact {
            self.tolerance = tol;
        }
        self
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn param_q(&mut self, key: &str, value: &Rational) {
        self.param(key, format_rational(value));
    }

    pub fn param_qs(&mut self, key: &str, values: &[Rational]) {
        let v: Vec<String> = values.iter().map(format_rational).collect();
        self.param(key, format!("[{}]", v.join(",")));
    }

    fn push(&mut self, label: String, residual: f64) {
        let passed = if self.exact { residual == 0.0 } else { residual <= self.tolerance };
        self.components.push(Component { label, residual, passed, graded: true });
    }

    /// Records `diff`, expected to vanish; `scale` is the size of the terms
    /// that were subtracted (only used in float mode).
    pub fn operator<R: Ring>(&mut self, label: impl Into<String>, diff: &TensorOperator<R>, scale: f64) {
        let r = if self.exact { diff.nonzero_count() as f64 } else { diff.max_magnitude() / scale.max(1.0) };
        self.push(label.into(), r);
    }

    pub fn matrix<R: Ring>(&mut self, label: impl Into<String>, diff: &Matrix<R>, scale: f64) {
        let r = if self.exact { diff.nonzero_count() as f64 } else { diff.max_magnitude() / scale.max(1.0) };
        self.push(label.into(), r);
    }

    pub fn scalar<R: Ring>(&mut self, label: impl Into<String>, diff: &R, scale: f64) {
        let r = if self.exact {
            if diff.is_zero() {
                0.0
            } else {
                1.0
            }
        } else {
            diff.magnitude() / scale.max(1.0)
        };
        self.push(label.into(), r);
    }

    /// Records a boolean condition (residual 0 or 1).
    pub fn condition(&mut self, label: impl Into<String>, ok: bool) {
        let label = label.into();
        let passed = ok;
        self.components.push(Component { label, residual: if ok { 0.0 } else { 1.0 }, passed, graded: false });
    }

    /// Records a float residual against an explicit tolerance.
    pub fn measured(&mut self, label: impl Into<String>, residual: f64, tol: f64) {
        self.components.push(Component { label: label.into(), residual, passed: residual <= tol, graded: false });
    }

    pub fn finish(self) -> CheckResult {
        let residual = self.components.iter().map(|c| c.residual).fold(0.0, f64::max);
        let passed = !self.components.is_empty() && self.components.iter().all(|c| c.passed);
        CheckResult {
            name: self.name,
            params: self.params,
            exact: self.exact,
            residual,
            tolerance: self.tolerance,
            passed,
            components: self.components,
            elapsed_ms: Some(self.started.elapsed().as_secs_f64() * 1e3),
        }
    }
}
