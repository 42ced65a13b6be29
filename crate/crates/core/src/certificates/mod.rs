//! Exact, re-checkable reports for the impossibility constructions, plus a
//! finite-grid payment polytope solver.
//!
//! A [`CertificateReport`] lists inputs, the exact constants computed along
//! the way, and the inequalities the construction needs. `verified` is set
//! only when every required inequality holds and no shape check failed.
//! `claims` are evaluated and reported but not required.

mod lower_bounds;
mod polytope;
mod two_machine;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::properties::Relation;
use crate::rational::{Interval, Rational};
use crate::workcurve::LogIntegral;

pub use lower_bounds::{default_epsilon, theorem1_harness, theorem5_certificate, theorem7_certificate, Theorem1Params};
pub use polytope::{
    build_payment_polytope, payment_polytope_feasible, verify_feasibility, FeasibilityResult, PaymentPolytope,
};
pub use two_machine::{lemma6_g, prop12_verify};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub label: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.relation.holds(&self.lhs, &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constant {
    Exact(Rational),
    /// A value with logarithm terms, enclosed by a rational interval.
    Log { value: LogIntegral, enclosure: Interval },
    Flag(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub name: String,
    pub inputs: Vec<(String, String)>,
    pub constants: Vec<(String, Constant)>,
    pub inequalities: Vec<Inequality>,
    pub claims: Vec<Inequality>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub verified: bool,
}

impl CertificateReport {
    pub(crate) fn new(name: &str) -> Self {
        CertificateReport {
            name: name.to_string(),
            inputs: Vec::new(),
            constants: Vec::new(),
            inequalities: Vec::new(),
            claims: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
            verified: false,
        }
    }

    pub(crate) fn input(&mut self, key: impl Into<String>, value: impl ToString) {
        self.inputs.push((key.into(), value.to_string()));
    }

    pub(crate) fn exact(&mut self, key: impl Into<String>, value: Rational) {
        self.constants.push((key.into(), Constant::Exact(value)));
    }

    pub(crate) fn flag(&mut self, key: impl Into<String>, value: bool) {
        self.constants.push((key.into(), Constant::Flag(value)));
    }

    pub(crate) fn require(&mut self, label: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) {
        self.inequalities.push(Inequality { label: label.into(), lhs, relation, rhs });
    }

    pub(crate) fn claim(&mut self, label: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) {
        self.claims.push(Inequality { label: label.into(), lhs, relation, rhs });
    }

    pub(crate) fn fail(&mut self, why: impl Into<String>) {
        self.failures.push(why.into());
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub(crate) fn finish(mut self) -> Self {
        self.verified = self.recheck();
        self
    }

    /// Re-evaluates every required inequality.
    pub fn recheck(&self) -> bool {
        self.failures.is_empty() && self.inequalities.iter().all(Inequality::holds)
    }

    pub fn constant(&self, key: &str) -> Option<&Constant> {
        self.constants.iter().find(|(k, _)| k == key).map(|(_, c)| c)
    }

    /// The exact constant named `key`.
    pub fn exact_constant(&self, key: &str) -> Option<&Rational> {
        match self.constant(key)? {
            Constant::Exact(r) => Some(r),
            _ => None,
        }
    }
}
