//! Executable checks for continuous induction and its consequences:
//! schema instances, completeness audits, definable families, finite
//! subcovers, compactness certificates and uniform continuity.

mod cover;
mod family;
mod report;
mod schemas;
mod ucont;

use std::collections::BTreeSet;
use std::time::Instant;

use crate::logic::{fresh_var, substitute, Formula, LinearTerm, SchemaError, Var};
use crate::qe::QeError;
use crate::scalar::Scalar;

pub use cover::{compactness_certificate, extract_subcover, CompactnessOutcome, ReachStep, SubcoverCertificate};
pub use family::{family_audit, AuditRole, DefinableFamily, FamilyAudit, SentenceCheck};
pub use report::Report;
pub use schemas::{check_bci, check_dci, completeness_audit, lub_sentence, CompletenessReport, DciReport};
pub use ucont::{uniform_continuity_check, UcontReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("degenerate interval: need a < b, got [{0}, {1}]")]
    DegenerateInterval(Scalar, Scalar),
    #[error("bad family: {0}")]
    BadFamily(String),
    #[error("family is not an open cover of the interval")]
    AuditFailed(Box<FamilyAudit>),
    #[error("no progress at reach {reach} (step {step}): the family does not cover past it")]
    InvalidCover { step: usize, reach: Scalar },
    #[error("step cap of {0} exceeded")]
    StepLimit(usize),
    #[error("graph is not a function on the interval")]
    NotAFunction,
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

impl LabError {
    /// Resource exhaustion, as opposed to a wrong or rejected input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, LabError::StepLimit(_) | LabError::Qe(QeError::ResourceLimit { .. }))
    }
}

pub(crate) fn constant(s: &Scalar) -> LinearTerm {
    LinearTerm::constant(s.clone())
}

pub(crate) fn instantiate(f: &Formula, v: &Var, s: &Scalar) -> Formula {
    substitute(f, v, &constant(s))
}

/// A variable named `$base`, `$base'`, ... that does not occur in `avoid`.
pub(crate) fn reserved(base: &str, avoid: &BTreeSet<Var>) -> Var {
    fresh_var(&Var::new(format!("${base}")), avoid)
}

/// `lo <= t & t <= hi`
pub(crate) fn within(t: LinearTerm, lo: &Scalar, hi: &Scalar) -> Formula {
    Formula::le(constant(lo), t.clone()).and(Formula::le(t, constant(hi)))
}

pub(crate) fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}
