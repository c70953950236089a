//! Quantifier elimination for divisible ordered abelian groups over Q with
//! constants from `Q(sqrt(d))`.
//!
//! Elimination runs innermost-first: each quantifier body is already
//! quantifier-free, is put into disjunctive normal form, and the variable is
//! eliminated cube by cube (dense-order Fourier-Motzkin). `forall` goes
//! through `~exists~`. Predicates are macro-expanded by the structure before
//! elimination starts.

mod cube;
mod vs;

use std::collections::{BTreeMap, HashMap};

use crate::logic::{Atom, EvalError, Formula, LinearTerm, Var};
use crate::scalar::Scalar;
use crate::sets::DefinableSet1D;
use crate::structure::{StructureError, StructureSpec};

pub use cube::{Cube, Literal, Rel};
use cube::Built;

/// Default blow-up cap, in formula nodes.
pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: DEFAULT_MAX_NODES, max_steps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QeError {
    #[error("predicate `{0}` reached the elimination kernel unexpanded")]
    PredicateLeak(String),
    #[error("formula grew to {size} nodes, over the cap of {cap}")]
    ResourceLimit { size: usize, cap: usize },
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<Var>),
    #[error("expected exactly one free variable, found {0:?}")]
    NotOneVariable(Vec<Var>),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A formula with no quantifiers and no predicate atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QfFormula(Formula);

impl QfFormula {
    /// Wraps `f` if it is quantifier- and predicate-free.
    pub fn new(f: Formula) -> Option<QfFormula> {
        (f.is_quantifier_free() && f.predicates().is_empty()).then_some(QfFormula(f))
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }

    pub fn is_true(&self) -> bool {
        self.0 == Formula::True
    }

    pub fn is_false(&self) -> bool {
        self.0 == Formula::False
    }
}

impl std::fmt::Display for QfFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Quantifier-free working tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Qf {
    True,
    False,
    Lit(Literal),
    And(Vec<Qf>),
    Or(Vec<Qf>),
}

impl Qf {
    fn lit(rel: Rel, t: LinearTerm) -> Qf {
        match Literal::build(rel, t) {
            Built::Const(true) => Qf::True,
            Built::Const(false) => Qf::False,
            Built::Lit(l) => Qf::Lit(l),
        }
    }

    fn and(items: Vec<Qf>) -> Qf {
        let mut out = Vec::new();
        for q in items {
            match q {
                Qf::True => {}
                Qf::False => return Qf::False,
                Qf::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Qf::True,
            1 => out.pop().expect("one item"),
            _ => Qf::And(out),
        }
    }

    fn or(items: Vec<Qf>) -> Qf {
        let mut out = Vec::new();
        for q in items {
            match q {
                Qf::False => {}
                Qf::True => return Qf::True,
                Qf::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => Qf::False,
            1 => out.pop().expect("one item"),
            _ => Qf::Or(out),
        }
    }

    fn negate(&self) -> Qf {
        match self {
            Qf::True => Qf::False,
            Qf::False => Qf::True,
            Qf::Lit(l) => match l.rel() {
                Rel::Lt => Qf::lit(Rel::Le, l.term().neg()),
                Rel::Le => Qf::lit(Rel::Lt, l.term().neg()),
                Rel::Eq => Qf::lit(Rel::Ne, l.term().clone()),
                Rel::Ne => Qf::lit(Rel::Eq, l.term().clone()),
            },
            // not(A & B & C) = not A | (A & not B) | (A & B & not C): the
            // disjuncts are disjoint, which keeps later products small
            Qf::And(items) if items.iter().all(|q| matches!(q, Qf::Lit(_))) => Qf::or(
                (0..items.len())
                    .map(|i| {
                        let mut conj = items[..i].to_vec();
                        conj.push(items[i].negate());
                        Qf::and(conj)
                    })
                    .collect(),
            ),
            Qf::And(items) => Qf::or(items.iter().map(Qf::negate).collect()),
            Qf::Or(items) => Qf::and(items.iter().map(Qf::negate).collect()),
        }
    }

    fn mentions(&self, v: &Var) -> bool {
        match self {
            Qf::True | Qf::False => false,
            Qf::Lit(l) => l.mentions(v),
            Qf::And(items) | Qf::Or(items) => items.iter().any(|q| q.mentions(v)),
        }
    }

    fn size(&self) -> usize {
        match self {
            Qf::True | Qf::False | Qf::Lit(_) => 1,
            Qf::And(items) | Qf::Or(items) => 1 + items.iter().map(Qf::size).sum::<usize>(),
        }
    }

    fn from_cubes(cubes: Vec<Cube>) -> Qf {
        Qf::or(
            cubes
                .into_iter()
                .map(|c| Qf::and(c.literals().iter().cloned().map(Qf::Lit).collect()))
                .collect(),
        )
    }

    pub(crate) fn to_formula(&self) -> Formula {
        match self {
            Qf::True => Formula::True,
            Qf::False => Formula::False,
            Qf::Lit(l) => l.to_formula(),
            Qf::And(items) => Formula::conj(items.iter().map(Qf::to_formula)),
            Qf::Or(items) => Formula::disj(items.iter().map(Qf::to_formula)),
        }
    }
}

/// Bodies whose disjunctive normal form may exceed this many cubes are
/// eliminated by virtual substitution instead. The product DNF with
/// satisfiability pruning stays far smaller than the estimate in practice,
/// and beats substitution whenever it is feasible at all, so the threshold
/// only catches bodies whose estimate overflows.
const DNF_LIMIT: f64 = f64::MAX;

/// Upper bound on the number of cubes in the DNF of `q`.
fn dnf_estimate(q: &Qf) -> f64 {
    match q {
        Qf::True | Qf::Lit(_) => 1.0,
        Qf::False => 0.0,
        Qf::Or(items) => items.iter().map(dnf_estimate).sum(),
        Qf::And(items) => items.iter().map(dnf_estimate).product(),
    }
}

impl From<bool> for Qf {
    fn from(b: bool) -> Qf {
        if b {
            Qf::True
        } else {
            Qf::False
        }
    }
}

/// Drops duplicate and subsumed cubes. Inputs are assumed satisfiable.
fn simplify_dnf(mut cubes: Vec<Cube>) -> Vec<Cube> {
    cubes.sort_by_key(|c| c.literals().len());
    cubes.dedup();
    // literal ids plus a 64-bit signature make most subset tests O(1)
    let mut ids: HashMap<&Literal, u32> = HashMap::new();
    let keyed: Vec<(u64, Vec<u32>)> = cubes
        .iter()
        .map(|c| {
            let mut v: Vec<u32> = c
                .literals()
                .iter()
                .map(|l| {
                    let n = ids.len() as u32;
                    *ids.entry(l).or_insert(n)
                })
                .collect();
            v.sort_unstable();
            (v.iter().fold(0u64, |m, id| m | 1 << (id % 64)), v)
        })
        .collect();
    let mut kept: Vec<usize> = Vec::with_capacity(cubes.len());
    for (i, (mask, lits)) in keyed.iter().enumerate() {
        let subsumed = kept.iter().any(|&k| {
            let (kmask, klits) = &keyed[k];
            kmask & !mask == 0 && klits.len() <= lits.len() && klits.iter().all(|id| lits.binary_search(id).is_ok())
        });
        if !subsumed {
            kept.push(i);
        }
    }
    let mut out: Vec<Cube> = kept.into_iter().map(|i| cubes[i].clone()).collect();
    out.sort();
    out
}

/// Quantifier elimination bound to a structure.
#[derive(Debug, Clone, Copy)]
pub struct QeEngine<'s> {
    structure: &'s StructureSpec,
    limits: Limits,
}

impl<'s> QeEngine<'s> {
    pub fn new(structure: &'s StructureSpec) -> Self {
        QeEngine { structure, limits: Limits::default() }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn structure(&self) -> &'s StructureSpec {
        self.structure
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    fn check_size(&self, size: usize) -> Result<(), QeError> {
        if size > self.limits.max_nodes {
            return Err(QeError::ResourceLimit { size, cap: self.limits.max_nodes });
        }
        Ok(())
    }

    pub(crate) fn qf(&self, f: &Formula) -> Result<Qf, QeError> {
        self.structure.check_formula(f)?;
        let expanded = self.structure.expand_all(f)?;
        self.check_size(expanded.size())?;
        self.eliminate(&expanded)
    }

    fn eliminate(&self, f: &Formula) -> Result<Qf, QeError> {
        Ok(match f {
            Formula::True => Qf::True,
            Formula::False => Qf::False,
            Formula::Atom(Atom::Lt(t)) => Qf::lit(Rel::Lt, t.clone()),
            Formula::Atom(Atom::Eq(t)) => Qf::lit(Rel::Eq, t.clone()),
            Formula::Atom(Atom::Pred(p, _)) => return Err(QeError::PredicateLeak(p.clone())),
            Formula::Not(g) => self.eliminate(g)?.negate(),
            Formula::And(a, b) => Qf::and(vec![self.eliminate(a)?, self.eliminate(b)?]),
            Formula::Or(a, b) => Qf::or(vec![self.eliminate(a)?, self.eliminate(b)?]),
            Formula::Implies(a, b) => Qf::or(vec![self.eliminate(a)?.negate(), self.eliminate(b)?]),
            Formula::Exists(v, g) => {
                let body = self.eliminate(g)?;
                self.exists(v, body)?
            }
            Formula::Forall(v, g) => {
                let body = self.eliminate(g)?.negate();
                self.exists(v, body)?.negate()
            }
        })
    }

    fn exists(&self, v: &Var, body: Qf) -> Result<Qf, QeError> {
        let out = match body {
            q if !q.mentions(v) => q,
            Qf::Or(items) => Qf::or(items.into_iter().map(|q| self.exists(v, q)).collect::<Result<_, _>>()?),
            Qf::And(items) => {
                let (with, mut without): (Vec<Qf>, Vec<Qf>) = items.into_iter().partition(|q| q.mentions(v));
                without.push(self.exists_core(v, Qf::and(with))?);
                Qf::and(without)
            }
            q => self.exists_core(v, q)?,
        };
        self.check_size(out.size())?;
        Ok(out)
    }

    fn exists_core(&self, v: &Var, body: Qf) -> Result<Qf, QeError> {
        let estimate = dnf_estimate(&body);
        if estimate.is_nan() || estimate > DNF_LIMIT {
            log::trace!("exists {v}: virtual substitution on a body of size {}", body.size());
            return Ok(vs::exists(v, &body));
        }
        let cubes = self.dnf(&body)?;
        let eliminated: Vec<Cube> = cubes.iter().flat_map(|c| c.eliminate(v)).map(|c| c.reduce()).collect();
        let out = simplify_dnf(eliminated);
        log::trace!("exists {v}: body size {}, {} cubes in, {} out", body.size(), cubes.len(), out.len());
        Ok(Qf::from_cubes(out))
    }

    fn dnf(&self, q: &Qf) -> Result<Vec<Cube>, QeError> {
        Ok(match q {
            Qf::True => vec![Cube::top()],
            Qf::False => vec![],
            Qf::Lit(l) => vec![Cube::normalize(vec![l.clone()]).expect("single literal")],
            Qf::Or(items) => {
                let mut out = Vec::new();
                for item in items {
                    out.extend(self.dnf(item)?);
                }
                simplify_dnf(out)
            }
            Qf::And(items) => {
                let mut parts = items.iter().map(|i| self.dnf(i)).collect::<Result<Vec<_>, _>>()?;
                // narrow factors first: they prune the products early
                parts.sort_by_key(Vec::len);
                let mut acc = vec![Cube::top()];
                for part in &parts {
                    let mut next = Vec::new();
                    let mut size = 0;
                    for a in &acc {
                        let meets: Vec<Cube> = part.iter().filter_map(|b| a.meet(b)).collect();
                        if meets.contains(a) {
                            // a already implies the factor
                            size += a.size();
                            next.push(a.clone());
                            continue;
                        }
                        for c in meets {
                            if c.is_satisfiable() {
                                size += c.size();
                                next.push(c);
                            }
                        }
                        self.check_size(size)?;
                    }
                    acc = simplify_dnf(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        })
    }

    /// Equivalent quantifier-free formula over the bound structure.
    pub fn eliminate_all(&self, f: &Formula) -> Result<QfFormula, QeError> {
        Ok(QfFormula(self.qf(f)?.to_formula()))
    }

    /// Truth value of a sentence.
    pub fn decide(&self, sentence: &Formula) -> Result<bool, QeError> {
        let free = sentence.free_vars();
        if !free.is_empty() {
            return Err(QeError::NotASentence(free));
        }
        match self.qf(sentence)? {
            Qf::True => Ok(true),
            Qf::False => Ok(false),
            other => unreachable!("ground formula did not collapse: {other:?}"),
        }
    }

    /// A domain element satisfying a one-variable formula, if any.
    pub fn sample_point(&self, f: &Formula) -> Result<Option<Scalar>, QeError> {
        Ok(crate::sets::normalize_with(f, self)?.sample())
    }

    /// The definable set of a one-variable formula.
    pub fn normalize(&self, f: &Formula) -> Result<DefinableSet1D, QeError> {
        crate::sets::normalize_with(f, self)
    }
}

/// `exists v. c` for a single cube.
pub fn eliminate_exists(v: &Var, c: &Cube) -> QfFormula {
    QfFormula(Formula::disj(c.eliminate(v).iter().map(Cube::to_formula)))
}

pub fn eliminate_all(f: &Formula, s: &StructureSpec) -> Result<QfFormula, QeError> {
    QeEngine::new(s).eliminate_all(f)
}

pub fn decide(sentence: &Formula, s: &StructureSpec) -> Result<bool, QeError> {
    QeEngine::new(s).decide(sentence)
}

pub fn sample_point(f: &Formula, s: &StructureSpec) -> Result<Option<Scalar>, QeError> {
    QeEngine::new(s).sample_point(f)
}

/// Truth of a quantifier-free formula under an assignment. The assignment
/// must cover every free variable; values are expected to be domain
/// elements (rationals).
pub fn evaluate(f: &QfFormula, assignment: &BTreeMap<Var, Scalar>) -> Result<bool, EvalError> {
    f.0.evaluate_qf(assignment)
}
