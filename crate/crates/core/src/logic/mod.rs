//! First-order syntax over the language of ordered groups `<+, -, 0, <>`
//! with rational scalar multiples and registered unary predicates.

mod alpha;
mod nnf;
mod schema;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar, ScalarError};

pub use alpha::{alpha_eq, canonical_bound_names};
pub use nnf::{is_nnf, to_nnf};
pub use schema::{build_bci, build_bci_unchecked, build_dci, build_dci_unchecked, SchemaError};
pub use subst::{fresh_var, substitute};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "variable names are nonempty");
        Var(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// `sum(c_i * v_i) + k` with rational coefficients and a scalar constant.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinearTerm {
    coeffs: BTreeMap<Var, Rational>,
    constant: Scalar,
}

impl LinearTerm {
    pub fn zero() -> Self {
        LinearTerm::default()
    }

    pub fn var(v: impl Into<Var>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v.into(), Rational::one());
        LinearTerm { coeffs, constant: Scalar::zero() }
    }

    pub fn constant(c: impl Into<Scalar>) -> Self {
        LinearTerm { coeffs: BTreeMap::new(), constant: c.into() }
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (Var, Rational)>, constant: Scalar) -> Self {
        let mut t = LinearTerm::constant(constant);
        for (v, c) in coeffs {
            t.add_coeff(v, &c);
        }
        t
    }

    fn add_coeff(&mut self, v: Var, c: &Rational) {
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(v) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c.clone());
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, Rational> {
        &self.coeffs
    }

    pub fn constant_part(&self) -> &Scalar {
        &self.constant
    }

    pub fn coeff(&self, v: &Var) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    pub fn checked_add(&self, other: &LinearTerm) -> Result<LinearTerm, ScalarError> {
        let mut out = self.clone();
        out.constant = self.constant.checked_add(&other.constant)?;
        for (v, c) in &other.coeffs {
            out.add_coeff(v.clone(), c);
        }
        Ok(out)
    }

    /// Panics on constants over different radicands.
    pub fn add(&self, other: &LinearTerm) -> LinearTerm {
        self.checked_add(other).expect("terms over different radicands")
    }

    pub fn sub(&self, other: &LinearTerm) -> LinearTerm {
        self.add(&other.neg())
    }

    pub fn checked_sub(&self, other: &LinearTerm) -> Result<LinearTerm, ScalarError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> LinearTerm {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, k: &Rational) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::zero();
        }
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: self.constant.mul_rational(k),
        }
    }

    pub fn add_scalar(&self, c: &Scalar) -> LinearTerm {
        let mut out = self.clone();
        out.constant = &out.constant + c;
        out
    }

    /// Splits off `v`: returns `(c, rest)` with `self = c*v + rest`.
    pub fn split(&self, v: &Var) -> (Rational, LinearTerm) {
        let mut rest = self.clone();
        let c = rest.coeffs.remove(v).unwrap_or_else(Rational::zero);
        (c, rest)
    }

    /// Replaces `v` by `t`.
    pub fn substitute(&self, v: &Var, t: &LinearTerm) -> LinearTerm {
        let (c, rest) = self.split(v);
        if c.is_zero() {
            return rest;
        }
        rest.add(&t.scale(&c))
    }

    pub fn evaluate(&self, assignment: &BTreeMap<Var, Scalar>) -> Result<Scalar, EvalError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let val = assignment.get(v).ok_or_else(|| EvalError::Unassigned(v.clone()))?;
            acc = acc.checked_add(&val.mul_rational(c))?;
        }
        Ok(acc)
    }

    pub fn radicand(&self) -> Option<u32> {
        self.constant.radicand()
    }
}

impl From<Var> for LinearTerm {
    fn from(v: Var) -> Self {
        LinearTerm::var(v)
    }
}

impl From<Scalar> for LinearTerm {
    fn from(c: Scalar) -> Self {
        LinearTerm::constant(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` has no value")]
    Unassigned(Var),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("formula is not quantifier- and predicate-free")]
    NotQuantifierFree,
}

/// Atomic formulas, all in the form `term ⋈ 0` (or a predicate on a term).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `t < 0`
    Lt(LinearTerm),
    /// `t = 0`
    Eq(LinearTerm),
    Pred(String, LinearTerm),
}

impl Atom {
    pub fn term(&self) -> &LinearTerm {
        match self {
            Atom::Lt(t) | Atom::Eq(t) | Atom::Pred(_, t) => t,
        }
    }

    pub fn map_term(&self, f: impl FnOnce(&LinearTerm) -> LinearTerm) -> Atom {
        match self {
            Atom::Lt(t) => Atom::Lt(f(t)),
            Atom::Eq(t) => Atom::Eq(f(t)),
            Atom::Pred(p, t) => Atom::Pred(p.clone(), f(t)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    /// `s < t`
    pub fn lt(s: impl Into<LinearTerm>, t: impl Into<LinearTerm>) -> Formula {
        Formula::Atom(Atom::Lt(s.into().sub(&t.into())))
    }

    /// `s = t`
    pub fn eq(s: impl Into<LinearTerm>, t: impl Into<LinearTerm>) -> Formula {
        Formula::Atom(Atom::Eq(s.into().sub(&t.into())))
    }

    /// `s <= t`, as `~(t < s)`.
    pub fn le(s: impl Into<LinearTerm>, t: impl Into<LinearTerm>) -> Formula {
        Formula::lt(t, s).not()
    }

    pub fn pred(name: impl Into<String>, t: impl Into<LinearTerm>) -> Formula {
        Formula::Atom(Atom::Pred(name.into(), t.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn forall_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn exists_all(vars: &[Var], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    /// Free variables in order of first occurrence (left to right).
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    pub fn free_var_set(&self) -> BTreeSet<Var> {
        self.free_vars().into_iter().collect()
    }

    pub fn is_free(&self, v: &Var) -> bool {
        self.free_vars().contains(v)
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.term().vars() {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => out.extend(a.term().vars().cloned()),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    pub fn bound_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Exists(v, _) | Formula::Forall(v, _) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(g) => g.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.quantifier_depth(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
                qf = false;
            }
        });
        qf
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(Atom::Pred(p, _)) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Radicands of every constant in the formula.
    pub fn radicands(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.extend(a.term().radicand());
            }
        });
        out
    }

    /// Rewrites every atom, leaving binders and connectives untouched.
    /// The callback is not capture-aware.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.map_atoms(f).not(),
            Formula::And(a, b) => a.map_atoms(f).and(b.map_atoms(f)),
            Formula::Or(a, b) => a.map_atoms(f).or(b.map_atoms(f)),
            Formula::Implies(a, b) => a.map_atoms(f).implies(b.map_atoms(f)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_atoms(f)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.map_atoms(f)),
        }
    }

    /// Truth of a quantifier-free, predicate-free formula.
    pub fn evaluate_qf(&self, assignment: &BTreeMap<Var, Scalar>) -> Result<bool, EvalError> {
        use std::cmp::Ordering;
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(Atom::Lt(t)) => t.evaluate(assignment)?.signum() == Ordering::Less,
            Formula::Atom(Atom::Eq(t)) => t.evaluate(assignment)?.is_zero(),
            Formula::Atom(Atom::Pred(..)) => return Err(EvalError::NotQuantifierFree),
            Formula::Not(g) => !g.evaluate_qf(assignment)?,
            Formula::And(a, b) => a.evaluate_qf(assignment)? && b.evaluate_qf(assignment)?,
            Formula::Or(a, b) => a.evaluate_qf(assignment)? || b.evaluate_qf(assignment)?,
            Formula::Implies(a, b) => !a.evaluate_qf(assignment)? || b.evaluate_qf(assignment)?,
            Formula::Exists(..) | Formula::Forall(..) => return Err(EvalError::NotQuantifierFree),
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_term(self))
    }
}
