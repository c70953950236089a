//! Literals and cubes (conjunctions of literals), the working form of the
//! elimination kernel.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::logic::{Atom, Formula, LinearTerm, Var};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    /// `t < 0`
    Lt,
    /// `t <= 0`
    Le,
    /// `t = 0`
    Eq,
    /// `t != 0`
    Ne,
}

/// `term ⋈ 0`, kept in canonical scaling: the leading coefficient is `±1`
/// for `<` and `<=`, and `+1` for `=` and `!=`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    rel: Rel,
    term: LinearTerm,
}

/// Result of building a literal: ground literals and literals that no
/// rational assignment can satisfy are decided on the spot.
pub(crate) enum Built {
    Const(bool),
    Lit(Literal),
}

impl Literal {
    pub(crate) fn build(rel: Rel, term: LinearTerm) -> Built {
        if term.is_constant() {
            let s = term.constant_part().signum();
            return Built::Const(match rel {
                Rel::Lt => s == Ordering::Less,
                Rel::Le => s != Ordering::Greater,
                Rel::Eq => s == Ordering::Equal,
                Rel::Ne => s != Ordering::Equal,
            });
        }
        // sum(c_i v_i) is rational on rational points, so it never equals
        // a constant with a nonzero irrational part
        if matches!(rel, Rel::Eq | Rel::Ne) && !term.constant_part().is_rational() {
            return Built::Const(rel == Rel::Ne);
        }
        let lead = term.coeffs().values().next().expect("nonconstant").clone();
        let factor = match rel {
            Rel::Lt | Rel::Le => Rational::one() / lead.abs(),
            _ => Rational::one() / lead,
        };
        Built::Lit(Literal { rel, term: term.scale(&factor) })
    }

    /// Canonical literal, or `None` when it is constant.
    pub fn new(rel: Rel, term: LinearTerm) -> Option<Literal> {
        match Literal::build(rel, term) {
            Built::Lit(l) => Some(l),
            Built::Const(_) => None,
        }
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    pub fn term(&self) -> &LinearTerm {
        &self.term
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.term.mentions(v)
    }

    pub fn to_formula(&self) -> Formula {
        match self.rel {
            Rel::Lt => Formula::Atom(Atom::Lt(self.term.clone())),
            Rel::Le => Formula::Atom(Atom::Lt(self.term.neg())).not(),
            Rel::Eq => Formula::Atom(Atom::Eq(self.term.clone())),
            Rel::Ne => Formula::Atom(Atom::Eq(self.term.clone())).not(),
        }
    }

    fn size(&self) -> usize {
        1 + self.term.coeffs().len()
    }
}

/// A satisfiable-looking conjunction of literals: sorted, duplicate-free,
/// and with at most one lower bound, one upper bound and one equation per
/// linear form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cube {
    literals: Vec<Literal>,
}

/// A bound on a linear form: its value and whether it is strict.
type Bound = (Scalar, bool);

#[derive(Default)]
struct Bounds {
    lower: Option<Bound>,
    upper: Option<Bound>,
    equal: Option<Scalar>,
    unequal: Vec<Scalar>,
}

impl Cube {
    /// The empty conjunction, `true`.
    pub fn top() -> Self {
        Cube::default()
    }

    /// Normalizes a conjunction of `(rel, term)` constraints; `None` when a
    /// contradiction is detected.
    pub fn from_constraints(items: impl IntoIterator<Item = (Rel, LinearTerm)>) -> Option<Cube> {
        let mut lits = Vec::new();
        for (rel, t) in items {
            match Literal::build(rel, t) {
                Built::Const(true) => {}
                Built::Const(false) => return None,
                Built::Lit(l) => lits.push(l),
            }
        }
        Cube::normalize(lits)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.literals.iter().any(|l| l.mentions(v))
    }

    pub(crate) fn size(&self) -> usize {
        self.literals.iter().map(Literal::size).sum::<usize>().max(1)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conj(self.literals.iter().map(Literal::to_formula))
    }

    /// Conjunction of two cubes.
    ///
    /// Only the literals sharing a linear form with `other` are merged
    /// again; the rest of `self` is already normal.
    pub(crate) fn meet(&self, other: &Cube) -> Option<Cube> {
        if other.literals.len() > self.literals.len() {
            return other.meet(self);
        }
        let (touched, mut kept): (Vec<&Literal>, Vec<&Literal>) = self
            .literals
            .iter()
            .partition(|l| other.literals.iter().any(|m| same_form(&l.term, &m.term)));
        let mut lits: Vec<Literal> = touched.into_iter().cloned().collect();
        lits.extend(other.literals.iter().cloned());
        let merged = Cube::normalize(lits)?;
        kept.extend(merged.literals.iter());
        let mut out: Vec<Literal> = kept.into_iter().cloned().collect();
        out.sort();
        Some(Cube { literals: out })
    }

    /// Merges literals over the same linear form into interval bounds and
    /// drops subsumed ones.
    pub(crate) fn normalize(lits: Vec<Literal>) -> Option<Cube> {
        // linear form with leading coefficient +1 -> bounds on its value
        let mut groups: BTreeMap<BTreeMap<Var, Rational>, Bounds> = BTreeMap::new();
        for lit in lits {
            let lead_positive = lit.term.coeffs().values().next().is_none_or(|c| c.is_positive());
            let form = if lead_positive { lit.term.clone() } else { lit.term.neg() };
            let k = form.constant_part().clone();
            let key = form.coeffs().clone();
            let b = groups.entry(key).or_default();
            // lit is  (lead_positive ? p + k : -(p + k))  ⋈ 0
            let value = -&k; // the threshold for p
            match (lit.rel, lead_positive) {
                (Rel::Lt | Rel::Le, true) => {
                    let strict = lit.rel == Rel::Lt;
                    if b.upper.as_ref().is_none_or(|(u, s)| value < *u || (value == *u && strict && !s)) {
                        b.upper = Some((value, strict));
                    }
                }
                (Rel::Lt | Rel::Le, false) => {
                    let strict = lit.rel == Rel::Lt;
                    if b.lower.as_ref().is_none_or(|(l, s)| value > *l || (value == *l && strict && !s)) {
                        b.lower = Some((value, strict));
                    }
                }
                (Rel::Eq, _) => match &b.equal {
                    Some(e) if *e != value => return None,
                    _ => b.equal = Some(value),
                },
                (Rel::Ne, _) => {
                    if !b.unequal.contains(&value) {
                        b.unequal.push(value);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (coeffs, mut b) in groups {
            let p = LinearTerm::from_parts(coeffs, Scalar::zero());
            let lit = |rel: Rel, term: LinearTerm| Literal { rel, term };
            if let (Some((l, ls)), Some((u, us))) = (&b.lower, &b.upper) {
                if l > u || (l == u && (*ls || *us)) {
                    return None;
                }
                if l == u {
                    match &b.equal {
                        Some(e) if e != l => return None,
                        _ => b.equal = Some(l.clone()),
                    }
                }
            }
            if let Some(e) = b.equal {
                if b.lower.as_ref().is_some_and(|(l, s)| *l > e || (*l == e && *s))
                    || b.upper.as_ref().is_some_and(|(u, s)| *u < e || (*u == e && *s))
                    || b.unequal.contains(&e)
                {
                    return None;
                }
                out.push(lit(Rel::Eq, p.add_scalar(&-&e)));
                continue;
            }
            let mut unequal = Vec::new();
            for n in b.unequal {
                // a disequality at a closed end makes that end open
                match (&mut b.lower, &mut b.upper) {
                    (Some((l, s)), _) if *l == n => *s = true,
                    (_, Some((u, s))) if *u == n => *s = true,
                    (Some((l, _)), _) if n < *l => {}
                    (_, Some((u, _))) if n > *u => {}
                    _ => unequal.push(n),
                }
            }
            let rel = |strict: bool| if strict { Rel::Lt } else { Rel::Le };
            if let Some((l, s)) = &b.lower {
                out.push(lit(rel(*s), p.neg().add_scalar(l)));
            }
            if let Some((u, s)) = &b.upper {
                out.push(lit(rel(*s), p.add_scalar(&-u)));
            }
            for n in unequal {
                out.push(lit(Rel::Ne, p.add_scalar(&-&n)));
            }
        }
        out.sort();
        out.dedup();
        Some(Cube { literals: out })
    }

    /// `exists v. self` as a disjunction of cubes (empty when
    /// unsatisfiable).
    ///
    /// An equation `c*v + r = 0` is solved and substituted. Otherwise every
    /// lower bound is paired with every upper bound (the order is dense and
    /// has no endpoints), and disequalities on `v` are dropped: a nonempty
    /// interval that is not a single point stays nonempty after removing
    /// finitely many points. The single-point case needs closed bounds on
    /// both sides, and is split off first.
    pub(crate) fn eliminate(&self, v: &Var) -> Vec<Cube> {
        if !self.mentions(v) {
            return vec![self.clone()];
        }
        let with: Vec<&Literal> = self.literals.iter().filter(|l| l.mentions(v)).collect();
        if let Some(eq) = with.iter().find(|l| l.rel == Rel::Eq) {
            let (c, rest) = eq.term.split(v);
            let solved = rest.scale(&(-Rational::one() / c));
            if !solved.constant_part().is_rational() {
                return vec![];
            }
            let items = self
                .literals
                .iter()
                .filter(|l| !std::ptr::eq(*l, *eq))
                .map(|l| (l.rel, l.term.substitute(v, &solved)));
            return Cube::from_constraints(items).into_iter().collect();
        }
        let closed_lower = with.iter().find(|l| l.rel == Rel::Le && l.term.coeff(v).is_negative());
        let closed_upper = with.iter().any(|l| l.rel == Rel::Le && l.term.coeff(v).is_positive());
        let has_ne = with.iter().any(|l| l.rel == Rel::Ne);
        if let (Some(split), true, true) = (closed_lower, closed_upper, has_ne) {
            let rest = || self.literals.iter().filter(|l| !std::ptr::eq(*l, *split)).map(|l| (l.rel, l.term.clone()));
            let open = Cube::from_constraints(rest().chain([(Rel::Lt, split.term.clone())]));
            let pinned = Cube::from_constraints(rest().chain([(Rel::Eq, split.term.clone())]));
            return open.into_iter().chain(pinned).flat_map(|c| c.eliminate(v)).collect();
        }
        let mut lowers = Vec::new();
        let mut uppers = Vec::new();
        for l in with.iter().filter(|l| matches!(l.rel, Rel::Lt | Rel::Le)) {
            let (c, rest) = l.term.split(v);
            let bound = (rest.scale(&(-Rational::one() / &c)), l.rel == Rel::Lt);
            if c.is_positive() {
                uppers.push(bound);
            } else {
                lowers.push(bound);
            }
        }
        let mut items: Vec<(Rel, LinearTerm)> =
            self.literals.iter().filter(|l| !l.mentions(v)).map(|l| (l.rel, l.term.clone())).collect();
        for (lo, ls) in &lowers {
            for (hi, hs) in &uppers {
                items.push((if *ls || *hs { Rel::Lt } else { Rel::Le }, lo.sub(hi)));
            }
        }
        Cube::from_constraints(items).into_iter().collect()
    }

    /// Drops every literal implied by the remaining ones.
    pub(crate) fn reduce(&self) -> Cube {
        let mut lits = self.literals.clone();
        let mut i = 0;
        while i < lits.len() && lits.len() > 1 {
            let l = &lits[i];
            let negated = match l.rel {
                Rel::Lt => (Rel::Le, l.term.neg()),
                Rel::Le => (Rel::Lt, l.term.neg()),
                Rel::Eq => (Rel::Ne, l.term.clone()),
                Rel::Ne => (Rel::Eq, l.term.clone()),
            };
            let others = lits.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, m)| (m.rel, m.term.clone()));
            let implied = Cube::from_constraints(others.chain([negated])).is_none_or(|c| !c.is_satisfiable());
            if implied {
                lits.remove(i);
            } else {
                i += 1;
            }
        }
        Cube { literals: lits }
    }

    /// Exact satisfiability over the rationals, by eliminating every
    /// variable.
    pub fn is_satisfiable(&self) -> bool {
        match self.literals.iter().flat_map(|l| l.term.vars()).next() {
            None => true,
            Some(v) => self.eliminate(v).iter().any(Cube::is_satisfiable),
        }
    }
}


/// The two terms differ only in their constant and an overall sign.
fn same_form(a: &LinearTerm, b: &LinearTerm) -> bool {
    let (ca, cb) = (a.coeffs(), b.coeffs());
    if ca.len() != cb.len() || !ca.keys().eq(cb.keys()) {
        return false;
    }
    ca.values().eq(cb.values()) || ca.values().zip(cb.values()).all(|(x, y)| *x == -y)
}
