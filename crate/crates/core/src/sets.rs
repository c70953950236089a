//! One-variable definable sets in canonical form: finite sorted lists of
//! points and open intervals.
//!
//! Sets are subsets of the domain (always Q here); endpoints may be
//! irrational. An irrational point is never an element, so the canonical
//! form merges `(l, r) u (r, h)` into `(l, h)` when `r` is irrational. This
//! keeps the representation unique: equal sets have equal component lists.

use std::fmt;

use serde::Serialize;

use crate::logic::{Formula, Var};
use crate::qe::{QeEngine, QeError, Qf, Rel};
use crate::scalar::{Rational, Scalar};
use crate::structure::StructureSpec;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    NegInf,
    Finite(Scalar),
    PosInf,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Endpoint::Finite(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::Finite(s) => s.fmt(f),
            Endpoint::PosInf => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Component {
    Point(Scalar),
    Open(Endpoint, Endpoint),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Point(p) => write!(f, "{{{p}}}"),
            Component::Open(lo, hi) => write!(f, "({lo},{hi})"),
        }
    }
}

/// A cell of a decomposition of the line by finitely many boundary points.
#[derive(Debug, Clone)]
enum Cell {
    Point(Scalar),
    Open(Endpoint, Endpoint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DefinableSet1D {
    components: Vec<Component>,
}

impl DefinableSet1D {
    pub fn empty() -> Self {
        DefinableSet1D { components: Vec::new() }
    }

    pub fn full() -> Self {
        DefinableSet1D { components: vec![Component::Open(Endpoint::NegInf, Endpoint::PosInf)] }
    }

    /// `{p}`; empty when `p` is irrational.
    pub fn point(p: Scalar) -> Self {
        if p.is_rational() {
            DefinableSet1D { components: vec![Component::Point(p)] }
        } else {
            DefinableSet1D::empty()
        }
    }

    /// `(lo, hi)`; empty unless `lo < hi`.
    pub fn open(lo: Endpoint, hi: Endpoint) -> Self {
        if lo < hi {
            DefinableSet1D::empty().union(&DefinableSet1D { components: vec![Component::Open(lo, hi)] })
        } else {
            DefinableSet1D::empty()
        }
    }

    pub fn below(h: Scalar) -> Self {
        DefinableSet1D::open(Endpoint::NegInf, Endpoint::Finite(h))
    }

    pub fn above(l: Scalar) -> Self {
        DefinableSet1D::open(Endpoint::Finite(l), Endpoint::PosInf)
    }

    /// `[lo, hi]`, represented as point, open interval, point.
    pub fn closed(lo: Scalar, hi: Scalar) -> Self {
        DefinableSet1D::open(Endpoint::Finite(lo.clone()), Endpoint::Finite(hi.clone()))
            .union(&DefinableSet1D::point(lo))
            .union(&DefinableSet1D::point(hi))
    }

    /// Builds the canonical form of an arbitrary union of components.
    pub fn from_components(items: impl IntoIterator<Item = Component>) -> Self {
        let raw = DefinableSet1D { components: items.into_iter().collect() };
        raw.combine(&DefinableSet1D::empty(), |a, _| a)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == DefinableSet1D::full()
    }

    /// Membership of a domain element.
    pub fn contains(&self, x: &Scalar) -> bool {
        x.is_rational() && self.components.iter().any(|c| component_contains(c, x))
    }

    /// The set as a finite list of points, if it is one.
    pub fn as_points(&self) -> Option<Vec<Scalar>> {
        self.components
            .iter()
            .map(|c| match c {
                Component::Point(p) => Some(p.clone()),
                Component::Open(..) => None,
            })
            .collect()
    }

    fn boundaries(&self, out: &mut Vec<Scalar>) {
        for c in &self.components {
            match c {
                Component::Point(p) => out.push(p.clone()),
                Component::Open(lo, hi) => {
                    out.extend(lo.finite().cloned());
                    out.extend(hi.finite().cloned());
                }
            }
        }
    }

    fn contains_cell(&self, cell: &Cell) -> bool {
        match cell {
            Cell::Point(p) => self.components.iter().any(|c| component_contains(c, p)),
            Cell::Open(l, h) => self.components.iter().any(|c| match c {
                Component::Open(lo, hi) => lo <= l && h <= hi,
                Component::Point(_) => false,
            }),
        }
    }

    /// Pointwise boolean combination over the common cell decomposition.
    fn combine(&self, other: &DefinableSet1D, op: impl Fn(bool, bool) -> bool) -> DefinableSet1D {
        let cells = decompose(&[self, other]);
        let marks: Vec<bool> = cells.iter().map(|c| op(self.contains_cell(c), other.contains_cell(c))).collect();
        assemble(&cells, marks)
    }

    pub fn union(&self, other: &DefinableSet1D) -> DefinableSet1D {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &DefinableSet1D) -> DefinableSet1D {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &DefinableSet1D) -> DefinableSet1D {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> DefinableSet1D {
        self.combine(&DefinableSet1D::empty(), |a, _| !a)
    }

    pub fn closure(&self) -> DefinableSet1D {
        let cells = decompose(&[self]);
        let inside: Vec<bool> = cells.iter().map(|c| self.contains_cell(c)).collect();
        let marks = (0..cells.len())
            .map(|i| match cells[i] {
                Cell::Point(_) => inside[i] || inside[i - 1] || inside[i + 1],
                Cell::Open(..) => inside[i],
            })
            .collect();
        assemble(&cells, marks)
    }

    pub fn interior(&self) -> DefinableSet1D {
        let cells = decompose(&[self]);
        let inside: Vec<bool> = cells.iter().map(|c| self.contains_cell(c)).collect();
        let marks = (0..cells.len())
            .map(|i| match cells[i] {
                Cell::Point(_) => inside[i] && inside[i - 1] && inside[i + 1],
                Cell::Open(..) => inside[i],
            })
            .collect();
        assemble(&cells, marks)
    }

    pub fn is_subset(&self, other: &DefinableSet1D) -> bool {
        self.difference(other).is_empty()
    }

    /// Supremum as an endpoint (`None` for the empty set).
    pub fn upper(&self) -> Option<Endpoint> {
        self.components.last().map(|c| match c {
            Component::Point(p) => Endpoint::Finite(p.clone()),
            Component::Open(_, hi) => hi.clone(),
        })
    }

    /// Infimum as an endpoint (`None` for the empty set).
    pub fn infimum(&self) -> Option<Endpoint> {
        self.components.first().map(|c| match c {
            Component::Point(p) => Endpoint::Finite(p.clone()),
            Component::Open(lo, _) => lo.clone(),
        })
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.infimum(), Some(Endpoint::NegInf)) && !matches!(self.upper(), Some(Endpoint::PosInf))
    }

    pub fn is_discrete(&self) -> bool {
        self.components.iter().all(|c| matches!(c, Component::Point(_)))
    }

    pub fn is_closed(&self) -> bool {
        self.closure() == *self
    }

    pub fn is_pseudo_finite(&self) -> PseudoFiniteReport {
        let discrete = self.is_discrete();
        let closed = self.is_closed();
        let bounded = self.is_bounded();
        PseudoFiniteReport { discrete, closed, bounded, verdict: discrete && closed && bounded }
    }

    /// Some element, chosen deterministically from the leftmost component.
    pub fn sample(&self) -> Option<Scalar> {
        let one = Scalar::one();
        Some(match self.components.first()? {
            Component::Point(p) => p.clone(),
            Component::Open(Endpoint::Finite(l), Endpoint::Finite(h)) => match l.midpoint(h) {
                Ok(m) if m.is_rational() => m,
                _ => Scalar::Rat(l.rational_between(h).expect("same radicand")),
            },
            Component::Open(Endpoint::NegInf, Endpoint::Finite(h)) => {
                if h.is_rational() {
                    h.checked_sub(&one).expect("rational")
                } else {
                    Scalar::Rat(Rational::from_integer(h.floor()))
                }
            }
            Component::Open(Endpoint::Finite(l), Endpoint::PosInf) => {
                if l.is_rational() {
                    l.checked_add(&one).expect("rational")
                } else {
                    Scalar::Rat(Rational::from_integer(l.floor() + 1))
                }
            }
            Component::Open(..) => Scalar::zero(),
        })
    }

    /// The right end of the maximal run `[r, e)` inside the set, for a
    /// point `r` of the set.
    pub fn extent_from(&self, r: &Scalar) -> Option<Endpoint> {
        if !self.contains(r) {
            return None;
        }
        let tail = DefinableSet1D::above(r.clone());
        let gaps = self.complement().intersect(&tail);
        Some(gaps.infimum().unwrap_or(Endpoint::PosInf))
    }
}

fn component_contains(c: &Component, x: &Scalar) -> bool {
    match c {
        Component::Point(p) => p == x,
        Component::Open(lo, hi) => {
            let e = Endpoint::Finite(x.clone());
            *lo < e && e < *hi
        }
    }
}

/// Cells `(-inf,p0), {p0}, (p0,p1), ..., {pn}, (pn,inf)` for the union of all
/// boundary points of the inputs.
fn decompose(sets: &[&DefinableSet1D]) -> Vec<Cell> {
    let mut points = Vec::new();
    for s in sets {
        s.boundaries(&mut points);
    }
    points.sort();
    points.dedup();
    let mut cells = Vec::with_capacity(2 * points.len() + 1);
    let mut left = Endpoint::NegInf;
    for p in points {
        let right = Endpoint::Finite(p.clone());
        cells.push(Cell::Open(left, right.clone()));
        cells.push(Cell::Point(p));
        left = right;
    }
    cells.push(Cell::Open(left, Endpoint::PosInf));
    cells
}

/// Canonical component list from marked cells. Irrational point cells are
/// not elements; they are absorbed when both neighbours are marked.
fn assemble(cells: &[Cell], mut marks: Vec<bool>) -> DefinableSet1D {
    for i in 0..cells.len() {
        if let Cell::Point(p) = &cells[i] {
            if !p.is_rational() {
                marks[i] = marks[i - 1] && marks[i + 1];
            }
        }
    }
    let mut components = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        if !marks[i] {
            i += 1;
            continue;
        }
        match &cells[i] {
            Cell::Point(p) => {
                components.push(Component::Point(p.clone()));
                i += 1;
            }
            Cell::Open(lo, hi) => {
                // extend across marked point cells followed by marked open cells
                let mut hi = hi.clone();
                let mut j = i + 1;
                while j + 1 < cells.len() && marks[j] && marks[j + 1] {
                    if let Cell::Open(_, h) = &cells[j + 1] {
                        hi = h.clone();
                    }
                    j += 2;
                }
                components.push(Component::Open(lo.clone(), hi));
                i = j;
            }
        }
    }
    DefinableSet1D { components }
}

impl fmt::Display for DefinableSet1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        if self.is_full() {
            return f.write_str("(-inf, inf)");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            c.fmt(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PseudoFiniteReport {
    pub discrete: bool,
    pub closed: bool,
    pub bounded: bool,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutVerdict {
    NotACut,
    ProperCutWithLub(Scalar),
    /// Proper cut whose boundary lies outside the domain.
    Gap(Scalar),
    WholeGroup,
}

impl CutVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            CutVerdict::NotACut => "not_a_cut",
            CutVerdict::ProperCutWithLub(_) => "proper_cut_with_lub",
            CutVerdict::Gap(_) => "gap",
            CutVerdict::WholeGroup => "whole_group",
        }
    }

    pub fn is_gap(&self) -> bool {
        matches!(self, CutVerdict::Gap(_))
    }
}

impl fmt::Display for CutVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutVerdict::ProperCutWithLub(s) => write!(f, "proper_cut_with_lub({s})"),
            other => f.write_str(other.label()),
        }
    }
}

pub fn cut_analysis(d: &DefinableSet1D, s: &StructureSpec) -> CutVerdict {
    if d.is_full() {
        return CutVerdict::WholeGroup;
    }
    let h = match d.components() {
        [Component::Open(Endpoint::NegInf, Endpoint::Finite(h))] => h,
        [Component::Open(Endpoint::NegInf, Endpoint::Finite(h)), Component::Point(p)] if p == h => h,
        _ => return CutVerdict::NotACut,
    };
    if s.in_domain(h) {
        CutVerdict::ProperCutWithLub(h.clone())
    } else {
        CutVerdict::Gap(h.clone())
    }
}

/// `{x : f}` for the single free variable of `f`.
pub fn normalize(f: &Formula, s: &StructureSpec) -> Result<DefinableSet1D, QeError> {
    normalize_with(f, &QeEngine::new(s))
}

pub fn normalize_with(f: &Formula, engine: &QeEngine<'_>) -> Result<DefinableSet1D, QeError> {
    set_of(&the_variable(f)?, f, engine)
}

/// The single free variable of `f`. A formula whose variable cancelled
/// (`x < x`) has none left; any name then defines the same set.
pub fn the_variable(f: &Formula) -> Result<Var, QeError> {
    let free = f.free_vars();
    match free.as_slice() {
        [x] => Ok(x.clone()),
        [] => Ok(f.all_vars().into_iter().next().unwrap_or_else(|| Var::new("x"))),
        _ => Err(QeError::NotOneVariable(free)),
    }
}

/// `{v : f}`, where `f` may mention no free variable other than `v`.
pub fn set_of(v: &Var, f: &Formula, engine: &QeEngine<'_>) -> Result<DefinableSet1D, QeError> {
    let free = f.free_vars();
    if free.iter().any(|w| w != v) {
        return Err(QeError::NotOneVariable(free));
    }
    qf_set(v, &engine.qf(f)?)
}

fn qf_set(v: &Var, q: &Qf) -> Result<DefinableSet1D, QeError> {
    Ok(match q {
        Qf::True => DefinableSet1D::full(),
        Qf::False => DefinableSet1D::empty(),
        Qf::And(items) => {
            let mut acc = DefinableSet1D::full();
            for item in items {
                acc = acc.intersect(&qf_set(v, item)?);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Qf::Or(items) => {
            let mut acc = DefinableSet1D::empty();
            for item in items {
                acc = acc.union(&qf_set(v, item)?);
            }
            acc
        }
        Qf::Lit(l) => {
            let (c, rest) = l.term().split(v);
            if !rest.is_constant() {
                return Err(QeError::NotOneVariable(rest.vars().cloned().collect()));
            }
            // c*v + k ~ 0  <=>  v ~' -k/c
            let root = rest.constant_part().mul_rational(&(-c.recip()));
            let positive = c > Rational::from_integer(0.into());
            match (l.rel(), positive) {
                (Rel::Lt, true) => DefinableSet1D::below(root),
                (Rel::Lt, false) => DefinableSet1D::above(root),
                (Rel::Le, true) => DefinableSet1D::below(root.clone()).union(&DefinableSet1D::point(root)),
                (Rel::Le, false) => DefinableSet1D::above(root.clone()).union(&DefinableSet1D::point(root)),
                (Rel::Eq, _) => DefinableSet1D::point(root),
                (Rel::Ne, _) => DefinableSet1D::point(root).complement(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn q() -> StructureSpec {
        StructureSpec::rationals()
    }

    fn n(f: &str, s: &StructureSpec) -> DefinableSet1D {
        normalize(&parse_formula(f).unwrap(), s).unwrap()
    }

    fn sqrt2() -> Scalar {
        Scalar::sqrt(2).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(n("(0 < x & x < 1) | x = 2", &q()).to_string(), "(0,1) u {2}");
        assert_eq!(n("~(x = 0)", &q()).to_string(), "(-inf,0) u (0,inf)");
        let q3 = StructureSpec::q_n(3).unwrap();
        assert_eq!(n("D(x)", &q3).to_string(), "{0} u {1} u {2} u {3}");
        assert_eq!(n("x < x", &q()).to_string(), "{}");
        assert_eq!(n("x = x", &q()).to_string(), "(-inf, inf)");
        assert_eq!(n("exists y (x < y & y < 3)", &q()).to_string(), "(-inf,3)");
        assert_eq!(n("0 <= x & x <= 1", &q()).to_string(), "{0} u (0,1) u {1}");
    }

    #[test]
    fn topology() {
        let open01 = DefinableSet1D::open(Endpoint::Finite(0.into()), Endpoint::Finite(1.into()));
        assert_eq!(open01.closure(), DefinableSet1D::closed(0.into(), 1.into()));
        assert!(DefinableSet1D::point(2.into()).interior().is_empty());
        assert!(DefinableSet1D::empty().complement().is_full());
        assert_eq!(DefinableSet1D::closed(0.into(), 1.into()).interior(), open01);
    }

    #[test]
    fn irrational_boundaries_merge() {
        let a = DefinableSet1D::open(Endpoint::Finite(0.into()), Endpoint::Finite(sqrt2()));
        let b = DefinableSet1D::open(Endpoint::Finite(sqrt2()), Endpoint::Finite(3.into()));
        assert_eq!(a.union(&b), DefinableSet1D::open(Endpoint::Finite(0.into()), Endpoint::Finite(3.into())));
        assert_eq!(a.closure().to_string(), "{0} u (0,1*sqrt(2))");
        assert!(DefinableSet1D::point(sqrt2()).is_empty());
        assert!(DefinableSet1D::below(sqrt2()).complement() == DefinableSet1D::above(sqrt2()));
    }

    #[test]
    fn pseudo_finite() {
        let pts = DefinableSet1D::from_components((0..3).map(|k| Component::Point(k.into())));
        assert!(pts.is_pseudo_finite().verdict);
        let r = DefinableSet1D::open(Endpoint::Finite(0.into()), Endpoint::Finite(1.into())).is_pseudo_finite();
        assert!(!r.discrete && !r.verdict);
        assert!(DefinableSet1D::empty().is_pseudo_finite().verdict);
    }

    #[test]
    fn cuts() {
        assert_eq!(cut_analysis(&n("x < 3", &q()), &q()), CutVerdict::ProperCutWithLub(3.into()));
        assert_eq!(cut_analysis(&n("x <= 3", &q()), &q()), CutVerdict::ProperCutWithLub(3.into()));
        let s = StructureSpec::sqrt2_cut();
        assert_eq!(cut_analysis(&n("C(x)", &s), &s), CutVerdict::Gap(sqrt2()));
        assert_eq!(cut_analysis(&DefinableSet1D::full(), &q()), CutVerdict::WholeGroup);
        assert_eq!(cut_analysis(&DefinableSet1D::empty(), &q()), CutVerdict::NotACut);
        assert_eq!(cut_analysis(&n("0 < x", &q()), &q()), CutVerdict::NotACut);
    }

    #[test]
    fn samples_and_extent() {
        assert_eq!(DefinableSet1D::below(sqrt2()).sample(), Some(1.into()));
        assert_eq!(DefinableSet1D::above(sqrt2()).sample(), Some(2.into()));
        let a = DefinableSet1D::open(Endpoint::Finite(sqrt2()), Endpoint::Finite(Scalar::ratio(3, 2)));
        let p = a.sample().unwrap();
        assert!(a.contains(&p));
        let run = DefinableSet1D::closed(0.into(), 1.into()).union(&DefinableSet1D::above(2.into()));
        assert_eq!(run.extent_from(&0.into()), Some(Endpoint::Finite(Scalar::ratio(1, 1))));
        assert_eq!(run.extent_from(&3.into()), Some(Endpoint::PosInf));
        assert_eq!(run.extent_from(&Scalar::ratio(3, 2)), None);
    }
}
