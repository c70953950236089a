//! Elimination by virtual substitution, used when the disjunctive normal
//! form of a body would be large.
//!
//! `exists v. phi` is replaced by a disjunction of `phi` at finitely many
//! test points: `-inf`, the root of every equation and closed lower bound
//! on `v`, and a point just above the root of every strict lower bound. The formula is a
//! positive combination of literals, so on leaving a root to the right it
//! can only switch from false to true through a lower bound; this makes the
//! test points sufficient. Equation roots are rational whenever the
//! equation can hold, closed bounds are tested at their root only when it
//! is rational, and every test point other than an equation root
//! stands for an open interval, which contains rationals.

use num_traits::Signed;

use super::{Qf, Rel};
use crate::logic::{LinearTerm, Var};
use crate::scalar::Rational;

enum Test {
    MinusInf,
    At(LinearTerm),
    JustAbove(LinearTerm),
}

fn collect(q: &Qf, v: &Var, out: &mut Vec<(Rel, Rational, LinearTerm)>) {
    match q {
        Qf::True | Qf::False => {}
        Qf::Lit(l) => {
            if l.mentions(v) {
                let (c, rest) = l.term().split(v);
                out.push((l.rel(), c, rest));
            }
        }
        Qf::And(items) | Qf::Or(items) => items.iter().for_each(|i| collect(i, v, out)),
    }
}

fn at_test(q: &Qf, v: &Var, test: &Test) -> Qf {
    match q {
        Qf::True | Qf::False => q.clone(),
        Qf::And(items) => Qf::and(items.iter().map(|i| at_test(i, v, test)).collect()),
        Qf::Or(items) => Qf::or(items.iter().map(|i| at_test(i, v, test)).collect()),
        Qf::Lit(l) if !l.mentions(v) => q.clone(),
        Qf::Lit(l) => {
            let a = l.term().coeff(v);
            match test {
                Test::At(r) => Qf::lit(l.rel(), l.term().substitute(v, r)),
                Test::MinusInf => match l.rel() {
                    Rel::Lt | Rel::Le => Qf::from(a.is_positive()),
                    Rel::Eq => Qf::False,
                    Rel::Ne => Qf::True,
                },
                Test::JustAbove(r) => match l.rel() {
                    Rel::Lt | Rel::Le => {
                        let w = l.term().substitute(v, r);
                        Qf::lit(if a.is_positive() { Rel::Lt } else { Rel::Le }, w)
                    }
                    Rel::Eq => Qf::False,
                    Rel::Ne => Qf::True,
                },
            }
        }
    }
}

pub(super) fn exists(v: &Var, body: &Qf) -> Qf {
    let mut lits = Vec::new();
    collect(body, v, &mut lits);
    let mut points: Vec<(bool, LinearTerm)> = Vec::new();
    for (rel, c, rest) in lits {
        let root = rest.scale(&(-c.recip()));
        let key = match rel {
            Rel::Eq => (true, root),
            // over the rationals `v >= r` with irrational `r` is `v > r`
            Rel::Le if c.is_negative() => (root.constant_part().is_rational(), root),
            Rel::Lt if c.is_negative() => (false, root),
            _ => continue,
        };
        if !points.contains(&key) {
            points.push(key);
        }
    }
    let mut out = vec![at_test(body, v, &Test::MinusInf)];
    for (exact, root) in points {
        let test = if exact { Test::At(root) } else { Test::JustAbove(root) };
        out.push(at_test(body, v, &test));
        if out.last() == Some(&Qf::True) {
            return Qf::True;
        }
    }
    Qf::or(out)
}
