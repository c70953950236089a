use super::{Atom, Formula};

/// Negation normal form. Implications are expanded, negations are pushed to
/// the atoms, and order atoms absorb their negation by trichotomy:
/// `~(t < 0)` becomes `-t < 0 | t = 0` and `~(t = 0)` becomes
/// `t < 0 | -t < 0`. Negated predicate atoms stay as `~P(t)` leaves.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match (f, negate) {
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::True, true) | (Formula::False, false) => Formula::False,
        (Formula::Atom(a), false) => Formula::Atom(a.clone()),
        (Formula::Atom(a), true) => match a {
            Atom::Lt(t) => Formula::Atom(Atom::Lt(t.neg())).or(Formula::Atom(Atom::Eq(t.clone()))),
            Atom::Eq(t) => Formula::Atom(Atom::Lt(t.clone())).or(Formula::Atom(Atom::Lt(t.neg()))),
            Atom::Pred(..) => Formula::Atom(a.clone()).not(),
        },
        (Formula::Not(g), _) => nnf(g, !negate),
        (Formula::And(a, b), false) | (Formula::Or(a, b), true) => nnf(a, negate).and(nnf(b, negate)),
        (Formula::Or(a, b), false) | (Formula::And(a, b), true) => nnf(a, negate).or(nnf(b, negate)),
        (Formula::Implies(a, b), false) => nnf(a, true).or(nnf(b, false)),
        (Formula::Implies(a, b), true) => nnf(a, false).and(nnf(b, true)),
        (Formula::Exists(v, g), false) | (Formula::Forall(v, g), true) => {
            Formula::exists(v.clone(), nnf(g, negate))
        }
        (Formula::Forall(v, g), false) | (Formula::Exists(v, g), true) => {
            Formula::forall(v.clone(), nnf(g, negate))
        }
    }
}

/// True when negations only sit directly on predicate atoms and no
/// implication remains.
pub fn is_nnf(f: &Formula) -> bool {
    let mut ok = true;
    f.visit(&mut |g| match g {
        Formula::Implies(..) => ok = false,
        Formula::Not(inner) if !matches!(**inner, Formula::Atom(Atom::Pred(..))) => ok = false,
        _ => {}
    });
    ok
}
