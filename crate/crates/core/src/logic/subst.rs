use std::collections::BTreeSet;

use super::{Formula, LinearTerm, Var};

/// A variant of `base` (priming it) not contained in `avoid`.
pub fn fresh_var(base: &Var, avoid: &BTreeSet<Var>) -> Var {
    let mut name = format!("{}'", base.name());
    while avoid.contains(&Var::new(name.as_str())) {
        name.push('\'');
    }
    Var::new(name)
}

/// Capture-avoiding replacement of the free occurrences of `v` by `t`.
pub fn substitute(f: &Formula, v: &Var, t: &LinearTerm) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => Formula::Atom(a.map_term(|term| term.substitute(v, t))),
        Formula::Not(g) => substitute(g, v, t).not(),
        Formula::And(a, b) => substitute(a, v, t).and(substitute(b, v, t)),
        Formula::Or(a, b) => substitute(a, v, t).or(substitute(b, v, t)),
        Formula::Implies(a, b) => substitute(a, v, t).implies(substitute(b, v, t)),
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let rebuild = |x: Var, body: Formula| match f {
                Formula::Exists(..) => Formula::exists(x, body),
                _ => Formula::forall(x, body),
            };
            if x == v || !g.is_free(v) {
                return f.clone();
            }
            if t.mentions(x) {
                let mut avoid = g.all_vars();
                avoid.extend(t.vars().cloned());
                avoid.insert(v.clone());
                let x2 = fresh_var(x, &avoid);
                let renamed = substitute(g, x, &LinearTerm::var(x2.clone()));
                rebuild(x2, substitute(&renamed, v, t))
            } else {
                rebuild(x.clone(), substitute(g, v, t))
            }
        }
    }
}
