use std::collections::BTreeMap;

use super::{Formula, LinearTerm, Var};

/// Renames every bound variable to `#k`, `k` being the binder's nesting
/// depth. `#` cannot occur in parsed identifiers, so free variables are
/// never captured.
pub fn canonical_bound_names(f: &Formula) -> Formula {
    rename(f, &mut Vec::new())
}

fn rename_term(t: &LinearTerm, env: &[(Var, Var)]) -> LinearTerm {
    if env.is_empty() {
        return t.clone();
    }
    let coeffs = t.coeffs().iter().map(|(v, c)| {
        let mapped = env.iter().rev().find(|(from, _)| from == v).map(|(_, to)| to.clone());
        (mapped.unwrap_or_else(|| v.clone()), c.clone())
    });
    LinearTerm::from_parts(coeffs.collect::<BTreeMap<_, _>>(), t.constant_part().clone())
}

fn rename(f: &Formula, env: &mut Vec<(Var, Var)>) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => Formula::Atom(a.map_term(|t| rename_term(t, env))),
        Formula::Not(g) => rename(g, env).not(),
        Formula::And(a, b) => rename(a, env).and(rename(b, env)),
        Formula::Or(a, b) => rename(a, env).or(rename(b, env)),
        Formula::Implies(a, b) => rename(a, env).implies(rename(b, env)),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let fresh = Var::new(format!("#{}", env.len()));
            env.push((v.clone(), fresh.clone()));
            let body = rename(g, env);
            env.pop();
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(fresh, body)
            } else {
                Formula::forall(fresh, body)
            }
        }
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    canonical_bound_names(a) == canonical_bound_names(b)
}
