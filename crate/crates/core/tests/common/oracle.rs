//! Semantic evaluation of formulas over Q, one bound variable at a time.
//!
//! With every outer variable fixed, the truth of `Q v. phi` as a function
//! of `v` only changes at roots of finitely many linear forms: the atoms
//! of `phi` after eliminating its inner bound variables by substituting
//! roots into each other. Between and beyond those roots it is constant,
//! so testing the roots, their midpoints and one point past each end
//! decides the quantifier. This shares no code with the elimination
//! kernel; it only reads the syntax tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use oag::logic::{Atom, Formula, LinearTerm, Var};

/// `sum coeffs[v] * v + k`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Form {
    coeffs: BTreeMap<Var, BigRational>,
    k: BigRational,
}

impl Form {
    fn of(t: &LinearTerm) -> Form {
        let k = t.constant_part().as_rational().expect("oracle handles rational constants only").clone();
        Form { coeffs: t.coeffs().clone(), k }
    }

    fn value(&self, env: &BTreeMap<Var, BigRational>) -> BigRational {
        self.coeffs.iter().fold(self.k.clone(), |acc, (v, c)| acc + c * &env[v])
    }

    /// `-rest / c`, the value of `v` that zeroes the form.
    fn root_term(&self, v: &Var) -> Form {
        let c = &self.coeffs[v];
        let scale = -BigRational::one() / c;
        Form {
            coeffs: self.coeffs.iter().filter(|(w, _)| *w != v).map(|(w, d)| (w.clone(), d * &scale)).collect(),
            k: &self.k * &scale,
        }
    }

    fn substitute(&self, v: &Var, t: &Form) -> Form {
        let Some(c) = self.coeffs.get(v) else { return self.clone() };
        let mut coeffs: BTreeMap<Var, BigRational> = self.coeffs.clone();
        coeffs.remove(v);
        for (w, d) in &t.coeffs {
            let e = coeffs.entry(w.clone()).or_insert_with(BigRational::zero);
            *e += c * d;
        }
        coeffs.retain(|_, d| !d.is_zero());
        Form { coeffs, k: &self.k + c * &t.k }
    }

    /// Same zero set, scaled to a leading coefficient of 1; `None` for a
    /// constant.
    fn canonical(mut self) -> Option<Form> {
        let lead = self.coeffs.values().next()?.clone();
        for c in self.coeffs.values_mut() {
            *c /= &lead;
        }
        self.k /= &lead;
        Some(self)
    }
}

fn eliminate(v: &Var, forms: BTreeSet<Form>) -> BTreeSet<Form> {
    let (with, mut out): (Vec<Form>, BTreeSet<Form>) = {
        let (a, b): (Vec<Form>, Vec<Form>) = forms.into_iter().partition(|f| f.coeffs.contains_key(v));
        (a, b.into_iter().collect())
    };
    for r in &with {
        let root = r.root_term(v);
        for s in &with {
            if s != r {
                out.extend(s.substitute(v, &root).canonical());
            }
        }
    }
    out
}

/// Evaluator with a cache of boundary forms per quantifier node.
#[derive(Default)]
pub struct Oracle {
    forms: HashMap<*const Formula, Vec<Form>>,
}

impl Oracle {
    fn boundary(f: &Formula) -> BTreeSet<Form> {
        match f {
            Formula::True | Formula::False => BTreeSet::new(),
            Formula::Atom(Atom::Lt(t) | Atom::Eq(t)) => Form::of(t).canonical().into_iter().collect(),
            Formula::Atom(Atom::Pred(..)) => panic!("oracle handles pure Q only"),
            Formula::Not(g) => Oracle::boundary(g),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let mut s = Oracle::boundary(a);
                s.extend(Oracle::boundary(b));
                s
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => eliminate(v, Oracle::boundary(g)),
        }
    }

    fn samples(&mut self, node: &Formula, v: &Var, body: &Formula, env: &BTreeMap<Var, BigRational>) -> Vec<BigRational> {
        let forms = self
            .forms
            .entry(node as *const Formula)
            .or_insert_with(|| Oracle::boundary(body).into_iter().collect());
        let mut roots: Vec<BigRational> = forms
            .iter()
            .filter(|f| f.coeffs.contains_key(v))
            .map(|f| f.root_term(v).value(env))
            .collect();
        roots.sort();
        roots.dedup();
        let (Some(lo), Some(hi)) = (roots.first().cloned(), roots.last().cloned()) else {
            return vec![BigRational::zero()];
        };
        let two = BigRational::from_integer(2.into());
        let mut out = vec![lo - BigRational::one(), hi + BigRational::one()];
        for w in roots.windows(2) {
            out.push((&w[0] + &w[1]) / &two);
        }
        out.extend(roots);
        out
    }

    /// Truth of `f` with its free variables set by `env`. Bound variables
    /// must be distinct from each other and from the free ones.
    pub fn eval(&mut self, f: &Formula, env: &mut BTreeMap<Var, BigRational>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(Atom::Lt(t)) => Form::of(t).value(env).is_negative(),
            Formula::Atom(Atom::Eq(t)) => Form::of(t).value(env).is_zero(),
            Formula::Atom(Atom::Pred(..)) => panic!("oracle handles pure Q only"),
            Formula::Not(g) => !self.eval(g, env),
            Formula::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Formula::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let want = matches!(f, Formula::Exists(..));
                let mut result = !want;
                for s in self.samples(f, v, g, env) {
                    env.insert(v.clone(), s);
                    if self.eval(g, env) == want {
                        result = want;
                        break;
                    }
                }
                env.remove(v);
                result
            }
        }
    }
}

/// One-shot evaluation.
pub fn eval(f: &Formula, env: &BTreeMap<Var, BigRational>) -> bool {
    Oracle::default().eval(f, &mut env.clone())
}
