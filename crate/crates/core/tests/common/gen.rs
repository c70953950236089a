//! Random formulas over named variables, for soundness and round-trip
//! properties.

use num_rational::BigRational;
use num_traits::Zero;
use oag::logic::{Formula, LinearTerm, Var};
use oag::Scalar;
use rand::Rng;

pub const FREE: [&str; 3] = ["x", "y", "z"];
pub const BOUND: [&str; 3] = ["u", "v", "w"];

#[derive(Clone, Copy)]
pub struct Shape {
    pub max_quantifiers: usize,
    pub max_atoms: usize,
    pub max_coeff: i64,
    /// Allow `D(t)`, `C(t)` atoms and `sqrt(2)` constants.
    pub extended: bool,
    /// How many of `x, y, z` may occur free.
    pub free: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_quantifiers: 3, max_atoms: 5, max_coeff: 5, extended: false, free: 3 }
    }
}

pub fn rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> BigRational {
    BigRational::new(rng.gen_range(-num..=num).into(), rng.gen_range(1..=den).into())
}

fn term<R: Rng>(rng: &mut R, scope: &[Var], shape: &Shape) -> LinearTerm {
    let mut t = LinearTerm::zero();
    // An empty scope (a sentence outside every quantifier) gets a constant atom.
    let n = if scope.is_empty() { 0 } else { rng.gen_range(1..=2.min(scope.len())) };
    for i in 0..n {
        // Favour the innermost bound variable so quantifiers are not vacuous.
        let v = if i == 0 && scope.len() > shape.free && rng.gen_bool(0.7) {
            &scope[scope.len() - 1]
        } else {
            &scope[rng.gen_range(0..scope.len())]
        };
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-shape.max_coeff..=shape.max_coeff);
        }
        t = t.add(&LinearTerm::var(v.clone()).scale(&BigRational::from_integer(c.into())));
    }
    let k = rational(rng, 5, 3);
    if shape.extended && rng.gen_bool(0.2) {
        let s = Scalar::quad(k, rational(rng, 2, 2), 2).expect("radicand 2");
        t.add_scalar(&s)
    } else if !k.is_zero() {
        t.add_scalar(&Scalar::Rat(k))
    } else {
        t
    }
}

fn atom<R: Rng>(rng: &mut R, scope: &[Var], shape: &Shape) -> Formula {
    let t = term(rng, scope, shape);
    let r = rng.gen_range(0..if shape.extended { 6 } else { 4 });
    match r {
        0 | 1 => Formula::lt(t, LinearTerm::zero()),
        2 => Formula::eq(t, LinearTerm::zero()),
        3 => Formula::le(t, LinearTerm::zero()),
        4 => Formula::pred("D", t),
        _ => Formula::pred("C", t),
    }
}

struct Budget {
    quantifiers: usize,
    atoms: usize,
}

fn formula<R: Rng>(rng: &mut R, scope: &mut Vec<Var>, budget: &mut Budget, shape: &Shape, depth: usize) -> Formula {
    if budget.atoms <= 1 || depth > 5 {
        budget.atoms = budget.atoms.saturating_sub(1);
        return atom(rng, scope, shape);
    }
    match rng.gen_range(0..10) {
        0..=2 if budget.quantifiers > 0 => {
            let used = shape.max_quantifiers - budget.quantifiers;
            budget.quantifiers -= 1;
            let v = Var::new(BOUND[used]);
            scope.push(v.clone());
            let body = formula(rng, scope, budget, shape, depth + 1);
            scope.pop();
            if rng.gen_bool(0.5) {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        }
        3 => formula(rng, scope, budget, shape, depth + 1).not(),
        4..=5 => {
            let a = formula(rng, scope, budget, shape, depth + 1);
            a.and(formula(rng, scope, budget, shape, depth + 1))
        }
        6..=7 => {
            let a = formula(rng, scope, budget, shape, depth + 1);
            a.or(formula(rng, scope, budget, shape, depth + 1))
        }
        8 => {
            let a = formula(rng, scope, budget, shape, depth + 1);
            a.implies(formula(rng, scope, budget, shape, depth + 1))
        }
        _ => {
            budget.atoms -= 1;
            atom(rng, scope, shape)
        }
    }
}

/// A formula whose free variables are among the first `shape.free` of
/// `x, y, z` and whose bound
/// variables are distinct and drawn from `u, v, w`.
pub fn random_formula<R: Rng>(rng: &mut R, shape: &Shape) -> Formula {
    let mut scope: Vec<Var> = FREE[..shape.free].iter().map(|n| Var::new(*n)).collect();
    let mut budget = Budget { quantifiers: shape.max_quantifiers, atoms: rng.gen_range(1..=shape.max_atoms) };
    formula(rng, &mut scope, &mut budget, shape, 0)
}
