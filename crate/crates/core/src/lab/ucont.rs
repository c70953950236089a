use std::time::Instant;

use serde_json::json;

use super::{elapsed_ms, reserved, within, LabError, Report};
use crate::logic::{substitute, Formula, LinearTerm, Var};
use crate::qe::QeEngine;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UcontReport {
    pub graph: Formula,
    pub structure: String,
    pub a: Scalar,
    pub b: Scalar,
    pub continuous: bool,
    pub uniformly_continuous: bool,
    pub timing_ms: u64,
}

impl UcontReport {
    /// Continuity on `[a, b]` implies uniform continuity there.
    pub fn implication_holds(&self) -> bool {
        !self.continuous || self.uniformly_continuous
    }

    pub fn to_report(&self) -> Report {
        let instance = format!("{} on [{}, {}]", self.graph, self.a, self.b);
        let mut r = Report::new("ucont", &self.structure, instance, self.implication_holds());
        r.witness = Some(json!({
            "continuous": self.continuous,
            "uniformly_continuous": self.uniformly_continuous,
        }));
        r.timing_ms = self.timing_ms;
        r
    }
}

struct Graph<'g> {
    formula: &'g Formula,
    x: &'g Var,
    y: &'g Var,
}

impl Graph<'_> {
    fn at(&self, x: &Var, y: &Var, avoid: &std::collections::BTreeSet<Var>) -> Formula {
        let tx = reserved("gx", avoid);
        let ty = reserved("gy", avoid);
        let f = substitute(self.formula, self.x, &LinearTerm::var(tx.clone()));
        let f = substitute(&f, self.y, &LinearTerm::var(ty.clone()));
        let f = substitute(&f, &tx, &LinearTerm::var(x.clone()));
        substitute(&f, &ty, &LinearTerm::var(y.clone()))
    }
}

fn v(x: &Var) -> LinearTerm {
    LinearTerm::var(x.clone())
}

/// `-d < s - t < d`
fn close(s: &Var, t: &Var, d: &Var) -> Formula {
    let diff = v(s).sub(&v(t));
    Formula::lt(v(d).neg(), diff.clone()).and(Formula::lt(diff, v(d)))
}

/// Decides continuity and uniform continuity on `[a, b]` of the function
/// whose graph is `graph(x, y)`, after checking that it is one.
pub fn uniform_continuity_check(
    graph: &Formula,
    x: &Var,
    y: &Var,
    a: &Scalar,
    b: &Scalar,
    engine: &QeEngine<'_>,
) -> Result<UcontReport, LabError> {
    let start = Instant::now();
    if a >= b {
        return Err(LabError::DegenerateInterval(a.clone(), b.clone()));
    }
    let extra: Vec<Var> = graph.free_vars().into_iter().filter(|w| w != x && w != y).collect();
    if !extra.is_empty() || x == y {
        return Err(LabError::BadFamily(format!("graph must have free variables among {x}, {y}")));
    }
    let g = Graph { formula: graph, x, y };
    let mut avoid = graph.all_vars();
    avoid.insert(x.clone());
    avoid.insert(y.clone());
    let [x0, x1, y0, y1, e, d] = ["x0", "x1", "y0", "y1", "e", "d"].map(|n| reserved(n, &avoid));
    avoid.extend([x0.clone(), x1.clone(), y0.clone(), y1.clone(), e.clone(), d.clone()]);
    let on = |t: &Var| within(v(t), a, b);
    let pos = |t: &Var| Formula::lt(LinearTerm::zero(), v(t));

    // forall x0 in [a,b] exists y0 (G(x0,y0) & forall y1 (G(x0,y1) -> y1 = y0))
    let functional = Formula::forall(
        x0.clone(),
        on(&x0).implies(Formula::exists(
            y0.clone(),
            g.at(&x0, &y0, &avoid).and(Formula::forall(
                y1.clone(),
                g.at(&x0, &y1, &avoid).implies(Formula::eq(v(&y1), v(&y0))),
            )),
        )),
    );
    if !engine.decide(&functional)? {
        return Err(LabError::NotAFunction);
    }

    // |x1 - x0| < d & x1 in [a,b] -> |f(x1) - f(x0)| < e
    let step = on(&x1).and(close(&x1, &x0, &d)).implies(Formula::forall_all(
        &[y0.clone(), y1.clone()],
        g.at(&x0, &y0, &avoid).and(g.at(&x1, &y1, &avoid)).implies(close(&y1, &y0, &e)),
    ));
    let delta = |body: Formula| Formula::exists(d.clone(), pos(&d).and(body));
    let continuous = Formula::forall(
        x0.clone(),
        on(&x0).implies(Formula::forall(
            e.clone(),
            pos(&e).implies(delta(Formula::forall(x1.clone(), step.clone()))),
        )),
    );
    let uniform = Formula::forall(
        e.clone(),
        pos(&e).implies(delta(Formula::forall(x0.clone(), on(&x0).implies(Formula::forall(x1.clone(), step))))),
    );
    let continuous = engine.decide(&continuous)?;
    let uniformly_continuous = engine.decide(&uniform)?;
    Ok(UcontReport {
        graph: graph.clone(),
        structure: engine.structure().id().to_string(),
        a: a.clone(),
        b: b.clone(),
        continuous,
        uniformly_continuous,
        timing_ms: elapsed_ms(start),
    })
}
