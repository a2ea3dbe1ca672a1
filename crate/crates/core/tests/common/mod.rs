#![allow(dead_code)]

use std::collections::BTreeSet;

use omt_core::model::{Constraint, LinearExpr, Model, NumberType, Objective, ProblemSense, Sense, VarRef, Variable};
use omt_core::rational::{int, ratio, Rational};
use rand::rngs::StdRng;
use rand::Rng;

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn random_rational(rng: &mut StdRng, allow_zero: bool) -> Rational {
    loop {
        let n = rng.random_range(-40i64..=40);
        let d = [1, 1, 1, 2, 3, 4, 5, 8, 10, 7][rng.random_range(0..10)];
        if n != 0 || allow_zero {
            return ratio(n, d);
        }
    }
}

fn random_name(rng: &mut StdRng, taken: &mut BTreeSet<VarRef>) -> VarRef {
    loop {
        let base = ["x", "y", "flow", "z", "open", "s"][rng.random_range(0..6)];
        let v = match rng.random_range(0..3) {
            0 => VarRef::new(base),
            1 => VarRef::indexed(base, &[rng.random_range(0..5)]),
            _ => VarRef::indexed(base, &[rng.random_range(0..4), rng.random_range(0..4)]),
        };
        if taken.insert(v.clone()) {
            return v;
        }
    }
}

fn random_expr(rng: &mut StdRng, vars: &[VarRef], min_terms: usize) -> LinearExpr {
    let k = rng.random_range(min_terms..=vars.len().min(5).max(min_terms));
    let mut picked = BTreeSet::new();
    while picked.len() < k {
        picked.insert(rng.random_range(0..vars.len()));
    }
    LinearExpr::from_terms(picked.into_iter().map(|i| (random_rational(rng, false), vars[i].clone())), int(0))
}

/// A valid model with 1 to 8 variables and 0 to 6 constraints.
pub fn random_model(rng: &mut StdRng, name: &str) -> Model {
    let mut taken = BTreeSet::new();
    let mut m = Model::new(name);
    for _ in 0..rng.random_range(1..=8) {
        let v = random_name(rng, &mut taken);
        let var = match rng.random_range(0..3) {
            0 => Variable::new(v, NumberType::Binary),
            1 => {
                let mut x = Variable::new(v, NumberType::NonnegInteger);
                if rng.random_bool(0.6) {
                    x.upper = Some(int(rng.random_range(1..=20)));
                }
                x
            }
            _ => {
                let mut x = Variable::new(v, NumberType::NonnegReal);
                if rng.random_bool(0.3) {
                    x.lower = ratio(rng.random_range(0..=6), 2);
                }
                if rng.random_bool(0.5) {
                    x.upper = Some(&x.lower + ratio(rng.random_range(1..=50), 4));
                }
                x
            }
        };
        m.variables.push(var);
    }
    let refs: Vec<VarRef> = m.variables.iter().map(|v| v.var.clone()).collect();
    if rng.random_bool(0.8) {
        let sense = if rng.random_bool(0.5) { ProblemSense::Max } else { ProblemSense::Min };
        m.objective = Objective { sense, expr: random_expr(rng, &refs, 1) };
    }
    for i in 0..rng.random_range(0..=6) {
        let sense = [Sense::Le, Sense::Eq, Sense::Ge][rng.random_range(0..3)];
        let lhs = random_expr(rng, &refs, 1);
        m.constraints.push(Constraint::new(format!("c{i}"), lhs, sense, random_rational(rng, true)));
    }
    m
}
