//! Seeded equivalence suite for the logical encodings.
//!
//! For each builder and each count of binaries it draws random instances,
//! builds the encoding and checks it point by point against the intended
//! logic with [`encoding_equivalent`].

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::blocks::{BigM, BlockBuilder, BlockError, BuiltBlock, Strength};
use crate::model::{Assignment, LinearExpr, VarRef, Variable};
use crate::oracle::{encoding_equivalent, Counterexample};
use crate::rational::{int, Rational};

pub const SUITE_BUILDERS: [&str; 7] =
    ["either_or", "if_then_big_m", "implies_binary", "if_all_then", "only_if_all", "iff_all", "fix_value_if"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_binaries: usize,
    pub instances: usize,
    /// Replaces every big-M with 1, which must be caught.
    pub fault_big_m_one: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 20240601, max_binaries: 10, instances: 3, fault_big_m_one: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub builder: String,
    pub binaries: usize,
    pub instance: usize,
    pub description: String,
    pub points: u64,
    pub counterexamples: Vec<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.counterexamples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub cases: Vec<CaseResult>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed()).count()
    }

    pub fn all_equivalent(&self) -> bool {
        self.passed() == self.cases.len()
    }
}

fn is_one(a: &Assignment, v: &VarRef) -> bool {
    a.get(v).is_some_and(|x| *x == int(1))
}

fn value(e: &LinearExpr, a: &Assignment) -> Rational {
    e.evaluate(a).expect("instance variables are all assigned")
}

fn random_expr(rng: &mut StdRng, vars: &[VarRef]) -> LinearExpr {
    let mut terms: Vec<(Rational, VarRef)> = Vec::new();
    for v in vars {
        if rng.random_bool(0.7) {
            let mut c = rng.random_range(-3i64..=3);
            if c == 0 {
                c = 1;
            }
            terms.push((int(c), v.clone()));
        }
    }
    if terms.is_empty() {
        terms.push((int(rng.random_range(1i64..=3)), vars[rng.random_range(0..vars.len())].clone()));
    }
    LinearExpr::from_terms(terms, int(rng.random_range(-2i64..=2)))
}

struct Instance {
    description: String,
    originals: Vec<Variable>,
    block: Result<BuiltBlock, BlockError>,
    semantics: Box<dyn Fn(&Assignment) -> bool>,
}

fn instance(builder: &str, n: usize, rng: &mut StdRng, m: &BigM) -> Instance {
    let xs: Vec<VarRef> = (1..=n).map(|i| VarRef::indexed("x", &[i as u64])).collect();
    let mut originals: Vec<Variable> = xs.iter().map(|v| Variable::new(v.clone(), crate::NumberType::Binary)).collect();
    let a = VarRef::new("a");
    let mut ctx = BlockBuilder::with_variables(originals.clone());
    match builder {
        "either_or" | "if_then_big_m" => {
            let f = random_expr(rng, &xs);
            let g = random_expr(rng, &xs);
            let description = format!("f = {f}, g = {g}");
            let (fc, gc) = (f.clone(), g.clone());
            if builder == "either_or" {
                let block = ctx.either_or("eo", &f, &g, m, None);
                let semantics = Box::new(move |p: &Assignment| value(&fc, p) <= int(0) || value(&gc, p) <= int(0));
                Instance { description, originals, block, semantics }
            } else {
                let block = ctx.if_then_big_m("it", &f, &g, m, None);
                let semantics = Box::new(move |p: &Assignment| value(&fc, p) <= int(0) || value(&gc, p) <= int(0));
                Instance { description, originals, block, semantics }
            }
        }
        "implies_binary" => {
            let f = LinearExpr::var(xs[0].clone());
            let rest: Vec<VarRef> = if n == 1 { xs.clone() } else { xs[1..].to_vec() };
            let g = LinearExpr::sum(rest.iter().cloned());
            let description = format!("{f} implies any of {g}");
            let block = ctx.implies_binary("ib", &f, &g);
            let x1 = xs[0].clone();
            let semantics = Box::new(move |p: &Assignment| !is_one(p, &x1) || rest.iter().any(|v| is_one(p, v)));
            Instance { description, originals, block, semantics }
        }
        "if_all_then" | "only_if_all" | "iff_all" => {
            originals.push(Variable::binary("a"));
            let ctx = BlockBuilder::with_variables(originals.clone());
            let bs = xs.clone();
            let (block, description, semantics): (_, _, Box<dyn Fn(&Assignment) -> bool>) = match builder {
                "if_all_then" => {
                    let k = if rng.random_bool(0.5) { n } else { rng.random_range(1..=n) };
                    let sem = move |p: &Assignment| bs.iter().filter(|v| is_one(p, v)).count() < k || is_one(p, &a);
                    (ctx.if_at_least_then("ia", &VarRef::new("a"), &xs, k), format!("at least {k} of {n} imply a"), Box::new(sem))
                }
                "only_if_all" => {
                    let strength = if rng.random_bool(0.5) { Strength::Aggregated } else { Strength::Disaggregated };
                    let sem = move |p: &Assignment| !is_one(p, &a) || bs.iter().all(|v| is_one(p, v));
                    (ctx.only_if_all("oi", &VarRef::new("a"), &xs, strength), format!("a only if all {n}, {strength:?}"), Box::new(sem))
                }
                _ => {
                    let sem = move |p: &Assignment| is_one(p, &a) == bs.iter().all(|v| is_one(p, v));
                    (ctx.iff_all("ff", &VarRef::new("a"), &xs), format!("a iff all {n}"), Box::new(sem))
                }
            };
            Instance { description, originals, block, semantics }
        }
        _ => {
            originals.push(Variable::binary("z"));
            let ctx = BlockBuilder::with_variables(originals.clone());
            let f = random_expr(rng, &xs);
            let witness: Assignment = xs.iter().map(|v| (v.clone(), int(rng.random_range(0i64..=1)))).collect();
            let c = value(&f, &witness);
            let description = format!("z fixes {f} = {c}");
            let block = ctx.fix_value_if("fv", &VarRef::new("z"), &f, &c, m);
            let z = VarRef::new("z");
            let semantics = Box::new(move |p: &Assignment| !is_one(p, &z) || value(&f, p) == c);
            Instance { description, originals, block, semantics }
        }
    }
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(config.seed);
    let m = if config.fault_big_m_one { BigM::Value(int(1)) } else { BigM::Auto };
    let mut cases = Vec::new();
    for builder in SUITE_BUILDERS {
        for n in 1..=config.max_binaries {
            for i in 0..config.instances {
                let inst = instance(builder, n, &mut rng, &m);
                let mut case = CaseResult {
                    builder: builder.to_string(),
                    binaries: n,
                    instance: i,
                    description: inst.description,
                    points: 0,
                    counterexamples: Vec::new(),
                    error: None,
                };
                match inst.block {
                    Err(e) => case.error = Some(e.to_string()),
                    Ok(b) => match encoding_equivalent(&inst.originals, &b.aux_variables, &b.constraints, inst.semantics) {
                        Ok(r) => {
                            case.points = r.points;
                            case.counterexamples = r.counterexamples;
                        }
                        Err(e) => case.error = Some(e.to_string()),
                    },
                }
                cases.push(case);
            }
        }
    }
    SuiteReport { config: config.clone(), cases, elapsed_ms: start.elapsed().as_millis() }
}
