//! Exhaustive enumeration over small bounded domains.
//!
//! Used as ground truth for encodings and tiny models. Continuous variables
//! are only enumerable on an explicit grid, and results computed that way
//! are flagged as such.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Assignment, Constraint, Model, ModelError, NumberType, ProblemSense, VarRef, Variable};
use crate::rational::{int, is_integer, Rational};

/// Hard cap on the number of points enumerated.
pub const MAX_POINTS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("variable `{0}` has no finite upper bound")]
    Unbounded(VarRef),
    #[error("continuous variable `{0}` needs a grid step")]
    NeedsGrid(VarRef),
    #[error("domain has more than {MAX_POINTS} points")]
    TooLarge,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationDomain {
    axes: Vec<(VarRef, Vec<Rational>)>,
    /// True when some continuous variable was sampled on a grid.
    pub gridded: bool,
}

impl EnumerationDomain {
    /// Every variable of `vars`; continuous ones need `grid_step`.
    pub fn new<'a>(vars: impl IntoIterator<Item = &'a Variable>, grid_step: Option<&Rational>) -> Result<Self, OracleError> {
        let mut axes = Vec::new();
        let mut gridded = false;
        let mut size: u64 = 1;
        for v in vars {
            let lower = v.lower.clone();
            let upper = v.upper.clone().ok_or_else(|| OracleError::Unbounded(v.var.clone()))?;
            let step = match v.number_type {
                NumberType::Binary | NumberType::NonnegInteger => int(1),
                NumberType::NonnegReal => {
                    gridded = true;
                    grid_step.cloned().ok_or_else(|| OracleError::NeedsGrid(v.var.clone()))?
                }
            };
            let mut start = lower;
            if v.number_type.is_integral() && !is_integer(&start) {
                start = start.ceil();
            }
            let count = if upper < start { 0 } else { ((&upper - &start) / &step).floor().to_u64().unwrap_or(u64::MAX) + 1 };
            size = size.saturating_mul(count);
            if size > MAX_POINTS {
                return Err(OracleError::TooLarge);
            }
            let values = (0..count).map(|i| &start + &step * int(i as i64)).collect();
            axes.push((v.var.clone(), values));
        }
        Ok(EnumerationDomain { axes, gridded })
    }

    pub fn for_model(m: &Model, grid_step: Option<&Rational>) -> Result<Self, OracleError> {
        EnumerationDomain::new(&m.variables, grid_step)
    }

    pub fn size(&self) -> u64 {
        self.axes.iter().map(|(_, v)| v.len() as u64).product()
    }

    /// Visits every point; stops early when `f` returns `false`.
    pub fn for_each(&self, mut f: impl FnMut(&Assignment) -> bool) {
        if self.axes.iter().any(|(_, v)| v.is_empty()) {
            return;
        }
        let mut digits = vec![0usize; self.axes.len()];
        let mut point: Assignment = self.axes.iter().map(|(k, v)| (k.clone(), v[0].clone())).collect();
        loop {
            if !f(&point) {
                return;
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return;
                }
                let (var, values) = &self.axes[i];
                digits[i] += 1;
                if digits[i] < values.len() {
                    point.insert(var.clone(), values[digits[i]].clone());
                    break;
                }
                digits[i] = 0;
                point.insert(var.clone(), values[0].clone());
                i += 1;
            }
        }
    }
}

fn all_satisfied(cs: &[Constraint], a: &Assignment) -> Result<bool, ModelError> {
    for c in cs {
        if !c.satisfied(a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All feasible points of `m`.
pub fn enumerate_feasible(m: &Model, domain: &EnumerationDomain) -> Result<Vec<Assignment>, OracleError> {
    let mut out = Vec::new();
    let mut err = None;
    domain.for_each(|a| match all_satisfied(&m.constraints, a) {
        Ok(true) => {
            out.push(a.clone());
            true
        }
        Ok(false) => true,
        Err(e) => {
            err = Some(e);
            false
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Optimum {
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    pub assignment: Assignment,
    pub gridded: bool,
}

/// Best feasible point, first in enumeration order on ties; `None` if
/// infeasible.
pub fn brute_force_optimum(m: &Model, grid_step: Option<&Rational>) -> Result<Option<Optimum>, OracleError> {
    let domain = EnumerationDomain::for_model(m, grid_step)?;
    let mut best: Option<Optimum> = None;
    for a in enumerate_feasible(m, &domain)? {
        let value = m.objective_value(&a)?;
        let better = match &best {
            None => true,
            Some(b) => match m.objective.sense {
                ProblemSense::Max => value > b.value,
                ProblemSense::Min => value < b.value,
            },
        };
        if better {
            best = Some(Optimum { value, assignment: a, gridded: domain.gridded });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub assignment: Assignment,
    /// What the intended logic says.
    pub expected: bool,
    /// Whether some auxiliary completion satisfies the encoding.
    pub encoded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub points: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub const MAX_COUNTEREXAMPLES: usize = 10;

/// Compares `constraints`, with the variables in `aux` projected out
/// existentially, against `semantics` on every point of `originals`.
pub fn encoding_equivalent(
    originals: &[Variable],
    aux: &[Variable],
    constraints: &[Constraint],
    semantics: impl Fn(&Assignment) -> bool,
) -> Result<EquivalenceReport, OracleError> {
    let outer = EnumerationDomain::new(originals, None)?;
    let inner = EnumerationDomain::new(aux, None)?;
    if outer.size().saturating_mul(inner.size()) > MAX_POINTS {
        return Err(OracleError::TooLarge);
    }
    let mut report = EquivalenceReport::default();
    let mut err = None;
    outer.for_each(|a| {
        report.points += 1;
        let mut encoded = false;
        inner.for_each(|b| {
            let mut full = a.clone();
            for (k, v) in b.iter() {
                full.insert(k.clone(), v.clone());
            }
            match all_satisfied(constraints, &full) {
                Ok(ok) => {
                    encoded = ok;
                    !ok
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if err.is_some() {
            return false;
        }
        let expected = semantics(a);
        if expected != encoded && report.counterexamples.len() < MAX_COUNTEREXAMPLES {
            report.counterexamples.push(Counterexample { assignment: a.clone(), expected, encoded });
        }
        true
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(report),
    }
}

/// Number of feasible 0/1 points of `constraints` over `vars`.
pub fn count_binary_solutions(vars: &[VarRef], constraints: &[Constraint]) -> Result<u64, OracleError> {
    let table: Vec<Variable> = vars.iter().map(|v| Variable::new(v.clone(), NumberType::Binary)).collect();
    let domain = EnumerationDomain::new(&table, None)?;
    let mut m = Model::new("count");
    m.variables = table;
    m.constraints = constraints.to_vec();
    Ok(enumerate_feasible(&m, &domain)?.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::lp::parse_lp;
    use crate::rational::ratio;

    #[test]
    fn enumerates_mixed_domain() {
        let vars = [Variable::binary("a"), Variable::integer("n").with_upper(int(2))];
        let d = EnumerationDomain::new(&vars, None).unwrap();
        assert_eq!(d.size(), 6);
        let mut seen = Vec::new();
        d.for_each(|p| {
            seen.push(p.to_string());
            true
        });
        assert_eq!(seen.len(), 6);
        assert!(!d.gridded);
    }

    #[test]
    fn continuous_needs_grid_and_is_flagged() {
        let vars = [Variable::real("x").with_upper(int(1))];
        assert_eq!(EnumerationDomain::new(&vars, None), Err(OracleError::NeedsGrid(VarRef::new("x"))));
        let d = EnumerationDomain::new(&vars, Some(&ratio(1, 4))).unwrap();
        assert_eq!(d.size(), 5);
        assert!(d.gridded);
    }

    #[test]
    fn refuses_large_or_unbounded_domains() {
        let big: Vec<Variable> = (0..21).map(|i| Variable::binary(&format!("b{i}"))).collect();
        assert_eq!(EnumerationDomain::new(&big, None), Err(OracleError::TooLarge));
        let unbounded = [Variable::integer("n")];
        assert_eq!(EnumerationDomain::new(&unbounded, None), Err(OracleError::Unbounded(VarRef::new("n"))));
    }

    #[test]
    fn knapsack_optimum() {
        let m = parse_lp("max: 3 x1 + 4 x2 + 5 x3; cap: 2 x1 + 3 x2 + 4 x3 <= 5; bin x1, x2, x3;").unwrap();
        let best = brute_force_optimum(&m, None).unwrap().unwrap();
        assert_eq!(best.value, int(7));
        assert_eq!(best.assignment.to_string(), crate::model::assign(&[("x1", 1), ("x2", 1), ("x3", 0)]).to_string());
    }

    #[test]
    fn infeasible_model_has_no_optimum() {
        let m = parse_lp("max: x; c: x >= 2; bin x;").unwrap();
        assert_eq!(brute_force_optimum(&m, None).unwrap(), None);
    }

    #[test]
    fn projection_finds_counterexamples() {
        let m = parse_lp("c: x - t <= 0; bin x, t;").unwrap();
        let x = m.variable(&VarRef::new("x")).unwrap().clone();
        let t = m.variable(&VarRef::new("t")).unwrap().clone();
        let ok = encoding_equivalent(&[x.clone()], &[t.clone()], &m.constraints, |_| true).unwrap();
        assert!(ok.is_equivalent());
        assert_eq!(ok.points, 2);
        let bad = encoding_equivalent(&[x], &[t], &m.constraints, |a| a.get(&VarRef::new("x")) == Some(&int(0))).unwrap();
        assert_eq!(bad.counterexamples.len(), 1);
    }
}
