//! Typology classification of canonical constraints, plus detection of
//! multi-constraint logic encodings that share an indicator binary.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks::expr_range;
use crate::model::{Constraint, LinearExpr, Model, ModelError, Sense, VarRef, VarTable, Variable};
use crate::rational::{int, Rational};
use crate::typology::{TagName, TypologyTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("constraint `{0}` is not in canonical form")]
    NotCanonical(String),
    #[error("constraint `{constraint}` references undeclared variable `{var}`")]
    UnknownVariable { constraint: String, var: VarRef },
}

impl From<ModelError> for ClassifyError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnresolvedVariable { constraint, var } => ClassifyError::UnknownVariable { constraint, var },
            ModelError::MissingValue(var) => ClassifyError::UnknownVariable { constraint: String::new(), var },
        }
    }
}

/// When a binary coefficient counts as a big-M.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BigMThreshold {
    /// Multiple of the largest other coefficient magnitude in the constraint.
    Relative(Rational),
    Absolute(Rational),
}

impl Default for BigMThreshold {
    fn default() -> Self {
        BigMThreshold::Relative(int(10_000))
    }
}

impl BigMThreshold {
    fn is_big(&self, coef: &Rational, others_max: Option<&Rational>) -> bool {
        match self {
            BigMThreshold::Absolute(m) => coef.abs() >= *m,
            BigMThreshold::Relative(k) => match others_max {
                Some(o) if o.is_positive() => coef.abs() >= k * o,
                _ => false,
            },
        }
    }
}

struct Shape<'a> {
    c: &'a Constraint,
    terms: Vec<(Rational, &'a Variable)>,
}

impl<'a> Shape<'a> {
    fn all_binary(&self) -> bool {
        self.terms.iter().all(|(_, v)| v.is_binary())
    }

    fn all(&self, pred: impl Fn(&Rational) -> bool) -> bool {
        self.terms.iter().all(|(a, _)| pred(a))
    }

    fn count(&self, pred: impl Fn(&Rational) -> bool) -> usize {
        self.terms.iter().filter(|(a, _)| pred(a)).count()
    }

    fn integral_rhs(&self) -> Option<Rational> {
        self.c.rhs.is_integer().then(|| self.c.rhs.clone())
    }

    fn has_lag_pair(&self) -> bool {
        for (i, (a, v)) in self.terms.iter().enumerate() {
            for (b, w) in &self.terms[i + 1..] {
                if a.is_positive() != b.is_positive() && is_lag(&v.var, &w.var) {
                    return true;
                }
            }
        }
        false
    }
}

/// Same family, same leading indices, last index one apart.
fn is_lag(a: &VarRef, b: &VarRef) -> bool {
    let (ia, ib) = (a.indices(), b.indices());
    if a.name() != b.name() || ia.is_empty() || ia.len() != ib.len() {
        return false;
    }
    let n = ia.len() - 1;
    ia[..n] == ib[..n] && ia[n].abs_diff(ib[n]) == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Upper,
    Lower,
}

/// Tags for one canonical constraint, most specific first, catch-all last.
pub fn classify(c: &Constraint, vars: &VarTable) -> Result<Vec<TypologyTag>, ClassifyError> {
    classify_with(c, vars, &BigMThreshold::default())
}

pub fn classify_with(c: &Constraint, vars: &VarTable, threshold: &BigMThreshold) -> Result<Vec<TypologyTag>, ClassifyError> {
    if !c.is_canonical() {
        return Err(ClassifyError::NotCanonical(c.name.clone()));
    }
    let mut terms = Vec::new();
    for t in c.lhs.terms() {
        let v = vars
            .get(&t.var)
            .ok_or_else(|| ClassifyError::UnknownVariable { constraint: c.name.clone(), var: t.var.clone() })?;
        terms.push((t.coefficient.clone(), v));
    }
    let shape = Shape { c, terms };
    let mut tags: Vec<TagName> = specific_tags(&shape, threshold);
    tags.sort_by_key(|t| std::cmp::Reverse(t.specificity()));
    tags.dedup();
    tags.push(match c.sense {
        Sense::Le => TagName::GeneralLE,
        Sense::Eq => TagName::GeneralEQ,
        Sense::Ge => TagName::GeneralGE,
    });
    Ok(tags.into_iter().map(TagName::tag).collect())
}

fn specific_tags(s: &Shape, threshold: &BigMThreshold) -> Vec<TagName> {
    use TagName::*;
    let mut out = Vec::new();
    let n = s.terms.len();
    if n == 0 {
        return out;
    }
    let one = Rational::one();
    let rhs = &s.c.rhs;
    let binary = s.all_binary();
    let unit = s.all(|a| a.is_one());
    let signed_unit = s.all(|a| a.abs().is_one());
    let positive = s.all(|a| a.is_positive());
    let negative = s.all(|a| a.is_negative());
    let sense = s.c.sense;

    if binary && unit && rhs.is_one() {
        out.push(match sense {
            Sense::Ge => SetCovering,
            Sense::Eq => SetPartitioning,
            Sense::Le => SetPacking,
        });
    }
    if binary && unit && sense != Sense::Le {
        if let Some(r) = s.integral_rhs() {
            if r >= int(2) {
                out.push(if sense == Sense::Ge { WeightedSetCovering } else { WeightedSetPartitioning });
            }
        }
    }
    if binary && signed_unit && sense != Sense::Le {
        if let Some(r) = s.integral_rhs() {
            if r >= one {
                out.push(if sense == Sense::Ge { GeneralizedSetCovering } else { GeneralizedSetPartitioning });
            }
        }
    }

    match sense {
        Sense::Eq => {
            if rhs.is_zero() && (positive || negative) {
                out.push(FixToZero);
            } else if positive && rhs.is_positive() {
                out.push(AssignValue);
            } else if !positive && !negative {
                let lag = s.has_lag_pair();
                out.push(match (lag, n) {
                    (true, 2) => PeriodLink,
                    (true, _) => InventoryBalance,
                    (false, _) => IOBalance,
                });
            }
        }
        Sense::Le | Sense::Ge => {
            if n == 1 {
                let a = &s.terms[0].0;
                let upper = (sense == Sense::Le) == a.is_positive();
                out.push(if upper { FixedUpperBound } else { FixedLowerBound });
            }
            if sense == Sense::Le && positive {
                out.push(if binary { ZeroOneKnapsack } else { Knapsack });
            }
            if n >= 2 {
                out.extend(logic_or_variable_bound(s));
            }
        }
    }

    // Big coefficient on a binary: a switched (big-M) constraint.
    for (i, (a, v)) in s.terms.iter().enumerate() {
        if !v.is_binary() {
            continue;
        }
        let others = s.terms.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, (b, _))| b.abs()).max();
        if threshold.is_big(a, others.as_ref()) {
            out.push(IfThenBigM);
            break;
        }
    }
    out
}

/// Inequalities with at least two terms: binary logic, variable bounds and
/// indicator-switched bounds.
fn logic_or_variable_bound(s: &Shape) -> Vec<TagName> {
    use TagName::*;
    let n = s.terms.len();
    let rhs = &s.c.rhs;
    let binary = s.all_binary();

    if binary && rhs.is_zero() && n == 2 && s.count(|a| a.is_one()) == 1 && s.count(|a| *a == -Rational::one()) == 1 {
        return vec![ImpliesBinary, OnlyIfAll];
    }
    if binary && threshold_conjunction(s) {
        return vec![IfAllThen];
    }
    if !rhs.is_zero() {
        return Vec::new();
    }

    // A two-term constraint with a single binary: that binary is the indicator.
    if n == 2 && s.terms.iter().filter(|(_, v)| v.is_binary()).count() == 1 {
        let (ind, other) = if s.terms[0].1.is_binary() { (&s.terms[0], &s.terms[1]) } else { (&s.terms[1], &s.terms[0]) };
        if ind.0.is_positive() == other.0.is_positive() {
            return Vec::new();
        }
        let dir = direction(s.c.sense, ind.0.is_negative());
        return vec![if dir == Direction::Upper { IfThenBigM } else { ConditionalBound }];
    }

    let negatives = s.count(|a| a.is_negative());
    let positives = n - negatives;
    let (odd, dir) = if negatives == 1 {
        (s.terms.iter().find(|(a, _)| a.is_negative()).unwrap(), direction(s.c.sense, true))
    } else if positives == 1 {
        (s.terms.iter().find(|(a, _)| a.is_positive()).unwrap(), direction(s.c.sense, false))
    } else {
        return Vec::new();
    };
    match (odd.1.is_binary(), binary, dir) {
        (true, false, Direction::Upper) => vec![IfThenBigM],
        (true, false, Direction::Lower) => vec![ConditionalBound],
        (_, _, Direction::Upper) => vec![VariableUpperBound],
        (_, _, Direction::Lower) => vec![VariableLowerBound],
    }
}

/// Whether the odd-signed term bounds the rest from above or below.
fn direction(sense: Sense, odd_is_negative: bool) -> Direction {
    match (sense, odd_is_negative) {
        (Sense::Le, true) | (Sense::Ge, false) => Direction::Upper,
        _ => Direction::Lower,
    }
}

/// `Σ xB - (n-k+1)·xA <= k-1` with `n >= 2` unit terms, or the aggregated
/// `n·xA - Σ xB <= 0`; both orientations of the rhs-0 cases.
fn threshold_conjunction(s: &Shape) -> bool {
    let n = s.terms.len() - 1;
    if n < 2 {
        return false;
    }
    let rhs = &s.c.rhs;
    let mut coefs: Vec<Rational> = s.terms.iter().map(|(a, _)| a.clone()).collect();
    let sense = match s.c.sense {
        Sense::Ge if rhs.is_zero() => {
            coefs.iter_mut().for_each(|a| *a = -a.clone());
            Sense::Le
        }
        other => other,
    };
    if sense != Sense::Le {
        return false;
    }
    let count = |pred: &dyn Fn(&Rational) -> bool| coefs.iter().filter(|a| pred(a)).count();
    let neg_unit = count(&|a| *a == -Rational::one());
    let pos_unit = count(&|a| a.is_one());
    let nn = int(n as i64);
    // if at least k of the Bs then A
    if pos_unit == n && count(&|a| a.is_negative()) == 1 {
        let c = -coefs.iter().find(|a| a.is_negative()).unwrap().clone();
        return rhs.is_integer() && *rhs < nn && c == &nn - rhs;
    }
    // A only if all of the Bs, aggregated
    if rhs.is_zero() && neg_unit == n && count(&|a| a.is_positive()) == 1 {
        return coefs.iter().any(|a| *a == nn);
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintTags {
    pub name: String,
    pub canonical: String,
    pub tags: Vec<TypologyTag>,
}

impl ConstraintTags {
    pub fn primary(&self) -> &TypologyTag {
        &self.tags[0]
    }
}

/// Constraints that jointly encode one logic condition through a shared binary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGroup {
    pub tag: TagName,
    pub alternatives: Vec<TagName>,
    pub constraints: Vec<String>,
    pub indicator: VarRef,
    pub node_ids: Vec<u32>,
}

impl PatternGroup {
    fn new(alternatives: Vec<TagName>, constraints: Vec<String>, indicator: VarRef) -> Self {
        let node_ids: BTreeSet<u32> = alternatives.iter().map(|t| t.omt_node_id()).collect();
        PatternGroup { tag: alternatives[0], alternatives, constraints, indicator, node_ids: node_ids.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub constraints: Vec<ConstraintTags>,
    pub pattern_groups: Vec<PatternGroup>,
}

impl ClassificationResult {
    /// Modelling-tree nodes the model touches: group nodes for grouped
    /// constraints, the primary tag's node for the rest.
    pub fn node_ids(&self) -> BTreeSet<u32> {
        let grouped: BTreeSet<&str> =
            self.pattern_groups.iter().flat_map(|g| g.constraints.iter().map(String::as_str)).collect();
        let mut ids: BTreeSet<u32> = self.pattern_groups.iter().flat_map(|g| g.node_ids.iter().copied()).collect();
        for c in &self.constraints {
            if !grouped.contains(c.name.as_str()) {
                ids.insert(c.primary().omt_node_id);
            }
        }
        ids
    }

    pub fn tags_of(&self, name: &str) -> Option<&[TypologyTag]> {
        self.constraints.iter().find(|c| c.name == name).map(|c| c.tags.as_slice())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serializes")
    }
}

pub fn classify_model(m: &Model) -> Result<ClassificationResult, ClassifyError> {
    classify_model_with(m, &BigMThreshold::default())
}

pub fn classify_model_with(m: &Model, threshold: &BigMThreshold) -> Result<ClassificationResult, ClassifyError> {
    let vars = m.var_table();
    let canonical = m.canonical_constraints()?;
    let mut constraints = Vec::new();
    for c in &canonical {
        constraints.push(ConstraintTags {
            name: c.name.clone(),
            canonical: c.to_string(),
            tags: classify_with(c, &vars, threshold)?,
        });
    }
    let primary: BTreeMap<&str, TagName> = constraints.iter().map(|c| (c.name.as_str(), c.primary().name)).collect();
    let pattern_groups = detect_groups(&canonical, &vars, &primary);
    Ok(ClassificationResult { constraints, pattern_groups })
}

/// Inequality rewritten as `terms <= rhs`.
#[derive(Debug, Clone)]
struct LeView<'a> {
    name: &'a str,
    expr: LinearExpr,
    rhs: Rational,
}

fn le_view(c: &Constraint) -> Option<LeView<'_>> {
    match c.sense {
        Sense::Le => Some(LeView { name: &c.name, expr: c.lhs.clone(), rhs: c.rhs.clone() }),
        Sense::Ge => Some(LeView { name: &c.name, expr: -c.lhs.clone(), rhs: -c.rhs.clone() }),
        Sense::Eq => None,
    }
}

fn is_binary(vars: &VarTable, v: &VarRef) -> bool {
    vars.get(v).is_some_and(Variable::is_binary)
}

/// `xA - xB <= 0` over binaries, as (A, B).
fn implication(v: &LeView, vars: &VarTable) -> Option<(VarRef, VarRef)> {
    let t = v.expr.terms();
    if t.len() != 2 || !v.rhs.is_zero() || !t.iter().all(|t| is_binary(vars, &t.var)) {
        return None;
    }
    let a = t.iter().find(|t| t.coefficient.is_one())?;
    let b = t.iter().find(|t| t.coefficient == -Rational::one())?;
    Some((a.var.clone(), b.var.clone()))
}

/// `Σ xB - xA <= n-1` over binaries, as (A, Bs).
fn conjunction(v: &LeView, vars: &VarTable) -> Option<(VarRef, Vec<VarRef>)> {
    let t = v.expr.terms();
    if t.len() < 3 || !t.iter().all(|t| is_binary(vars, &t.var)) {
        return None;
    }
    let negs: Vec<_> = t.iter().filter(|t| t.coefficient.is_negative()).collect();
    if negs.len() != 1 || !negs[0].coefficient.abs().is_one() {
        return None;
    }
    let bs: Vec<VarRef> = t.iter().filter(|t| t.coefficient.is_one()).map(|t| t.var.clone()).collect();
    if bs.len() != t.len() - 1 || v.rhs != int(bs.len() as i64 - 1) {
        return None;
    }
    Some((negs[0].var.clone(), bs))
}

/// `e - c·y <= 0` (upper) or `e - c·y >= 0` (lower) with binary `y`, `c > 0`,
/// `e` one-signed and free of `y`. Returns (e normalized positive, y, c, sense).
fn conditional(c: &Constraint, vars: &VarTable) -> Option<(LinearExpr, VarRef, Rational, Sense)> {
    if c.sense == Sense::Eq || !c.rhs.is_zero() || c.lhs.terms().len() < 2 {
        return None;
    }
    for y in c.lhs.terms().iter().filter(|t| is_binary(vars, &t.var)) {
        let rest: Vec<_> = c.lhs.terms().iter().filter(|t| t.var != y.var).collect();
        let sign_pos = rest.iter().all(|t| t.coefficient.is_positive());
        let sign_neg = rest.iter().all(|t| t.coefficient.is_negative());
        if !(sign_pos || sign_neg) || y.coefficient.is_positive() == sign_pos {
            continue;
        }
        let e = LinearExpr::from_terms(rest.iter().map(|t| (t.coefficient.clone(), t.var.clone())), Rational::zero());
        let (e, sense) = if sign_pos { (e, c.sense) } else { (-e, c.sense.flipped()) };
        return Some((e, y.var.clone(), y.coefficient.abs(), sense));
    }
    None
}

fn detect_groups(canonical: &[Constraint], vars: &VarTable, primary: &BTreeMap<&str, TagName>) -> Vec<PatternGroup> {
    use TagName::*;
    let mut used: BTreeSet<&str> = BTreeSet::new();
    let mut groups = Vec::new();
    let views: Vec<LeView> = canonical.iter().filter_map(le_view).collect();
    let implications: Vec<(&str, VarRef, VarRef)> =
        views.iter().filter_map(|v| implication(v, vars).map(|(a, b)| (v.name, a, b))).collect();

    // if and only if: one conjunction plus A <= Bj for every j
    for v in &views {
        let Some((a, bs)) = conjunction(v, vars) else { continue };
        let mut members = vec![v.name];
        for b in &bs {
            if let Some((name, _, _)) =
                implications.iter().find(|(n, x, y)| x == &a && y == b && !used.contains(n) && !members.contains(n))
            {
                members.push(name);
            }
        }
        if members.len() == bs.len() + 1 {
            used.extend(members.iter().copied());
            groups.push(PatternGroup::new(vec![IffAll], members.iter().map(|s| s.to_string()).collect(), a));
        }
    }
    // two opposite implications: the one-term case of the same condition
    for (i, (n1, a, b)) in implications.iter().enumerate() {
        if used.contains(n1) {
            continue;
        }
        if let Some((n2, _, _)) = implications[i + 1..].iter().find(|(n2, x, y)| x == b && y == a && !used.contains(n2)) {
            used.insert(n1);
            used.insert(n2);
            groups.push(PatternGroup::new(vec![IffAll], vec![n1.to_string(), n2.to_string()], a.clone()));
        }
    }
    // A <= Bj for several j
    let mut by_antecedent: BTreeMap<&VarRef, Vec<&str>> = BTreeMap::new();
    for (n, a, _) in &implications {
        if !used.contains(n) {
            by_antecedent.entry(a).or_default().push(n);
        }
    }
    for (a, names) in by_antecedent {
        if names.len() >= 2 {
            used.extend(names.iter().copied());
            groups.push(PatternGroup::new(vec![OnlyIfAll], names.iter().map(|s| s.to_string()).collect(), a.clone()));
        }
    }

    // l·y <= e <= u·y
    let conds: Vec<(&str, LinearExpr, VarRef, Rational, Sense)> = canonical
        .iter()
        .filter_map(|c| conditional(c, vars).map(|(e, y, k, s)| (c.name.as_str(), e, y, k, s)))
        .collect();
    for (hi_name, e, y, u, s) in &conds {
        if *s != Sense::Le || used.contains(hi_name) {
            continue;
        }
        let partner = conds
            .iter()
            .find(|(n, e2, y2, l, s2)| *s2 == Sense::Ge && !used.contains(n) && e2 == e && y2 == y && l <= u);
        if let Some((lo_name, ..)) = partner {
            used.insert(hi_name);
            used.insert(lo_name);
            let mut alternatives = vec![ConditionalBound];
            for n in [hi_name, lo_name] {
                if let Some(t) = primary.get(n) {
                    if !alternatives.contains(t) && (*t == IfThenBigM || *t == ConditionalBound) {
                        alternatives.push(*t);
                    }
                }
            }
            groups.push(PatternGroup::new(alternatives, vec![hi_name.to_string(), lo_name.to_string()], y.clone()));
        }
    }

    // Pairs on a shared binary t with coefficients of magnitude M in the <= view.
    for (i, v1) in views.iter().enumerate() {
        if used.contains(v1.name) {
            continue;
        }
        for v2 in &views[i + 1..] {
            if used.contains(v1.name) || used.contains(v2.name) {
                continue;
            }
            if let Some(g) = big_m_pair(v1, v2, vars) {
                used.insert(v1.name);
                used.insert(v2.name);
                groups.push(g);
            }
        }
    }
    groups
}

/// Whether `rest + k·t <= rhs` holds everywhere on the bound box once the
/// binary `t` takes its relaxing value.
fn relaxable(rest: &LinearExpr, k: &Rational, rhs: &Rational, vars: &VarTable) -> bool {
    let Ok((_, sup)) = expr_range(rest, vars) else { return false };
    let relaxed = if k.is_negative() { k.clone() } else { Rational::zero() };
    sup + relaxed <= *rhs
}

fn big_m_pair(v1: &LeView, v2: &LeView, vars: &VarTable) -> Option<PatternGroup> {
    use TagName::*;
    for t1 in v1.expr.terms().iter().filter(|t| is_binary(vars, &t.var)) {
        let k2 = v2.expr.coefficient(&t1.var);
        if k2.is_zero() || k2.abs() != t1.coefficient.abs() {
            continue;
        }
        let m = t1.coefficient.abs();
        let rest1 = v1.expr.clone() - LinearExpr::term(t1.coefficient.clone(), t1.var.clone());
        let rest2 = v2.expr.clone() - LinearExpr::term(k2.clone(), t1.var.clone());
        if rest1.is_empty() || rest2.is_empty() {
            continue;
        }
        let names = vec![v1.name.to_string(), v2.name.to_string()];
        if !relaxable(&rest1, &t1.coefficient, &v1.rhs, vars) || !relaxable(&rest2, &k2, &v2.rhs, vars) {
            continue;
        }
        if t1.coefficient.is_positive() && k2.is_positive() {
            // f + M·z <= C + M and -f + M·z <= M - C
            if rest1 == -rest2.clone() && &v1.rhs + &v2.rhs == &m + &m {
                return Some(PatternGroup::new(vec![FixValueIf], names, t1.var.clone()));
            }
        } else if t1.coefficient.is_positive() != k2.is_positive() {
            // f - M·t <= a and g + M·t <= b
            return Some(PatternGroup::new(vec![EitherOr, IfThenBigM], names, t1.var.clone()));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn table(vars: &[Variable]) -> VarTable {
        vars.iter().map(|v| (v.var.clone(), v.clone())).collect()
    }

    fn names(tags: &[TypologyTag]) -> Vec<TagName> {
        tags.iter().map(|t| t.name).collect()
    }

    fn bins(n: &[&str]) -> VarTable {
        table(&n.iter().map(|x| Variable::binary(x)).collect::<Vec<_>>())
    }

    #[test]
    fn covering_example() {
        let vars = bins(&["x1", "x2", "x3"]);
        let c = Constraint::new("c", LinearExpr::sum(["x1", "x2", "x3"]), Sense::Ge, int(1));
        use TagName::*;
        assert_eq!(names(&classify(&c, &vars).unwrap()), [SetCovering, GeneralizedSetCovering, GeneralGE]);
    }

    #[test]
    fn knapsack_example() {
        let vars = bins(&["x1", "x2", "x3"]);
        let lhs = LinearExpr::from_terms([(int(2), "x1".into()), (int(3), "x2".into()), (int(1), "x3".into())], int(0));
        let c = Constraint::new("k", lhs, Sense::Le, int(7));
        assert_eq!(names(&classify(&c, &vars).unwrap()), [TagName::ZeroOneKnapsack, TagName::GeneralLE]);
    }

    #[test]
    fn aggregated_if_then_example() {
        let vars = bins(&["X", "Y", "Z"]);
        let lhs = LinearExpr::term(int(2), "X") - LinearExpr::var("Y") - LinearExpr::var("Z");
        let c = Constraint::new("a", lhs, Sense::Le, int(0));
        assert_eq!(names(&classify(&c, &vars).unwrap()), [TagName::IfAllThen, TagName::GeneralLE]);
    }

    #[test]
    fn partitioning_beats_assign_value() {
        let vars = bins(&["x"]);
        let c = Constraint::new("p", LinearExpr::var("x"), Sense::Eq, int(1));
        let tags = names(&classify(&c, &vars).unwrap());
        assert_eq!(tags[0], TagName::SetPartitioning);
        assert!(tags.contains(&TagName::AssignValue));
    }

    #[test]
    fn balance_family_by_shape() {
        let vars = table(&[Variable::real("s_1"), Variable::real("s_2"), Variable::real("p_2"), Variable::real("c_2"), Variable::real("u")]);
        let inv = LinearExpr::var("s_2") - LinearExpr::var("s_1") - LinearExpr::var("p_2") + LinearExpr::var("c_2");
        let tags = classify(&Constraint::new("i", inv, Sense::Eq, int(0)), &vars).unwrap();
        assert_eq!(tags[0].name, TagName::InventoryBalance);
        let link = LinearExpr::var("s_2") - LinearExpr::var("s_1");
        assert_eq!(classify(&Constraint::new("l", link, Sense::Eq, int(0)), &vars).unwrap()[0].name, TagName::PeriodLink);
        let io = LinearExpr::var("p_2") - LinearExpr::var("u");
        assert_eq!(classify(&Constraint::new("o", io, Sense::Eq, int(0)), &vars).unwrap()[0].name, TagName::IOBalance);
    }

    #[test]
    fn bounds_and_conditionals() {
        let vars = table(&[Variable::real("b"), Variable::real("T"), Variable::binary("y")]);
        let vub = LinearExpr::var("b") - LinearExpr::var("T");
        assert_eq!(classify(&Constraint::new("v", vub.clone(), Sense::Le, int(0)), &vars).unwrap()[0].name, TagName::VariableUpperBound);
        assert_eq!(classify(&Constraint::new("v", vub, Sense::Ge, int(0)), &vars).unwrap()[0].name, TagName::VariableLowerBound);
        let hi = LinearExpr::var("b") - LinearExpr::term(int(50), "y");
        assert_eq!(classify(&Constraint::new("h", hi.clone(), Sense::Le, int(0)), &vars).unwrap()[0].name, TagName::IfThenBigM);
        assert_eq!(classify(&Constraint::new("h", hi, Sense::Ge, int(0)), &vars).unwrap()[0].name, TagName::ConditionalBound);
        let fixed = Constraint::new("f", LinearExpr::var("b"), Sense::Le, ratio(7, 2));
        assert_eq!(classify(&fixed, &vars).unwrap()[0].name, TagName::FixedUpperBound);
    }

    #[test]
    fn big_coefficient_on_binary() {
        let vars = table(&[Variable::real("x"), Variable::real("z"), Variable::binary("t")]);
        let lhs = LinearExpr::var("x") + LinearExpr::var("z") - LinearExpr::term(int(100_000), "t");
        let tags = names(&classify(&Constraint::new("b", lhs.clone(), Sense::Le, int(3)), &vars).unwrap());
        assert_eq!(tags, [TagName::IfThenBigM, TagName::GeneralLE]);
        let loose = classify_with(&Constraint::new("b", lhs, Sense::Le, int(3)), &vars, &BigMThreshold::Absolute(int(10_000_000))).unwrap();
        assert_eq!(names(&loose), [TagName::GeneralLE]);
    }

    #[test]
    fn rejects_non_canonical_and_unknown() {
        let vars = bins(&["x"]);
        let c = Constraint::new("c", LinearExpr::var("x"), Sense::Le, int(-1));
        assert_eq!(classify(&c, &vars), Err(ClassifyError::NotCanonical("c".into())));
        let c = Constraint::new("c", LinearExpr::var("q"), Sense::Le, int(1));
        assert!(matches!(classify(&c, &vars), Err(ClassifyError::UnknownVariable { .. })));
    }

    #[test]
    fn empty_model_has_empty_result() {
        let r = classify_model(&Model::new("empty")).unwrap();
        assert_eq!(r, ClassificationResult::default());
        assert!(r.node_ids().is_empty());
    }
}
