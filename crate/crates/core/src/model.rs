//! Ontology-grounded MILP model: problem sense, objective, decision
//! variables with number types and index sets, and linear constraints.
//!
//! Indexed variables are concrete instances. A variable `x` with indices
//! `(1, 2)` is written `x_1_2`; trailing `_<integer>` segments of a flat name
//! are always read back as indices, so the flat name and the structured form
//! are interchangeable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{self, format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no value assigned to variable `{0}`")]
    MissingValue(VarRef),
    #[error("constraint `{constraint}` references undeclared variable `{var}`")]
    UnresolvedVariable { constraint: String, var: VarRef },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemSense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NumberType {
    NonnegReal,
    NonnegInteger,
    Binary,
}

impl NumberType {
    pub fn is_integral(self) -> bool {
        !matches!(self, NumberType::NonnegReal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn flipped(self) -> Sense {
        match self {
            Sense::Le => Sense::Ge,
            Sense::Eq => Sense::Eq,
            Sense::Ge => Sense::Le,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Eq => lhs == rhs,
            Sense::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// A member of an index set: integer or symbolic label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexLabel {
    Int(u64),
    Str(String),
}

impl fmt::Display for IndexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexLabel::Int(i) => write!(f, "{i}"),
            IndexLabel::Str(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    pub name: String,
    pub members: Vec<IndexLabel>,
}

impl IndexSet {
    pub fn new(name: impl Into<String>, members: impl IntoIterator<Item = IndexLabel>) -> Self {
        IndexSet { name: name.into(), members: members.into_iter().collect() }
    }

    pub fn range(name: impl Into<String>, range: std::ops::RangeInclusive<u64>) -> Self {
        IndexSet::new(name, range.map(IndexLabel::Int))
    }
}

/// Identity of a scalar decision variable: base name plus integer index tuple.
///
/// Symbolic index labels are folded into the base name; integer indices are
/// kept structured so lag patterns (`s_t` against `s_{t-1}`) can be detected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    name: String,
    indices: Vec<u64>,
}

impl VarRef {
    /// Reads a flat name, splitting trailing integer segments off as indices.
    pub fn new(flat: &str) -> VarRef {
        let segments: Vec<&str> = flat.split('_').collect();
        let mut split = segments.len();
        while split > 1 && is_index_segment(segments[split - 1]) {
            split -= 1;
        }
        let base = segments[..split].join("_");
        // A base that is empty or only underscores cannot stand alone.
        if split == segments.len() || base.chars().all(|c| c == '_') {
            return VarRef { name: flat.to_string(), indices: Vec::new() };
        }
        let indices = segments[split..].iter().map(|s| s.parse().expect("digits")).collect();
        VarRef { name: base, indices }
    }

    pub fn indexed(name: &str, indices: &[u64]) -> VarRef {
        let mut flat = name.to_string();
        for i in indices {
            flat.push('_');
            flat.push_str(&i.to_string());
        }
        VarRef::new(&flat)
    }

    pub fn labelled(name: &str, labels: &[IndexLabel]) -> VarRef {
        let mut flat = name.to_string();
        for l in labels {
            flat.push('_');
            flat.push_str(&l.to_string());
        }
        VarRef::new(&flat)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn flat(&self) -> String {
        self.to_string()
    }
}

fn is_index_segment(s: &str) -> bool {
    !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit())
        && (s == "0" || !s.starts_with('0'))
        && s.len() <= 18
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for i in &self.indices {
            write!(f, "_{i}")?;
        }
        Ok(())
    }
}

impl From<&str> for VarRef {
    fn from(s: &str) -> Self {
        VarRef::new(s)
    }
}

impl Serialize for VarRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VarRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(VarRef::new(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    #[serde(rename = "name")]
    pub var: VarRef,
    pub number_type: NumberType,
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    /// `None` is +∞.
    #[serde(with = "rational::serde_opt")]
    pub upper: Option<Rational>,
}

impl Variable {
    pub fn new(var: impl Into<VarRef>, number_type: NumberType) -> Self {
        let upper = (number_type == NumberType::Binary).then(Rational::one);
        Variable { var: var.into(), number_type, lower: Rational::zero(), upper }
    }

    pub fn binary(name: &str) -> Self {
        Variable::new(name, NumberType::Binary)
    }

    pub fn real(name: &str) -> Self {
        Variable::new(name, NumberType::NonnegReal)
    }

    pub fn integer(name: &str) -> Self {
        Variable::new(name, NumberType::NonnegInteger)
    }

    pub fn with_upper(mut self, upper: Rational) -> Self {
        self.upper = Some(upper);
        self
    }

    pub fn with_lower(mut self, lower: Rational) -> Self {
        self.lower = lower;
        self
    }

    pub fn is_binary(&self) -> bool {
        self.number_type == NumberType::Binary
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "rational::serde_str")]
    pub coefficient: Rational,
    pub var: VarRef,
}

/// Affine expression `Σ cᵢ·xᵢ + constant`, kept merged and sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LinearExpr {
    terms: Vec<Term>,
    #[serde(with = "rational::serde_str")]
    constant: Rational,
}

impl<'de> Deserialize<'de> for LinearExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            terms: Vec<Term>,
            #[serde(with = "rational::serde_str")]
            constant: Rational,
        }
        let raw = Raw::deserialize(d)?;
        Ok(LinearExpr::from_terms(raw.terms.into_iter().map(|t| (t.coefficient, t.var)), raw.constant))
    }
}

impl LinearExpr {
    pub fn zero() -> Self {
        LinearExpr::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinearExpr { terms: Vec::new(), constant: c }
    }

    pub fn var(v: impl Into<VarRef>) -> Self {
        LinearExpr::term(Rational::one(), v)
    }

    pub fn term(coefficient: Rational, v: impl Into<VarRef>) -> Self {
        LinearExpr::from_terms([(coefficient, v.into())], Rational::zero())
    }

    /// Sum of the given variables with unit coefficients.
    pub fn sum<I, V>(vars: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<VarRef>,
    {
        LinearExpr::from_terms(vars.into_iter().map(|v| (Rational::one(), v.into())), Rational::zero())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, VarRef)>, constant: Rational) -> Self {
        let mut merged: BTreeMap<VarRef, Rational> = BTreeMap::new();
        for (c, v) in terms {
            *merged.entry(v).or_insert_with(Rational::zero) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(var, coefficient)| Term { coefficient, var })
            .collect();
        LinearExpr { terms, constant }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, v: &VarRef) -> Rational {
        self.terms
            .iter()
            .find(|t| &t.var == v)
            .map(|t| t.coefficient.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn variables(&self) -> impl Iterator<Item = &VarRef> {
        self.terms.iter().map(|t| &t.var)
    }

    pub fn without_constant(&self) -> LinearExpr {
        LinearExpr { terms: self.terms.clone(), constant: Rational::zero() }
    }

    pub fn scale(&self, k: &Rational) -> LinearExpr {
        LinearExpr::from_terms(
            self.terms.iter().map(|t| (&t.coefficient * k, t.var.clone())),
            &self.constant * k,
        )
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Rational, ModelError> {
        let mut total = self.constant.clone();
        for t in &self.terms {
            let v = a.get(&t.var).ok_or_else(|| ModelError::MissingValue(t.var.clone()))?;
            total += &t.coefficient * v;
        }
        Ok(total)
    }
}

impl Add for LinearExpr {
    type Output = LinearExpr;
    fn add(self, rhs: LinearExpr) -> LinearExpr {
        LinearExpr::from_terms(
            self.terms.into_iter().chain(rhs.terms).map(|t| (t.coefficient, t.var)),
            self.constant + rhs.constant,
        )
    }
}

impl Neg for LinearExpr {
    type Output = LinearExpr;
    fn neg(self) -> LinearExpr {
        self.scale(&-Rational::one())
    }
}

impl Sub for LinearExpr {
    type Output = LinearExpr;
    fn sub(self, rhs: LinearExpr) -> LinearExpr {
        self + (-rhs)
    }
}

impl Mul<&Rational> for LinearExpr {
    type Output = LinearExpr;
    fn mul(self, k: &Rational) -> LinearExpr {
        self.scale(k)
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_expr(self))
    }
}

/// Renders `3 x + y - 1/3 z + 2`; the empty expression renders as `0`.
pub fn format_expr(e: &LinearExpr) -> String {
    let mut out = String::new();
    for (i, t) in e.terms.iter().enumerate() {
        let negative = t.coefficient.is_negative();
        match (i, negative) {
            (0, false) => {}
            (0, true) => out.push_str("- "),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        let mag = t.coefficient.abs();
        if !mag.is_one() {
            out.push_str(&format_rational(&mag));
            out.push(' ');
        }
        out.push_str(&t.var.to_string());
    }
    if !e.constant.is_zero() || e.terms.is_empty() {
        if e.terms.is_empty() {
            out.push_str(&format_rational(&e.constant));
        } else {
            out.push_str(if e.constant.is_negative() { " - " } else { " + " });
            out.push_str(&format_rational(&e.constant.abs()));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub lhs: LinearExpr,
    pub sense: Sense,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(name: impl Into<String>, lhs: LinearExpr, sense: Sense, rhs: Rational) -> Self {
        Constraint { name: name.into(), lhs, sense, rhs }
    }

    /// `lhs op rhs` with variables allowed on both sides.
    pub fn relate(name: impl Into<String>, lhs: LinearExpr, sense: Sense, rhs: LinearExpr) -> Self {
        let diff = lhs - rhs;
        let rhs = -diff.constant.clone();
        Constraint { name: name.into(), lhs: diff.without_constant(), sense, rhs }
    }

    /// Folds the lhs constant into the rhs and flips signs so that `rhs ≥ 0`.
    pub fn canonicalize(&self) -> Constraint {
        let rhs = &self.rhs - &self.lhs.constant;
        let lhs = self.lhs.without_constant();
        if rhs.is_negative() {
            Constraint { name: self.name.clone(), lhs: -lhs, sense: self.sense.flipped(), rhs: -rhs }
        } else {
            Constraint { name: self.name.clone(), lhs, sense: self.sense, rhs }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.lhs.constant.is_zero() && !self.rhs.is_negative()
    }

    pub fn satisfied(&self, a: &Assignment) -> Result<bool, ModelError> {
        let value = self.lhs.evaluate(a)?;
        Ok(self.sense.holds(&value, &self.rhs))
    }

    pub fn variables(&self) -> impl Iterator<Item = &VarRef> {
        self.lhs.variables()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.name, self.lhs, self.sense.symbol(), format_rational(&self.rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub sense: ProblemSense,
    pub expr: LinearExpr,
}

impl Default for Objective {
    fn default() -> Self {
        Objective { sense: ProblemSense::Min, expr: LinearExpr::zero() }
    }
}

pub type VarTable = BTreeMap<VarRef, Variable>;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Model {
    pub name: String,
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub index_sets: Vec<IndexSet>,
    pub objective: Objective,
    pub constraints: Vec<Constraint>,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model { name: name.into(), ..Model::default() }
    }

    pub fn var_table(&self) -> VarTable {
        self.variables.iter().map(|v| (v.var.clone(), v.clone())).collect()
    }

    pub fn variable(&self, v: &VarRef) -> Option<&Variable> {
        self.variables.iter().find(|x| &x.var == v)
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    /// Variables sorted by identity, constraints sorted by name.
    pub fn normalized(&self) -> Model {
        let mut m = self.clone();
        m.variables.sort_by(|a, b| a.var.cmp(&b.var));
        m.constraints.sort_by(|a, b| a.name.cmp(&b.name));
        m
    }

    /// Equality up to the order of variables and constraints.
    pub fn structurally_eq(&self, other: &Model) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn canonical_constraints(&self) -> Result<Vec<Constraint>, ModelError> {
        let table = self.var_table();
        self.constraints
            .iter()
            .map(|c| {
                if let Some(v) = c.variables().find(|v| !table.contains_key(*v)) {
                    return Err(ModelError::UnresolvedVariable { constraint: c.name.clone(), var: v.clone() });
                }
                Ok(c.canonicalize())
            })
            .collect()
    }

    pub fn objective_value(&self, a: &Assignment) -> Result<Rational, ModelError> {
        self.objective.expr.evaluate(a)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    InvalidName,
    DuplicateVariable,
    DuplicateConstraint,
    UnresolvedVariable,
    BoundContradiction,
    BinaryBounds,
    NegativeLowerBound,
    EmptyIndexSet,
    DuplicateIndexMember,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::InvalidName => "invalid name",
            ViolationKind::DuplicateVariable => "duplicate variable",
            ViolationKind::DuplicateConstraint => "duplicate constraint",
            ViolationKind::UnresolvedVariable => "unresolved variable",
            ViolationKind::BoundContradiction => "bound contradiction",
            ViolationKind::BinaryBounds => "binary bounds",
            ViolationKind::NegativeLowerBound => "negative lower bound",
            ViolationKind::EmptyIndexSet => "empty index set",
            ViolationKind::DuplicateIndexMember => "duplicate index member",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, subject: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { kind, subject: subject.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{} ({}): {}", v.kind, v.subject, v.message)?;
        }
        Ok(())
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn validate(m: &Model) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for v in &m.variables {
        let name = v.var.to_string();
        if !is_identifier(&name) {
            report.push(ViolationKind::InvalidName, &name, "variable names must be identifiers");
        }
        if !seen.insert(v.var.clone()) {
            report.push(ViolationKind::DuplicateVariable, &name, "variable declared more than once");
        }
        if v.lower.is_negative() {
            report.push(ViolationKind::NegativeLowerBound, &name, "nonnegative number types need lower >= 0");
        }
        if let Some(u) = &v.upper {
            if &v.lower > u {
                report.push(
                    ViolationKind::BoundContradiction,
                    &name,
                    format!("lower {} exceeds upper {}", format_rational(&v.lower), format_rational(u)),
                );
            }
        }
        if v.is_binary() && (!v.lower.is_zero() || v.upper != Some(Rational::one())) {
            report.push(ViolationKind::BinaryBounds, &name, "binary variables have bounds [0, 1]");
        }
    }
    let mut names = BTreeSet::new();
    for c in &m.constraints {
        if !is_identifier(&c.name) {
            report.push(ViolationKind::InvalidName, &c.name, "constraint names must be identifiers");
        }
        if !names.insert(c.name.as_str()) {
            report.push(ViolationKind::DuplicateConstraint, &c.name, "constraint name used more than once");
        }
        for v in c.variables() {
            if !seen.contains(v) {
                report.push(ViolationKind::UnresolvedVariable, &c.name, format!("unknown variable `{v}`"));
            }
        }
    }
    for v in m.objective.expr.variables() {
        if !seen.contains(v) {
            report.push(ViolationKind::UnresolvedVariable, "objective", format!("unknown variable `{v}`"));
        }
    }
    for s in &m.index_sets {
        if s.members.is_empty() {
            report.push(ViolationKind::EmptyIndexSet, &s.name, "index sets need at least one member");
        }
        let mut members = BTreeSet::new();
        for l in &s.members {
            if !members.insert(l) {
                report.push(ViolationKind::DuplicateIndexMember, &s.name, format!("member `{l}` repeated"));
            }
        }
    }
    report
}

/// Values for a set of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Assignment(BTreeMap<VarRef, Rational>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn get(&self, v: &VarRef) -> Option<&Rational> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: impl Into<VarRef>, value: Rational) {
        self.0.insert(v.into(), value);
    }

    pub fn with(mut self, v: impl Into<VarRef>, value: Rational) -> Self {
        self.insert(v, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarRef, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Keeps only the listed variables.
    pub fn restrict(&self, keep: &BTreeSet<VarRef>) -> Assignment {
        Assignment(self.0.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

impl FromIterator<(VarRef, Rational)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarRef, Rational)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={}", format_rational(v))?;
        }
        f.write_str("}")
    }
}

/// Serialized as an object from variable name to exact value string.
impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k.flat(), format_rational(v))))
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| rational::serde_str::from_json(&v).map(|r| (VarRef::new(&k), r)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Shorthand for an assignment from `(name, integer)` pairs.
pub fn assign(pairs: &[(&str, i64)]) -> Assignment {
    pairs.iter().map(|(k, v)| (VarRef::new(k), int(*v))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn x(name: &str) -> LinearExpr {
        LinearExpr::var(name)
    }

    #[test]
    fn var_ref_splits_trailing_integer_segments() {
        let v = VarRef::new("x_1_2");
        assert_eq!(v.name(), "x");
        assert_eq!(v.indices(), &[1, 2]);
        assert_eq!(v.to_string(), "x_1_2");
        assert_eq!(VarRef::new("total_time").indices(), &[] as &[u64]);
        assert_eq!(VarRef::new("__aux_3").name(), "__aux");
        assert_eq!(VarRef::new("x_01").indices(), &[] as &[u64]);
        assert_eq!(VarRef::indexed("s", &[4]), VarRef::new("s_4"));
        assert_eq!(VarRef::labelled("y", &[IndexLabel::Str("a".into()), IndexLabel::Int(2)]).to_string(), "y_a_2");
    }

    #[test]
    fn term_order_is_numeric_on_indices() {
        let e = LinearExpr::sum(["x_10", "x_2", "a"]);
        let names: Vec<String> = e.variables().map(|v| v.to_string()).collect();
        assert_eq!(names, ["a", "x_2", "x_10"]);
    }

    #[test]
    fn canonicalize_folds_constants() {
        let c = Constraint::new("c", x("x1") + LinearExpr::constant(int(2)), Sense::Le, int(5));
        let k = c.canonicalize();
        assert_eq!(k.lhs, x("x1"));
        assert_eq!(k.rhs, int(3));
        assert_eq!(k.sense, Sense::Le);
    }

    #[test]
    fn canonicalize_flips_negative_rhs() {
        let c = Constraint::new("c", -x("x1") - x("x2"), Sense::Le, int(-1));
        let k = c.canonicalize();
        assert_eq!(k.lhs, LinearExpr::sum(["x1", "x2"]));
        assert_eq!(k.sense, Sense::Ge);
        assert_eq!(k.rhs, int(1));
    }

    #[test]
    fn canonicalize_merges_terms() {
        let c = Constraint::new("c", x("x1") + x("x1"), Sense::Eq, int(2));
        let k = c.canonicalize();
        assert_eq!(k.lhs, LinearExpr::term(int(2), "x1"));
        assert_eq!(k.sense, Sense::Eq);
    }

    #[test]
    fn evaluate_examples() {
        let e = LinearExpr::term(int(2), "x") + LinearExpr::term(int(3), "y");
        assert_eq!(e.evaluate(&assign(&[("x", 1), ("y", 2)])).unwrap(), int(8));
        assert_eq!(LinearExpr::zero().evaluate(&Assignment::new()).unwrap(), int(0));
        let e = x("x") - x("y") + LinearExpr::constant(ratio(1, 2));
        let a = Assignment::new().with("x", ratio(1, 3)).with("y", ratio(1, 6));
        assert_eq!(e.evaluate(&a).unwrap(), ratio(2, 3));
        assert_eq!(
            x("z").evaluate(&Assignment::new()),
            Err(ModelError::MissingValue(VarRef::new("z")))
        );
    }

    #[test]
    fn satisfied_examples() {
        let cover = Constraint::new("c", LinearExpr::sum(["x1", "x2"]), Sense::Ge, int(1));
        assert!(cover.satisfied(&assign(&[("x1", 0), ("x2", 1)])).unwrap());
        let part = Constraint::new("p", LinearExpr::sum(["x1", "x2"]), Sense::Eq, int(1));
        assert!(!part.satisfied(&assign(&[("x1", 1), ("x2", 1)])).unwrap());
        let le = Constraint::new("b", x("x"), Sense::Le, int(3));
        assert!(le.satisfied(&assign(&[("x", 3)])).unwrap());
    }

    fn two_var_model() -> Model {
        let mut m = Model::new("m");
        m.variables = vec![Variable::real("x"), Variable::real("y")];
        m.objective = Objective {
            sense: ProblemSense::Max,
            expr: LinearExpr::term(int(3), "x") + LinearExpr::term(int(2), "y"),
        };
        m.constraints = vec![Constraint::new("c1", LinearExpr::sum(["x", "y"]), Sense::Le, int(4))];
        m
    }

    #[test]
    fn validate_examples() {
        assert!(two_var_model().validate().is_ok());

        let mut m = two_var_model();
        m.constraints.push(Constraint::new("c2", x("z"), Sense::Le, int(1)));
        let r = m.validate();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind.to_string(), "unresolved variable");

        let mut m = two_var_model();
        m.variables.push(Variable::binary("b").with_upper(int(2)));
        let r = m.validate();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind.to_string(), "binary bounds");
    }

    #[test]
    fn validate_collects_every_violation() {
        let mut m = two_var_model();
        m.variables.push(Variable::real("x"));
        m.variables.push(Variable::real("w").with_lower(int(5)).with_upper(int(1)));
        m.constraints.push(m.constraints[0].clone());
        m.index_sets.push(IndexSet::new("I", []));
        m.index_sets.push(IndexSet::range("J", 1..=2));
        m.index_sets[1].members.push(IndexLabel::Int(1));
        let kinds: Vec<ViolationKind> = m.validate().violations.iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            [
                ViolationKind::DuplicateVariable,
                ViolationKind::BoundContradiction,
                ViolationKind::DuplicateConstraint,
                ViolationKind::EmptyIndexSet,
                ViolationKind::DuplicateIndexMember
            ]
        );
    }

    #[test]
    fn objective_value_examples() {
        let m = two_var_model();
        assert_eq!(m.objective_value(&assign(&[("x", 1), ("y", 1)])).unwrap(), int(5));
        let empty = Model::new("e");
        assert_eq!(empty.objective_value(&assign(&[("x", 7)])).unwrap(), int(0));
    }

    #[test]
    fn canonical_constraints_reports_dangling_reference() {
        let mut m = two_var_model();
        m.constraints.push(Constraint::new("bad", x("q"), Sense::Le, int(1)));
        assert!(matches!(m.canonical_constraints(), Err(ModelError::UnresolvedVariable { .. })));
    }

    #[test]
    fn expression_rendering() {
        let e = LinearExpr::term(int(3), "x") - LinearExpr::var("y") + LinearExpr::term(ratio(-1, 3), "z")
            + LinearExpr::constant(int(2));
        assert_eq!(e.to_string(), "3 x - y - 1/3 z + 2");
        assert_eq!((-LinearExpr::var("a")).to_string(), "- a");
        assert_eq!(LinearExpr::zero().to_string(), "0");
    }

    #[test]
    fn json_round_trip_keeps_exact_values() {
        let m = {
            let mut m = two_var_model();
            m.variables[0].upper = Some(ratio(10, 3));
            m
        };
        let text = serde_json::to_string(&m).unwrap();
        let back: Model = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
