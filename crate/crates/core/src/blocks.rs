//! Builders for the building-block constraint types.
//!
//! A [`BlockBuilder`] knows the variables in play (their number types and
//! bounds) and hands out fresh auxiliary binaries named `__aux_<n>`. Every
//! builder returns a [`BuiltBlock`]: canonical constraints, any auxiliary
//! variables they introduced, and the typology tag of the block.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Constraint, LinearExpr, Model, NumberType, Sense, VarRef, VarTable, Variable};
use crate::rational::{int, Rational};
use crate::typology::{TagName, TypologyTag};

pub const AUX_PREFIX: &str = "__aux_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("at least one variable is required")]
    EmptyVariables,
    #[error("expression must contain at least one variable")]
    EmptyExpression,
    #[error("unknown variable `{0}`")]
    UnknownVariable(VarRef),
    #[error("variable `{0}` must be binary")]
    NotBinary(VarRef),
    #[error("variable `{0}` appears more than once")]
    DuplicateVariable(VarRef),
    #[error("variables must all be binary or all be non-binary")]
    MixedNumberTypes,
    #[error("weight {index} must be positive")]
    NonpositiveWeight { index: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("signs must be +1 or -1")]
    InvalidSign,
    #[error("right-hand side must be at least 1")]
    InvalidRhs,
    #[error("bound multiplier must be positive")]
    NonpositiveMultiplier,
    #[error("big-M must be positive")]
    NonpositiveBigM,
    #[error("cannot derive big-M: variable `{0}` has no finite upper bound; supply M explicitly")]
    UnboundedBigM(VarRef),
    #[error("conditional bounds need 0 < lower <= upper")]
    InvalidConditionalBounds,
    #[error("threshold must satisfy 1 <= k <= {n}")]
    InvalidThreshold { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltBlock {
    pub constraints: Vec<Constraint>,
    pub aux_variables: Vec<Variable>,
    pub tag: TypologyTag,
}

impl BuiltBlock {
    fn new(tag: TagName, constraints: Vec<Constraint>) -> Self {
        BuiltBlock {
            constraints: constraints.into_iter().map(|c| c.canonicalize()).collect(),
            aux_variables: Vec::new(),
            tag: tag.tag(),
        }
    }

    /// Variables referenced by the block that it did not introduce itself.
    pub fn original_variables(&self) -> BTreeSet<VarRef> {
        let aux: BTreeSet<&VarRef> = self.aux_variables.iter().map(|v| &v.var).collect();
        self.constraints.iter().flat_map(|c| c.variables()).filter(|v| !aux.contains(v)).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BigM {
    Auto,
    Value(#[serde(with = "crate::rational::serde_str")] Rational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    SupplyUpper,
    DemandLower,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Fixed(Rational),
    Variable { var: VarRef, multiplier: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BalanceKind {
    IoBalance,
    PeriodLink,
    AssignValue,
    Inventory,
}

/// Aggregated `n·xA <= Σ xBj` or the stronger per-term `xA <= xBj`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Strength {
    Aggregated,
    #[default]
    Disaggregated,
}

/// Right-hand side and optional ±1 coefficients for the set-constraint family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetOptions {
    pub rhs: u64,
    pub signs: Option<Vec<i8>>,
}

impl Default for SetOptions {
    fn default() -> Self {
        SetOptions { rhs: 1, signs: None }
    }
}

impl SetOptions {
    pub fn weighted(rhs: u64) -> Self {
        SetOptions { rhs, signs: None }
    }

    pub fn generalized(rhs: u64, signs: Vec<i8>) -> Self {
        SetOptions { rhs, signs: Some(signs) }
    }
}

/// Smallest M that deactivates every expression over the variables' bound box:
/// `max sup|expr| + 1`.
pub fn big_m_default(exprs: &[LinearExpr], vars: &VarTable) -> Result<Rational, BlockError> {
    let mut widest = Rational::zero();
    for e in exprs {
        let (lo, hi) = expr_range(e, vars)?;
        widest = widest.max(lo.abs()).max(hi.abs());
    }
    Ok(widest + Rational::one())
}

/// Interval of an affine expression over the bound box of its variables.
pub fn expr_range(e: &LinearExpr, vars: &VarTable) -> Result<(Rational, Rational), BlockError> {
    let mut lo = e.constant_part().clone();
    let mut hi = e.constant_part().clone();
    for t in e.terms() {
        let v = vars.get(&t.var).ok_or_else(|| BlockError::UnknownVariable(t.var.clone()))?;
        let upper = v.upper.as_ref().ok_or_else(|| BlockError::UnboundedBigM(t.var.clone()))?;
        let (a, b) = (&t.coefficient * &v.lower, &t.coefficient * upper);
        if t.coefficient.is_positive() {
            lo += a;
            hi += b;
        } else {
            lo += b;
            hi += a;
        }
    }
    Ok((lo, hi))
}

/// Builder context. Holds the variable table and the auxiliary-name counter;
/// it is not meant to be shared between threads without exclusive access.
#[derive(Debug, Clone, Default)]
pub struct BlockBuilder {
    vars: VarTable,
    last_aux: u64,
}

impl BlockBuilder {
    pub fn new() -> Self {
        BlockBuilder::default()
    }

    pub fn for_model(m: &Model) -> Self {
        let mut b = BlockBuilder::new();
        for v in &m.variables {
            b.declare(v.clone());
        }
        b
    }

    pub fn with_variables(vars: impl IntoIterator<Item = Variable>) -> Self {
        let mut b = BlockBuilder::new();
        for v in vars {
            b.declare(v);
        }
        b
    }

    pub fn declare(&mut self, v: Variable) {
        if v.var.name() == AUX_PREFIX.trim_end_matches('_') {
            if let Some(&n) = v.var.indices().first() {
                self.last_aux = self.last_aux.max(n);
            }
        }
        self.vars.insert(v.var.clone(), v);
    }

    pub fn variables(&self) -> &VarTable {
        &self.vars
    }

    pub fn fresh_binary(&mut self) -> Variable {
        loop {
            self.last_aux += 1;
            let candidate = VarRef::indexed(AUX_PREFIX.trim_end_matches('_'), &[self.last_aux]);
            if !self.vars.contains_key(&candidate) {
                let v = Variable::new(candidate, NumberType::Binary);
                self.declare(v.clone());
                return v;
            }
        }
    }

    pub fn big_m_default(&self, exprs: &[LinearExpr]) -> Result<Rational, BlockError> {
        big_m_default(exprs, &self.vars)
    }

    fn lookup(&self, v: &VarRef) -> Result<&Variable, BlockError> {
        self.vars.get(v).ok_or_else(|| BlockError::UnknownVariable(v.clone()))
    }

    fn check_expr(&self, e: &LinearExpr) -> Result<(), BlockError> {
        for v in e.variables() {
            self.lookup(v)?;
        }
        Ok(())
    }

    fn binaries(&self, vars: &[VarRef]) -> Result<(), BlockError> {
        if vars.is_empty() {
            return Err(BlockError::EmptyVariables);
        }
        let mut seen = BTreeSet::new();
        for v in vars {
            if !self.lookup(v)?.is_binary() {
                return Err(BlockError::NotBinary(v.clone()));
            }
            if !seen.insert(v) {
                return Err(BlockError::DuplicateVariable(v.clone()));
            }
        }
        Ok(())
    }

    fn binary_expr(&self, e: &LinearExpr) -> Result<(), BlockError> {
        for v in e.variables() {
            if !self.lookup(v)?.is_binary() {
                return Err(BlockError::NotBinary(v.clone()));
            }
        }
        Ok(())
    }

    fn resolve_m(&self, m: &BigM, exprs: &[LinearExpr]) -> Result<Rational, BlockError> {
        match m {
            BigM::Auto => self.big_m_default(exprs),
            BigM::Value(v) if v.is_positive() => Ok(v.clone()),
            BigM::Value(_) => Err(BlockError::NonpositiveBigM),
        }
    }

    fn indicator(&mut self, t: Option<VarRef>) -> Result<(VarRef, Vec<Variable>), BlockError> {
        match t {
            Some(t) => {
                if !self.lookup(&t)?.is_binary() {
                    return Err(BlockError::NotBinary(t));
                }
                Ok((t, Vec::new()))
            }
            None => {
                let v = self.fresh_binary();
                Ok((v.var.clone(), vec![v]))
            }
        }
    }

    fn set_family(
        &self,
        name: &str,
        vars: &[VarRef],
        opts: &SetOptions,
        sense: Sense,
        tags: [TagName; 3],
    ) -> Result<BuiltBlock, BlockError> {
        self.binaries(vars)?;
        if opts.rhs < 1 {
            return Err(BlockError::InvalidRhs);
        }
        let signs = match &opts.signs {
            Some(s) => {
                if s.len() != vars.len() {
                    return Err(BlockError::LengthMismatch { expected: vars.len(), got: s.len() });
                }
                if s.iter().any(|x| *x != 1 && *x != -1) {
                    return Err(BlockError::InvalidSign);
                }
                s.clone()
            }
            None => vec![1; vars.len()],
        };
        let lhs = LinearExpr::from_terms(
            signs.iter().zip(vars).map(|(s, v)| (int(*s as i64), v.clone())),
            Rational::zero(),
        );
        let [plain, weighted, generalized] = tags;
        let tag = if signs.contains(&-1) {
            generalized
        } else if opts.rhs >= 2 {
            weighted
        } else {
            plain
        };
        Ok(BuiltBlock::new(tag, vec![Constraint::new(name, lhs, sense, int(opts.rhs as i64))]))
    }

    pub fn set_covering(&self, name: &str, vars: &[VarRef], opts: SetOptions) -> Result<BuiltBlock, BlockError> {
        use TagName::*;
        self.set_family(name, vars, &opts, Sense::Ge, [SetCovering, WeightedSetCovering, GeneralizedSetCovering])
    }

    pub fn set_partitioning(&self, name: &str, vars: &[VarRef], opts: SetOptions) -> Result<BuiltBlock, BlockError> {
        use TagName::*;
        self.set_family(
            name,
            vars,
            &opts,
            Sense::Eq,
            [SetPartitioning, WeightedSetPartitioning, GeneralizedSetPartitioning],
        )
    }

    pub fn set_packing(&self, name: &str, vars: &[VarRef]) -> Result<BuiltBlock, BlockError> {
        self.binaries(vars)?;
        Ok(BuiltBlock::new(
            TagName::SetPacking,
            vec![Constraint::new(name, LinearExpr::sum(vars.iter().cloned()), Sense::Le, Rational::one())],
        ))
    }

    pub fn knapsack(
        &self,
        name: &str,
        vars: &[VarRef],
        weights: &[Rational],
        capacity: u64,
    ) -> Result<BuiltBlock, BlockError> {
        if vars.is_empty() {
            return Err(BlockError::EmptyVariables);
        }
        if weights.len() != vars.len() {
            return Err(BlockError::LengthMismatch { expected: vars.len(), got: weights.len() });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_positive()) {
            return Err(BlockError::NonpositiveWeight { index });
        }
        let mut binary = BTreeSet::new();
        let mut seen = BTreeSet::new();
        for v in vars {
            binary.insert(self.lookup(v)?.is_binary());
            if !seen.insert(v) {
                return Err(BlockError::DuplicateVariable(v.clone()));
            }
        }
        if binary.len() > 1 {
            return Err(BlockError::MixedNumberTypes);
        }
        let tag = if binary.contains(&true) { TagName::ZeroOneKnapsack } else { TagName::Knapsack };
        let lhs = LinearExpr::from_terms(weights.iter().cloned().zip(vars.iter().cloned()), Rational::zero());
        Ok(BuiltBlock::new(tag, vec![Constraint::new(name, lhs, Sense::Le, int(capacity as i64))]))
    }

    pub fn bound(
        &self,
        name: &str,
        expr: &LinearExpr,
        kind: BoundKind,
        value: &BoundValue,
    ) -> Result<BuiltBlock, BlockError> {
        if expr.is_empty() {
            return Err(BlockError::EmptyExpression);
        }
        self.check_expr(expr)?;
        let sense = match kind {
            BoundKind::SupplyUpper => Sense::Le,
            BoundKind::DemandLower => Sense::Ge,
        };
        let (tag, rhs) = match (kind, value) {
            (BoundKind::SupplyUpper, BoundValue::Fixed(b)) => {
                (TagName::FixedUpperBound, LinearExpr::constant(b.clone()))
            }
            (BoundKind::DemandLower, BoundValue::Fixed(b)) => {
                (TagName::FixedLowerBound, LinearExpr::constant(b.clone()))
            }
            (_, BoundValue::Variable { var, multiplier }) => {
                if !multiplier.is_positive() {
                    return Err(BlockError::NonpositiveMultiplier);
                }
                self.lookup(var)?;
                let tag = match kind {
                    BoundKind::SupplyUpper => TagName::VariableUpperBound,
                    BoundKind::DemandLower => TagName::VariableLowerBound,
                };
                (tag, LinearExpr::term(multiplier.clone(), var.clone()))
            }
        };
        Ok(BuiltBlock::new(tag, vec![Constraint::relate(name, expr.clone(), sense, rhs)]))
    }

    pub fn balance(
        &self,
        name: &str,
        lhs: &LinearExpr,
        rhs: &LinearExpr,
        kind: BalanceKind,
    ) -> Result<BuiltBlock, BlockError> {
        if lhs.is_empty() || (rhs.is_empty() && kind != BalanceKind::AssignValue) {
            return Err(BlockError::EmptyExpression);
        }
        self.check_expr(lhs)?;
        self.check_expr(rhs)?;
        let tag = match kind {
            BalanceKind::IoBalance => TagName::IOBalance,
            BalanceKind::PeriodLink => TagName::PeriodLink,
            BalanceKind::AssignValue => TagName::AssignValue,
            BalanceKind::Inventory => TagName::InventoryBalance,
        };
        Ok(BuiltBlock::new(tag, vec![Constraint::relate(name, lhs.clone(), Sense::Eq, rhs.clone())]))
    }

    /// One `x = 0` per variable.
    pub fn fix_to_zero(&self, name: &str, vars: &[VarRef]) -> Result<BuiltBlock, BlockError> {
        if vars.is_empty() {
            return Err(BlockError::EmptyVariables);
        }
        for v in vars {
            self.lookup(v)?;
        }
        let names = member_names(name, vars.len());
        let constraints = vars
            .iter()
            .zip(names)
            .map(|(v, n)| Constraint::new(n, LinearExpr::var(v.clone()), Sense::Eq, Rational::zero()))
            .collect();
        Ok(BuiltBlock::new(TagName::FixToZero, constraints))
    }

    /// `f <= M·t` and `g <= M·(1 - t)`: at least one of `f <= 0`, `g <= 0`.
    pub fn either_or(
        &mut self,
        name: &str,
        f: &LinearExpr,
        g: &LinearExpr,
        m: &BigM,
        t: Option<VarRef>,
    ) -> Result<BuiltBlock, BlockError> {
        self.check_expr(f)?;
        self.check_expr(g)?;
        let m = self.resolve_m(m, &[f.clone(), g.clone()])?;
        let (t, aux) = self.indicator(t)?;
        let mut block = BuiltBlock::new(TagName::EitherOr, big_m_pair(name, f, g, &m, &t));
        block.aux_variables = aux;
        Ok(block)
    }

    /// `g <= M·t` and `f <= M·(1 - t)`: if `f > 0` then `g <= 0`.
    pub fn if_then_big_m(
        &mut self,
        name: &str,
        f: &LinearExpr,
        g: &LinearExpr,
        m: &BigM,
        t: Option<VarRef>,
    ) -> Result<BuiltBlock, BlockError> {
        self.check_expr(f)?;
        self.check_expr(g)?;
        let m = self.resolve_m(m, &[f.clone(), g.clone()])?;
        let (t, aux) = self.indicator(t)?;
        let mut block = BuiltBlock::new(TagName::IfThenBigM, big_m_pair(name, g, f, &m, &t));
        block.aux_variables = aux;
        Ok(block)
    }

    /// `l·y <= expr <= u·y`: the capacity window applies only when `y = 1`.
    pub fn conditional_bound(
        &self,
        name: &str,
        expr: &LinearExpr,
        lower: &Rational,
        upper: &Rational,
        indicator: &VarRef,
    ) -> Result<BuiltBlock, BlockError> {
        if expr.is_empty() {
            return Err(BlockError::EmptyExpression);
        }
        self.check_expr(expr)?;
        if !self.lookup(indicator)?.is_binary() {
            return Err(BlockError::NotBinary(indicator.clone()));
        }
        if !lower.is_positive() || lower > upper {
            return Err(BlockError::InvalidConditionalBounds);
        }
        let names = member_names(name, 2);
        Ok(BuiltBlock::new(
            TagName::ConditionalBound,
            vec![
                Constraint::relate(&names[0], expr.clone(), Sense::Le, LinearExpr::term(upper.clone(), indicator.clone())),
                Constraint::relate(&names[1], expr.clone(), Sense::Ge, LinearExpr::term(lower.clone(), indicator.clone())),
            ],
        ))
    }

    /// `f <= g` for 0/1-valued `f` and `g`.
    pub fn implies_binary(&self, name: &str, f: &LinearExpr, g: &LinearExpr) -> Result<BuiltBlock, BlockError> {
        self.binary_expr(f)?;
        self.binary_expr(g)?;
        Ok(BuiltBlock::new(TagName::ImpliesBinary, vec![Constraint::relate(name, f.clone(), Sense::Le, g.clone())]))
    }

    /// A occurs if all of `bs` occur: `Σ xB <= n - 1 + xA`.
    pub fn if_all_then(&self, name: &str, a: &VarRef, bs: &[VarRef]) -> Result<BuiltBlock, BlockError> {
        self.if_at_least_then(name, a, bs, bs.len())
    }

    /// A occurs if at least `k` of `bs` occur: `Σ xB - (n - k + 1)·xA <= k - 1`.
    ///
    /// A cardinality extension of [`BlockBuilder::if_all_then`]; `k = n` is
    /// exactly that builder.
    pub fn if_at_least_then(&self, name: &str, a: &VarRef, bs: &[VarRef], k: usize) -> Result<BuiltBlock, BlockError> {
        self.conjunction_vars(a, bs)?;
        let n = bs.len();
        if k < 1 || k > n {
            return Err(BlockError::InvalidThreshold { n });
        }
        let lhs = LinearExpr::sum(bs.iter().cloned()) - LinearExpr::term(int((n - k + 1) as i64), a.clone());
        Ok(BuiltBlock::new(TagName::IfAllThen, vec![Constraint::new(name, lhs, Sense::Le, int(k as i64 - 1))]))
    }

    /// A occurs only if all of `bs` occur.
    pub fn only_if_all(
        &self,
        name: &str,
        a: &VarRef,
        bs: &[VarRef],
        strength: Strength,
    ) -> Result<BuiltBlock, BlockError> {
        self.conjunction_vars(a, bs)?;
        match strength {
            Strength::Disaggregated => {
                let names = member_names(name, bs.len());
                let constraints = bs
                    .iter()
                    .zip(names)
                    .map(|(b, n)| {
                        Constraint::relate(n, LinearExpr::var(a.clone()), Sense::Le, LinearExpr::var(b.clone()))
                    })
                    .collect();
                Ok(BuiltBlock::new(TagName::OnlyIfAll, constraints))
            }
            Strength::Aggregated => {
                let lhs = LinearExpr::term(int(bs.len() as i64), a.clone());
                let c = Constraint::relate(name, lhs, Sense::Le, LinearExpr::sum(bs.iter().cloned()));
                // The single aggregated form is filed under the if-then-on-a-conjunction leaf.
                Ok(BuiltBlock::new(TagName::IfAllThen, vec![c]))
            }
        }
    }

    /// Both directions: `xA = ∧ xBj`.
    pub fn iff_all(&self, name: &str, a: &VarRef, bs: &[VarRef]) -> Result<BuiltBlock, BlockError> {
        let if_part = self.if_all_then(&format!("{name}_if"), a, bs)?;
        let only_part = self.only_if_all(&format!("{name}_only"), a, bs, Strength::Disaggregated)?;
        let mut constraints = if_part.constraints;
        constraints.extend(only_part.constraints);
        Ok(BuiltBlock::new(TagName::IffAll, constraints))
    }

    /// If `z = 1` then `f = c`.
    pub fn fix_value_if(
        &self,
        name: &str,
        z: &VarRef,
        f: &LinearExpr,
        c: &Rational,
        m: &BigM,
    ) -> Result<BuiltBlock, BlockError> {
        if !self.lookup(z)?.is_binary() {
            return Err(BlockError::NotBinary(z.clone()));
        }
        self.check_expr(f)?;
        let m = self.resolve_m(m, &[f.clone() - LinearExpr::constant(c.clone())])?;
        let slack = LinearExpr::constant(m.clone()) - LinearExpr::term(m, z.clone());
        let names = member_names(name, 2);
        Ok(BuiltBlock::new(
            TagName::FixValueIf,
            vec![
                Constraint::relate(&names[0], f.clone() - slack.clone(), Sense::Le, LinearExpr::constant(c.clone())),
                Constraint::relate(&names[1], f.clone() + slack, Sense::Ge, LinearExpr::constant(c.clone())),
            ],
        ))
    }

    /// Plain `lhs op rhs` with the catch-all tag for its sense.
    pub fn general(&self, name: &str, lhs: &LinearExpr, sense: Sense, rhs: &LinearExpr) -> Result<BuiltBlock, BlockError> {
        self.check_expr(lhs)?;
        self.check_expr(rhs)?;
        let c = Constraint::relate(name, lhs.clone(), sense, rhs.clone());
        let tag = match c.canonicalize().sense {
            Sense::Le => TagName::GeneralLE,
            Sense::Eq => TagName::GeneralEQ,
            Sense::Ge => TagName::GeneralGE,
        };
        Ok(BuiltBlock::new(tag, vec![c]))
    }

    fn conjunction_vars(&self, a: &VarRef, bs: &[VarRef]) -> Result<(), BlockError> {
        self.binaries(bs)?;
        if !self.lookup(a)?.is_binary() {
            return Err(BlockError::NotBinary(a.clone()));
        }
        if bs.contains(a) {
            return Err(BlockError::DuplicateVariable(a.clone()));
        }
        Ok(())
    }
}

/// `first <= M·t`, `second <= M·(1 - t)`.
fn big_m_pair(name: &str, first: &LinearExpr, second: &LinearExpr, m: &Rational, t: &VarRef) -> Vec<Constraint> {
    let names = member_names(name, 2);
    let mt = LinearExpr::term(m.clone(), t.clone());
    vec![
        Constraint::relate(&names[0], first.clone(), Sense::Le, mt.clone()),
        Constraint::relate(&names[1], second.clone(), Sense::Le, LinearExpr::constant(m.clone()) - mt),
    ]
}

fn member_names(stem: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![stem.to_string()]
    } else {
        (1..=n).map(|i| format!("{stem}_{i}")).collect()
    }
}
