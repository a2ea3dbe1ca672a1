//! Builders a tree leaf can name, their parameter schemas, and how a
//! parameter bundle turns into a model effect.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::blocks::{BalanceKind, BigM, BlockBuilder, BlockError, BoundKind, BoundValue, BuiltBlock, SetOptions, Strength, AUX_PREFIX};
use crate::io::lp::parse_expr;
use crate::model::{is_identifier, LinearExpr, NumberType, Objective, ProblemSense, Sense, VarRef, Variable};
use crate::rational::{serde_str, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    /// Identifiers of variables to declare.
    NewNames,
    Variables,
    Variable,
    /// LP-syntax affine expression, e.g. `2 x + y - 3`.
    Expr,
    Rational,
    Integer,
    RationalList,
    SignList,
    /// `"auto"` or a positive rational.
    BigM,
    Choice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub optional: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<String>,
}

impl ParamSpec {
    fn req(name: &str, kind: ParamKind) -> Self {
        ParamSpec { name: name.into(), kind, optional: false, options: Vec::new() }
    }

    fn opt(name: &str, kind: ParamKind) -> Self {
        ParamSpec { optional: true, ..ParamSpec::req(name, kind) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuilderRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub params: Vec<ParamSpec>,
}

/// Parameter schema of a registered builder, `None` if unknown.
pub fn schema(name: &str, preset: Option<&str>) -> Option<Vec<ParamSpec>> {
    use ParamKind::*;
    use ParamSpec as P;
    let vars = || P::req("vars", Variables);
    let conj = || vec![P::req("a", Variable), P::req("bs", Variables)];
    Some(match (name, preset) {
        ("declare_continuous" | "declare_integer", None) => vec![P::req("names", NewNames), P::opt("upper", Rational)],
        ("declare_binary", None) => vec![P::req("names", NewNames)],
        ("minimize" | "maximize", None) => vec![P::req("expr", Expr)],
        ("set_covering" | "set_partitioning", None) => vec![vars()],
        ("set_covering" | "set_partitioning", Some("WEIGHTED")) => vec![vars(), P::req("rhs", Integer)],
        ("set_covering" | "set_partitioning", Some("GENERALIZED")) => {
            vec![vars(), P::req("signs", SignList), P::opt("rhs", Integer)]
        }
        ("set_packing" | "fix_to_zero", None) => vec![vars()],
        ("knapsack", None) => vec![vars(), P::req("weights", RationalList), P::req("capacity", Integer)],
        ("bound", Some("SUPPLY_UPPER_FIXED" | "DEMAND_LOWER_FIXED")) => {
            vec![P::req("expr", Expr), P::req("bound", Rational)]
        }
        ("bound", Some("SUPPLY_UPPER_VARIABLE" | "DEMAND_LOWER_VARIABLE")) => {
            vec![P::req("expr", Expr), P::req("bound_var", Variable), P::opt("multiplier", Rational)]
        }
        ("balance", Some("IO_BALANCE" | "PERIOD_LINK" | "ASSIGN_VALUE" | "INVENTORY")) => {
            vec![P::req("lhs", Expr), P::req("rhs", Expr)]
        }
        ("if_then_big_m" | "either_or", None) => {
            vec![P::req("f", Expr), P::req("g", Expr), P::opt("big_m", BigM), P::opt("indicator", Variable)]
        }
        ("if_then_big_m", Some("CONDITIONAL_BOUND")) => vec![
            P::req("expr", Expr),
            P::req("lower", Rational),
            P::req("upper", Rational),
            P::req("indicator", Variable),
        ],
        ("implies_binary", None) => vec![P::req("f", Expr), P::req("g", Expr)],
        ("if_all_then", None) => {
            let mut p = conj();
            p.push(P::opt("at_least", Integer));
            p
        }
        ("only_if_all", None) => {
            let mut p = conj();
            p.push(ParamSpec { options: vec!["DISAGGREGATED".into(), "AGGREGATED".into()], ..P::opt("strength", Choice) });
            p
        }
        ("iff_all", None) => conj(),
        ("fix_value_if", None) => {
            vec![P::req("z", Variable), P::req("f", Expr), P::req("c", Rational), P::opt("big_m", BigM)]
        }
        ("general", Some("LE" | "EQ" | "GE")) => vec![P::req("lhs", Expr), P::req("rhs", Expr)],
        _ => return None,
    })
}

/// What a leaf answer does to the model under construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    Declare(Vec<Variable>),
    Objective(Objective),
    Block(BuiltBlock),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("missing parameters: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("parameter `{param}`: {message}")]
    Invalid { param: String, message: String },
    #[error("unknown builder `{0}`")]
    UnknownBuilder(String),
    #[error(transparent)]
    Block(#[from] BlockError),
}

fn invalid(param: &str, message: impl Into<String>) -> ApplyError {
    ApplyError::Invalid { param: param.to_string(), message: message.into() }
}

/// Typed parameter values after schema checking.
struct Args<'a> {
    raw: &'a Map<String, Value>,
}

impl Args<'_> {
    fn has(&self, name: &str) -> bool {
        self.raw.get(name).is_some_and(|v| !v.is_null())
    }

    fn get(&self, name: &str) -> &Value {
        &self.raw[name]
    }

    fn strings(&self, name: &str) -> Result<Vec<String>, ApplyError> {
        let arr = self.get(name).as_array().ok_or_else(|| invalid(name, "expected a list of names"))?;
        arr.iter().map(|v| v.as_str().map(str::to_string).ok_or_else(|| invalid(name, "expected a list of names"))).collect()
    }

    fn vars(&self, name: &str) -> Result<Vec<VarRef>, ApplyError> {
        Ok(self.strings(name)?.iter().map(|s| VarRef::new(s)).collect())
    }

    fn var(&self, name: &str) -> Result<VarRef, ApplyError> {
        self.get(name).as_str().map(VarRef::new).ok_or_else(|| invalid(name, "expected a variable name"))
    }

    fn expr(&self, name: &str) -> Result<LinearExpr, ApplyError> {
        match self.get(name) {
            Value::String(s) => parse_expr(s).map_err(|e| invalid(name, e.to_string())),
            Value::Number(_) => Ok(LinearExpr::constant(self.rational(name)?)),
            _ => Err(invalid(name, "expected an expression")),
        }
    }

    fn rational(&self, name: &str) -> Result<Rational, ApplyError> {
        serde_str::from_json(self.get(name)).map_err(|m| invalid(name, m))
    }

    fn integer(&self, name: &str) -> Result<u64, ApplyError> {
        self.get(name).as_u64().ok_or_else(|| invalid(name, "expected a nonnegative integer"))
    }

    fn rationals(&self, name: &str) -> Result<Vec<Rational>, ApplyError> {
        let arr = self.get(name).as_array().ok_or_else(|| invalid(name, "expected a list of numbers"))?;
        arr.iter().map(|v| serde_str::from_json(v).map_err(|m| invalid(name, m))).collect()
    }

    fn signs(&self, name: &str) -> Result<Vec<i8>, ApplyError> {
        let arr = self.get(name).as_array().ok_or_else(|| invalid(name, "expected a list of +1/-1"))?;
        arr.iter()
            .map(|v| match v.as_i64() {
                Some(1) => Ok(1),
                Some(-1) => Ok(-1),
                _ => Err(invalid(name, "signs must be +1 or -1")),
            })
            .collect()
    }

    fn big_m(&self, name: &str) -> Result<BigM, ApplyError> {
        if !self.has(name) || self.get(name).as_str().is_some_and(|s| s.eq_ignore_ascii_case("auto")) {
            return Ok(BigM::Auto);
        }
        Ok(BigM::Value(self.rational(name)?))
    }

    fn choice(&self, name: &str, options: &[String]) -> Result<String, ApplyError> {
        let s = self.get(name).as_str().ok_or_else(|| invalid(name, "expected one of the options"))?;
        options.iter().find(|o| *o == s).cloned().ok_or_else(|| invalid(name, format!("`{s}` is not one of {options:?}")))
    }

    fn check(&self, spec: &ParamSpec) -> Result<(), ApplyError> {
        let n = spec.name.as_str();
        match spec.kind {
            ParamKind::NewNames | ParamKind::Variables => self.strings(n).map(drop),
            ParamKind::Variable => self.var(n).map(drop),
            ParamKind::Expr => self.expr(n).map(drop),
            ParamKind::Rational => self.rational(n).map(drop),
            ParamKind::Integer => self.integer(n).map(drop),
            ParamKind::RationalList => self.rationals(n).map(drop),
            ParamKind::SignList => self.signs(n).map(drop),
            ParamKind::BigM => self.big_m(n).map(drop),
            ParamKind::Choice => self.choice(n, &spec.options).map(drop),
        }
    }
}

/// Type-checks `params` against `builder`'s schema: unknown or ill-typed
/// parameters are errors; missing required ones are reported separately.
pub fn check_params(builder: &BuilderRef, params: &Map<String, Value>) -> Result<Vec<String>, ApplyError> {
    let specs = &builder.params;
    if let Some(unknown) = params.keys().find(|k| !specs.iter().any(|s| &s.name == *k)) {
        return Err(invalid(unknown, "not a parameter of this question"));
    }
    let args = Args { raw: params };
    let mut missing = Vec::new();
    for s in specs {
        if args.has(&s.name) {
            args.check(s)?;
        } else if !s.optional {
            missing.push(s.name.clone());
        }
    }
    Ok(missing)
}

/// Runs the builder named by a leaf.
pub fn apply(
    builder: &BuilderRef,
    params: &Map<String, Value>,
    ctx: &mut BlockBuilder,
    stem: &str,
) -> Result<Effect, ApplyError> {
    let missing = check_params(builder, params)?;
    if !missing.is_empty() {
        return Err(ApplyError::Missing(missing));
    }
    let a = Args { raw: params };
    let preset = builder.preset.as_deref();
    let block = match builder.name.as_str() {
        "declare_continuous" | "declare_integer" | "declare_binary" => {
            let number_type = match builder.name.as_str() {
                "declare_continuous" => NumberType::NonnegReal,
                "declare_integer" => NumberType::NonnegInteger,
                _ => NumberType::Binary,
            };
            let names = a.strings("names")?;
            if names.is_empty() {
                return Err(invalid("names", "declare at least one variable"));
            }
            let mut out = Vec::new();
            for n in &names {
                if !is_identifier(n) || n.starts_with(AUX_PREFIX.trim_end_matches('_')) {
                    return Err(invalid("names", format!("`{n}` is not a usable variable name")));
                }
                let v = VarRef::new(n);
                if ctx.variables().contains_key(&v) || out.iter().any(|x: &Variable| x.var == v) {
                    return Err(invalid("names", format!("`{n}` is already declared")));
                }
                let mut var = Variable::new(v, number_type);
                if a.has("upper") {
                    let u = a.rational("upper")?;
                    if num_traits::Signed::is_negative(&u) {
                        return Err(invalid("upper", "upper bound must be nonnegative"));
                    }
                    var.upper = Some(u);
                }
                out.push(var);
            }
            for v in &out {
                ctx.declare(v.clone());
            }
            return Ok(Effect::Declare(out));
        }
        "minimize" | "maximize" => {
            let expr = a.expr("expr")?;
            if let Some(v) = expr.variables().find(|v| !ctx.variables().contains_key(*v)) {
                return Err(invalid("expr", format!("unknown variable `{v}`")));
            }
            let sense = if builder.name == "maximize" { ProblemSense::Max } else { ProblemSense::Min };
            return Ok(Effect::Objective(Objective { sense, expr }));
        }
        "set_covering" | "set_partitioning" => {
            let opts = match preset {
                Some("WEIGHTED") => SetOptions::weighted(a.integer("rhs")?),
                Some("GENERALIZED") => {
                    let rhs = if a.has("rhs") { a.integer("rhs")? } else { 1 };
                    SetOptions::generalized(rhs, a.signs("signs")?)
                }
                _ => SetOptions::default(),
            };
            if builder.name == "set_covering" {
                ctx.set_covering(stem, &a.vars("vars")?, opts)?
            } else {
                ctx.set_partitioning(stem, &a.vars("vars")?, opts)?
            }
        }
        "set_packing" => ctx.set_packing(stem, &a.vars("vars")?)?,
        "fix_to_zero" => ctx.fix_to_zero(stem, &a.vars("vars")?)?,
        "knapsack" => ctx.knapsack(stem, &a.vars("vars")?, &a.rationals("weights")?, a.integer("capacity")?)?,
        "bound" => {
            let (kind, fixed) = match preset {
                Some("SUPPLY_UPPER_FIXED") => (BoundKind::SupplyUpper, true),
                Some("SUPPLY_UPPER_VARIABLE") => (BoundKind::SupplyUpper, false),
                Some("DEMAND_LOWER_FIXED") => (BoundKind::DemandLower, true),
                _ => (BoundKind::DemandLower, false),
            };
            let value = if fixed {
                BoundValue::Fixed(a.rational("bound")?)
            } else {
                let multiplier = if a.has("multiplier") { a.rational("multiplier")? } else { num_traits::One::one() };
                BoundValue::Variable { var: a.var("bound_var")?, multiplier }
            };
            ctx.bound(stem, &a.expr("expr")?, kind, &value)?
        }
        "balance" => {
            let kind = match preset {
                Some("IO_BALANCE") => BalanceKind::IoBalance,
                Some("PERIOD_LINK") => BalanceKind::PeriodLink,
                Some("ASSIGN_VALUE") => BalanceKind::AssignValue,
                _ => BalanceKind::Inventory,
            };
            ctx.balance(stem, &a.expr("lhs")?, &a.expr("rhs")?, kind)?
        }
        "if_then_big_m" if preset == Some("CONDITIONAL_BOUND") => ctx.conditional_bound(
            stem,
            &a.expr("expr")?,
            &a.rational("lower")?,
            &a.rational("upper")?,
            &a.var("indicator")?,
        )?,
        "if_then_big_m" | "either_or" => {
            let t = if a.has("indicator") { Some(a.var("indicator")?) } else { None };
            let (f, g, m) = (a.expr("f")?, a.expr("g")?, a.big_m("big_m")?);
            if builder.name == "either_or" {
                ctx.either_or(stem, &f, &g, &m, t)?
            } else {
                ctx.if_then_big_m(stem, &f, &g, &m, t)?
            }
        }
        "implies_binary" => ctx.implies_binary(stem, &a.expr("f")?, &a.expr("g")?)?,
        "if_all_then" => {
            let bs = a.vars("bs")?;
            let k = if a.has("at_least") { a.integer("at_least")? as usize } else { bs.len() };
            ctx.if_at_least_then(stem, &a.var("a")?, &bs, k)?
        }
        "only_if_all" => {
            let strength = if a.has("strength") && a.get("strength").as_str() == Some("AGGREGATED") {
                Strength::Aggregated
            } else {
                Strength::Disaggregated
            };
            ctx.only_if_all(stem, &a.var("a")?, &a.vars("bs")?, strength)?
        }
        "iff_all" => ctx.iff_all(stem, &a.var("a")?, &a.vars("bs")?)?,
        "fix_value_if" => ctx.fix_value_if(stem, &a.var("z")?, &a.expr("f")?, &a.rational("c")?, &a.big_m("big_m")?)?,
        "general" => {
            let sense = match preset {
                Some("LE") => Sense::Le,
                Some("EQ") => Sense::Eq,
                _ => Sense::Ge,
            };
            ctx.general(stem, &a.expr("lhs")?, sense, &a.expr("rhs")?)?
        }
        other => return Err(ApplyError::UnknownBuilder(other.to_string())),
    };
    Ok(Effect::Block(block))
}
