//! LP text format.
//!
//! ```text
//! // model: knapsack
//! max: 3 x1 + 4 x2 + 5 x3;
//!
//! // constraints
//! cap: 2 x1 + 3 x2 + 4 x3 <= 5;
//!
//! // bounds
//! y <= 10;
//!
//! // integrality
//! int y;
//! bin x1,x2,x3;
//! ```
//!
//! Grammar (statements end in `;`, `//` starts a comment):
//!
//! ```text
//! statement  := objective | constraint | bound | section
//! objective  := ("max" | "min" | "maximize" | "minimize") ":" [expr]
//! constraint := [ident ":"] expr rel expr
//! bound      := ident {"," ident} rel number      (unnamed, single variable)
//! section    := ("int" | "bin") ident {"," ident}
//! expr       := ["+"|"-"] term {("+"|"-") term}
//! term       := number ["*"] ident | number | ident
//! number     := digits ["." digits] ["/" digits]
//! rel        := "<=" | "=<" | "<" | ">=" | "=>" | ">" | "="
//! ```
//!
//! An unnamed relation between one variable term and a constant is a bound;
//! every other relation is a constraint, auto-named `R<k>` if unnamed.
//! Strict relations are read as non-strict.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::{format_expr, Constraint, LinearExpr, Model, NumberType, Objective, ProblemSense, Sense, VarRef, Variable};
use crate::rational::{format_rational, parse_rational, Rational};

const MODEL_HEADER: &str = "// model:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct LpError {
    pub line: usize,
    pub column: usize,
    pub kind: LpErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpErrorKind {
    Syntax,
    UnsupportedSection,
    DuplicateName,
}

impl fmt::Display for LpErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpErrorKind::Syntax => "syntax error",
            LpErrorKind::UnsupportedSection => "unsupported section",
            LpErrorKind::DuplicateName => "duplicate name",
        })
    }
}

/// Parsed LP text with the line span of every constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpDocument {
    pub text: String,
    pub model: Model,
    pub spans: BTreeMap<String, (usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Colon,
    Comma,
    Semi,
    Rel(Sense),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, kind: LpErrorKind, message: impl Into<String>) -> LpError {
    LpError { line, column, kind, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, LpError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (lno, col) = (li + 1, i + 1);
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: lno, column: col });
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if chars.get(i) == Some(&'/') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                        i += 1;
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                let value = parse_rational(&lit)
                    .map_err(|_| err(lno, col, LpErrorKind::Syntax, format!("invalid number `{lit}`")))?;
                push(&mut out, Tok::Num(value));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            } else {
                let next = chars.get(i + 1).copied();
                let (tok, width) = match (c, next) {
                    ('<', Some('=')) | ('=', Some('<')) => (Tok::Rel(Sense::Le), 2),
                    ('>', Some('=')) | ('=', Some('>')) => (Tok::Rel(Sense::Ge), 2),
                    ('<', _) => (Tok::Rel(Sense::Le), 1),
                    ('>', _) => (Tok::Rel(Sense::Ge), 1),
                    ('=', _) => (Tok::Rel(Sense::Eq), 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('*', _) => (Tok::Star, 1),
                    (':', _) => (Tok::Colon, 1),
                    (',', _) => (Tok::Comma, 1),
                    (';', _) => (Tok::Semi, 1),
                    _ => return Err(err(lno, col, LpErrorKind::Syntax, format!("unexpected character `{c}`"))),
                };
                push(&mut out, tok);
                i += width;
            }
        }
    }
    Ok(out)
}

fn header_name(text: &str) -> Option<String> {
    text.lines().find_map(|l| l.trim_start().strip_prefix(MODEL_HEADER).map(|n| n.trim().to_string()))
}

/// Parses an affine expression such as `3 x + y - 1/2 z + 4`.
pub fn parse_expr(text: &str) -> Result<LinearExpr, LpError> {
    let toks = tokenize(text)?;
    let mut p = ExprParser { toks: &toks, pos: 0 };
    let e = p.expr()?;
    if let Some(t) = toks.get(p.pos) {
        return Err(err(t.line, t.column, LpErrorKind::Syntax, "unexpected token after expression"));
    }
    Ok(e)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, LpError> {
        let (l, c) = self.here();
        Err(err(l, c, LpErrorKind::Syntax, message))
    }

    /// Possibly empty sum of terms.
    fn expr(&mut self) -> Result<LinearExpr, LpError> {
        let mut acc = LinearExpr::zero();
        let mut first = true;
        loop {
            let mut negative = false;
            let mut signed = false;
            while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
                negative ^= *t == Tok::Minus;
                signed = true;
                self.pos += 1;
            }
            if !first && !signed {
                return Ok(acc);
            }
            match self.peek() {
                Some(Tok::Num(_) | Tok::Ident(_)) => {}
                _ if signed => return self.fail("expected a term after sign"),
                _ => return Ok(acc),
            }
            let term = self.term()?;
            acc = if negative { acc - term } else { acc + term };
            first = false;
        }
    }

    fn term(&mut self) -> Result<LinearExpr, LpError> {
        match self.peek().cloned() {
            Some(Tok::Num(k)) => {
                self.pos += 1;
                let starred = self.peek() == Some(&Tok::Star);
                if starred {
                    self.pos += 1;
                }
                match self.peek().cloned() {
                    Some(Tok::Ident(name)) if !is_keyword(&name) || starred => {
                        self.pos += 1;
                        Ok(LinearExpr::term(k, var_ref(&name)))
                    }
                    _ if starred => self.fail("expected a variable after `*`"),
                    _ => Ok(LinearExpr::constant(k)),
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(LinearExpr::var(var_ref(&name)))
            }
            _ => self.fail("expected a term"),
        }
    }
}

fn var_ref(name: &str) -> VarRef {
    VarRef::new(name)
}

fn is_keyword(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "int" | "bin")
}

fn objective_sense(s: &str) -> Option<ProblemSense> {
    match s.to_ascii_lowercase().as_str() {
        "max" | "maximize" | "maximise" => Some(ProblemSense::Max),
        "min" | "minimize" | "minimise" => Some(ProblemSense::Min),
        _ => None,
    }
}

fn is_unsupported_section(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "sec" | "sin" | "free" | "sos" | "sos1" | "sos2")
}

struct Builder {
    order: Vec<VarRef>,
    vars: BTreeMap<VarRef, Variable>,
}

impl Builder {
    fn touch(&mut self, v: &VarRef) -> &mut Variable {
        if !self.vars.contains_key(v) {
            self.order.push(v.clone());
            self.vars.insert(v.clone(), Variable::new(v.clone(), NumberType::NonnegReal));
        }
        self.vars.get_mut(v).unwrap()
    }

    fn touch_expr(&mut self, e: &LinearExpr) {
        for v in e.variables() {
            self.touch(v);
        }
    }
}

pub fn parse_lp(text: &str) -> Result<Model, LpError> {
    parse_document(text).map(|d| d.model)
}

pub fn parse_document(text: &str) -> Result<LpDocument, LpError> {
    let toks = tokenize(text)?;
    let mut model = Model::new(header_name(text).unwrap_or_else(|| "model".to_string()));
    let mut b = Builder { order: Vec::new(), vars: BTreeMap::new() };
    let mut spans = BTreeMap::new();
    let mut objective_seen = false;
    let mut names = BTreeSet::new();
    let mut int_vars = Vec::new();
    let mut bin_vars = Vec::new();

    let mut start = 0;
    while start < toks.len() {
        let Some(end) = toks[start..].iter().position(|t| t.tok == Tok::Semi).map(|e| start + e) else {
            let t = toks.last().unwrap();
            return Err(err(t.line, t.column, LpErrorKind::Syntax, "missing `;` at end of statement"));
        };
        let stmt = &toks[start..end];
        let span = (toks[start].line, toks[end].line);
        start = end + 1;
        if stmt.is_empty() {
            continue;
        }
        let head = &stmt[0];
        let head_ident = match &head.tok {
            Tok::Ident(s) => Some(s.as_str()),
            _ => None,
        };
        let colon_next = stmt.get(1).is_some_and(|t| t.tok == Tok::Colon);

        if let (Some(sense), true) = (head_ident.and_then(objective_sense), colon_next) {
            if objective_seen {
                return Err(err(head.line, head.column, LpErrorKind::Syntax, "more than one objective"));
            }
            objective_seen = true;
            let expr = full_expr(&stmt[2..])?;
            b.touch_expr(&expr);
            model.objective = Objective { sense, expr };
            continue;
        }
        if let Some(word) = head_ident {
            let lower = word.to_ascii_lowercase();
            if (lower == "int" || lower == "bin") && !colon_next {
                let list = ident_list(&stmt[1..])?;
                for (v, _) in &list {
                    b.touch(v);
                }
                let target = if lower == "int" { &mut int_vars } else { &mut bin_vars };
                target.extend(list.into_iter().map(|(v, _)| v));
                continue;
            }
            if is_unsupported_section(word) && !colon_next {
                return Err(err(head.line, head.column, LpErrorKind::UnsupportedSection, format!("`{word}` sections are not supported")));
            }
        }

        let (name, body) = match (head_ident, colon_next) {
            (Some(n), true) => (Some((n.to_string(), head)), &stmt[2..]),
            _ => (None, stmt),
        };
        let rels: Vec<usize> = body.iter().enumerate().filter(|(_, t)| matches!(t.tok, Tok::Rel(_))).map(|(i, _)| i).collect();
        let at = body.first().unwrap_or(head);
        match rels.len() {
            0 => return Err(err(at.line, at.column, LpErrorKind::Syntax, "expected a relation (<=, =, >=)")),
            1 => {}
            _ => {
                let t = &body[rels[1]];
                return Err(err(t.line, t.column, LpErrorKind::UnsupportedSection, "range constraints are not supported"));
            }
        }
        let r = rels[0];
        let Tok::Rel(sense) = body[r].tok else { unreachable!() };

        if name.is_none() && body[..r].iter().any(|t| t.tok == Tok::Comma) {
            // x, y >= 0
            let list = ident_list(&body[..r])?;
            let value = full_expr(&body[r + 1..])?;
            if !value.terms().is_empty() {
                return Err(err(body[r].line, body[r].column, LpErrorKind::Syntax, "bound lists need a constant right-hand side"));
            }
            for (v, _) in list {
                apply_bound(b.touch(&v), sense, value.constant_part().clone());
            }
            continue;
        }

        let lhs = full_expr(&body[..r])?;
        let rhs = full_expr(&body[r + 1..])?;
        if name.is_none() {
            if let Some((k, v, s)) = single_bound(&lhs, &rhs, sense) {
                apply_bound(b.touch(&v), s, k);
                continue;
            }
        }
        let (cname, pos) = match name {
            Some((n, t)) => (n, (t.line, t.column)),
            None => (format!("R{}", model.constraints.len() + 1), (at.line, at.column)),
        };
        if !names.insert(cname.clone()) {
            return Err(err(pos.0, pos.1, LpErrorKind::DuplicateName, format!("constraint `{cname}` defined twice")));
        }
        b.touch_expr(&lhs);
        b.touch_expr(&rhs);
        let moved = rhs.without_constant();
        let lhs_expr = lhs - moved;
        model.constraints.push(Constraint::new(cname.clone(), lhs_expr, sense, rhs.constant_part().clone()));
        spans.insert(cname, span);
    }

    for v in int_vars {
        b.touch(&v).number_type = NumberType::NonnegInteger;
    }
    for v in bin_vars {
        let var = b.touch(&v);
        var.number_type = NumberType::Binary;
        var.lower = Rational::zero();
        var.upper = Some(num_traits::One::one());
    }
    let Builder { order, mut vars } = b;
    model.variables = order.into_iter().map(|v| vars.remove(&v).unwrap()).collect();
    Ok(LpDocument { text: text.to_string(), model, spans })
}

fn full_expr(toks: &[Spanned]) -> Result<LinearExpr, LpError> {
    let mut p = ExprParser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos < toks.len() {
        return p.fail("unexpected token in expression");
    }
    Ok(e)
}

fn ident_list(toks: &[Spanned]) -> Result<Vec<(VarRef, (usize, usize))>, LpError> {
    let mut out = Vec::new();
    let mut expect_ident = true;
    for t in toks {
        match (&t.tok, expect_ident) {
            (Tok::Ident(s), true) => out.push((var_ref(s), (t.line, t.column))),
            (Tok::Comma, false) => {}
            _ => return Err(err(t.line, t.column, LpErrorKind::Syntax, "expected a comma-separated list of variables")),
        }
        expect_ident = !expect_ident;
    }
    if expect_ident {
        let (line, column) = toks.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
        return Err(err(line, column, LpErrorKind::Syntax, "expected a variable name"));
    }
    Ok(out)
}

/// `a·x op c` or `c op a·x`, normalized to `x op' c/a`.
fn single_bound(lhs: &LinearExpr, rhs: &LinearExpr, sense: Sense) -> Option<(Rational, VarRef, Sense)> {
    let (var_side, const_side, sense) = match (lhs.terms().len(), rhs.terms().len()) {
        (1, 0) => (lhs, rhs, sense),
        (0, 1) => (rhs, lhs, sense.flipped()),
        _ => return None,
    };
    if !var_side.constant_part().is_zero() {
        return None;
    }
    let t = &var_side.terms()[0];
    let value = const_side.constant_part() / &t.coefficient;
    let sense = if t.coefficient.is_negative() { sense.flipped() } else { sense };
    Some((value, t.var.clone(), sense))
}

fn apply_bound(v: &mut Variable, sense: Sense, value: Rational) {
    match sense {
        Sense::Ge => v.lower = value,
        Sense::Le => v.upper = Some(value),
        Sense::Eq => {
            v.lower = value.clone();
            v.upper = Some(value);
        }
    }
}

/// Deterministic LP text: objective, constraints by name, bounds and
/// integrality by variable.
pub fn write_lp(m: &Model) -> String {
    let mut out = String::new();
    out.push_str(&format!("{MODEL_HEADER} {}\n", m.name));
    let sense = match m.objective.sense {
        ProblemSense::Max => "max",
        ProblemSense::Min => "min",
    };
    out.push_str(&format!("{sense}: {};\n", format_expr(&m.objective.expr)));

    out.push_str("\n// constraints\n");
    let mut constraints: Vec<&Constraint> = m.constraints.iter().collect();
    constraints.sort_by(|a, b| a.name.cmp(&b.name));
    for c in constraints {
        out.push_str(&format!("{}: {} {} {};\n", c.name, format_expr(&c.lhs), c.sense.symbol(), format_rational(&c.rhs)));
    }

    let mut vars: Vec<&Variable> = m.variables.iter().collect();
    vars.sort_by(|a, b| a.var.cmp(&b.var));
    out.push_str("\n// bounds\n");
    for v in vars.iter().filter(|v| !v.is_binary()) {
        if !v.lower.is_zero() || v.upper.is_none() {
            out.push_str(&format!("{} >= {};\n", v.var, format_rational(&v.lower)));
        }
        if let Some(u) = &v.upper {
            out.push_str(&format!("{} <= {};\n", v.var, format_rational(u)));
        }
    }

    out.push_str("\n// integrality\n");
    let list = |t: NumberType| vars.iter().filter(|v| v.number_type == t).map(|v| v.var.to_string()).collect::<Vec<_>>();
    for (kw, names) in [("int", list(NumberType::NonnegInteger)), ("bin", list(NumberType::Binary))] {
        if !names.is_empty() {
            out.push_str(&format!("{kw} {};\n", names.join(",")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn small_example() {
        let m = parse_lp("max: 3x+2y; c1: x+y<=4; x,y>=0; int x,y;").unwrap();
        assert_eq!(m.variables.len(), 2);
        assert_eq!(m.constraints.len(), 1);
        assert_eq!(m.objective.sense, ProblemSense::Max);
        assert!(m.variables.iter().all(|v| v.number_type == NumberType::NonnegInteger));
        assert_eq!(m.constraints[0].to_string(), "c1: x + y <= 4");
    }

    #[test]
    fn empty_objective() {
        let m = parse_lp("min: 0;").unwrap();
        assert!(m.objective.expr.is_empty());
        assert!(m.variables.is_empty() && m.constraints.is_empty());
        let m = parse_lp("").unwrap();
        assert_eq!(m.objective, Objective::default());
    }

    #[test]
    fn coefficient_forms_and_exactness() {
        let e = parse_expr("3x + 2 * y - 0.125 z + 1/3 w - 4").unwrap();
        assert_eq!(e.coefficient(&VarRef::new("x")), int(3));
        assert_eq!(e.coefficient(&VarRef::new("y")), int(2));
        assert_eq!(e.coefficient(&VarRef::new("z")), ratio(-1, 8));
        assert_eq!(e.coefficient(&VarRef::new("w")), ratio(1, 3));
        assert_eq!(*e.constant_part(), int(-4));
        assert_eq!(parse_expr("- a").unwrap(), -LinearExpr::var("a"));
        assert_eq!(parse_expr("").unwrap(), LinearExpr::zero());
    }

    #[test]
    fn rhs_variables_move_left_and_bounds_are_read() {
        let m = parse_lp("c: x + 2 >= y - 1;\n-2 x >= -10;\n3 <= y;").unwrap();
        assert_eq!(m.constraints[0].to_string(), "c: x - y + 2 >= -1");
        let x = m.variable(&VarRef::new("x")).unwrap();
        assert_eq!(x.upper, Some(int(5)));
        assert_eq!(m.variable(&VarRef::new("y")).unwrap().lower, int(3));
    }

    #[test]
    fn unnamed_constraints_get_row_names() {
        let m = parse_lp("x + y <= 1; c: x >= 0; z >= 1; 2 x + z = 3;").unwrap();
        let names: Vec<&str> = m.constraints.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["R1", "c", "R3"]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_lp("max: x;\nc1: x + ? <= 3;").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        let e = parse_lp("c: x <= 1;\nc: x <= 2;").unwrap_err();
        assert_eq!(e.kind, LpErrorKind::DuplicateName);
        let e = parse_lp("sec x;").unwrap_err();
        assert_eq!(e.kind, LpErrorKind::UnsupportedSection);
        let e = parse_lp("c: x <= 1").unwrap_err();
        assert_eq!(e.kind, LpErrorKind::Syntax);
        assert!(parse_lp("c: 1 <= x <= 2;").is_err());
        assert!(parse_lp("c: x + + <= 2;").is_err());
    }

    #[test]
    fn writer_layout() {
        let m = parse_lp("// model: demo\nmax: 3x+2y; c1: x+y<=4; c0: x - 1/3 y >= 0.5; y <= 7; int x; bin z; c2: z <= 1;").unwrap();
        let text = write_lp(&m);
        assert_eq!(
            text,
            "// model: demo\nmax: 3 x + 2 y;\n\n// constraints\nc0: x - 1/3 y >= 0.5;\nc1: x + y <= 4;\nc2: z <= 1;\n\n// bounds\nx >= 0;\ny <= 7;\n\n// integrality\nint x;\nbin z;\n"
        );
        let again = parse_lp(&text).unwrap();
        assert!(again.structurally_eq(&m));
        assert_eq!(write_lp(&again), text);
    }

    #[test]
    fn empty_model_writes_header_and_sections() {
        let text = write_lp(&Model::new("empty"));
        assert_eq!(text, "// model: empty\nmin: 0;\n\n// constraints\n\n// bounds\n\n// integrality\n");
        assert!(parse_lp(&text).unwrap().structurally_eq(&Model::new("empty")));
    }

    #[test]
    fn spans_point_at_lines() {
        let d = parse_document("max: x;\n\nc1: x\n  <= 4;\n").unwrap();
        assert_eq!(d.spans["c1"], (3, 4));
    }
}
