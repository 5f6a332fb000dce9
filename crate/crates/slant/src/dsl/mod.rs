//! Expression language for charts, loops and curves.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?          right-associative
//! atom   := number | name | func '(' expr ')' | '(' expr ')'
//! func   := sin cos tan exp log sqrt asin acos atan sinh cosh
//! name   := u | v | s | t | pi | parameter
//! number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//! ```
//!
//! Evaluation carries a [`Jet2`] through the tree, so one pass yields the
//! value together with all first and second partials.

mod jet2;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use jet2::Jet2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DslErrorKind {
    Syntax,
    UnknownIdentifier,
    Arity,
    UnboundVariable,
    UnboundParameter,
    Domain,
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{kind:?} at line {line}, column {col}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl DslError {
    fn eval(kind: DslErrorKind, message: String) -> Self {
        DslError {
            kind,
            message,
            line: 0,
            col: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
    S,
    T,
}

impl Var {
    fn from_name(s: &str) -> Option<Var> {
        match s {
            "u" => Some(Var::U),
            "v" => Some(Var::V),
            "s" => Some(Var::S),
            "t" => Some(Var::T),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
            Var::S => "s",
            Var::T => "t",
        }
    }

    fn index(&self) -> usize {
        match self {
            Var::U => 0,
            Var::V => 1,
            Var::S => 2,
            Var::T => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Asin,
    Acos,
    Atan,
    Sinh,
    Cosh,
}

impl Func {
    const ALL: [(Func, &'static str); 11] = [
        (Func::Sin, "sin"),
        (Func::Cos, "cos"),
        (Func::Tan, "tan"),
        (Func::Exp, "exp"),
        (Func::Log, "log"),
        (Func::Sqrt, "sqrt"),
        (Func::Asin, "asin"),
        (Func::Acos, "acos"),
        (Func::Atan, "atan"),
        (Func::Sinh, "sinh"),
        (Func::Cosh, "cosh"),
    ];

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.iter().find(|(_, n)| *n == s).map(|(f, _)| *f)
    }

    pub fn name(&self) -> &'static str {
        Func::ALL
            .iter()
            .find(|(f, _)| f == self)
            .map(|(_, n)| *n)
            .expect("listed")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Param(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Parse with every unknown name treated as a parameter.
pub fn parse(text: &str) -> Result<Expr, DslError> {
    parse::Parser::new(text, None)?.parse_all()
}

/// Parse, rejecting names that are neither variables, functions, `pi`, nor in `params`.
pub fn parse_with_params(text: &str, params: &[String]) -> Result<Expr, DslError> {
    parse::Parser::new(text, Some(params))?.parse_all()
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => {
                if *x < 0.0 || (*x == 0.0 && x.is_sign_negative()) {
                    write!(f, "({x:?})")
                } else {
                    write!(f, "{x:?}")
                }
            }
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Param(p) => write!(f, "{p}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, prec(a) < 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    write_child(f, a, prec(a) <= 4)?;
                    write!(f, "^")?;
                    write_child(f, b, prec(b) < 3)
                } else {
                    write_child(f, a, prec(a) < p)?;
                    write!(f, " {sym} ")?;
                    write_child(f, b, prec(b) <= p)
                }
            }
        }
    }
}

impl Expr {
    /// Names of parameters referenced anywhere in the tree.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(p) => out.push(p.clone()),
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_params(out),
            Expr::Bin(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            _ => {}
        }
    }

    /// Variables referenced anywhere in the tree.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_by_key(|v| v.index());
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Var(v) => out.push(*v),
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            _ => {}
        }
    }
}

/// Variable bindings for evaluation.
#[derive(Clone, Debug)]
pub struct Env<'a> {
    vars: [Option<Jet2>; 4],
    params: &'a BTreeMap<String, f64>,
}

impl<'a> Env<'a> {
    pub fn new(params: &'a BTreeMap<String, f64>) -> Self {
        Env {
            vars: [None; 4],
            params,
        }
    }

    pub fn bind(mut self, var: Var, value: Jet2) -> Self {
        self.vars[var.index()] = Some(value);
        self
    }
}

fn domain_err(node: &Expr, why: &str) -> DslError {
    DslError::eval(DslErrorKind::Domain, format!("{why} in '{node}'"))
}

/// Evaluate with u and v seeded as the two differentiation variables.
pub fn eval_jet2(
    ast: &Expr,
    u: f64,
    v: f64,
    params: &BTreeMap<String, f64>,
) -> Result<Jet2, DslError> {
    let env = Env::new(params)
        .bind(Var::U, Jet2::var_u(u))
        .bind(Var::V, Jet2::var_v(v));
    eval_env(ast, &env)
}

/// Plain value with the given variable bindings.
pub fn eval_scalar(
    ast: &Expr,
    vars: &[(Var, f64)],
    params: &BTreeMap<String, f64>,
) -> Result<f64, DslError> {
    let mut env = Env::new(params);
    for (var, x) in vars {
        env = env.bind(*var, Jet2::constant(*x));
    }
    eval_env(ast, &env).map(|j| j.val)
}

pub fn eval_env(ast: &Expr, env: &Env<'_>) -> Result<Jet2, DslError> {
    match ast {
        Expr::Num(x) => Ok(Jet2::constant(*x)),
        Expr::Pi => Ok(Jet2::constant(std::f64::consts::PI)),
        Expr::Var(v) => env.vars[v.index()].ok_or_else(|| {
            DslError::eval(
                DslErrorKind::UnboundVariable,
                format!("variable '{}' is not bound here", v.name()),
            )
        }),
        Expr::Param(p) => env.params.get(p).map(|x| Jet2::constant(*x)).ok_or_else(|| {
            DslError::eval(
                DslErrorKind::UnboundParameter,
                format!("parameter '{p}' has no value"),
            )
        }),
        Expr::Neg(a) => Ok(-eval_env(a, env)?),
        Expr::Bin(op, a, b) => {
            let x = eval_env(a, env)?;
            let y = eval_env(b, env)?;
            match op {
                BinOp::Add => Ok(x + y),
                BinOp::Sub => Ok(x - y),
                BinOp::Mul => Ok(x * y),
                BinOp::Div => {
                    if y.val == 0.0 {
                        return Err(domain_err(ast, "division by zero"));
                    }
                    Ok(x / y)
                }
                BinOp::Pow => pow(ast, x, y),
            }
        }
        Expr::Call(f, a) => {
            let x = eval_env(a, env)?;
            call(ast, *f, x)
        }
    }
}

fn pow(node: &Expr, x: Jet2, y: Jet2) -> Result<Jet2, DslError> {
    if !y.has_derivatives() {
        let p = y.val;
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            if p < 0.0 && x.val == 0.0 {
                return Err(domain_err(node, "zero raised to a negative power"));
            }
            return Ok(x.powi(p as i32));
        }
        if x.val < 0.0 {
            return Err(domain_err(node, "negative base with fractional exponent"));
        }
        if x.val == 0.0 && (p < 2.0 && x.has_derivatives()) {
            return Err(domain_err(node, "derivative undefined at zero base"));
        }
        return Ok(x.powf(p));
    }
    if x.val <= 0.0 {
        return Err(domain_err(node, "non-positive base with variable exponent"));
    }
    Ok((y * x.ln()).exp())
}

fn call(node: &Expr, f: Func, x: Jet2) -> Result<Jet2, DslError> {
    let d = x.has_derivatives();
    match f {
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
        Func::Tan => {
            if x.val.cos() == 0.0 {
                return Err(domain_err(node, "tangent pole"));
            }
            Ok(x.tan())
        }
        Func::Exp => Ok(x.exp()),
        Func::Log => {
            if x.val <= 0.0 {
                return Err(domain_err(node, "logarithm of a non-positive number"));
            }
            Ok(x.ln())
        }
        Func::Sqrt => {
            if x.val < 0.0 || (x.val == 0.0 && d) {
                return Err(domain_err(node, "square root outside its smooth domain"));
            }
            if x.val == 0.0 {
                return Ok(Jet2::constant(0.0));
            }
            Ok(x.sqrt())
        }
        Func::Asin | Func::Acos => {
            if x.val.abs() > 1.0 || (x.val.abs() == 1.0 && d) {
                return Err(domain_err(node, "inverse sine/cosine outside (-1, 1)"));
            }
            if x.val.abs() == 1.0 {
                let v = if f == Func::Asin { x.val.asin() } else { x.val.acos() };
                return Ok(Jet2::constant(v));
            }
            Ok(if f == Func::Asin { x.asin() } else { x.acos() })
        }
        Func::Atan => Ok(x.atan()),
        Func::Sinh => Ok(x.sinh()),
        Func::Cosh => Ok(x.cosh()),
    }
}

/// Immersion description as read from a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersionConfig {
    pub name: String,
    pub ambient_dim: usize,
    pub components: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub domain: [[f64; 2]; 2],
    /// Periodic chart directions: ("u" | "v", period).
    #[serde(default)]
    pub periods: Vec<PeriodConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodConfig {
    pub var: String,
    pub period: f64,
}

impl ImmersionConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: ImmersionConfig =
            serde_json::from_str(text).map_err(|e| format!("config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.ambient_dim == 0 || self.ambient_dim % 2 != 0 || self.ambient_dim > 8 {
            return Err(format!(
                "config: ambient_dim must be even and at most 8, got {}",
                self.ambient_dim
            ));
        }
        if self.components.len() != self.ambient_dim {
            return Err(format!(
                "config: {} components for ambient_dim {}",
                self.components.len(),
                self.ambient_dim
            ));
        }
        let [[u0, u1], [v0, v1]] = self.domain;
        if !(u0 < u1 && v0 < v1) || ![u0, u1, v0, v1].iter().all(|x| x.is_finite()) {
            return Err("config: domain must be [[u0,u1],[v0,v1]] with u0<u1, v0<v1".into());
        }
        for p in &self.periods {
            if p.var != "u" && p.var != "v" {
                return Err(format!("config: period variable '{}' must be u or v", p.var));
            }
            if !(p.period > 0.0 && p.period.is_finite()) {
                return Err("config: period must be positive".into());
            }
        }
        Ok(())
    }

    /// Parse every component, checking names against the declared parameters.
    pub fn parse_components(&self) -> Result<Vec<Expr>, DslError> {
        let names: Vec<String> = self.params.keys().cloned().collect();
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let e = parse_with_params(c, &names)?;
            if let Some(bad) = e.vars().into_iter().find(|v| *v != Var::U && *v != Var::V) {
                return Err(DslError {
                    kind: DslErrorKind::UnknownIdentifier,
                    message: format!("chart components may use u and v only, found '{}'", bad.name()),
                    line: 0,
                    col: 0,
                });
            }
            out.push(e);
        }
        Ok(out)
    }
}
