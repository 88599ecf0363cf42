//! Analytic expressions in a handful of named variables.
//!
//! Expressions are parsed once into an immutable tree and then evaluated either
//! as plain values or as order-3 derivative jets ([`Jet3`]). All closed-form
//! fixtures (patches, curves, ambient maps, dilation fields) go through here.

mod diff;
mod eval;
mod jet;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use eval::EvalError;
pub use jet::Jet3;
pub use parse::{ParseError, ParseErrorKind};

/// Elementary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sec,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sec,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sec => "sec",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Variables are indices into the owning [`Expr`]'s variable list.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression together with the variables it may reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    vars: Arc<[String]>,
    root: Node,
}

impl Expr {
    /// Parses `source` with the declared variable names.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Expr, ParseError> {
        let vars: Arc<[String]> = vars.iter().map(|s| s.to_string()).collect();
        let root = parse::parse(source, &vars)?;
        Ok(Expr { vars, root })
    }

    pub fn constant(value: f64, vars: &[&str]) -> Expr {
        Expr {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            root: Node::Const(value),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Numeric value at `point` (one entry per declared variable).
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        if point.len() != self.vars.len() {
            return Err(EvalError::arity(self.vars.len(), point.len()));
        }
        eval::eval_value(&self.root, point, &self.vars)
    }

    /// Value and all partials up to total order 3 at `point`.
    ///
    /// The first declared variable drives the `u` slot of the jet and the
    /// second the `v` slot; at most two variables are supported.
    pub fn eval_jet3(&self, point: &[f64]) -> Result<Jet3, EvalError> {
        if point.len() != self.vars.len() {
            return Err(EvalError::arity(self.vars.len(), point.len()));
        }
        if self.vars.len() > 2 {
            return Err(EvalError::TooManyVariables(self.vars.len()));
        }
        eval::eval_jet(&self.root, point, &self.vars)
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Option<Expr> {
        let index = self.var_index(var)?;
        Some(Expr {
            vars: self.vars.clone(),
            root: diff::derivative(&self.root, index),
        })
    }

    /// Replaces every variable by the corresponding expression in `args`.
    ///
    /// All of `args` must share one variable list, which becomes the
    /// variable list of the result.
    pub fn substitute(&self, args: &[&Expr]) -> Expr {
        assert_eq!(args.len(), self.vars.len(), "one replacement per variable");
        let vars = match args.first() {
            Some(first) => {
                assert!(
                    args.iter().all(|a| a.vars == first.vars),
                    "replacements must share a variable list"
                );
                first.vars.clone()
            }
            None => self.vars.clone(),
        };
        let roots: Vec<&Node> = args.iter().map(|a| &a.root).collect();
        Expr {
            vars,
            root: substitute_node(&self.root, &roots),
        }
    }

    /// True if the tree references variable `index`.
    pub fn depends_on(&self, index: usize) -> bool {
        fn walk(node: &Node, index: usize) -> bool {
            match node {
                Node::Const(_) => false,
                Node::Var(i) => *i == index,
                Node::Neg(a) | Node::Call(_, a) => walk(a, index),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Pow(a, b) => walk(a, index) || walk(b, index),
            }
        }
        walk(&self.root, index)
    }

    pub fn is_var(&self, index: usize) -> bool {
        self.root == Node::Var(index)
    }
}

fn substitute_node(node: &Node, args: &[&Node]) -> Node {
    let rec = |n: &Node| Box::new(substitute_node(n, args));
    match node {
        Node::Const(c) => Node::Const(*c),
        Node::Var(i) => args[*i].clone(),
        Node::Neg(a) => Node::Neg(rec(a)),
        Node::Add(a, b) => Node::Add(rec(a), rec(b)),
        Node::Sub(a, b) => Node::Sub(rec(a), rec(b)),
        Node::Mul(a, b) => Node::Mul(rec(a), rec(b)),
        Node::Div(a, b) => Node::Div(rec(a), rec(b)),
        Node::Pow(a, b) => Node::Pow(rec(a), rec(b)),
        Node::Call(f, a) => Node::Call(*f, rec(a)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, &self.vars)
    }
}

pub(crate) struct NodeDisplay<'a> {
    pub node: &'a Node,
    pub vars: &'a [String],
}

impl fmt::Display for NodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self.node, self.vars)
    }
}

// Binding strength used by the printer; mirrors the parser's grammar.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Const(_) | Node::Var(_) | Node::Call(..) => 5,
    }
}

fn exponent_needs_parens(node: &Node) -> bool {
    match node {
        Node::Neg(inner) => exponent_needs_parens(inner),
        other => precedence(other) < 4,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, vars: &[String]) -> fmt::Result {
    let wrap = |f: &mut fmt::Formatter<'_>, n: &Node, parens: bool| -> fmt::Result {
        if parens {
            write!(f, "(")?;
            write_node(f, n, vars)?;
            write!(f, ")")
        } else {
            write_node(f, n, vars)
        }
    };
    match node {
        Node::Const(c) => {
            if c.is_sign_negative() {
                write!(f, "(-{:?})", -c)
            } else {
                write!(f, "{c:?}")
            }
        }
        Node::Var(i) => write!(f, "{}", vars[*i]),
        Node::Neg(a) => {
            write!(f, "-")?;
            wrap(f, a, precedence(a) < 3)
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            wrap(f, a, precedence(a) < 1)?;
            write!(f, "{}", if matches!(node, Node::Add(..)) { "+" } else { "-" })?;
            wrap(f, b, precedence(b) <= 1)
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            wrap(f, a, precedence(a) < 2)?;
            write!(f, "{}", if matches!(node, Node::Mul(..)) { "*" } else { "/" })?;
            wrap(f, b, precedence(b) <= 2)
        }
        Node::Pow(a, b) => {
            wrap(f, a, precedence(a) < 5)?;
            write!(f, "^")?;
            wrap(f, b, exponent_needs_parens(b))
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, vars)?;
            write!(f, ")")
        }
    }
}
