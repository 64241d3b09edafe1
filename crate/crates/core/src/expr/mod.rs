//! Symbolic expressions in the two variables `t` and `s`.
//!
//! Expressions are parsed from text, differentiated symbolically and
//! evaluated in double precision. They supply every mixed partial
//! `D^(p,q) f` the representation formulas and error bounds consume.
//!
//! Trees are immutable and share subtrees through [`Arc`], so cloning an
//! [`Expr`] is cheap and expressions can be evaluated from many threads.

use std::fmt;
use std::sync::Arc;

mod diff;
mod eval;
mod parse;

pub use diff::{differentiate, mixed_partial, simplify, SIMPLIFY_NODE_BUDGET};
pub use eval::{DomainKind, EvalError, Program};
pub use parse::{parse, ParseError, ParseErrorKind};

/// Independent variable of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    S,
}

impl Var {
    pub fn name(self) -> char {
        match self {
            Var::T => 't',
            Var::S => 's',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Elementary functions recognised by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// One node of an expression tree.
///
/// Powers carry their exponent as a folded constant; the parser rejects
/// exponents that depend on `t` or `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Neg(Expr),
    Binary(BinOp, Expr, Expr),
    Pow(Expr, f64),
    Call(Func, Expr),
}

/// A shared, immutable expression tree.
///
/// Every node remembers the byte offset of the source text it came from.
/// Nodes synthesised by differentiation inherit the offset of the node they
/// were derived from, so domain errors in a derivative still point into the
/// user's input.
#[derive(Clone)]
pub struct Expr {
    node: Arc<Node>,
    pos: usize,
}

impl Expr {
    pub fn new(node: Node, pos: usize) -> Self {
        Expr {
            node: Arc::new(node),
            pos,
        }
    }

    pub fn constant(value: f64, pos: usize) -> Self {
        Expr::new(Node::Const(value), pos)
    }

    pub fn var(var: Var, pos: usize) -> Self {
        Expr::new(Node::Var(var), pos)
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Byte offset of the source text this node was parsed from.
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.node {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(value)
    }

    /// Number of nodes in the tree, counting shared subtrees once per use.
    pub fn node_count(&self) -> usize {
        1 + match &*self.node {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Neg(e) | Node::Pow(e, _) | Node::Call(_, e) => e.node_count(),
            Node::Binary(_, l, r) => l.node_count() + r.node_count(),
        }
    }

    /// Whether `var` occurs anywhere in the tree.
    pub fn depends_on(&self, var: Var) -> bool {
        match &*self.node {
            Node::Const(_) => false,
            Node::Var(v) => *v == var,
            Node::Neg(e) | Node::Pow(e, _) | Node::Call(_, e) => e.depends_on(var),
            Node::Binary(_, l, r) => l.depends_on(var) || r.depends_on(var),
        }
    }

    pub fn is_constant_expr(&self) -> bool {
        !self.depends_on(Var::T) && !self.depends_on(Var::S)
    }

    /// Evaluates the tree directly. For repeated evaluation compile it
    /// with [`Program::compile`] instead.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64, EvalError> {
        eval::eval_tree(self, t, s)
    }

    fn precedence(&self) -> u8 {
        match &*self.node {
            Node::Const(c) if c.is_sign_negative() => 3,
            Node::Const(_) | Node::Var(_) | Node::Call(..) => 5,
            Node::Binary(op, ..) => op.precedence(),
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Structural equality; source positions are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.node, &other.node) || self.node == other.node
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn fmt_number(f: &mut fmt::Formatter<'_>, value: f64) -> fmt::Result {
    // `{:?}` prints the shortest representation that round-trips.
    if value == value.trunc() && value.abs() < 1e15 {
        write!(f, "{}", value as i64 as f64)
    } else {
        write!(f, "{value:?}")
    }
}

/// Prints with the minimal parenthesisation that reparses to the same tree
/// shape, so `parse(e.to_string())` evaluates bit-identically to `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Const(c) => fmt_number(f, *c),
            Node::Var(v) => write!(f, "{}", v.name()),
            Node::Neg(e) => {
                write!(f, "-")?;
                e.fmt_child(f, 3)
            }
            Node::Binary(op, l, r) => {
                let prec = op.precedence();
                l.fmt_child(f, prec)?;
                write!(f, "{}", op.symbol())?;
                r.fmt_child(f, prec + 1)
            }
            Node::Pow(base, k) => {
                base.fmt_child(f, 5)?;
                if *k < 0.0 {
                    write!(f, "^(")?;
                    fmt_number(f, *k)?;
                    write!(f, ")")
                } else {
                    write!(f, "^")?;
                    fmt_number(f, *k)
                }
            }
            Node::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_keeps_tree_shape() {
        for src in [
            "t*s",
            "t-(s-1)",
            "t/(s*2)",
            "-t^2",
            "(-t)^2",
            "2^3^2",
            "(t^2)^3",
            "sin(t)*cos(s)+exp(t-s)",
            "t^(-1)",
            "-(t+s)",
        ] {
            let e = parse(src).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(e, again, "{src} printed as {e}");
        }
    }

    #[test]
    fn node_count_counts_every_node() {
        assert_eq!(parse("t*s").unwrap().node_count(), 3);
        assert_eq!(parse("sin(t)+1").unwrap().node_count(), 4);
    }

    #[test]
    fn dependency_query() {
        let e = parse("sin(t)*3").unwrap();
        assert!(e.depends_on(Var::T));
        assert!(!e.depends_on(Var::S));
        assert!(parse("2^3").unwrap().is_constant_expr());
    }
}
