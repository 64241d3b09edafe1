//! Symbolic differentiation and algebraic simplification.
//!
//! Simplification is local: constant folding and the identities
//! `x+0`, `x*1`, `x*0`, `x^1`, `x^0`, double negation, and hoisting of
//! numeric factors to the left of a product. There is no expansion or
//! factoring. Correctness is checked by evaluation, not by canonical form.

use super::eval;
use super::{BinOp, Expr, Func, Node, Var};
use crate::domain::MixedOrder;

/// Upper bound on nodes visited across all passes of one [`simplify`] call.
pub const SIMPLIFY_NODE_BUDGET: usize = 10_000;

fn konst(value: f64, pos: usize) -> Expr {
    Expr::constant(value, pos)
}

fn neg(e: Expr, pos: usize) -> Expr {
    rewrite(Node::Neg(e), pos)
}

fn bin(op: BinOp, l: Expr, r: Expr, pos: usize) -> Expr {
    rewrite(Node::Binary(op, l, r), pos)
}

fn mul(l: Expr, r: Expr, pos: usize) -> Expr {
    bin(BinOp::Mul, l, r, pos)
}

fn pow(b: Expr, k: f64, pos: usize) -> Expr {
    rewrite(Node::Pow(b, k), pos)
}

fn call(func: Func, arg: Expr, pos: usize) -> Expr {
    rewrite(Node::Call(func, arg), pos)
}

/// Folds `f` when it yields a finite value; domain errors are left in the
/// tree so they surface at evaluation time with their position.
fn fold(value: Result<f64, eval::EvalError>) -> Option<f64> {
    value.ok().filter(|v| v.is_finite())
}

/// Applies one round of local rules to a node whose children are already
/// simplified. Returns the rebuilt expression.
fn rewrite(node: Node, pos: usize) -> Expr {
    match node {
        Node::Neg(a) => {
            if let Some(c) = a.as_const() {
                return konst(-c, pos);
            }
            if let Node::Neg(inner) = a.node() {
                return inner.clone();
            }
            Expr::new(Node::Neg(a), pos)
        }
        Node::Binary(op, l, r) => rewrite_binary(op, l, r, pos),
        Node::Pow(b, k) => {
            if k == 1.0 {
                return b;
            }
            if k == 0.0 {
                return konst(1.0, pos);
            }
            if let Some(c) = b.as_const() {
                if let Some(v) = fold(eval::pow(c, k, pos)) {
                    return konst(v, pos);
                }
            }
            Expr::new(Node::Pow(b, k), pos)
        }
        Node::Call(func, a) => {
            if let Some(c) = a.as_const() {
                if let Some(v) = fold(eval::call(func, c, pos)) {
                    return konst(v, pos);
                }
            }
            Expr::new(Node::Call(func, a), pos)
        }
        leaf => Expr::new(leaf, pos),
    }
}

fn rewrite_binary(op: BinOp, l: Expr, r: Expr, pos: usize) -> Expr {
    if let (Some(a), Some(b)) = (l.as_const(), r.as_const()) {
        if let Some(v) = fold(eval::binary(op, a, b, pos)) {
            return konst(v, pos);
        }
    }
    match op {
        BinOp::Add => {
            if l.is_const(0.0) {
                return r;
            }
            if r.is_const(0.0) {
                return l;
            }
            if let Node::Neg(x) = r.node() {
                return bin(BinOp::Sub, l, x.clone(), pos);
            }
            if let Node::Neg(x) = l.node() {
                return bin(BinOp::Sub, r, x.clone(), pos);
            }
        }
        BinOp::Sub => {
            if r.is_const(0.0) {
                return l;
            }
            if l.is_const(0.0) {
                return neg(r, pos);
            }
            if let Node::Neg(x) = r.node() {
                return bin(BinOp::Add, l, x.clone(), pos);
            }
        }
        BinOp::Mul => {
            if l.is_const(0.0) || r.is_const(0.0) {
                return konst(0.0, pos);
            }
            if l.is_const(1.0) {
                return r;
            }
            if r.is_const(1.0) {
                return l;
            }
            if l.is_const(-1.0) {
                return neg(r, pos);
            }
            if r.is_const(-1.0) {
                return neg(l, pos);
            }
            if let Node::Neg(x) = l.node() {
                return neg(mul(x.clone(), r, pos), pos);
            }
            if let Node::Neg(x) = r.node() {
                return neg(mul(l, x.clone(), pos), pos);
            }
            // Numeric factors move to the front: x*c -> c*x,
            // c1*(c2*x) -> (c1*c2)*x, (c*x)*y -> c*(x*y), x*(c*y) -> c*(x*y).
            match (l.as_const(), r.as_const()) {
                (None, Some(_)) => return mul(r, l, pos),
                (Some(c1), None) => {
                    if let Node::Binary(BinOp::Mul, rl, rr) = r.node() {
                        if let Some(c2) = rl.as_const() {
                            return mul(konst(c1 * c2, pos), rr.clone(), pos);
                        }
                    }
                }
                (None, None) => {
                    if let Node::Binary(BinOp::Mul, ll, lr) = l.node() {
                        if let Some(c) = ll.as_const() {
                            return mul(konst(c, pos), mul(lr.clone(), r, pos), pos);
                        }
                    }
                    if let Node::Binary(BinOp::Mul, rl, rr) = r.node() {
                        if let Some(c) = rl.as_const() {
                            return mul(konst(c, pos), mul(l, rr.clone(), pos), pos);
                        }
                    }
                }
                (Some(_), Some(_)) => {}
            }
        }
        BinOp::Div => {
            if r.is_const(1.0) {
                return l;
            }
            if r.is_const(-1.0) {
                return neg(l, pos);
            }
            if l.is_const(0.0) && !r.is_const(0.0) {
                return konst(0.0, pos);
            }
        }
    }
    Expr::new(Node::Binary(op, l, r), pos)
}

/// One bottom-up pass. `visited` accumulates the number of nodes touched.
fn pass(e: &Expr, visited: &mut usize) -> Expr {
    *visited += 1;
    let pos = e.pos();
    match e.node() {
        Node::Const(_) | Node::Var(_) => e.clone(),
        Node::Neg(a) => rewrite(Node::Neg(pass(a, visited)), pos),
        Node::Binary(op, l, r) => {
            let l = pass(l, visited);
            let r = pass(r, visited);
            rewrite(Node::Binary(*op, l, r), pos)
        }
        Node::Pow(b, k) => rewrite(Node::Pow(pass(b, visited), *k), pos),
        Node::Call(func, a) => rewrite(Node::Call(*func, pass(a, visited)), pos),
    }
}

/// Repeats the bottom-up pass until the tree stops changing or the node
/// budget is spent. Every pass preserves the value wherever the input is
/// defined, so stopping early is always safe.
pub fn simplify(e: &Expr) -> Expr {
    let mut visited = 0usize;
    let mut current = e.clone();
    loop {
        let next = pass(&current, &mut visited);
        if next == current || visited >= SIMPLIFY_NODE_BUDGET {
            return next;
        }
        current = next;
    }
}

fn derive(e: &Expr, var: Var) -> Expr {
    let pos = e.pos();
    match e.node() {
        Node::Const(_) => konst(0.0, pos),
        Node::Var(v) => konst(if *v == var { 1.0 } else { 0.0 }, pos),
        _ if !e.depends_on(var) => konst(0.0, pos),
        Node::Neg(a) => neg(derive(a, var), pos),
        Node::Binary(op, u, v) => {
            let du = derive(u, var);
            let dv = derive(v, var);
            match op {
                BinOp::Add | BinOp::Sub => bin(*op, du, dv, pos),
                BinOp::Mul => bin(BinOp::Add, mul(du, v.clone(), pos), mul(u.clone(), dv, pos), pos),
                BinOp::Div => {
                    let num = bin(BinOp::Sub, mul(du, v.clone(), pos), mul(u.clone(), dv, pos), pos);
                    bin(BinOp::Div, num, pow(v.clone(), 2.0, pos), pos)
                }
            }
        }
        Node::Pow(u, k) => {
            let du = derive(u, var);
            mul(konst(*k, pos), mul(pow(u.clone(), k - 1.0, pos), du, pos), pos)
        }
        Node::Call(func, u) => {
            let du = derive(u, var);
            match func {
                Func::Sin => mul(du, call(Func::Cos, u.clone(), pos), pos),
                Func::Cos => neg(mul(du, call(Func::Sin, u.clone(), pos), pos), pos),
                Func::Exp => mul(du, e.clone(), pos),
                Func::Ln => bin(BinOp::Div, du, u.clone(), pos),
                Func::Sqrt => bin(BinOp::Div, du, mul(konst(2.0, pos), e.clone(), pos), pos),
            }
        }
    }
}

/// Symbolic partial derivative with respect to `var`, simplified.
pub fn differentiate(e: &Expr, var: Var) -> Expr {
    simplify(&derive(e, var))
}

/// `∂^(p+q) e / ∂t^p ∂s^q`, differentiating in `t` first and then in `s`.
///
/// Uncached; [`crate::domain::DerivativeField`] memoises per order.
pub fn mixed_partial(e: &Expr, order: MixedOrder) -> Expr {
    let mut out = simplify(e);
    for _ in 0..order.p() {
        out = differentiate(&out, Var::T);
    }
    for _ in 0..order.q() {
        out = differentiate(&out, Var::S);
    }
    out
}
