use std::fmt;

use super::{BinOp, Expr, Func, Node, Var};

/// What went wrong when an expression was evaluated outside its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    /// A non-integer power of a negative base.
    NegativePowerBase,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "ln of a non-positive value",
            DomainKind::SqrtOfNegative => "sqrt of a negative value",
            DomainKind::NegativePowerBase => "non-integer power of a negative value",
        })
    }
}

/// Evaluation domain error, carrying the source offset of the offending node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {pos}")]
pub struct EvalError {
    pub kind: DomainKind,
    pub pos: usize,
}

#[inline]
fn div(l: f64, r: f64, pos: usize) -> Result<f64, EvalError> {
    if r == 0.0 {
        return Err(EvalError {
            kind: DomainKind::DivisionByZero,
            pos,
        });
    }
    Ok(l / r)
}

#[inline]
pub(super) fn pow(base: f64, k: f64, pos: usize) -> Result<f64, EvalError> {
    if k == k.trunc() {
        if base == 0.0 && k < 0.0 {
            return Err(EvalError {
                kind: DomainKind::DivisionByZero,
                pos,
            });
        }
        if k.abs() <= i32::MAX as f64 {
            return Ok(base.powi(k as i32));
        }
        return Ok(base.powf(k));
    }
    if base < 0.0 {
        return Err(EvalError {
            kind: DomainKind::NegativePowerBase,
            pos,
        });
    }
    if base == 0.0 && k < 0.0 {
        return Err(EvalError {
            kind: DomainKind::DivisionByZero,
            pos,
        });
    }
    Ok(base.powf(k))
}

#[inline]
pub(super) fn call(func: Func, x: f64, pos: usize) -> Result<f64, EvalError> {
    Ok(match func {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Exp => x.exp(),
        Func::Ln => {
            if x <= 0.0 {
                return Err(EvalError {
                    kind: DomainKind::LogOfNonPositive,
                    pos,
                });
            }
            x.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalError {
                    kind: DomainKind::SqrtOfNegative,
                    pos,
                });
            }
            x.sqrt()
        }
    })
}

#[inline]
pub(super) fn binary(op: BinOp, l: f64, r: f64, pos: usize) -> Result<f64, EvalError> {
    Ok(match op {
        BinOp::Add => l + r,
        BinOp::Sub => l - r,
        BinOp::Mul => l * r,
        BinOp::Div => return div(l, r, pos),
    })
}

pub(super) fn eval_tree(e: &Expr, t: f64, s: f64) -> Result<f64, EvalError> {
    match e.node() {
        Node::Const(c) => Ok(*c),
        Node::Var(Var::T) => Ok(t),
        Node::Var(Var::S) => Ok(s),
        Node::Neg(a) => Ok(-eval_tree(a, t, s)?),
        Node::Binary(op, l, r) => {
            let lv = eval_tree(l, t, s)?;
            let rv = eval_tree(r, t, s)?;
            binary(*op, lv, rv, e.pos())
        }
        Node::Pow(b, k) => pow(eval_tree(b, t, s)?, *k, e.pos()),
        Node::Call(func, a) => call(*func, eval_tree(a, t, s)?, e.pos()),
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Push(f64),
    LoadT,
    LoadS,
    Neg,
    Binary(BinOp, usize),
    Pow(f64, usize),
    Call(Func, usize),
}

const INLINE_STACK: usize = 32;

/// An expression flattened to postfix form for fast repeated evaluation.
///
/// Evaluation order matches the tree walk exactly, so results are
/// bit-identical to [`Expr::eval`].
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    depth: usize,
}

impl Program {
    pub fn compile(e: &Expr) -> Program {
        let mut ops = Vec::with_capacity(e.node_count());
        let depth = emit(e, &mut ops);
        Program { ops, depth }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64, EvalError> {
        if self.depth <= INLINE_STACK {
            let mut stack = [0.0f64; INLINE_STACK];
            self.run(&mut stack, t, s)
        } else {
            let mut stack = vec![0.0f64; self.depth];
            self.run(&mut stack, t, s)
        }
    }

    fn run(&self, stack: &mut [f64], t: f64, s: f64) -> Result<f64, EvalError> {
        let mut top = 0usize;
        for op in &self.ops {
            match *op {
                Op::Push(c) => {
                    stack[top] = c;
                    top += 1;
                }
                Op::LoadT => {
                    stack[top] = t;
                    top += 1;
                }
                Op::LoadS => {
                    stack[top] = s;
                    top += 1;
                }
                Op::Neg => stack[top - 1] = -stack[top - 1],
                Op::Binary(bop, pos) => {
                    top -= 1;
                    stack[top - 1] = binary(bop, stack[top - 1], stack[top], pos)?;
                }
                Op::Pow(k, pos) => stack[top - 1] = pow(stack[top - 1], k, pos)?,
                Op::Call(func, pos) => stack[top - 1] = call(func, stack[top - 1], pos)?,
            }
        }
        Ok(stack[0])
    }
}

/// Emits postfix code for `e` and returns the stack depth it needs.
fn emit(e: &Expr, ops: &mut Vec<Op>) -> usize {
    match e.node() {
        Node::Const(c) => {
            ops.push(Op::Push(*c));
            1
        }
        Node::Var(Var::T) => {
            ops.push(Op::LoadT);
            1
        }
        Node::Var(Var::S) => {
            ops.push(Op::LoadS);
            1
        }
        Node::Neg(a) => {
            let d = emit(a, ops);
            ops.push(Op::Neg);
            d
        }
        Node::Binary(op, l, r) => {
            let dl = emit(l, ops);
            let dr = emit(r, ops);
            ops.push(Op::Binary(*op, e.pos()));
            dl.max(dr + 1)
        }
        Node::Pow(b, k) => {
            let d = emit(b, ops);
            ops.push(Op::Pow(*k, e.pos()));
            d
        }
        Node::Call(func, a) => {
            let d = emit(a, ops);
            ops.push(Op::Call(*func, e.pos()));
            d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn product_at_half() {
        let e = parse("t*s").unwrap();
        assert_eq!(e.eval(0.5, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn ln_of_zero_reports_node_position() {
        let e = parse("1 + ln(t)").unwrap();
        let err = e.eval(0.0, 1.0).unwrap_err();
        assert_eq!(err.kind, DomainKind::LogOfNonPositive);
        assert_eq!(err.pos, 4);
        assert_eq!(Program::compile(&e).eval(0.0, 1.0).unwrap_err(), err);
    }

    #[test]
    fn other_domain_errors() {
        let cases = [
            ("sqrt(t-1)", DomainKind::SqrtOfNegative),
            ("s/t", DomainKind::DivisionByZero),
            ("(t-1)^0.5", DomainKind::NegativePowerBase),
            ("t^(-2)", DomainKind::DivisionByZero),
        ];
        for (src, kind) in cases {
            let e = parse(src).unwrap();
            assert_eq!(e.eval(0.0, 1.0).unwrap_err().kind, kind, "{src}");
        }
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let e = parse("t^3").unwrap();
        assert_eq!(e.eval(-2.0, 0.0).unwrap(), -8.0);
        assert_eq!(parse("t^0.5").unwrap().eval(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn program_matches_tree_bitwise() {
        let e = parse("sin(t*s)/(1+t^2) - exp(-s)*sqrt(t+2)").unwrap();
        let prog = Program::compile(&e);
        for i in 0..50 {
            let t = -1.0 + 0.041 * i as f64;
            let s = 0.3 - 0.017 * i as f64;
            assert_eq!(prog.eval(t, s).unwrap().to_bits(), e.eval(t, s).unwrap().to_bits());
        }
    }

    #[test]
    fn deep_programs_use_heap_stack() {
        // Right-nested sum forces a deep evaluation stack.
        let mut src = String::from("t");
        for _ in 0..40 {
            src = format!("s+({src})");
        }
        let e = parse(&src).unwrap();
        let prog = Program::compile(&e);
        assert!(prog.depth > INLINE_STACK);
        assert_eq!(prog.eval(1.0, 1.0).unwrap(), 41.0);
    }
}
