//! One-dimensional baseline: the trapezoid defect `Φ_f` with its variation
//! bounds, and the chord-plus-endpoint-derivative expansion `D_n` with its
//! Stieltjes remainder `E_n`.
//!
//! Functions are written in the single variable `t`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bivariation::{total_variation_1d, VariationEstimate};
use crate::domain::{Curve, Derivative, DerivativeField, MixedOrder};
use crate::error::{Error, Result};
use crate::expr::{self, EvalError, Expr, Node, ParseError, ParseErrorKind, Var};
use crate::kernels::factorial;
use crate::rs_quad::{rs_integral_1d, Estimate, RsOptions};

/// An expression in `t` alone, with memoised derivatives.
#[derive(Debug)]
pub struct Expr1D {
    field: DerivativeField,
}

fn first_s(e: &Expr) -> Option<usize> {
    match e.node() {
        Node::Var(Var::S) => Some(e.pos()),
        Node::Const(_) | Node::Var(_) => None,
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => first_s(a),
        Node::Binary(_, l, r) => match (first_s(l), first_s(r)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        },
    }
}

impl Expr1D {
    /// Parses `source`; any occurrence of `s` is rejected.
    pub fn parse(source: &str) -> std::result::Result<Self, ParseError> {
        Expr1D::new(expr::parse(source)?)
    }

    pub fn new(e: Expr) -> std::result::Result<Self, ParseError> {
        if let Some(offset) = first_s(&e) {
            return Err(ParseError {
                kind: ParseErrorKind::ForbiddenVariable('s'),
                offset,
            });
        }
        Ok(Expr1D {
            field: DerivativeField::new(e),
        })
    }

    pub fn expr(&self) -> &Expr {
        self.field.base()
    }

    pub fn eval(&self, x: f64) -> std::result::Result<f64, EvalError> {
        self.field.partial(MixedOrder::ZERO).eval(x, 0.0)
    }

    /// The `k`-th derivative, evaluated with `s = 0`.
    pub fn derivative(&self, k: u32) -> Result<Arc<Derivative>> {
        self.field.partial_pq(k, 0)
    }
}

impl Curve for Expr1D {
    fn at(&self, x: f64) -> std::result::Result<f64, EvalError> {
        self.eval(x)
    }
}

fn check_interval(x: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if !(lo..=hi).contains(&x) {
        return Err(Error::PointOutsideInterval { x, lo, hi });
    }
    Ok(())
}

fn chord(f: &Expr1D, x: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(((hi - x) * f.eval(lo)? + (x - lo) * f.eval(hi)?) / (hi - lo))
}

/// `Φ_f(x) = (b-x)/(b-a) f(a) + (x-a)/(b-a) f(b) - f(x)`.
pub fn phi_defect(f: &Expr1D, x: f64, lo: f64, hi: f64) -> Result<f64> {
    check_interval(x, lo, hi)?;
    let w = hi - lo;
    Ok((hi - x) / w * f.eval(lo)? + (x - lo) / w * f.eval(hi)? - f.eval(x)?)
}

/// The bounds on `|Φ_f(x)|` built from the variations on `[a, x]` and `[x, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiBounds {
    /// Weighted split-variation bound.
    pub b1: f64,
    /// `[1/2 + |x - (a+b)/2| / (b-a)] · V`.
    pub b2_midpoint: f64,
    /// Hölder form with exponents `p` and `q`.
    pub b2_power_mean: f64,
    /// `V/2 + |V_left - V_right| / 2`.
    pub b2_split: f64,
    pub p: f64,
    pub q: f64,
    pub v_left: f64,
    pub v_right: f64,
    pub converged: bool,
}

impl PhiBounds {
    pub fn b2_min(&self) -> f64 {
        self.b2_midpoint.min(self.b2_power_mean).min(self.b2_split)
    }
}

fn variation_on(f: &Expr1D, lo: f64, hi: f64, tol: f64) -> Result<Option<VariationEstimate>> {
    if lo == hi {
        return Ok(None);
    }
    total_variation_1d(f, lo, hi, tol).map(Some)
}

/// Bounds on `|Φ_f(x)|` for `p > 1` and its conjugate `q = p/(p-1)`.
pub fn phi_bounds(f: &Expr1D, x: f64, lo: f64, hi: f64, p: f64, tol: f64) -> Result<PhiBounds> {
    check_interval(x, lo, hi)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let q = p / (p - 1.0);
    let left = variation_on(f, lo, x, tol)?;
    let right = variation_on(f, x, hi, tol)?;
    let converged = left.as_ref().is_none_or(|v| v.converged) && right.as_ref().is_none_or(|v| v.converged);
    let v_left = left.map_or(0.0, |v| v.value);
    let v_right = right.map_or(0.0, |v| v.value);
    let v = v_left + v_right;
    let w = hi - lo;
    let (wl, wr) = ((hi - x) / w, (x - lo) / w);
    Ok(PhiBounds {
        b1: wl * v_left + wr * v_right,
        b2_midpoint: (0.5 + (x - 0.5 * (lo + hi)).abs() / w) * v,
        b2_power_mean: (wl.powf(p) + wr.powf(p)).powf(1.0 / p) * (v_left.powf(q) + v_right.powf(q)).powf(1.0 / q),
        b2_split: 0.5 * v + 0.5 * (v_left - v_right).abs(),
        p,
        q,
        v_left,
        v_right,
        converged,
    })
}

/// `D_n(f; x, a, b)`: the chord value plus endpoint-derivative corrections.
pub fn d_poly(f: &Expr1D, n: u32, x: f64, lo: f64, hi: f64) -> Result<f64> {
    check_interval(x, lo, hi)?;
    let mut terms = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let dk = f.derivative(k)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let left = (x - lo).powi(k as i32 - 1) * dk.eval(lo, 0.0)?;
        let right = sign * (hi - x).powi(k as i32 - 1) * dk.eval(hi, 0.0)?;
        terms.push((left + right) / factorial(k));
    }
    let sum: f64 = terms.iter().sum();
    Ok(chord(f, x, lo, hi)? + (hi - x) * (x - lo) / (hi - lo) * sum)
}

/// Normalisation of the one-dimensional kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelScaling {
    /// `(x-t)^n (b-x)` and `(-1)^(n+1) (t-x)^n (x-a)` without a factorial.
    #[default]
    AsPrinted,
    /// The same branches divided by `n!`.
    Factorial,
}

/// The one-dimensional kernel `S_n(x, t)`; `t = x` takes the left branch.
pub fn kernel_1d(n: u32, x: f64, t: f64, lo: f64, hi: f64, scaling: KernelScaling) -> f64 {
    let k = n as i32;
    let v = if t <= x {
        (x - t).powi(k) * (hi - x)
    } else {
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * (t - x).powi(k) * (x - lo)
    };
    match scaling {
        KernelScaling::AsPrinted => v,
        KernelScaling::Factorial => v / factorial(n),
    }
}

/// `E_n` together with the residual `f(x) - D_n - E_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRemainder {
    pub f_value: f64,
    pub d_value: f64,
    pub e: Estimate,
    pub residual: f64,
    pub scaling: KernelScaling,
}

/// `E_n(f; x, a, b) = (1/(b-a)) ∫ S_n(x, t) d f^(n)(t)`, computed as a
/// Stieltjes sum with `x` forced into the grid.
pub fn e_remainder(
    f: &Expr1D,
    n: u32,
    x: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    scaling: KernelScaling,
) -> Result<LineRemainder> {
    check_interval(x, lo, hi)?;
    let dn = f.derivative(n)?;
    let integrator = |t: f64| dn.eval(t, 0.0);
    let kernel = |t: f64| Ok(kernel_1d(n, x, t, lo, hi, scaling));
    let opts = RsOptions::new(tol).with_breaks(vec![x], Vec::new());
    let raw = rs_integral_1d(&kernel, &integrator, lo, hi, &opts)?;
    let w = hi - lo;
    let e = Estimate {
        value: raw.value / w,
        est_error: raw.est_error / w,
        converged: raw.converged,
        levels: raw.levels.iter().map(|v| v / w).collect(),
    };
    let f_value = f.eval(x)?;
    let d_value = d_poly(f, n, x, lo, hi)?;
    Ok(LineRemainder {
        f_value,
        d_value,
        residual: f_value - d_value - e.value,
        e,
        scaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> Expr1D {
        Expr1D::parse(src).unwrap()
    }

    #[test]
    fn s_is_rejected_with_position() {
        let err = Expr1D::parse("t + 2*s").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ForbiddenVariable('s'));
        assert_eq!(err.offset, 6);
    }

    #[test]
    fn phi_examples() {
        assert!(phi_defect(&f("3*t - 1"), 0.3, 0.0, 1.0).unwrap().abs() < 1e-15);
        assert_eq!(phi_defect(&f("t^2"), 0.5, 0.0, 1.0).unwrap(), 0.25);
        assert_eq!(phi_defect(&f("sin(t)"), 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert!(phi_defect(&f("t"), 1.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn phi_bounds_for_identity() {
        for x in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let b = phi_bounds(&f("t"), x, 0.0, 1.0, 2.0, 1e-12).unwrap();
            assert!((b.b1 - 2.0 * x * (1.0 - x)).abs() < 1e-12);
            assert!((b.b2_midpoint - (0.5 + (x - 0.5).abs())).abs() < 1e-12);
            assert!((b.b2_split - (0.5 + (2.0 * x - 1.0).abs() / 2.0)).abs() < 1e-12);
            assert_eq!(b.q, 2.0);
        }
        assert!(phi_bounds(&f("t"), 0.5, 0.0, 1.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn midpoint_branch_is_half_variation() {
        let b = phi_bounds(&f("sin(3*t)"), 0.5, 0.0, 1.0, 3.0, 1e-12).unwrap();
        assert!((b.b2_midpoint - 0.5 * (b.v_left + b.v_right)).abs() < 1e-15);
    }

    #[test]
    fn d_poly_examples() {
        let sq = f("t^2");
        assert_eq!(d_poly(&sq, 0, 0.5, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(d_poly(&sq, 1, 0.5, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(d_poly(&sq, 3, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(d_poly(&sq, 3, 1.0, 0.0, 1.0).unwrap(), 1.0);
        let lin = f("2*t + 1");
        for n in 0..4 {
            assert!((d_poly(&lin, n, 0.3, 0.0, 1.0).unwrap() - 1.6).abs() < 1e-15);
        }
    }

    #[test]
    fn remainder_vanishes_for_low_degree() {
        let cubic = f("t^3 - t");
        let r = e_remainder(&cubic, 3, 0.4, 0.0, 1.0, 1e-10, KernelScaling::AsPrinted).unwrap();
        assert!(r.e.value.abs() < 1e-12);
        let lin = f("5*t - 2");
        for n in 0..3 {
            let r = e_remainder(&lin, n, 0.7, 0.0, 1.0, 1e-10, KernelScaling::AsPrinted).unwrap();
            assert!((r.d_value - r.f_value).abs() < 1e-14);
            if n >= 1 {
                assert!(r.e.value.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn order_zero_remainder_closes_the_identity() {
        let sq = f("t^2");
        let r = e_remainder(&sq, 0, 0.5, 0.0, 1.0, 1e-12, KernelScaling::AsPrinted).unwrap();
        // ∫ S_0 f' dt = (1/2)·(1/4) - (1/2)·(3/4) = -1/4.
        assert!((r.e.value + 0.25).abs() < 1e-12);
        assert!(r.residual.abs() < 1e-12);
    }

    #[test]
    fn factorial_scaling_closes_higher_orders() {
        let g = f("exp(t)");
        for n in 0..4 {
            let r = e_remainder(&g, n, 0.3, 0.0, 1.0, 1e-12, KernelScaling::Factorial).unwrap();
            assert!(r.residual.abs() < 1e-10, "n = {n}: {}", r.residual);
        }
        let quartic = f("t^4");
        let printed = e_remainder(&quartic, 2, 0.5, 0.0, 1.0, 1e-12, KernelScaling::AsPrinted).unwrap();
        assert!(printed.residual.abs() > 1e-3);
    }
}
