//! Piecewise Peano-type kernels of the bivariate representation and their
//! closed-form suprema.

use serde::{Deserialize, Serialize};

use crate::domain::{EvalPoint, Rectangle, Surface, MAX_TOTAL_ORDER};
use crate::error::{Error, Result};
use crate::expr::EvalError;

/// Sign carried by the two mixed branches of `S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignVariant {
    /// `(-1)^n`.
    TheoremLiteral,
    /// `(-1)^(n+1)`.
    #[default]
    ProofConsistent,
}

/// Sign carried by the two mixed branches of the midpoint kernel `M_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MidpointVariant {
    /// `(-1)^n`.
    #[default]
    Corollary,
    /// `(-1)^(n+1)`.
    Section3,
}

impl SignVariant {
    pub fn label(self) -> &'static str {
        match self {
            SignVariant::TheoremLiteral => "theorem-literal",
            SignVariant::ProofConsistent => "proof-consistent",
        }
    }
}

impl MidpointVariant {
    pub fn label(self) -> &'static str {
        match self {
            MidpointVariant::Corollary => "corollary",
            MidpointVariant::Section3 => "section3",
        }
    }
}

/// `n!` in floating point.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn parity(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Mixed-branch sign. At `n = 0` every variant uses `+1`, so the
/// order-zero kernels are the positive step tables.
fn mixed_sign(n: u32, extra: u32) -> f64 {
    if n == 0 {
        1.0
    } else {
        parity(n + extra)
    }
}

/// Kernel order, evaluation point, rectangle and sign conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    n: u32,
    point: EvalPoint,
    rect: Rectangle,
    sign_variant: SignVariant,
    midpoint_variant: MidpointVariant,
}

impl KernelSpec {
    pub fn new(n: u32, point: EvalPoint, rect: Rectangle) -> Result<Self> {
        if n > MAX_TOTAL_ORDER {
            return Err(Error::OrderTooHigh { p: n, q: n });
        }
        rect.ensure_contains(point)?;
        Ok(KernelSpec {
            n,
            point,
            rect,
            sign_variant: SignVariant::default(),
            midpoint_variant: MidpointVariant::default(),
        })
    }

    pub fn with_sign(mut self, v: SignVariant) -> Self {
        self.sign_variant = v;
        self
    }

    pub fn with_midpoint(mut self, v: MidpointVariant) -> Self {
        self.midpoint_variant = v;
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn point(&self) -> EvalPoint {
        self.point
    }

    pub fn rect(&self) -> Rectangle {
        self.rect
    }

    pub fn sign_variant(&self) -> SignVariant {
        self.sign_variant
    }

    pub fn midpoint_variant(&self) -> MidpointVariant {
        self.midpoint_variant
    }

    /// `S_n(x, t; y, s)`. Points with `t = x` or `s = y` take the lower branch.
    pub fn s(&self, t: f64, s: f64) -> f64 {
        let n = self.n as i32;
        let EvalPoint { x, y } = self.point;
        let r = &self.rect;
        let (tx, t_low) = if t <= x {
            ((x - t).powi(n) * (r.b() - x), true)
        } else {
            ((t - x).powi(n) * (x - r.a()), false)
        };
        let (sy, s_low) = if s <= y {
            ((y - s).powi(n) * (r.d() - y), true)
        } else {
            ((s - y).powi(n) * (y - r.c()), false)
        };
        let sign = if t_low == s_low {
            1.0
        } else {
            match self.sign_variant {
                SignVariant::TheoremLiteral => mixed_sign(self.n, 0),
                SignVariant::ProofConsistent => mixed_sign(self.n, 1),
            }
        };
        sign * tx * sy / factorial(self.n)
    }

    /// `M_n(t, s)` about the rectangle midpoint.
    pub fn m(&self, t: f64, s: f64) -> f64 {
        let n = self.n as i32;
        let mid = self.rect.midpoint();
        let r = &self.rect;
        let t_low = t <= mid.x;
        let s_low = s <= mid.y;
        let mag = (t - mid.x).abs().powi(n) * (s - mid.y).abs().powi(n);
        let sign = if t_low == s_low {
            1.0
        } else {
            match self.midpoint_variant {
                MidpointVariant::Corollary => mixed_sign(self.n, 0),
                MidpointVariant::Section3 => mixed_sign(self.n, 1),
            }
        };
        sign * r.area() / (4.0 * factorial(self.n)) * mag
    }

    /// `S_n` as an evaluable surface.
    pub fn s_surface(&self) -> KernelS {
        KernelS(*self)
    }

    /// `M_n` as an evaluable surface.
    pub fn m_surface(&self) -> KernelM {
        KernelM(*self)
    }
}

/// [`KernelSpec::s`] as a [`Surface`].
#[derive(Debug, Clone, Copy)]
pub struct KernelS(KernelSpec);

impl Surface for KernelS {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        Ok(self.0.s(t, s))
    }
}

/// [`KernelSpec::m`] as a [`Surface`].
#[derive(Debug, Clone, Copy)]
pub struct KernelM(KernelSpec);

impl Surface for KernelM {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        Ok(self.0.m(t, s))
    }
}

pub fn kernel_s(spec: &KernelSpec, t: f64, s: f64) -> Result<f64> {
    spec.rect.ensure_contains(EvalPoint::new(t, s))?;
    Ok(spec.s(t, s))
}

pub fn kernel_m(spec: &KernelSpec, t: f64, s: f64) -> Result<f64> {
    spec.rect.ensure_contains(EvalPoint::new(t, s))?;
    Ok(spec.m(t, s))
}

/// `sup |S_n(x, ·; y, ·)|` over the rectangle.
pub fn kernel_sup(n: u32, point: EvalPoint, rect: &Rectangle) -> Result<f64> {
    rect.ensure_contains(point)?;
    let k = n as i32;
    let EvalPoint { x, y } = point;
    let (xa, bx) = (x - rect.a(), rect.b() - x);
    let (yc, dy) = (y - rect.c(), rect.d() - y);
    let mx = (xa.powi(k) * bx).max(xa * bx.powi(k));
    let my = (yc.powi(k) * dy).max(yc * dy.powi(k));
    Ok(mx * my / factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rectangle {
        Rectangle::unit()
    }

    fn spec(n: u32, x: f64, y: f64) -> KernelSpec {
        KernelSpec::new(n, EvalPoint::new(x, y), unit()).unwrap()
    }

    #[test]
    fn order_zero_step_table() {
        let k = spec(0, 0.25, 0.25);
        assert_eq!(k.s(0.1, 0.1), 0.5625);
        assert_eq!(k.s(0.5, 0.1), 0.25 * 0.75);
        assert_eq!(k.s(0.1, 0.5), 0.75 * 0.25);
        assert_eq!(k.s(0.5, 0.5), 0.0625);
        let lit = k.with_sign(SignVariant::TheoremLiteral);
        for (t, s) in [(0.1, 0.1), (0.5, 0.1), (0.1, 0.5), (0.9, 0.9)] {
            assert_eq!(k.s(t, s), lit.s(t, s));
        }
    }

    #[test]
    fn first_order_branches() {
        let k = spec(1, 0.5, 0.5);
        assert_eq!(k.s(0.25, 0.25), 1.0 / 64.0);
        assert_eq!(k.s(0.75, 0.25), 1.0 / 64.0);
        assert_eq!(k.with_sign(SignVariant::TheoremLiteral).s(0.75, 0.25), -1.0 / 64.0);
    }

    #[test]
    fn midpoint_kernel_branches() {
        let k = spec(1, 0.5, 0.5);
        assert_eq!(k.m(0.25, 0.75), -1.0 / 64.0);
        assert_eq!(k.with_midpoint(MidpointVariant::Section3).m(0.25, 0.75), 1.0 / 64.0);
        let z = spec(0, 0.3, 0.6);
        for (t, s) in [(0.1, 0.9), (0.9, 0.1), (0.5, 0.5)] {
            assert_eq!(z.m(t, s), 0.25);
            assert_eq!(z.with_midpoint(MidpointVariant::Section3).m(t, s), 0.25);
        }
    }

    #[test]
    fn corollary_kernel_matches_literal_kernel_at_midpoint() {
        let rect = Rectangle::new(-1.0, 2.0, 0.5, 1.5).unwrap();
        for n in 0..5 {
            let k = KernelSpec::new(n, rect.midpoint(), rect)
                .unwrap()
                .with_sign(SignVariant::TheoremLiteral);
            for i in 0..64 {
                for j in 0..64 {
                    let t = rect.a() + rect.width() * (i as f64 + 0.37) / 64.0;
                    let s = rect.c() + rect.height() * (j as f64 + 0.61) / 64.0;
                    let (sv, mv) = (k.s(t, s), k.m(t, s));
                    assert!((sv - mv).abs() <= 1e-13 * sv.abs(), "n={n}");
                }
            }
        }
    }

    #[test]
    fn continuity_across_seams() {
        for n in 1..4 {
            for v in [SignVariant::TheoremLiteral, SignVariant::ProofConsistent] {
                let k = spec(n, 0.4, 0.7).with_sign(v);
                let eps = 1e-9;
                for s in [0.1, 0.5, 0.9] {
                    assert!((k.s(0.4, s) - k.s(0.4 + eps, s)).abs() < 1e-7);
                }
                for t in [0.1, 0.5, 0.9] {
                    assert!((k.s(t, 0.7) - k.s(t, 0.7 + eps)).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn sup_examples() {
        let mid = EvalPoint::new(0.5, 0.5);
        assert_eq!(kernel_sup(1, mid, &unit()).unwrap(), 1.0 / 16.0);
        assert_eq!(kernel_sup(0, EvalPoint::new(0.25, 0.5), &unit()).unwrap(), 0.375);
        assert_eq!(kernel_sup(2, EvalPoint::new(0.0, 0.3), &unit()).unwrap(), 0.0);
        assert!(kernel_sup(1, EvalPoint::new(1.5, 0.5), &unit()).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::new(13, EvalPoint::new(0.5, 0.5), unit()).is_err());
        assert!(KernelSpec::new(1, EvalPoint::new(0.5, -0.1), unit()).is_err());
        assert!(kernel_s(&spec(1, 0.5, 0.5), 2.0, 0.5).is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(12), 479_001_600.0);
    }
}
