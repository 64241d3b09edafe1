//! Chord-plane approximants, corner-derivative expansions and their
//! Stieltjes remainders, with a residual audit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DerivativeField, EvalPoint, MixedOrder, Rectangle};
use crate::error::{Error, Result};
use crate::expr::EvalError;
use crate::kernels::{factorial, KernelSpec, MidpointVariant, SignVariant};
use crate::rs_quad::{lebesgue_double_integral, rs_double_integral, Estimate, QuadOptions, RsOptions};

/// How the remainder integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemainderMode {
    /// Stieltjes sums against `D^(n,n) f`.
    #[default]
    Rs,
    /// Gauss–Legendre quadrature of the kernel times `D^(n+1,n+1) f`.
    Lebesgue,
}

/// Variant selection for one audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Variants {
    #[serde(default)]
    pub sign_variant: SignVariant,
    #[serde(default)]
    pub midpoint_variant: MidpointVariant,
    #[serde(default)]
    pub mode: RemainderMode,
}

/// A remainder value scaled by `1/((b-a)(d-c))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Remainder {
    pub estimate: Estimate,
    pub mode: RemainderMode,
}

impl Remainder {
    pub fn value(&self) -> f64 {
        self.estimate.value
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sign(j: u32) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Values of `D^order f` at the corners `(a,c), (a,d), (b,c), (b,d)`.
fn corner_values(field: &DerivativeField, order: MixedOrder, q: &Rectangle) -> Result<[f64; 4]> {
    let d = field.partial(order);
    let mut out = [0.0; 4];
    for (slot, c) in out.iter_mut().zip(q.corners()) {
        *slot = d.eval(c.x, c.y)?;
    }
    Ok(out)
}

/// The bilinear interpolant of the corner values.
pub fn chord_plane(field: &DerivativeField, point: EvalPoint, q: &Rectangle) -> Result<f64> {
    q.ensure_contains(point)?;
    let [ac, ad, bc, bd] = corner_values(field, MixedOrder::ZERO, q)?;
    let EvalPoint { x, y } = point;
    let (bx, xa, dy, yc) = (q.b() - x, x - q.a(), q.d() - y, y - q.c());
    Ok((bx * dy * ac + bx * yc * ad + xa * dy * bc + xa * yc * bd) / q.area())
}

/// `C_f - f` at `point`.
pub fn chord_defect(field: &DerivativeField, point: EvalPoint, q: &Rectangle) -> Result<f64> {
    Ok(chord_plane(field, point, q)? - field.value(point.x, point.y)?)
}

/// The chord plane plus the corner-derivative sum of order `n`.
pub fn approx_a(field: &DerivativeField, n: u32, point: EvalPoint, q: &Rectangle) -> Result<f64> {
    let chord = chord_plane(field, point, q)?;
    let EvalPoint { x, y } = point;
    let (bx, xa, dy, yc) = (q.b() - x, x - q.a(), q.d() - y, y - q.c());
    let mut terms = Vec::with_capacity(n as usize);
    for j in 1..=n {
        let [ac, ad, bc, bd] = corner_values(field, MixedOrder::new(n - j, j)?, q)?;
        let (nj, jm) = ((n - j) as i32, j as i32 - 1);
        let sj = sign(j);
        let left = bx * xa.powi(nj) * (yc.powi(jm) * ac + sj * dy.powi(jm) * ad);
        let right = xa * bx.powi(nj) * (sj * yc.powi(jm) * bc + dy.powi(jm) * bd);
        terms.push(binomial(n, j) / factorial(j) * (left + right));
    }
    let sum: f64 = terms.iter().sum();
    Ok(chord + yc * dy / q.area() * sum)
}

fn scaled(est: Estimate, area: f64) -> Estimate {
    Estimate {
        value: est.value / area,
        est_error: est.est_error / area,
        converged: est.converged,
        levels: est.levels.iter().map(|v| v / area).collect(),
    }
}

/// `(1/area) ∫∫ S_n(x,t;y,s) d_t d_s D^(n,n) f`.
///
/// The Lebesgue mode integrates `S_n · D^(n+1,n+1) f` instead. Both keep
/// `x` and `y` as grid nodes.
pub fn remainder_b(
    field: &DerivativeField,
    n: u32,
    point: EvalPoint,
    q: &Rectangle,
    tol: f64,
    mode: RemainderMode,
    sign_variant: SignVariant,
) -> Result<Remainder> {
    let kernel = KernelSpec::new(n, point, *q)?.with_sign(sign_variant).s_surface();
    let order = MixedOrder::diagonal(n)?;
    let est = match mode {
        RemainderMode::Rs => {
            let alpha = field.partial(order);
            let opts = RsOptions::new(tol).with_breaks(vec![point.x], vec![point.y]);
            rs_double_integral(&kernel, alpha.as_ref(), q, &opts)?
        }
        RemainderMode::Lebesgue => {
            let density = field.partial(order.bump()?);
            let h = |t: f64, s: f64| -> std::result::Result<f64, EvalError> {
                use crate::domain::Surface;
                Ok(kernel.at(t, s)? * density.eval(t, s)?)
            };
            let opts = QuadOptions::new(tol).with_breaks(vec![point.x], vec![point.y]);
            lebesgue_double_integral(&h, q, &opts)?
        }
    };
    Ok(Remainder {
        estimate: scaled(est, q.area()),
        mode,
    })
}

/// Corner average plus the midpoint corner-derivative sum of order `n`.
pub fn midpoint_e(field: &DerivativeField, n: u32, q: &Rectangle) -> Result<f64> {
    let [ac, ad, bc, bd] = corner_values(field, MixedOrder::ZERO, q)?;
    let avg = (ac + ad + bc + bd) / 4.0;
    let (w, h) = (q.width(), q.height());
    let mut terms = Vec::with_capacity(n as usize);
    for j in 1..=n {
        let [ac, ad, bc, bd] = corner_values(field, MixedOrder::new(n - j, j)?, q)?;
        let sj = sign(j);
        let brace = ac + sj * ad + sj * bc + bd;
        terms.push(binomial(n, j) / factorial(j) * w.powi((n - j) as i32) * h.powi(j as i32) * brace);
    }
    let sum: f64 = terms.iter().sum();
    Ok(avg + sum / 2f64.powi(n as i32 + 2))
}

/// `(1/area) ∫∫ M_n d_t d_s D^(n,n) f` as a Stieltjes integral.
pub fn midpoint_f(
    field: &DerivativeField,
    n: u32,
    q: &Rectangle,
    tol: f64,
    midpoint_variant: MidpointVariant,
) -> Result<Remainder> {
    let mid = q.midpoint();
    let kernel = KernelSpec::new(n, mid, *q)?.with_midpoint(midpoint_variant).m_surface();
    let alpha = field.partial(MixedOrder::diagonal(n)?);
    let opts = RsOptions::new(tol).with_breaks(vec![mid.x], vec![mid.y]);
    let est = rs_double_integral(&kernel, alpha.as_ref(), q, &opts)?;
    Ok(Remainder {
        estimate: scaled(est, q.area()),
        mode: RemainderMode::Rs,
    })
}

/// Extra columns recorded when the point is the rectangle midpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointAudit {
    pub e_value: f64,
    pub f_remainder: Remainder,
    /// `f - E - F`.
    pub residual: f64,
    pub midpoint_variant: MidpointVariant,
}

/// One row of the identity audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationResult {
    pub n: u32,
    pub point: EvalPoint,
    pub f_value: f64,
    pub a_value: f64,
    pub b: Remainder,
    /// `f_value - a_value - b.value()`.
    pub residual: f64,
    pub sign_variant: SignVariant,
    pub midpoint: Option<MidpointAudit>,
}

/// Computes `f`, `A_n`, `B_n` and the residual at one point.
pub fn audit_point(
    field: &DerivativeField,
    n: u32,
    point: EvalPoint,
    q: &Rectangle,
    tol: f64,
    variants: Variants,
) -> Result<ApproximationResult> {
    q.ensure_contains(point)?;
    let f_value = field.value(point.x, point.y)?;
    let a_value = approx_a(field, n, point, q)?;
    let b = remainder_b(field, n, point, q, tol, variants.mode, variants.sign_variant)?;
    let residual = f_value - a_value - b.value();
    let midpoint = if q.is_midpoint(point) {
        let e_value = midpoint_e(field, n, q)?;
        let f_remainder = midpoint_f(field, n, q, tol, variants.midpoint_variant)?;
        Some(MidpointAudit {
            e_value,
            residual: f_value - e_value - f_remainder.value(),
            f_remainder,
            midpoint_variant: variants.midpoint_variant,
        })
    } else {
        None
    };
    Ok(ApproximationResult {
        n,
        point,
        f_value,
        a_value,
        b,
        residual,
        sign_variant: variants.sign_variant,
        midpoint,
    })
}

/// Audits every point independently and in parallel. A failing point
/// yields an error in its slot; the other rows are unaffected.
pub fn audit_identity(
    field: &DerivativeField,
    n: u32,
    points: &[EvalPoint],
    q: &Rectangle,
    tol: f64,
    variants: Variants,
) -> Vec<Result<ApproximationResult, Error>> {
    points
        .par_iter()
        .map(|&p| audit_point(field, n, p, q, tol, variants))
        .collect()
}
