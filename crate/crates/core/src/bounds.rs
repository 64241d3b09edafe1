//! Error bounds for the remainder: variation bounds and the
//! absolutely-continuous `L∞` / `L_p` bounds, with the norms they need.

use serde::{Deserialize, Serialize};

use crate::bivariation::{total_bivariation, VariationEstimate, VariationMethod};
use crate::domain::{DerivativeField, EvalPoint, MixedOrder, Rectangle};
use crate::error::{Error, Result};
use crate::kernels::{factorial, kernel_sup};
use crate::rs_quad::{lebesgue_double_integral, Estimate, QuadOptions};
use crate::sampling::{grid_sup, NormEstimate};

fn check_p(p: f64) -> Result<f64> {
    if p > 1.0 && p.is_finite() {
        Ok(p / (p - 1.0))
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `sup |D^order f|` over `region` on a refined grid.
pub fn linf_norm(field: &DerivativeField, order: MixedOrder, region: &Rectangle) -> Result<NormEstimate> {
    grid_sup(field.partial(order).as_ref(), region)
}

/// `(∫∫ |D^order f|^p)^(1/p)` over `region`.
pub fn lp_norm(
    field: &DerivativeField,
    order: MixedOrder,
    region: &Rectangle,
    p: f64,
    tol: f64,
) -> Result<NormEstimate> {
    check_p(p)?;
    let d = field.partial(order);
    let h = |t: f64, s: f64| d.eval(t, s).map(|v| v.abs().powf(p));
    let Estimate {
        value,
        converged,
        levels,
        ..
    } = lebesgue_double_integral(&h, region, &QuadOptions::new(tol))?;
    Ok(NormEstimate {
        value: value.powf(1.0 / p),
        converged,
        levels: levels.iter().map(|v| v.powf(1.0 / p)).collect(),
    })
}

/// `kernel_sup / ((b-a)(d-c))`: multiplies `V` in the pointwise bound.
pub fn variation_pointwise_coeff(n: u32, point: EvalPoint, q: &Rectangle) -> Result<f64> {
    Ok(kernel_sup(n, point, q)? / q.area())
}

/// `(b-a)^n (d-c)^n / (2^(2n+2) n!)`: multiplies `V` in the global bound.
pub fn variation_global_coeff(n: u32, q: &Rectangle) -> f64 {
    let k = n as i32;
    q.width().powi(k) * q.height().powi(k) / (2f64.powi(2 * k + 2) * factorial(n))
}

fn ac_factor(lo: f64, hi: f64, x: f64, e: f64) -> f64 {
    let (xa, bx) = (x - lo, hi - x);
    bx * xa.powf(e) + xa * bx.powf(e)
}

/// Coefficient of `‖D^(n+1,n+1) f‖∞` in the pointwise `L∞` bound.
pub fn ac_linf_coeff(n: u32, point: EvalPoint, q: &Rectangle) -> Result<f64> {
    q.ensure_contains(point)?;
    let e = (n + 1) as f64;
    let num = ac_factor(q.a(), q.b(), point.x, e) * ac_factor(q.c(), q.d(), point.y, e);
    Ok(num / (factorial(n) * e * e * q.area()))
}

/// Coefficient of `‖D^(n+1,n+1) f‖_p` in the pointwise `L_p` bound.
pub fn ac_lp_coeff(n: u32, point: EvalPoint, q: &Rectangle, p: f64) -> Result<f64> {
    let qc = check_p(p)?;
    q.ensure_contains(point)?;
    let e = n as f64 + 1.0 / qc;
    let num = ac_factor(q.a(), q.b(), point.x, e) * ac_factor(q.c(), q.d(), point.y, e);
    Ok(num / (factorial(n) * (n as f64 * qc + 1.0).powf(1.0 / qc) * q.area()))
}

/// Coefficient of `‖D^(n+1,n+1) f‖∞` in the midpoint `L∞` bound.
pub fn midpoint_ac_linf_coeff(n: u32, q: &Rectangle) -> f64 {
    let k = n as i32 + 1;
    let e = (n + 1) as f64;
    q.width().powi(k) * q.height().powi(k) / (factorial(n) * 2f64.powi(2 * k) * e * e)
}

/// Coefficient of `‖D^(n+1,n+1) f‖_p` in the midpoint `L_p` bound.
pub fn midpoint_ac_lp_coeff(n: u32, q: &Rectangle, p: f64) -> Result<f64> {
    let qc = check_p(p)?;
    let e = n as f64 + 1.0 / qc;
    let denom = factorial(n) * 2f64.powf(2.0 * n as f64 + 2.0 / qc) * (n as f64 * qc + 1.0).powf(1.0 / qc);
    Ok(q.width().powf(e) * q.height().powf(e) / denom)
}

/// Variation bounds with the variation they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationBound {
    pub pointwise: f64,
    pub global: f64,
    /// Variation of `D^(n,n) f`.
    pub variation: VariationEstimate,
}

/// `V(D^(n,n) f)` by smooth quadrature.
pub fn remainder_variation(field: &DerivativeField, n: u32, q: &Rectangle, tol: f64) -> Result<VariationEstimate> {
    total_bivariation(
        field,
        MixedOrder::diagonal(n)?,
        q,
        VariationMethod::SmoothQuadrature,
        tol,
    )
}

/// Pointwise and global variation bounds on `|B_n|` at `point`.
pub fn variation_bound(
    field: &DerivativeField,
    n: u32,
    point: EvalPoint,
    q: &Rectangle,
    tol: f64,
) -> Result<VariationBound> {
    let coeff = variation_pointwise_coeff(n, point, q)?;
    let variation = remainder_variation(field, n, q, tol)?;
    Ok(VariationBound {
        pointwise: coeff * variation.value,
        global: variation_global_coeff(n, q) * variation.value,
        variation,
    })
}

/// The variation bound at the rectangle midpoint.
pub fn midpoint_variation_bound(field: &DerivativeField, n: u32, q: &Rectangle, tol: f64) -> Result<VariationBound> {
    let variation = remainder_variation(field, n, q, tol)?;
    let global = variation_global_coeff(n, q) * variation.value;
    Ok(VariationBound {
        pointwise: global,
        global,
        variation,
    })
}

/// Whether `|B| ≤ pointwise bound` once the estimated errors of both the
/// remainder and the variation are allowed for, plus a few ulps of slack.
pub fn remainder_within_bound(b: &Estimate, bound: &VariationBound, coeff: f64) -> bool {
    let slack = b.est_error + coeff * bound.variation.est_error + 8.0 * f64::EPSILON * bound.pointwise;
    b.value.abs() <= bound.pointwise + slack
}

/// Where the printed chain `pointwise ≤ global` holds, for auditing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainAudit {
    pub pointwise_coeff: f64,
    pub global_coeff: f64,
    pub holds: bool,
}

pub fn variation_chain_audit(n: u32, point: EvalPoint, q: &Rectangle) -> Result<ChainAudit> {
    let pointwise_coeff = variation_pointwise_coeff(n, point, q)?;
    let global_coeff = variation_global_coeff(n, q);
    Ok(ChainAudit {
        pointwise_coeff,
        global_coeff,
        holds: pointwise_coeff <= global_coeff * (1.0 + 1e-12),
    })
}

/// `L∞` and `L_p` bounds with the norms of `D^(n+1,n+1) f` they use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcBounds {
    pub linf: f64,
    pub lp: f64,
    pub p: f64,
    pub q: f64,
    pub linf_norm: NormEstimate,
    pub lp_norm: NormEstimate,
}

fn ac_norms(field: &DerivativeField, n: u32, q: &Rectangle, p: f64, tol: f64) -> Result<(NormEstimate, NormEstimate)> {
    let order = MixedOrder::diagonal(n + 1)?;
    Ok((linf_norm(field, order, q)?, lp_norm(field, order, q, p, tol)?))
}

pub fn ac_bounds(
    field: &DerivativeField,
    n: u32,
    point: EvalPoint,
    q: &Rectangle,
    p: f64,
    tol: f64,
) -> Result<AcBounds> {
    let linf_c = ac_linf_coeff(n, point, q)?;
    let lp_c = ac_lp_coeff(n, point, q, p)?;
    let (linf_norm, lp_norm) = ac_norms(field, n, q, p, tol)?;
    Ok(AcBounds {
        linf: linf_c * linf_norm.value,
        lp: lp_c * lp_norm.value,
        p,
        q: p / (p - 1.0),
        linf_norm,
        lp_norm,
    })
}

pub fn midpoint_ac_bounds(field: &DerivativeField, n: u32, q: &Rectangle, p: f64, tol: f64) -> Result<AcBounds> {
    let lp_c = midpoint_ac_lp_coeff(n, q, p)?;
    let (linf_norm, lp_norm) = ac_norms(field, n, q, p, tol)?;
    Ok(AcBounds {
        linf: midpoint_ac_linf_coeff(n, q) * linf_norm.value,
        lp: lp_c * lp_norm.value,
        p,
        q: p / (p - 1.0),
        linf_norm,
        lp_norm,
    })
}

/// All four bounds at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub pointwise_variation_bound: f64,
    pub global_variation_bound: f64,
    pub linf_bound: f64,
    pub lp_bound: f64,
    pub p: f64,
    pub q: f64,
    pub variation: VariationEstimate,
    pub linf_norm: NormEstimate,
    pub lp_norm: NormEstimate,
    /// Set when any norm or variation estimate failed to converge.
    pub advisory: bool,
}

pub fn bound_report(
    field: &DerivativeField,
    n: u32,
    point: EvalPoint,
    q: &Rectangle,
    p: f64,
    tol: f64,
) -> Result<BoundReport> {
    let vb = variation_bound(field, n, point, q, tol)?;
    let ac = ac_bounds(field, n, point, q, p, tol)?;
    let advisory = !(vb.variation.converged && ac.linf_norm.converged && ac.lp_norm.converged);
    Ok(BoundReport {
        pointwise_variation_bound: vb.pointwise,
        global_variation_bound: vb.global,
        linf_bound: ac.linf,
        lp_bound: ac.lp,
        p,
        q: ac.q,
        variation: vb.variation,
        linf_norm: ac.linf_norm,
        lp_norm: ac.lp_norm,
        advisory,
    })
}
