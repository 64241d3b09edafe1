//! Vitali variation: rectangular differences, partition sums and total
//! bivariation estimates, plus one-dimensional total variation.

use serde::{Deserialize, Serialize};

use crate::domain::{segmented_nodes, Curve, DerivativeField, GridPartition, MixedOrder, Rectangle, Surface};
use crate::error::{Error, Result};
use crate::expr::EvalError;
use crate::rs_quad::{gauss_legendre_1d, lebesgue_double_integral, QuadOptions};
use crate::sum::{pairwise_sum, par_chunk_sum};
use crate::univariate::Expr1D;

/// Coarsest refinement level has about this many cells per axis.
pub const REFINEMENT_BASE_CELLS: usize = 8;
/// Upper limit on refinement levels.
pub const REFINEMENT_MAX_LEVELS: u32 = 12;
/// Partition-refinement stops before a level would exceed this many cells.
pub const REFINEMENT_MAX_CELLS: usize = 1 << 24;

/// How a variation was estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariationMethod {
    /// Supremum of partition sums over dyadic refinements; a lower bound.
    PartitionRefinement,
    /// Quadrature of the absolute mixed partial (or absolute derivative in 1-D).
    SmoothQuadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub value: f64,
    pub method: VariationMethod,
    pub levels_used: u32,
    pub is_lower_bound: bool,
    pub converged: bool,
    /// Change between the last two levels.
    pub est_error: f64,
}

/// `g(t0,s0) - g(t0,s1) - g(t1,s0) + g(t1,s1)` over `cell`.
pub fn delta11<S: Surface + ?Sized>(g: &S, cell: &Rectangle) -> Result<f64> {
    let (t0, t1, s0, s1) = (cell.a(), cell.b(), cell.c(), cell.d());
    Ok(g.at(t0, s0)? - g.at(t0, s1)? - g.at(t1, s0)? + g.at(t1, s1)?)
}

fn partition_sum_nodes<S: Surface + ?Sized>(g: &S, t: &[f64], s: &[f64]) -> std::result::Result<f64, EvalError> {
    let row_of = |y: f64| -> std::result::Result<Vec<f64>, EvalError> { t.iter().map(|&x| g.at(x, y)).collect() };
    par_chunk_sum(s.len() - 1, |lo, hi, out| {
        let mut below = row_of(s[lo])?;
        let mut cells = vec![0.0; t.len() - 1];
        for (slot, j) in out.iter_mut().zip(lo..hi) {
            let above = row_of(s[j + 1])?;
            for (i, cell) in cells.iter_mut().enumerate() {
                *cell = (below[i] - above[i] - below[i + 1] + above[i + 1]).abs();
            }
            *slot = pairwise_sum(&cells);
            below = above;
        }
        Ok(())
    })
}

/// `Σ |Δ11 g|` over all cells of `partition`.
pub fn partition_sum<S: Surface + ?Sized>(g: &S, partition: &GridPartition) -> Result<f64> {
    Ok(partition_sum_nodes(g, partition.t_nodes(), partition.s_nodes())?)
}

/// Supremum of partition sums of `g` over dyadic refinements of `q`
/// starting near 8×8 cells, stopping once the relative change is below
/// `tol`. Interior breaks are kept as nodes at every level.
pub fn refinement_variation<S: Surface + ?Sized>(
    g: &S,
    q: &Rectangle,
    t_breaks: &[f64],
    s_breaks: &[f64],
    tol: f64,
) -> Result<VariationEstimate> {
    let mut best = 0.0f64;
    let mut prev: Option<f64> = None;
    let mut est_error = f64::INFINITY;
    let mut levels_used = 0;
    for level in 0..REFINEMENT_MAX_LEVELS {
        let t = segmented_nodes(q.a(), q.b(), t_breaks, REFINEMENT_BASE_CELLS, level);
        let s = segmented_nodes(q.c(), q.d(), s_breaks, REFINEMENT_BASE_CELLS, level);
        if level > 0 && (t.len() - 1) * (s.len() - 1) > REFINEMENT_MAX_CELLS {
            break;
        }
        let sum = partition_sum_nodes(g, &t, &s)?;
        best = best.max(sum);
        levels_used = level + 1;
        if let Some(p) = prev {
            est_error = (best - p).abs();
            if est_error <= tol * best.abs().max(f64::MIN_POSITIVE) || best == 0.0 {
                return Ok(VariationEstimate {
                    value: best,
                    method: VariationMethod::PartitionRefinement,
                    levels_used,
                    is_lower_bound: true,
                    converged: true,
                    est_error,
                });
            }
        }
        prev = Some(best);
    }
    Ok(VariationEstimate {
        value: best,
        method: VariationMethod::PartitionRefinement,
        levels_used,
        is_lower_bound: true,
        converged: false,
        est_error,
    })
}

/// Total bivariation of `D^order f` over `q`.
///
/// Smooth quadrature integrates `|D^(p+1,q+1) f|`; partition refinement
/// takes the supremum of partition sums of `D^(p,q) f` and is flagged as a
/// lower bound.
pub fn total_bivariation(
    field: &DerivativeField,
    order: MixedOrder,
    q: &Rectangle,
    method: VariationMethod,
    tol: f64,
) -> Result<VariationEstimate> {
    match method {
        VariationMethod::PartitionRefinement => refinement_variation(field.partial(order).as_ref(), q, &[], &[], tol),
        VariationMethod::SmoothQuadrature => {
            let mixed = field.partial(order.bump()?);
            let abs = |t: f64, s: f64| mixed.eval(t, s).map(f64::abs);
            let est = lebesgue_double_integral(&abs, q, &QuadOptions::new(tol))?;
            Ok(VariationEstimate {
                value: est.value,
                method,
                levels_used: est.levels.len() as u32,
                is_lower_bound: false,
                converged: est.converged,
                est_error: est.est_error,
            })
        }
    }
}

/// Levels available to one-dimensional variation estimates.
const LINE_MAX_LEVELS: u32 = 16;

/// Total variation of `g` on `[lo, hi]` as `∫ |g'|`.
pub fn total_variation_1d(g: &Expr1D, lo: f64, hi: f64, tol: f64) -> Result<VariationEstimate> {
    let slope = g.derivative(1)?;
    let abs = |x: f64| slope.eval(x, 0.0).map(f64::abs);
    let est = gauss_legendre_1d(
        &abs,
        lo,
        hi,
        &[],
        &QuadOptions::new(tol).with_max_levels(LINE_MAX_LEVELS),
    )?;
    Ok(VariationEstimate {
        value: est.value,
        method: VariationMethod::SmoothQuadrature,
        levels_used: est.levels.len() as u32,
        is_lower_bound: false,
        converged: est.converged,
        est_error: est.est_error,
    })
}

/// Total variation of an arbitrary curve as the supremum of
/// `Σ |g(x_{i+1}) - g(x_i)|` over dyadic refinements.
pub fn refinement_variation_1d<C: Curve + ?Sized>(g: &C, lo: f64, hi: f64, tol: f64) -> Result<VariationEstimate> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let mut best = 0.0f64;
    let mut prev: Option<f64> = None;
    let mut est_error = f64::INFINITY;
    for level in 0..=LINE_MAX_LEVELS {
        let nodes = segmented_nodes(lo, hi, &[], REFINEMENT_BASE_CELLS, level);
        let vals = nodes
            .iter()
            .map(|&x| g.at(x))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let jumps: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        best = best.max(pairwise_sum(&jumps));
        if let Some(p) = prev {
            est_error = (best - p).abs();
            if est_error <= tol * best || best == 0.0 {
                return Ok(VariationEstimate {
                    value: best,
                    method: VariationMethod::PartitionRefinement,
                    levels_used: level + 1,
                    is_lower_bound: true,
                    converged: true,
                    est_error,
                });
            }
        }
        prev = Some(best);
    }
    Ok(VariationEstimate {
        value: best,
        method: VariationMethod::PartitionRefinement,
        levels_used: LINE_MAX_LEVELS + 1,
        is_lower_bound: true,
        converged: false,
        est_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{uniform_partition, Plain};

    fn unit() -> Rectangle {
        Rectangle::unit()
    }

    #[test]
    fn delta11_examples() {
        let ts = Plain(|t: f64, s: f64| t * s);
        assert_eq!(delta11(&ts, &unit()).unwrap(), 1.0);
        let t_only = Plain(|t: f64, _s: f64| t.exp());
        assert_eq!(
            delta11(&t_only, &Rectangle::new(0.1, 0.7, 0.2, 0.9).unwrap()).unwrap(),
            0.0
        );
        let sq = Plain(|t: f64, s: f64| t * t * s * s);
        let cell = Rectangle::new(0.0, 0.5, 0.0, 0.5).unwrap();
        assert_eq!(delta11(&sq, &cell).unwrap(), 1.0 / 16.0);
    }

    #[test]
    fn partition_sum_examples() {
        let ts = Plain(|t: f64, s: f64| t * s);
        assert_eq!(
            partition_sum(&ts, &uniform_partition(&unit(), 1, 1).unwrap()).unwrap(),
            1.0
        );
        for (m, n) in [(3, 5), (16, 16), (7, 1)] {
            let v = partition_sum(&ts, &uniform_partition(&unit(), m, n).unwrap()).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
        let k = Plain(|_, _| 2.5);
        assert_eq!(
            partition_sum(&k, &uniform_partition(&unit(), 9, 4).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn smooth_bivariation_examples() {
        let tol = 1e-9;
        let ts = DerivativeField::parse("t*s").unwrap();
        let v = total_bivariation(&ts, MixedOrder::ZERO, &unit(), VariationMethod::SmoothQuadrature, tol).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        assert!(!v.is_lower_bound);

        let sq = DerivativeField::parse("t^2*s^2").unwrap();
        let v = total_bivariation(&sq, MixedOrder::ZERO, &unit(), VariationMethod::SmoothQuadrature, tol).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);

        let tensor = DerivativeField::parse("t^2*sin(s)").unwrap();
        let v = total_bivariation(
            &tensor,
            MixedOrder::ZERO,
            &unit(),
            VariationMethod::SmoothQuadrature,
            tol,
        )
        .unwrap();
        // V(t^2) = 1 and V(sin) = sin(1) on [0, 1].
        assert!((v.value - 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn refinement_is_flagged_lower_bound() {
        let f = DerivativeField::parse("sin(t)*sin(s)").unwrap();
        let v = total_bivariation(
            &f,
            MixedOrder::ZERO,
            &unit(),
            VariationMethod::PartitionRefinement,
            1e-6,
        )
        .unwrap();
        assert!(v.is_lower_bound);
        assert!(v.converged);
        assert!((v.value - 1f64.sin().powi(2)).abs() < 1e-5);
    }

    #[test]
    fn sign_change_of_mixed_partial() {
        // D^(1,1) = (1-2t)(1-2s) changes sign on the midlines.
        let f = DerivativeField::parse("t*(1-t)*s*(1-s)").unwrap();
        let v = total_bivariation(&f, MixedOrder::ZERO, &unit(), VariationMethod::SmoothQuadrature, 1e-9).unwrap();
        assert!((v.value - 0.25).abs() < 1e-12);
        let r = total_bivariation(
            &f,
            MixedOrder::ZERO,
            &unit(),
            VariationMethod::PartitionRefinement,
            1e-9,
        )
        .unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_variation() {
        let cases = [
            ("t", 0.0, 1.0, 1.0),
            ("t^2", 0.0, 1.0, 1.0),
            ("sin(t)", 0.0, std::f64::consts::PI, 2.0),
        ];
        for (src, lo, hi, want) in cases {
            let g = Expr1D::parse(src).unwrap();
            let v = total_variation_1d(&g, lo, hi, 1e-10).unwrap();
            assert!((v.value - want).abs() < 1e-9, "{src}: {}", v.value);
            let r = refinement_variation_1d(&|x: f64| g.eval(x), lo, hi, 1e-10).unwrap();
            assert!((r.value - want).abs() < 1e-9, "{src}: {}", r.value);
        }
    }

    #[test]
    fn errors_propagate() {
        let f = DerivativeField::parse("ln(t)*s").unwrap();
        assert!(total_bivariation(
            &f,
            MixedOrder::ZERO,
            &unit(),
            VariationMethod::PartitionRefinement,
            1e-6
        )
        .is_err());
    }
}
