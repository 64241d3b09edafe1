//! Composite Gauss–Legendre quadrature with dyadic refinement.

use super::{Estimate, QuadOptions};
use crate::domain::{segmented_nodes, Curve, Rectangle, Surface};
use crate::error::{Error, Result};
use crate::expr::EvalError;
use crate::sum::{pairwise_sum, par_chunk_sum};

/// 5-point Gauss–Legendre abscissae on `[-1, 1]`.
const NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];

const WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Abscissae and half-width-scaled weights of one cell.
fn cell_rule(lo: f64, hi: f64) -> ([f64; 5], [f64; 5]) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut x = [0.0; 5];
    let mut w = [0.0; 5];
    for k in 0..5 {
        x[k] = mid + half * NODES[k];
        w[k] = half * WEIGHTS[k];
    }
    (x, w)
}

fn level_2d<S: Surface + ?Sized>(h: &S, t_nodes: &[f64], s_nodes: &[f64]) -> std::result::Result<f64, EvalError> {
    let t_rules: Vec<_> = t_nodes.windows(2).map(|w| cell_rule(w[0], w[1])).collect();
    par_chunk_sum(s_nodes.len() - 1, |lo, hi, out| {
        let mut cells = vec![0.0; t_rules.len()];
        for (slot, j) in out.iter_mut().zip(lo..hi) {
            let (sx, sw) = cell_rule(s_nodes[j], s_nodes[j + 1]);
            for (cell, (tx, tw)) in cells.iter_mut().zip(&t_rules) {
                let mut acc = 0.0;
                for b in 0..5 {
                    let mut inner = 0.0;
                    for a in 0..5 {
                        inner += tw[a] * h.at(tx[a], sx[b])?;
                    }
                    acc += sw[b] * inner;
                }
                *cell = acc;
            }
            *slot = pairwise_sum(&cells);
        }
        Ok(())
    })
}

/// `∫∫_region h dt ds` by composite 5×5-point Gauss–Legendre.
///
/// Level `L` uses `2^L` cells per segment on each axis, where segments are
/// delimited by the break lists in `opts`. Refinement stops once two
/// successive levels (from level 2 on) differ by at most
/// `tol * max(1, |value|)`.
pub fn lebesgue_double_integral<S: Surface + ?Sized>(
    h: &S,
    region: &Rectangle,
    opts: &QuadOptions,
) -> Result<Estimate> {
    let mut levels = Vec::new();
    for level in 0..opts.max_levels {
        let t = segmented_nodes(region.a(), region.b(), &opts.t_breaks, 1, level);
        let s = segmented_nodes(region.c(), region.d(), &opts.s_breaks, 1, level);
        levels.push(level_2d(h, &t, &s)?);
        if let Some(est) = settle(&levels, opts.tol, level >= 2) {
            return Ok(est);
        }
    }
    Ok(unsettled(levels))
}

/// One-dimensional counterpart of [`lebesgue_double_integral`].
pub fn gauss_legendre_1d<C: Curve + ?Sized>(
    h: &C,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<Estimate> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let mut levels = Vec::new();
    for level in 0..opts.max_levels {
        let nodes = segmented_nodes(lo, hi, breaks, 1, level);
        let mut cells = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            let (x, wt) = cell_rule(w[0], w[1]);
            let mut acc = 0.0;
            for k in 0..5 {
                acc += wt[k] * h.at(x[k])?;
            }
            cells.push(acc);
        }
        levels.push(pairwise_sum(&cells));
        if let Some(est) = settle(&levels, opts.tol, level >= 2) {
            return Ok(est);
        }
    }
    Ok(unsettled(levels))
}

fn settle(levels: &[f64], tol: f64, eligible: bool) -> Option<Estimate> {
    let n = levels.len();
    if n < 2 || !eligible {
        return None;
    }
    let value = levels[n - 1];
    let est_error = (levels[n - 1] - levels[n - 2]).abs();
    (est_error <= tol * value.abs().max(1.0)).then(|| Estimate {
        value,
        est_error,
        converged: true,
        levels: levels.to_vec(),
    })
}

fn unsettled(levels: Vec<f64>) -> Estimate {
    let n = levels.len();
    let value = levels[n - 1];
    let est_error = if n >= 2 {
        (levels[n - 1] - levels[n - 2]).abs()
    } else {
        f64::INFINITY
    };
    Estimate {
        value,
        est_error,
        converged: false,
        levels,
    }
}
