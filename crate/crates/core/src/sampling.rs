//! Sup-norm estimates on refined sample grids.

use serde::{Deserialize, Serialize};

use crate::domain::{Rectangle, Surface};
use crate::error::{Error, Result};
use crate::sum::par_row_max;

/// Grid size of the first sup estimate.
pub const SUP_START_GRID: usize = 64;
/// Number of grid sizes tried (64, 128, 256, 512).
pub const SUP_MAX_LEVELS: usize = 4;
/// Relative change between grids accepted as converged.
pub const SUP_REL_CHANGE: f64 = 1e-4;

/// A norm estimate with its refinement history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub levels: Vec<f64>,
}

/// `max |g|` over the `(k+1) × (k+1)` equispaced nodes of `q`, edges included.
pub fn grid_max_abs<S: Surface + ?Sized>(g: &S, q: &Rectangle, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidCellCount { m_t: k, m_s: k });
    }
    let node = |lo: f64, hi: f64, i: usize| {
        if i == k {
            hi
        } else {
            lo + (hi - lo) * (i as f64) / (k as f64)
        }
    };
    Ok(par_row_max(k + 1, |j| {
        let s = node(q.c(), q.d(), j);
        let mut best = 0.0f64;
        for i in 0..=k {
            best = best.max(g.at(node(q.a(), q.b(), i), s)?.abs());
        }
        Ok(best)
    })?)
}

/// Grid estimate of `sup_q |g|`, doubling the grid from 64×64 until the
/// relative change drops below `1e-4` or four grids have been tried.
pub fn grid_sup<S: Surface + ?Sized>(g: &S, q: &Rectangle) -> Result<NormEstimate> {
    let mut levels: Vec<f64> = Vec::with_capacity(SUP_MAX_LEVELS);
    let mut k = SUP_START_GRID;
    for _ in 0..SUP_MAX_LEVELS {
        let v = grid_max_abs(g, q, k)?;
        if let Some(&prev) = levels.last() {
            if (v - prev).abs() <= SUP_REL_CHANGE * f64::abs(v) {
                levels.push(v);
                return Ok(NormEstimate {
                    value: v,
                    converged: true,
                    levels,
                });
            }
        }
        levels.push(v);
        k *= 2;
    }
    Ok(NormEstimate {
        value: *levels.last().expect("at least one level"),
        converged: false,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Plain;

    #[test]
    fn corner_maximum() {
        let est = grid_sup(&Plain(|t: f64, s: f64| 4.0 * t * s), &Rectangle::unit()).unwrap();
        assert_eq!(est.value, 4.0);
        assert!(est.converged);
        assert_eq!(est.levels.len(), 2);
    }

    #[test]
    fn zero_function() {
        let est = grid_sup(&Plain(|_, _| 0.0), &Rectangle::unit()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn interior_peak_between_nodes() {
        let peak = 1.0 / 3.0;
        let g = Plain(move |t: f64, _s: f64| 1.0 - (t - peak).powi(2));
        let est = grid_sup(&g, &Rectangle::unit()).unwrap();
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn zero_grid_rejected() {
        assert!(grid_max_abs(&Plain(|_, _| 1.0), &Rectangle::unit(), 0).is_err());
    }
}
