//! Order-fixed floating-point reductions.
//!
//! Results depend only on the input order and the fixed chunk size, never on
//! the number of worker threads, so every sum is bit-reproducible.

use rayon::prelude::*;

use crate::expr::EvalError;

const LEAF: usize = 16;

/// Rows handed to one parallel task. Fixed so the reduction tree is fixed.
pub(crate) const ROW_CHUNK: usize = 8;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().fold(0.0, |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sums `row(i)` for `i in 0..rows`, evaluating fixed-size chunks of rows
/// in parallel and combining the partial sums pairwise in index order.
///
/// The first failing row (in index order) determines the error.
#[cfg(test)]
pub(crate) fn par_row_sum<F>(rows: usize, row: F) -> Result<f64, EvalError>
where
    F: Fn(usize) -> Result<f64, EvalError> + Sync,
{
    par_chunk_sum(rows, |lo, hi, out| {
        for (slot, i) in out.iter_mut().zip(lo..hi) {
            *slot = row(i)?;
        }
        Ok(())
    })
}

/// Sums rows `0..rows` in fixed chunks of [`ROW_CHUNK`] rows:
/// `chunk(lo, hi, out)` fills `out` with the sums of rows `lo..hi`, which
/// lets a chunk reuse work between neighbouring rows. Chunks run in
/// parallel and are combined pairwise in index order; the first failing
/// chunk determines the error.
pub(crate) fn par_chunk_sum<F>(rows: usize, chunk: F) -> Result<f64, EvalError>
where
    F: Fn(usize, usize, &mut [f64]) -> Result<(), EvalError> + Sync,
{
    let chunks = rows.div_ceil(ROW_CHUNK);
    let partials: Vec<Result<f64, EvalError>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let lo = k * ROW_CHUNK;
            let hi = (lo + ROW_CHUNK).min(rows);
            let mut vals = [0.0f64; ROW_CHUNK];
            chunk(lo, hi, &mut vals[..hi - lo])?;
            Ok(pairwise_sum(&vals[..hi - lo]))
        })
        .collect();
    let partials = partials.into_iter().collect::<Result<Vec<f64>, _>>()?;
    Ok(pairwise_sum(&partials))
}

/// Row-parallel `max` (exact, so order-free).
pub(crate) fn par_row_max<F>(rows: usize, row: F) -> Result<f64, EvalError>
where
    F: Fn(usize) -> Result<f64, EvalError> + Sync,
{
    let vals: Vec<Result<f64, EvalError>> = (0..rows).into_par_iter().map(&row).collect();
    let mut best = f64::NEG_INFINITY;
    for v in vals {
        best = best.max(v?);
    }
    Ok(best)
}
