use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid rectangle [{a}, {b}] x [{c}, {d}]: need finite a < b and c < d")]
    InvalidRectangle { a: f64, b: f64, c: f64, d: f64 },
    #[error("invalid interval [{lo}, {hi}]: need finite lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("point ({x}, {y}) lies outside the rectangle")]
    PointOutside { x: f64, y: f64 },
    #[error("point {x} lies outside [{lo}, {hi}]")]
    PointOutsideInterval { x: f64, lo: f64, hi: f64 },
    #[error("mixed order ({p}, {q}) exceeds the total-order ceiling")]
    OrderTooHigh { p: u32, q: u32 },
    #[error("cell counts must be at least 1 (got {m_t} x {m_s})")]
    InvalidCellCount { m_t: usize, m_s: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),
    #[error("exponent p must be greater than 1 (got {0})")]
    InvalidExponent(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
