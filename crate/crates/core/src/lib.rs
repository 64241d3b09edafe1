//! Bivariate chord-plane approximation on rectangles.
//!
//! The crate evaluates the chord plane and corner-derivative expansions of
//! a function `f(t, s)` on `Q = [a, b] × [c, d]`, their Riemann–Stieltjes
//! remainders against mixed partials of `f`, Vitali bivariation, and the
//! variation and `L∞`/`L_p` error bounds for those remainders. Functions
//! are given as text and differentiated symbolically.
//!
//! ```
//! use bivar_core::{approx, DerivativeField, EvalPoint, Rectangle};
//!
//! let f = DerivativeField::parse("t*s").unwrap();
//! let q = Rectangle::unit();
//! let a = approx::approx_a(&f, 0, EvalPoint::new(0.5, 0.5), &q).unwrap();
//! assert_eq!(a, 0.25);
//! ```

pub mod approx;
pub mod bivariation;
pub mod bounds;
pub mod catalog;
pub mod domain;
pub mod error;
pub mod expr;
pub mod kernels;
pub mod rs_quad;
pub mod sampling;
pub mod univariate;

mod sum;

pub use domain::{
    uniform_partition, Curve, Derivative, DerivativeField, EvalPoint, GridPartition, MixedOrder, Plain, Rectangle,
    Surface, MAX_TOTAL_ORDER,
};
pub use error::{Error, Result};
pub use expr::{parse, DomainKind, EvalError, Expr, ParseError, ParseErrorKind, Program};
pub use kernels::{KernelSpec, MidpointVariant, SignVariant};
pub use rs_quad::Estimate;
pub use sum::pairwise_sum;
