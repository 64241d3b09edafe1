//! Riemann–Stieltjes and Lebesgue double integration.
//!
//! Stieltjes sums tag every cell at its center and weight it with the
//! rectangular increment `Δ11 α` of the integrator. Successive dyadic
//! levels are combined by Richardson extrapolation, which also supplies the
//! error estimate. Interior break points are always grid nodes, so kernel
//! kinks never fall inside a cell.

use serde::{Deserialize, Serialize};

use crate::bivariation::{total_bivariation, VariationEstimate, VariationMethod};
use crate::domain::{segmented_nodes, Curve, DerivativeField, MixedOrder, Rectangle, Surface};
use crate::error::{Error, Result};
use crate::expr::EvalError;
use crate::sampling::{grid_sup, NormEstimate};
use crate::sum::{pairwise_sum, par_chunk_sum};

mod gauss;

pub use gauss::{gauss_legendre_1d, lebesgue_double_integral};

/// A refined numerical value with its convergence history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Difference between the last two (extrapolated) levels.
    pub est_error: f64,
    pub converged: bool,
    /// Raw per-level values, coarsest first.
    pub levels: Vec<f64>,
}

impl Estimate {
    /// An estimate that is exact by construction.
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            est_error: 0.0,
            converged: true,
            levels: vec![value],
        }
    }
}

/// Controls for Stieltjes sums.
#[derive(Debug, Clone, PartialEq)]
pub struct RsOptions {
    pub tol: f64,
    /// Approximate cells per axis at level 0.
    pub base_cells: usize,
    pub max_levels: u32,
    /// Refinement stops (unconverged) before a level would exceed this many cells.
    pub max_cells: usize,
    pub t_breaks: Vec<f64>,
    pub s_breaks: Vec<f64>,
}

impl RsOptions {
    pub fn new(tol: f64) -> Self {
        RsOptions {
            tol,
            base_cells: 8,
            max_levels: 12,
            max_cells: 1 << 24,
            t_breaks: Vec::new(),
            s_breaks: Vec::new(),
        }
    }

    pub fn with_breaks(mut self, t_breaks: Vec<f64>, s_breaks: Vec<f64>) -> Self {
        self.t_breaks = t_breaks;
        self.s_breaks = s_breaks;
        self
    }
}

/// Controls for Gauss–Legendre quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_levels: u32,
    pub t_breaks: Vec<f64>,
    pub s_breaks: Vec<f64>,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            tol,
            max_levels: 10,
            t_breaks: Vec::new(),
            s_breaks: Vec::new(),
        }
    }

    pub fn with_breaks(mut self, t_breaks: Vec<f64>, s_breaks: Vec<f64>) -> Self {
        self.t_breaks = t_breaks;
        self.s_breaks = s_breaks;
        self
    }

    pub fn with_max_levels(mut self, max_levels: u32) -> Self {
        self.max_levels = max_levels;
        self
    }
}

fn centers(nodes: &[f64]) -> Vec<f64> {
    nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// One Stieltjes sum `Σ g(center) Δ11 α(cell)` over the node grid.
fn rs_level<G, A>(g: &G, alpha: &A, t: &[f64], s: &[f64]) -> std::result::Result<f64, EvalError>
where
    G: Surface + ?Sized,
    A: Surface + ?Sized,
{
    let tc = centers(t);
    let row_of = |y: f64| -> std::result::Result<Vec<f64>, EvalError> { t.iter().map(|&x| alpha.at(x, y)).collect() };
    par_chunk_sum(s.len() - 1, |lo, hi, out| {
        let mut below = row_of(s[lo])?;
        let mut cells = vec![0.0; tc.len()];
        for (slot, j) in out.iter_mut().zip(lo..hi) {
            let above = row_of(s[j + 1])?;
            let sc = 0.5 * (s[j] + s[j + 1]);
            for (i, cell) in cells.iter_mut().enumerate() {
                let inc = (above[i + 1] - above[i]) - (below[i + 1] - below[i]);
                *cell = g.at(tc[i], sc)? * inc;
            }
            *slot = pairwise_sum(&cells);
            below = above;
        }
        Ok(())
    })
}

/// Richardson-extrapolated values `R_L = S_L + (S_L - S_{L-1}) / 3`.
fn extrapolate(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| w[1] + (w[1] - w[0]) / 3.0).collect()
}

fn rs_estimate(levels: Vec<f64>, tol: f64) -> (Estimate, bool) {
    let rich = extrapolate(&levels);
    let (value, est_error) = match rich.len() {
        0 => (levels[0], f64::INFINITY),
        1 => (rich[0], (levels[1] - levels[0]).abs()),
        k => (rich[k - 1], (rich[k - 1] - rich[k - 2]).abs()),
    };
    let converged = rich.len() >= 2 && est_error <= tol * value.abs().max(1.0);
    (
        Estimate {
            value,
            est_error,
            converged,
            levels,
        },
        converged,
    )
}

/// `∫∫_Q g d_t d_s α` as a limit of Stieltjes sums.
///
/// Level `L` has about `base_cells · 2^L` cells per axis; interior breaks in
/// `opts` are always nodes. Converged once two extrapolated levels agree to
/// `tol · max(1, |value|)`, which needs at least three levels.
pub fn rs_double_integral<G, A>(g: &G, alpha: &A, q: &Rectangle, opts: &RsOptions) -> Result<Estimate>
where
    G: Surface + ?Sized,
    A: Surface + ?Sized,
{
    let mut levels = Vec::new();
    for level in 0..opts.max_levels {
        let t = segmented_nodes(q.a(), q.b(), &opts.t_breaks, opts.base_cells, level);
        let s = segmented_nodes(q.c(), q.d(), &opts.s_breaks, opts.base_cells, level);
        if !levels.is_empty() && (t.len() - 1) * (s.len() - 1) > opts.max_cells {
            break;
        }
        levels.push(rs_level(g, alpha, &t, &s)?);
        let (est, done) = rs_estimate(levels.clone(), opts.tol);
        if done {
            return Ok(est);
        }
    }
    Ok(rs_estimate(levels, opts.tol).0)
}

/// `∫_lo^hi g dα` on a line, refined like [`rs_double_integral`] with
/// `opts.t_breaks` as forced nodes.
pub fn rs_integral_1d<G, A>(g: &G, alpha: &A, lo: f64, hi: f64, opts: &RsOptions) -> Result<Estimate>
where
    G: Curve + ?Sized,
    A: Curve + ?Sized,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let mut levels = Vec::new();
    for level in 0..opts.max_levels {
        let nodes = segmented_nodes(lo, hi, &opts.t_breaks, opts.base_cells, level);
        if !levels.is_empty() && nodes.len() - 1 > opts.max_cells {
            break;
        }
        let vals = nodes
            .iter()
            .map(|&x| alpha.at(x))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut terms = Vec::with_capacity(nodes.len() - 1);
        for i in 0..nodes.len() - 1 {
            let c = 0.5 * (nodes[i] + nodes[i + 1]);
            terms.push(g.at(c)? * (vals[i + 1] - vals[i]));
        }
        levels.push(pairwise_sum(&terms));
        let (est, done) = rs_estimate(levels.clone(), opts.tol);
        if done {
            return Ok(est);
        }
    }
    Ok(rs_estimate(levels, opts.tol).0)
}

/// Outcome of the integration-by-parts check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartsCheck {
    /// `∫∫ f dα`.
    pub f_dalpha: Estimate,
    /// `∫∫ α df`.
    pub alpha_df: Estimate,
    /// `Δ11 (f α)` over the rectangle.
    pub boundary: f64,
    /// `|∫∫ f dα + ∫∫ α df - Δ11 (f α)|`.
    pub residual: f64,
    pub converged: bool,
}

/// Measures the defect of the formula
/// `∫∫ f dα + ∫∫ α df = Δ11 (f α)` over `q`.
pub fn check_integration_by_parts<F, A>(f: &F, alpha: &A, q: &Rectangle, tol: f64) -> Result<PartsCheck>
where
    F: Surface + ?Sized,
    A: Surface + ?Sized,
{
    let opts = RsOptions::new(tol);
    let f_dalpha = rs_double_integral(f, alpha, q, &opts)?;
    let alpha_df = rs_double_integral(alpha, f, q, &opts)?;
    let fa = |t: f64, s: f64| -> std::result::Result<f64, EvalError> { Ok(f.at(t, s)? * alpha.at(t, s)?) };
    let boundary = fa(q.b(), q.d())? - fa(q.b(), q.c())? - fa(q.a(), q.d())? + fa(q.a(), q.c())?;
    let residual = (f_dalpha.value + alpha_df.value - boundary).abs();
    let converged = f_dalpha.converged && alpha_df.converged;
    Ok(PartsCheck {
        f_dalpha,
        alpha_df,
        boundary,
        residual,
        converged,
    })
}

/// Outcome of the `|∫∫ g dα| ≤ sup|g| · V(α)` check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupVariationAudit {
    pub integral: Estimate,
    pub sup_g: NormEstimate,
    pub variation: VariationEstimate,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `|∫∫ g dα|` with `sup|g| · V(α)` for the integrator
/// `α = D^order f`. The variation uses smooth quadrature; the sup is a
/// refined grid maximum.
pub fn sup_variation_audit<G>(
    g: &G,
    field: &DerivativeField,
    order: MixedOrder,
    q: &Rectangle,
    tol: f64,
) -> Result<SupVariationAudit>
where
    G: Surface + ?Sized,
{
    let alpha = field.partial(order);
    let integral = rs_double_integral(g, alpha.as_ref(), q, &RsOptions::new(tol))?;
    let sup_g = grid_sup(g, q)?;
    let variation = total_bivariation(field, order, q, VariationMethod::SmoothQuadrature, tol)?;
    let bound = sup_g.value * variation.value;
    let holds = integral.value.abs() <= bound * (1.0 + 1e-9);
    Ok(SupVariationAudit {
        integral,
        sup_g,
        variation,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Plain;

    fn unit() -> Rectangle {
        Rectangle::unit()
    }

    #[test]
    fn unit_integrand_telescopes() {
        let alpha = Plain(|t: f64, s: f64| (t * s).sin() + t * t);
        let est = rs_double_integral(&Plain(|_, _| 1.0), &alpha, &unit(), &RsOptions::new(1e-10)).unwrap();
        let exact = 1f64.sin();
        for v in &est.levels {
            assert!((v - exact).abs() < 1e-13);
        }
        assert!(est.converged);
    }

    #[test]
    fn product_integrator_gives_area_measure() {
        let est = rs_double_integral(
            &Plain(|t: f64, s: f64| t + s),
            &Plain(|t: f64, s: f64| t * s),
            &unit(),
            &RsOptions::new(1e-10),
        )
        .unwrap();
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separable_integrator() {
        let est = rs_double_integral(
            &Plain(|_, _| 1.0),
            &Plain(|t: f64, s: f64| t * t * s),
            &unit(),
            &RsOptions::new(1e-10),
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_removes_second_order_error() {
        // g = t^2 has midpoint-rule error proportional to h^2.
        let est = rs_double_integral(
            &Plain(|t: f64, _s: f64| t * t),
            &Plain(|t: f64, s: f64| t * s),
            &unit(),
            &RsOptions::new(1e-12),
        )
        .unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-13);
        assert!(est.levels.len() <= 4);
    }

    #[test]
    fn forced_nodes_handle_step_integrands() {
        let step = Plain(|t: f64, _s: f64| if t <= 0.3 { 1.0 } else { 0.0 });
        let opts = RsOptions::new(1e-10).with_breaks(vec![0.3], vec![]);
        let est = rs_double_integral(&step, &Plain(|t: f64, s: f64| t * s), &unit(), &opts).unwrap();
        assert!((est.value - 0.3).abs() < 1e-13);
    }

    #[test]
    fn one_dimensional_sums() {
        let opts = RsOptions::new(1e-12);
        let est = rs_integral_1d(&|x: f64| Ok(x), &|x: f64| Ok(x * x), 0.0, 1.0, &opts).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-13);
        assert!(rs_integral_1d(&|x: f64| Ok(x), &|x: f64| Ok(x), 2.0, 1.0, &opts).is_err());
    }

    #[test]
    fn parts_check_constant_factor() {
        let check = check_integration_by_parts(
            &Plain(|_, _| 3.0),
            &Plain(|t: f64, s: f64| (t + s).exp()),
            &unit(),
            1e-10,
        )
        .unwrap();
        assert!(check.residual < 1e-12);
    }

    #[test]
    fn parts_check_reports_cross_term_defect() {
        // For f = α = ts both integrals are 1/4 while Δ11(f α) = 1.
        let ts = Plain(|t: f64, s: f64| t * s);
        let check = check_integration_by_parts(&ts, &ts, &unit(), 1e-10).unwrap();
        assert!((check.f_dalpha.value - 0.25).abs() < 1e-12);
        assert!((check.boundary - 1.0).abs() < 1e-15);
        assert!((check.residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sup_variation_audit_cases() {
        let field = DerivativeField::parse("t*s").unwrap();
        let one = sup_variation_audit(&Plain(|_, _| 1.0), &field, MixedOrder::ZERO, &unit(), 1e-9).unwrap();
        assert!((one.integral.value - 1.0).abs() < 1e-12);
        assert!((one.bound - 1.0).abs() < 1e-12);
        assert!(one.holds);

        let ts = sup_variation_audit(&Plain(|t: f64, s: f64| t * s), &field, MixedOrder::ZERO, &unit(), 1e-9).unwrap();
        assert!((ts.integral.value - 0.25).abs() < 1e-12);
        assert!(ts.holds);

        let flat = DerivativeField::parse("2").unwrap();
        let zero = sup_variation_audit(
            &Plain(|t: f64, _s: f64| t.sin()),
            &flat,
            MixedOrder::ZERO,
            &unit(),
            1e-9,
        )
        .unwrap();
        assert_eq!(zero.integral.value, 0.0);
        assert_eq!(zero.bound, 0.0);
        assert!(zero.holds);
    }
}
