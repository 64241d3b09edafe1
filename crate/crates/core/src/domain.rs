//! Geometric primitives shared by the numerical modules.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, EvalError, Expr, ParseError, Program, Var};

/// Highest total order `p + q` a [`MixedOrder`] may carry.
///
/// Factorials are taken in floating point; `n!` is exact in `f64` up to 22.
pub const MAX_TOTAL_ORDER: u32 = 12;

/// The closed rectangle `Q = [a, b] × [c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Rectangle {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let finite = a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite();
        if !finite || a >= b || c >= d {
            return Err(Error::InvalidRectangle { a, b, c, d });
        }
        Ok(Rectangle { a, b, c, d })
    }

    pub fn unit() -> Self {
        Rectangle {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn midpoint(&self) -> EvalPoint {
        EvalPoint::new((self.a + self.b) / 2.0, (self.c + self.d) / 2.0)
    }

    pub fn contains(&self, p: EvalPoint) -> bool {
        self.a <= p.x && p.x <= self.b && self.c <= p.y && p.y <= self.d
    }

    pub fn ensure_contains(&self, p: EvalPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutside { x: p.x, y: p.y })
        }
    }

    /// Corners in the order `(a,c), (a,d), (b,c), (b,d)`.
    pub fn corners(&self) -> [EvalPoint; 4] {
        [
            EvalPoint::new(self.a, self.c),
            EvalPoint::new(self.a, self.d),
            EvalPoint::new(self.b, self.c),
            EvalPoint::new(self.b, self.d),
        ]
    }

    pub fn is_midpoint(&self, p: EvalPoint) -> bool {
        p == self.midpoint()
    }

    /// Splits at `t = x` into left and right parts.
    pub fn split_t(&self, x: f64) -> Result<(Rectangle, Rectangle)> {
        Ok((
            Rectangle::new(self.a, x, self.c, self.d)?,
            Rectangle::new(x, self.b, self.c, self.d)?,
        ))
    }

    /// Splits at `s = y` into lower and upper parts.
    pub fn split_s(&self, y: f64) -> Result<(Rectangle, Rectangle)> {
        Ok((
            Rectangle::new(self.a, self.b, self.c, y)?,
            Rectangle::new(self.a, self.b, y, self.d)?,
        ))
    }
}

/// A point `(x, y)`; membership in a rectangle is checked where it is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub x: f64,
    pub y: f64,
}

impl EvalPoint {
    pub fn new(x: f64, y: f64) -> Self {
        EvalPoint { x, y }
    }
}

/// Mixed-derivative order: `p` derivatives in `t`, `q` in `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MixedOrder {
    p: u32,
    q: u32,
}

impl MixedOrder {
    pub const ZERO: MixedOrder = MixedOrder { p: 0, q: 0 };

    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p + q > MAX_TOTAL_ORDER {
            return Err(Error::OrderTooHigh { p, q });
        }
        Ok(MixedOrder { p, q })
    }

    /// The order `(n, n)` used for remainder integrators and variations.
    pub fn diagonal(n: u32) -> Result<Self> {
        MixedOrder::new(n, n)
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn total(self) -> u32 {
        self.p + self.q
    }

    /// One more derivative in each variable.
    pub fn bump(self) -> Result<Self> {
        MixedOrder::new(self.p + 1, self.q + 1)
    }
}

/// Anything that can be evaluated at `(t, s)`.
pub trait Surface: Sync {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError>;
}

impl<F> Surface for F
where
    F: Fn(f64, f64) -> std::result::Result<f64, EvalError> + Sync,
{
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        self(t, s)
    }
}

/// Adapter for infallible closures.
#[derive(Debug, Clone, Copy)]
pub struct Plain<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> Surface for Plain<F> {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        Ok((self.0)(t, s))
    }
}

impl Surface for Program {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        self.eval(t, s)
    }
}

impl Surface for Expr {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        self.eval(t, s)
    }
}

/// Anything that can be evaluated on a line.
pub trait Curve: Sync {
    fn at(&self, x: f64) -> std::result::Result<f64, EvalError>;
}

impl<F> Curve for F
where
    F: Fn(f64) -> std::result::Result<f64, EvalError> + Sync,
{
    fn at(&self, x: f64) -> std::result::Result<f64, EvalError> {
        self(x)
    }
}

/// One symbolic mixed partial, compiled for evaluation.
#[derive(Debug, Clone)]
pub struct Derivative {
    order: MixedOrder,
    expr: Expr,
    program: Program,
}

impl Derivative {
    fn new(order: MixedOrder, expr: Expr) -> Self {
        let program = Program::compile(&expr);
        Derivative { order, expr, program }
    }

    pub fn order(&self) -> MixedOrder {
        self.order
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        self.program.eval(t, s)
    }
}

impl Surface for Derivative {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        self.program.eval(t, s)
    }
}

/// A function `f` together with lazily computed mixed partials `D^(p,q) f`.
///
/// Derivatives are built by iterated symbolic differentiation and memoised
/// per order. Concurrent requests for the same order may both compute it;
/// the first insert wins and the results are identical.
#[derive(Debug)]
pub struct DerivativeField {
    base: Expr,
    cache: RwLock<HashMap<MixedOrder, Arc<Derivative>>>,
}

impl DerivativeField {
    pub fn new(base: Expr) -> Self {
        let mut cache = HashMap::new();
        cache.insert(
            MixedOrder::ZERO,
            Arc::new(Derivative::new(MixedOrder::ZERO, base.clone())),
        );
        DerivativeField {
            base,
            cache: RwLock::new(cache),
        }
    }

    pub fn parse(source: &str) -> std::result::Result<Self, ParseError> {
        Ok(DerivativeField::new(expr::parse(source)?))
    }

    pub fn base(&self) -> &Expr {
        &self.base
    }

    /// `D^(p,q) f`; `D^(0,0) f` is `f` itself.
    pub fn partial(&self, order: MixedOrder) -> Arc<Derivative> {
        if let Some(hit) = self.cache.read().unwrap_or_else(|e| e.into_inner()).get(&order) {
            return Arc::clone(hit);
        }
        // t-derivatives first, then s, matching `expr::mixed_partial`.
        let expr = if order.q() > 0 {
            let lower = self.partial(MixedOrder {
                p: order.p(),
                q: order.q() - 1,
            });
            expr::differentiate(lower.expr(), Var::S)
        } else {
            let lower = self.partial(MixedOrder { p: order.p() - 1, q: 0 });
            expr::differentiate(lower.expr(), Var::T)
        };
        let computed = Arc::new(Derivative::new(order, expr));
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        Arc::clone(cache.entry(order).or_insert(computed))
    }

    pub fn partial_pq(&self, p: u32, q: u32) -> Result<Arc<Derivative>> {
        Ok(self.partial(MixedOrder::new(p, q)?))
    }

    pub fn value(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.partial(MixedOrder::ZERO).eval(t, s)?)
    }
}

impl Surface for DerivativeField {
    fn at(&self, t: f64, s: f64) -> std::result::Result<f64, EvalError> {
        self.partial(MixedOrder::ZERO).eval(t, s)
    }
}

/// Strictly increasing node sets in `t` and `s` spanning a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPartition {
    t: Vec<f64>,
    s: Vec<f64>,
}

fn check_axis(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidPartition("each axis needs at least two nodes"));
    }
    if nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidPartition("nodes must be finite"));
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPartition("nodes must be strictly increasing"));
    }
    Ok(())
}

/// `k` equal cells on `[lo, hi]`, appended to `out` without the left end.
fn push_uniform(out: &mut Vec<f64>, lo: f64, hi: f64, k: usize) {
    let width = hi - lo;
    for i in 1..k {
        out.push(lo + width * (i as f64) / (k as f64));
    }
    out.push(hi);
}

/// Nodes on `[lo, hi]` with every interior break forced in. Each segment
/// between breaks gets `base(len) * 2^level` equal cells.
pub(crate) fn segmented_nodes(lo: f64, hi: f64, breaks: &[f64], base_cells: usize, level: u32) -> Vec<f64> {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let total = hi - lo;
    let mut nodes = vec![lo];
    for w in edges.windows(2) {
        let share = ((base_cells as f64) * (w[1] - w[0]) / total).round() as usize;
        let cells = share.max(1) << level;
        push_uniform(&mut nodes, w[0], w[1], cells);
    }
    nodes
}

impl GridPartition {
    pub fn new(t: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        check_axis(&t)?;
        check_axis(&s)?;
        Ok(GridPartition { t, s })
    }

    /// Dyadic level `level` of a partition starting from about `base_cells`
    /// cells per axis, with the given interior nodes always present.
    pub fn dyadic(rect: &Rectangle, t_breaks: &[f64], s_breaks: &[f64], base_cells: usize, level: u32) -> Self {
        GridPartition {
            t: segmented_nodes(rect.a, rect.b, t_breaks, base_cells, level),
            s: segmented_nodes(rect.c, rect.d, s_breaks, base_cells, level),
        }
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s
    }

    pub fn cells_t(&self) -> usize {
        self.t.len() - 1
    }

    pub fn cells_s(&self) -> usize {
        self.s.len() - 1
    }

    pub fn rectangle(&self) -> Rectangle {
        Rectangle {
            a: self.t[0],
            b: self.t[self.t.len() - 1],
            c: self.s[0],
            d: self.s[self.s.len() - 1],
        }
    }

    /// Splits every cell into four by inserting midpoints on both axes.
    pub fn refine(&self) -> Self {
        fn halve(nodes: &[f64]) -> Vec<f64> {
            let mut out = Vec::with_capacity(2 * nodes.len() - 1);
            out.push(nodes[0]);
            for w in nodes.windows(2) {
                out.push(0.5 * (w[0] + w[1]));
                out.push(w[1]);
            }
            out
        }
        GridPartition {
            t: halve(&self.t),
            s: halve(&self.s),
        }
    }
}

/// Equispaced partition with `m_t` by `m_s` cells.
pub fn uniform_partition(rect: &Rectangle, m_t: usize, m_s: usize) -> Result<GridPartition> {
    if m_t == 0 || m_s == 0 {
        return Err(Error::InvalidCellCount { m_t, m_s });
    }
    let mut t = vec![rect.a];
    push_uniform(&mut t, rect.a, rect.b, m_t);
    let mut s = vec![rect.c];
    push_uniform(&mut s, rect.c, rect.d, m_s);
    Ok(GridPartition { t, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_validation() {
        assert!(Rectangle::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(Rectangle::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Rectangle::new(0.0, f64::INFINITY, 0.0, 1.0).is_err());
        assert!(Rectangle::new(f64::NAN, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn boundary_points_are_inside() {
        let q = Rectangle::unit();
        for p in q.corners() {
            assert!(q.contains(p));
        }
        assert!(q.ensure_contains(EvalPoint::new(1.0, 0.5)).is_ok());
        assert!(matches!(
            q.ensure_contains(EvalPoint::new(1.5, 0.5)),
            Err(Error::PointOutside { .. })
        ));
    }

    #[test]
    fn order_ceiling() {
        assert!(MixedOrder::new(6, 6).is_ok());
        assert!(matches!(MixedOrder::new(7, 6), Err(Error::OrderTooHigh { .. })));
        assert!(MixedOrder::diagonal(6).unwrap().bump().is_err());
    }

    #[test]
    fn uniform_partitions() {
        let q = Rectangle::unit();
        let p = uniform_partition(&q, 1, 1).unwrap();
        assert_eq!(p.t_nodes(), &[0.0, 1.0]);
        assert_eq!(p.s_nodes(), &[0.0, 1.0]);
        let p = uniform_partition(&q, 2, 2).unwrap();
        assert_eq!(p.t_nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.s_nodes(), &[0.0, 0.5, 1.0]);
        assert!(matches!(
            uniform_partition(&q, 0, 1),
            Err(Error::InvalidCellCount { .. })
        ));
    }

    #[test]
    fn refinement_nests_nodes() {
        let q = Rectangle::new(-1.0, 2.0, 0.5, 0.75).unwrap();
        let coarse = uniform_partition(&q, 3, 5).unwrap();
        let fine = coarse.refine();
        assert_eq!(fine.cells_t(), 6);
        assert_eq!(fine.cells_s(), 10);
        assert_eq!(fine.rectangle(), q);
        for (i, v) in coarse.t_nodes().iter().enumerate() {
            assert_eq!(fine.t_nodes()[2 * i], *v);
        }
        for (j, v) in coarse.s_nodes().iter().enumerate() {
            assert_eq!(fine.s_nodes()[2 * j], *v);
        }
    }

    #[test]
    fn partition_validation() {
        assert!(GridPartition::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(GridPartition::new(vec![0.0, 0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(GridPartition::new(vec![0.0, 0.3, 1.0], vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn segmented_nodes_force_breaks() {
        let nodes = segmented_nodes(0.0, 1.0, &[0.3, 0.0, 1.0, 0.3], 8, 0);
        assert!(nodes.contains(&0.3));
        assert_eq!(nodes[0], 0.0);
        assert_eq!(*nodes.last().unwrap(), 1.0);
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let finer = segmented_nodes(0.0, 1.0, &[0.3], 8, 1);
        assert_eq!(finer.len() - 1, 2 * (nodes.len() - 1));
        // Every coarse node survives refinement.
        for v in &nodes {
            assert!(finer.contains(v));
        }
    }

    #[test]
    fn field_caches_and_matches_mixed_partial() {
        let f = DerivativeField::parse("t^3*s^2 + sin(t*s)").unwrap();
        let order = MixedOrder::new(2, 1).unwrap();
        let d1 = f.partial(order);
        let d2 = f.partial(order);
        assert!(Arc::ptr_eq(&d1, &d2));
        let direct = expr::mixed_partial(f.base(), order);
        for &(t, s) in &[(0.1, 0.2), (0.7, -0.4), (1.3, 2.0)] {
            let a = d1.eval(t, s).unwrap();
            let b = direct.eval(t, s).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        assert_eq!(f.value(0.5, 2.0).unwrap(), f.base().eval(0.5, 2.0).unwrap());
    }

    #[test]
    fn field_is_shareable_across_threads() {
        let f = Arc::new(DerivativeField::parse("exp(t*s)").unwrap());
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let f = Arc::clone(&f);
                std::thread::spawn(move || {
                    let order = MixedOrder::new(1 + i % 2, 1).unwrap();
                    f.partial(order).eval(0.2, 0.3).unwrap()
                })
            })
            .collect();
        for h in handles {
            assert!(h.join().unwrap().is_finite());
        }
    }
}
