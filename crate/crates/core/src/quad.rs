//! Panel-based Gauss–Legendre quadrature.
//!
//! Every integral in the crate goes through the same scheme: the interval is
//! cut into panels (at caller breakpoints, at most `max_width` wide and
//! optionally graded geometrically away from the origin), each panel is
//! integrated with a 16-point Gauss–Legendre rule, and the error is estimated
//! by comparing the whole-panel rule with the sum over its two halves. Panels
//! with the largest estimates are bisected until the total meets the tolerance.

use std::collections::BinaryHeap;
use std::ops::Add;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th root counted from the right.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn order16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        self.integrate_with_abs(f, a, b).0
    }

    /// Returns the rule applied to `f` and to `|f|`.
    fn integrate_with_abs<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (x, w) in self.mapped(a, b) {
            let v = f(x);
            sum += w * v;
            abs += w * v.abs();
        }
        (sum, abs)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A value with an attached absolute error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// Controls how an interval is cut into panels and how hard each is refined.
#[derive(Debug, Clone, Copy)]
pub struct PanelRule {
    /// Largest admissible panel width (use `f64::INFINITY` for no limit).
    pub max_width: f64,
    /// Limit each panel `[x, y]` with `x > 0` to `y <= 2x`.
    pub geometric: bool,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for PanelRule {
    fn default() -> Self {
        Self {
            max_width: f64::INFINITY,
            geometric: false,
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_depth: 100,
        }
    }
}

impl PanelRule {
    pub fn oscillatory(max_width: f64) -> Self {
        Self {
            max_width,
            geometric: true,
            ..Self::default()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_geometric(mut self, geometric: bool) -> Self {
        self.geometric = geometric;
        self
    }
}

/// Panel edges covering `[a, b]`, honouring breakpoints strictly inside.
pub fn panel_edges(a: f64, b: f64, breakpoints: &[f64], rule: &PanelRule) -> Vec<f64> {
    let mut stops: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(b);

    let mut edges = vec![a];
    let mut x = a;
    for stop in stops {
        while x < stop {
            let mut step = rule.max_width;
            if rule.geometric && x > 0.0 {
                step = step.min(x);
            }
            let next = if x + step >= stop * (1.0 - 1e-15) || !step.is_finite() {
                stop
            } else {
                x + step
            };
            edges.push(next);
            x = next;
        }
    }
    edges
}

struct Segment {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    abs: f64,
    error: f64,
}

impl Segment {
    fn new<F: FnMut(f64) -> f64>(g: &GaussLegendre, f: &mut F, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let (left, left_abs) = g.integrate_with_abs(f, a, m);
        let (right, right_abs) = g.integrate_with_abs(f, m, b);
        Self {
            a,
            b,
            left,
            right,
            abs: left_abs + right_abs,
            error: (left + right - whole).abs(),
        }
    }
}

struct Queued(Segment, u32);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.0.error.total_cmp(&other.0.error).is_eq()
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Bisects the segment with the largest error estimate until the summed
/// estimate meets `budget` (or the rounding floor of the panel sums).
fn refine_globally<F: FnMut(f64) -> f64>(
    f: &mut F,
    panels: &[(f64, f64, f64)],
    budget: f64,
    max_depth: u32,
) -> Result<Estimate> {
    let g = GaussLegendre::order16();
    let mut heap: BinaryHeap<Queued> = panels
        .iter()
        .map(|&(a, b, whole)| Queued(Segment::new(g, f, a, b, whole), 0))
        .collect();
    let mut total_err: f64 = heap.iter().map(|q| q.0.error).sum();
    let mut total_abs: f64 = heap.iter().map(|q| q.0.abs).sum();
    let max_splits = 64 * panels.len() + 4096;
    for _ in 0..=max_splits {
        if !total_err.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        if total_err <= budget.max(256.0 * f64::EPSILON * total_abs) {
            // running sums drift; confirm against fresh ones
            total_err = heap.iter().map(|q| q.0.error).sum();
            total_abs = heap.iter().map(|q| q.0.abs).sum();
            if total_err <= budget.max(256.0 * f64::EPSILON * total_abs) {
                let mut parts: Vec<f64> = heap.iter().map(|q| q.0.left + q.0.right).collect();
                parts.sort_by(f64::total_cmp);
                return Ok(Estimate::new(parts.iter().sum(), total_err));
            }
        }
        let Some(Queued(seg, depth)) = heap.pop() else {
            return Ok(Estimate::new(0.0, 0.0));
        };
        let m = 0.5 * (seg.a + seg.b);
        if depth >= max_depth || (seg.b - seg.a) <= 4.0 * f64::EPSILON * seg.a.abs().max(seg.b.abs()) {
            return Err(Error::Quadrature(format!(
                "panel [{:e}, {:e}] not resolved: estimate {:e} above tolerance {budget:e}",
                seg.a, seg.b, seg.error
            )));
        }
        let left = Segment::new(g, f, seg.a, m, seg.left);
        let right = Segment::new(g, f, m, seg.b, seg.right);
        total_err += left.error + right.error - seg.error;
        total_abs += left.abs + right.abs - seg.abs;
        heap.push(Queued(left, depth + 1));
        heap.push(Queued(right, depth + 1));
    }
    Err(Error::Quadrature(format!(
        "refinement budget exhausted with tolerance {budget:e}"
    )))
}

/// Integrates `f` over the given panel edges.
pub fn integrate_edges<F: FnMut(f64) -> f64>(
    f: &mut F,
    edges: &[f64],
    rule: &PanelRule,
) -> Result<Estimate> {
    let g = GaussLegendre::order16();
    if edges.len() < 2 {
        return Ok(Estimate::default());
    }
    let mut total_abs = 0.0;
    let panels: Vec<(f64, f64, f64)> = edges
        .windows(2)
        .map(|w| {
            let (whole, abs) = g.integrate_with_abs(f, w[0], w[1]);
            total_abs += abs;
            (w[0], w[1], whole)
        })
        .collect();
    let budget = (rule.rel_tol * total_abs).max(rule.abs_tol);
    let acc = refine_globally(f, &panels, budget, rule.max_depth)?;
    if !acc.value.is_finite() {
        return Err(Error::Quadrature("integrand produced a non-finite value".into()));
    }
    Ok(acc)
}

/// Integrates `f` over `[a, b]` with the given panel rule.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rule: &PanelRule,
) -> Result<Estimate> {
    if b <= a {
        return Ok(Estimate::default());
    }
    let edges = panel_edges(a, b, breakpoints, rule);
    integrate_edges(&mut f, &edges, rule)
}

/// Integrates a decaying `f` over `[a, ∞)` with panels whose widths double.
///
/// Stops once two consecutive panels contribute less than `rel_tol` of the
/// running total. Integrands that never settle are reported as divergent.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    first_width: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    const MAX_PANELS: usize = 90;
    let g = GaussLegendre::order16();
    let mut acc = Estimate::default();
    let mut x = a;
    let mut width = first_width;
    let mut quiet = 0;
    for i in 0..MAX_PANELS {
        let y = x + width;
        let (whole, abs) = g.integrate_with_abs(&mut f, x, y);
        let est = refine_globally(&mut f, &[(x, y, whole)], rel_tol * abs.max(f64::MIN_POSITIVE), 100)?;
        acc = acc + est;
        let small = est.value.abs() <= rel_tol * acc.value.abs() || abs == 0.0 && i > 4;
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 && i >= 3 {
            return Ok(acc);
        }
        x = y;
        width *= 2.0;
    }
    Err(Error::Divergence(format!(
        "no convergence of the integral over [{a}, inf) after {MAX_PANELS} panels (partial value {:e})",
        acc.value
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss16_weights_sum_to_two() {
        let g = GaussLegendre::order16();
        let s: f64 = g.weights().iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gauss16_is_exact_through_degree_31() {
        let g = GaussLegendre::order16();
        for p in 0..32 {
            let v = g.integrate(&mut |x: f64| x.powi(p), 0.0, 1.0);
            assert_relative_eq!(v, 1.0 / (p as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn panels_respect_breakpoints_and_grading() {
        let rule = PanelRule::oscillatory(10.0);
        let e = panel_edges(1.0, 100.0, &[3.0], &rule);
        assert_eq!(e.first(), Some(&1.0));
        assert_eq!(e.last(), Some(&100.0));
        assert!(e.contains(&3.0));
        for w in e.windows(2) {
            assert!(w[1] <= 2.0 * w[0] + 1e-12);
            assert!(w[1] - w[0] <= 10.0 + 1e-12);
        }
    }

    #[test]
    fn oscillatory_integral() {
        // ∫_0^{50} cos(20x) dx = sin(1000)/20
        let rule = PanelRule::oscillatory(std::f64::consts::PI / 40.0);
        let est = integrate(|x| (20.0 * x).cos(), 0.0, 50.0, &[], &rule).unwrap();
        assert!((est.value - 1000f64.sin() / 20.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_refines() {
        let est = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &[], &PanelRule::default().with_rel_tol(1e-10));
        let est = est.unwrap();
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn semi_infinite_and_divergent() {
        let est = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, 1.0, 1e-14).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-12);
        let div = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x), 0.0, 1.0, 1e-12);
        assert!(matches!(div, Err(Error::Divergence(_))));
    }
}
