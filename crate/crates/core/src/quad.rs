//! Quadrature rules: Gauss-Legendre panels, geometric (log-spaced) panels and
//! an accelerated integrator for slowly decaying oscillatory tails.

use crate::{Error, Result};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
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
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, w * half))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Composite rule on geometric panels `[a·r^k, a·r^{k+1}]` covering `[a, b]`,
/// suited to integrands with algebraic behaviour at 0 or ∞.
pub fn geometric_panels(a: f64, b: f64, panels_per_decade: usize) -> Vec<(f64, f64)> {
    assert!(a > 0.0 && b > a);
    let decades = (b / a).log10();
    let count = ((decades * panels_per_decade as f64).ceil() as usize).max(1);
    let ratio = (b / a).powf(1.0 / count as f64);
    (0..count)
        .map(|k| (a * ratio.powi(k as i32), a * ratio.powi(k as i32 + 1)))
        .collect()
}

/// Integrates `f` over `[a, b]` with `rule` on geometric panels.
pub fn integrate_geometric<F: Fn(f64) -> f64>(rule: &GaussRule, a: f64, b: f64, per_decade: usize, f: F) -> f64 {
    geometric_panels(a, b, per_decade)
        .into_iter()
        .map(|(lo, hi)| rule.integrate(lo, hi, &f))
        .sum()
}

/// Nodes and weights of a composite rule on `[a, b]` with geometric panels.
pub fn geometric_nodes(rule: &GaussRule, a: f64, b: f64, per_decade: usize) -> Vec<(f64, f64)> {
    geometric_panels(a, b, per_decade)
        .into_iter()
        .flat_map(|(lo, hi)| rule.mapped(lo, hi).collect::<Vec<_>>())
        .collect()
}

/// Which trigonometric factor multiplies the tail integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// `∫_a^∞ g(s)·trig(ω s) ds` for a slowly decaying, eventually monotone `g`.
///
/// The integral is split at the zeros of the trigonometric factor; the
/// resulting alternating series of half-period integrals is summed with
/// Wynn's epsilon algorithm. Returns `NonConvergence` when the last two
/// accelerated estimates disagree by more than `tol`.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(g: F, omega: f64, trig: Trig, a: f64, tol: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::Invalid("oscillatory_tail needs ω > 0".into()));
    }
    let rule = GaussRule::new(24);
    let half = PI / omega;
    let offset = match trig {
        Trig::Cos => 0.5 * half,
        Trig::Sin => 0.0,
    };
    // first zero strictly after a
    let k0 = ((a - offset) / half).floor() + 1.0;
    let mut z = offset + k0 * half;
    let h = |s: f64| {
        g(s) * match trig {
            Trig::Cos => (omega * s).cos(),
            Trig::Sin => (omega * s).sin(),
        }
    };
    let head = rule.integrate(a, z, h);
    let terms = 60;
    let mut partial = Vec::with_capacity(terms);
    let mut acc = 0.0;
    for _ in 0..terms {
        acc += rule.integrate(z, z + half, h);
        partial.push(acc);
        z += half;
    }
    let (est, prev) = wynn_epsilon(&partial);
    if (est - prev).abs() > tol.max(1e-300) * (1.0 + est.abs()) {
        return Err(Error::NonConvergence(format!(
            "oscillatory tail: accelerated estimates {est:e} vs {prev:e}"
        )));
    }
    Ok(head + est)
}

/// Wynn's epsilon extrapolation of a sequence of partial sums; returns the
/// final estimate and the one before it (for a convergence check).
pub fn wynn_epsilon(s: &[f64]) -> (f64, f64) {
    let n = s.len();
    if n < 3 {
        let last = *s.last().unwrap_or(&0.0);
        return (last, last);
    }
    // e[k] holds column k of the epsilon table, rolling over the rows
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = (s[n - 1], s[n - 2]);
    let mut col = 0;
    while cur.len() > 1 && col < 16 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let v = if diff.abs() < 1e-300 {
                f64::INFINITY
            } else {
                prev[i + 1] + 1.0 / diff
            };
            next.push(v);
        }
        prev = cur;
        cur = next;
        col += 1;
        // even columns carry estimates
        if col % 2 == 0 && cur.len() >= 2 && cur.iter().all(|v| v.is_finite()) {
            best = (cur[cur.len() - 1], cur[cur.len() - 2]);
        }
        if cur.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    best
}

/// Trapezoid rule on a log-spaced grid: `∫ f(s) ds/s` from `a` to `b`.
pub fn trapezoid_log<F: Fn(f64) -> f64>(a: f64, b: f64, points_per_decade: usize, f: F) -> f64 {
    let decades = (b / a).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let du = (b / a).ln() / n as f64;
    let mut total = 0.0;
    for k in 0..=n {
        let s = a * (du * k as f64).exp();
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        total += w * f(s);
    }
    total * du
}

/// Points of a log-spaced grid with `points_per_decade` on `[a, b]`.
pub fn log_grid(a: f64, b: f64, points_per_decade: usize) -> Vec<f64> {
    let decades = (b / a).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let du = (b / a).ln() / n as f64;
    (0..=n).map(|k| a * (du * k as f64).exp()).collect()
}
