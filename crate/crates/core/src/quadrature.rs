//! Gauss–Legendre quadrature, fixed-order and adaptive.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default relative tolerance for inner products and reference integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-14;

const DEFAULT_POINTS: usize = 20;
const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 1 << 16;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(mid + half * t))
            .sum::<f64>()
    }
}

impl Default for GaussLegendre {
    fn default() -> Self {
        Self::new(DEFAULT_POINTS)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with the 20-point rule.
///
/// A panel is accepted when the whole-panel and two-half-panel estimates agree to
/// `rel_tol` relative to the larger of the panel estimate and `∫|f|` over `[a, b]`.
/// Gives up with [`Error::Quadrature`] past 2¹⁶ panels or 40 levels of bisection.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussLegendre::default();
    let scale = rule.integrate(|x| f(x).abs(), a, b).abs();
    let whole = rule.integrate(&f, a, b);
    let mut state = Progress { err: 0.0, panels: 0 };
    let value = refine(&rule, &f, a, b, whole, scale, rel_tol, 0, &mut state)?;
    let err = state.err;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: value,
            error: err,
        });
    }
    Ok(value)
}

struct Progress {
    err: f64,
    panels: usize,
}

#[allow(clippy::too_many_arguments)]
fn refine(
    rule: &GaussLegendre,
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    scale: f64,
    rel_tol: f64,
    depth: u32,
    state: &mut Progress,
) -> Result<f64> {
    state.panels += 1;
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let split = left + right;
    let diff = (split - whole).abs();
    let reference = split.abs().max(scale);
    if diff <= rel_tol * reference || diff <= 4.0 * f64::EPSILON * reference {
        state.err += diff;
        return Ok(split);
    }
    if depth >= MAX_DEPTH || state.panels >= MAX_PANELS || !diff.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: split,
            error: diff,
        });
    }
    let l = refine(rule, f, a, m, left, scale, rel_tol, depth + 1, state)?;
    let r = refine(rule, f, m, b, right, scale, rel_tol, depth + 1, state)?;
    Ok(l + r)
}
