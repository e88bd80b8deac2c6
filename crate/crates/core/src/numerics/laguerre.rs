//! Gauss-Laguerre rules for `∫₀^∞ e^{−x} g(x) dx`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest supported rule order.
pub const MAX_ORDER: usize = 512;

/// Gauss-Laguerre nodes with weights stored pre-multiplied by `e^{x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Roots of `L_G`, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `ŵ_g = w_g·e^{x_g}`.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// Raw weights `w_g`. The tail underflows to zero for large orders.
    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().zip(&self.scaled_weights).map(|(&x, &w)| w * libm::exp(-x)).collect()
    }

    /// `∫₀^∞ h(x) dx ≈ Σ ŵ_g h(x_g)`, exact when `h = e^{−x}·poly` of degree ≤ 2G−1.
    pub fn integrate<H: FnMut(f64) -> f64>(&self, mut h: H) -> f64 {
        self.nodes.iter().zip(&self.scaled_weights).map(|(&x, &w)| w * h(x)).sum()
    }

    /// `∫₀^∞ e^{−x} g(x) dx ≈ Σ w_g g(x_g)`.
    pub fn integrate_weighted<G: FnMut(f64) -> f64>(&self, mut g: G) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| {
                let v = g(x);
                if v == 0.0 {
                    0.0
                } else {
                    v * (w * libm::exp(-x))
                }
            })
            .sum()
    }
}

/// Builds the order-`g` rule.
///
/// Nodes are eigenvalues of the Jacobi matrix (diagonal `2i+1`, off-diagonal
/// `i`), polished by Newton steps on the three-term recurrence. Weights are
/// assembled in the log domain from `L_{G+1}` at each node, so nothing
/// underflows even when the raw weight is far below `f64::MIN_POSITIVE`.
pub fn gauss_laguerre(g: usize) -> Result<QuadratureRule> {
    if g == 0 {
        return Err(Error::ZeroOrder);
    }
    if g > MAX_ORDER {
        return Err(Error::OrderTooLarge(g));
    }
    let mut diag: Vec<f64> = (0..g).map(|i| (2 * i + 1) as f64).collect();
    let mut off: Vec<f64> = (0..g).map(|i| if i + 1 < g { (i + 1) as f64 } else { 0.0 }).collect();
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|a, b| a.total_cmp(b));

    let mut nodes = diag;
    let mut scaled_weights = vec![0.0; g];
    let n = g as f64;
    for (x, w) in nodes.iter_mut().zip(scaled_weights.iter_mut()) {
        for _ in 0..8 {
            let (pn, pn1, _) = laguerre_scaled(g, *x);
            let step = *x * pn / (n * (pn - pn1));
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * *x {
                break;
            }
        }
        let (p, _, log_scale) = laguerre_scaled(g + 1, *x);
        let log_w = libm::log(*x) - 2.0 * libm::log(n + 1.0) - 2.0 * (libm::log(p.abs()) + log_scale) + *x;
        *w = libm::exp(log_w);
    }
    Ok(QuadratureRule { nodes, scaled_weights })
}

const RESCALE: f64 = 1e150;

/// `(L_n(x), L_{n−1}(x))·e^{−s}` together with `s`, rescaling to stay in range.
fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    let mut log_scale = 0.0;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += libm::log(RESCALE);
        }
    }
    (cur, prev, log_scale)
}

/// Implicit QL with Wilkinson shifts for a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and receives the eigenvalues (unsorted); `e[i]`
/// couples rows `i` and `i+1`, with `e[n−1]` unused.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::NonConvergence { a: 0.0, b: n as f64, rel_tol: f64::EPSILON, limit: 60 });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
