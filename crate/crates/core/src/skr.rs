//! PLOB key-rate bound of the pure-loss channel, averaged over log-normal
//! scintillation, and the QPS focus search built on it.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use crate::numerics::{lognormal_expectation, lognormal_pdf, QuadratureRule, PLOB_REL_TOL};
use crate::{Error, Result};

/// Ties in the focus search closer than this, bits/use, go to the smaller focus.
pub const FOCUS_TIE_TOL: f64 = 1e-6;
/// Golden-section refinement stops once the bracket is this narrow, m.
pub const FOCUS_REFINE_TOL_M: f64 = 1e-3;

/// Everything the averaged bound consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBudget {
    pub tau_eff: f64,
    pub tau_l: f64,
    pub tau_p: f64,
    /// `σ²_{R,1} + σ²_{R,2}`.
    pub sigma_r_sq: f64,
}

impl ChannelBudget {
    /// Mean transmittance `τ_eff·τ_l·τ_p`.
    pub fn mean_transmittance(&self) -> f64 {
        self.tau_eff * self.tau_l * self.tau_p
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if !(unit(self.tau_eff) && unit(self.tau_l) && unit(self.tau_p)) {
            return Err(Error::InvalidArgument("transmittances must lie in (0, 1]"));
        }
        if !(self.sigma_r_sq >= 0.0) || !self.sigma_r_sq.is_finite() {
            return Err(Error::InvalidArgument("Rytov variance must be finite and >= 0"));
        }
        Ok(())
    }
}

/// `−log2(1 − τ)`.
pub fn plob_pointwise(tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument("transmittance must be >= 0"));
    }
    if tau >= 1.0 {
        return Err(Error::SaturatedChannel(tau));
    }
    Ok(-libm::log1p(-tau) / LN_2)
}

// Truncated integrand: zero once the instantaneous transmittance reaches 1.
#[inline]
fn plob_clamped(c: f64, intensity: f64) -> f64 {
    let t = c * intensity;
    if t >= 1.0 {
        0.0
    } else {
        -libm::log1p(-t) / LN_2
    }
}

/// Averaged bound by adaptive integration over the log-normal intensity.
pub fn plob_average_exact(budget: &ChannelBudget) -> Result<f64> {
    budget.validate()?;
    let c = budget.mean_transmittance();
    if budget.sigma_r_sq == 0.0 {
        return plob_pointwise(c);
    }
    lognormal_expectation(|i| plob_clamped(c, i), budget.sigma_r_sq, 1.0 / c, PLOB_REL_TOL)
}

/// Averaged bound by Gauss-Laguerre quadrature in the log-amplitude variable.
///
/// With `I = e^{μ+σt}` the average is a standard-normal expectation. Folding
/// `t` onto the half line gives
/// `Σ_g ŵ_g φ(x_g) [h(e^{μ+σx_g}) + h(e^{μ−σx_g})]`, which stays accurate as
/// `σ → 0`, where the density in the intensity variable collapses between
/// the nodes.
pub fn plob_average_gl(budget: &ChannelBudget, rule: &QuadratureRule) -> Result<f64> {
    budget.validate()?;
    let c = budget.mean_transmittance();
    if budget.sigma_r_sq == 0.0 {
        return plob_pointwise(c);
    }
    let sigma = libm::sqrt(budget.sigma_r_sq);
    let mu = -0.5 * budget.sigma_r_sq;
    let norm = 1.0 / libm::sqrt(2.0 * PI);
    Ok(rule.integrate(|x| {
        let phi = norm * libm::exp(-0.5 * x * x);
        if phi == 0.0 {
            return 0.0;
        }
        phi * (plob_clamped(c, libm::exp(mu + sigma * x)) + plob_clamped(c, libm::exp(mu - sigma * x)))
    }))
}

/// `Σ_g −ŵ_g log2(1 − c x_g) f_LN(x_g)` taken literally in the intensity variable.
///
/// Only usable when the density is wide compared with the node spacing near
/// `I = 1` (roughly `σ² ≳ 0.04` at `G = 180`).
pub fn plob_average_gl_direct(budget: &ChannelBudget, rule: &QuadratureRule) -> Result<f64> {
    budget.validate()?;
    let c = budget.mean_transmittance();
    if budget.sigma_r_sq == 0.0 {
        return plob_pointwise(c);
    }
    Ok(rule.integrate(|x| plob_clamped(c, x) * lognormal_pdf(x, budget.sigma_r_sq)))
}

/// Result of a focus search.
#[derive(Debug, Clone, PartialEq)]
pub struct FocusSearch {
    pub f_opt: f64,
    pub skr_opt: f64,
    /// `(f, skr)` at every grid point, in grid order.
    pub curve: Vec<(f64, f64)>,
}

/// `n` log-spaced focus distances from `d2/2` to `100·d2`, endpoints exact.
pub fn focus_grid(d2: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = (0.5 * d2, 100.0 * d2);
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (libm::log(hi) - libm::log(lo)) / (n - 1) as f64;
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => libm::exp(libm::log(lo) + step * i as f64),
                })
                .collect()
        }
    }
}

/// Maximises `skr_at` over `f_grid`, optionally refining by golden section
/// between the neighbours of the best grid point.
pub fn optimize_focus<E>(mut skr_at: E, f_grid: &[f64], refine: bool) -> Result<FocusSearch>
where
    E: FnMut(f64) -> Result<f64>,
{
    if f_grid.is_empty() {
        return Err(Error::InvalidArgument("focus grid is empty"));
    }
    let mut curve = Vec::with_capacity(f_grid.len());
    for &f in f_grid {
        curve.push((f, skr_at(f)?));
    }
    let (mut f_opt, mut skr_opt) = pick_best(curve.iter().copied());

    if refine && curve.len() > 1 {
        let mut sorted: Vec<f64> = f_grid.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let pos = sorted.iter().position(|&f| f == f_opt).unwrap_or(0);
        let lo = sorted[pos.saturating_sub(1)];
        let hi = sorted[(pos + 1).min(sorted.len() - 1)];
        let (f_ref, skr_ref) = golden_section_max(&mut skr_at, lo, hi)?;
        let best = pick_best([(f_opt, skr_opt), (f_ref, skr_ref)].into_iter());
        f_opt = best.0;
        skr_opt = best.1;
    }
    Ok(FocusSearch { f_opt, skr_opt, curve })
}

// Smallest f whose value is within the tie tolerance of the maximum.
fn pick_best<I: Iterator<Item = (f64, f64)> + Clone>(points: I) -> (f64, f64) {
    let max = points.clone().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    points.filter(|p| p.1 >= max - FOCUS_TIE_TOL).fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| {
        if p.0 < acc.0 {
            p
        } else {
            acc
        }
    })
}

fn golden_section_max<E>(skr_at: &mut E, mut lo: f64, mut hi: f64) -> Result<(f64, f64)>
where
    E: FnMut(f64) -> Result<f64>,
{
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = skr_at(x1)?;
    let mut f2 = skr_at(x2)?;
    while hi - lo > FOCUS_REFINE_TOL_M {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = skr_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = skr_at(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}
