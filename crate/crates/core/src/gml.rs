//! Geometric-and-misalignment loss over a square aperture of equal area.

use core::f64::consts::{PI, SQRT_2};

use crate::beam::RxBeam;
use crate::numerics::{erf, erf_diff};
use crate::{error::config, Result};

/// Independent Gaussian hovering offsets per receiver axis, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoverStats {
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl HoverStats {
    pub const NONE: Self = Self { mu_x: 0.0, mu_y: 0.0, sigma_x: 0.0, sigma_y: 0.0 };
    pub const WEAK: Self = Self { mu_x: 0.3, mu_y: 0.2, sigma_x: 0.2, sigma_y: 0.1 };
    pub const MODERATE: Self = Self { mu_x: 0.4, mu_y: 0.3, sigma_x: 0.25, sigma_y: 0.2 };
    pub const STRONG: Self = Self { mu_x: 0.5, mu_y: 0.4, sigma_x: 0.3, sigma_y: 0.25 };

    pub fn validate(&self) -> Result<()> {
        let ok = [self.mu_x, self.mu_y].iter().all(|v| v.is_finite())
            && [self.sigma_x, self.sigma_y].iter().all(|v| v.is_finite() && *v >= 0.0);
        if !ok {
            return Err(config("pe_preset", "means must be finite and deviations finite and >= 0"));
        }
        Ok(())
    }
}

/// Receiver aperture and efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverSpec {
    /// Aperture radius `a`, m.
    pub aperture_radius: f64,
    pub tau_eff: f64,
}

impl ReceiverSpec {
    pub const REFERENCE: Self = Self { aperture_radius: 0.045, tau_eff: 0.5 };

    pub fn validate(&self) -> Result<()> {
        if !(self.aperture_radius > 0.0) || !self.aperture_radius.is_finite() {
            return Err(config("aperture_radius_m", "must be finite and > 0"));
        }
        if !(self.tau_eff > 0.0 && self.tau_eff <= 1.0) {
            return Err(config("tau_eff", "must be in (0, 1]"));
        }
        Ok(())
    }
}

impl Default for ReceiverSpec {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// Half-width of the equal-area square in units of the beam width, `a√π/(2w)`.
#[inline]
fn half_side(a: f64, w: f64) -> f64 {
    a * libm::sqrt(PI) / (2.0 * w)
}

/// Captured fraction along one axis for a fixed offset.
pub fn conditional_axis(offset: f64, w: f64, a: f64) -> f64 {
    let b = half_side(a, w);
    let u = offset / (SQRT_2 * w);
    0.5 * erf_diff(u + b, u - b)
}

/// Captured fraction along one axis averaged over `N(mu, sigma²)` offsets.
pub fn average_axis(mu: f64, sigma: f64, w: f64, a: f64) -> f64 {
    let b = half_side(a, w);
    let u = mu / (SQRT_2 * w);
    let r = libm::sqrt(1.0 + sigma * sigma / (w * w));
    0.5 * erf_diff((u + b) / r, (u - b) / r)
}

/// Loss at a fixed receiver offset.
pub fn conditional_gml(offset_x: f64, offset_y: f64, rx: &RxBeam, a: f64) -> f64 {
    conditional_axis(offset_x, rx.w_rx_x, a) * conditional_axis(offset_y, rx.w_rx_y, a)
}

/// Loss averaged over Gaussian hovering; the profile enters only through the widths.
pub fn average_gml(rx: &RxBeam, hover: &HoverStats, a: f64) -> f64 {
    average_axis(hover.mu_x, hover.sigma_x, rx.w_rx_x, a) * average_axis(hover.mu_y, hover.sigma_y, rx.w_rx_y, a)
}

/// Loss of a centred receiver without pointing error.
pub fn deterministic_gml(rx: &RxBeam, a: f64) -> f64 {
    erf(half_side(a, rx.w_rx_x)) * erf(half_side(a, rx.w_rx_y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beam(wx: f64, wy: f64) -> RxBeam {
        RxBeam { w_rx_x: wx, w_rx_y: wy, epsilon: 1.0, rho0: f64::INFINITY, lambda1: 1.0 }
    }

    const A: f64 = 0.045;

    #[test]
    fn centred_and_full_capture() {
        let rx = beam(0.05, 0.08);
        assert!((conditional_gml(0.0, 0.0, &rx, 100.0) - 1.0).abs() < 1e-15);
        let want = erf(A * PI.sqrt() / 0.1) * erf(A * PI.sqrt() / 0.16);
        assert!((conditional_gml(0.0, 0.0, &rx, A) - want).abs() < 1e-15);
        assert_eq!(deterministic_gml(&rx, A), want);
    }

    #[test]
    fn far_offset_is_tiny() {
        // Beam much wider than the aperture, as for the LPS and QPS profiles.
        let w = 0.3;
        assert!(conditional_axis(5.0 * w, w, A) < 1e-6);
        assert!(conditional_axis(5.0 * w, w, A) > 0.0);
    }

    #[test]
    fn degenerate_hover_equals_deterministic() {
        let rx = beam(0.05, 0.03);
        assert_eq!(average_gml(&rx, &HoverStats::NONE, A), deterministic_gml(&rx, A));
        let sq = beam(0.04, 0.04);
        let f = erf(A * PI.sqrt() / 0.08);
        assert_eq!(deterministic_gml(&sq, A), f * f);
    }

    #[test]
    fn zero_sigma_with_offset_equals_conditional() {
        let rx = beam(0.05, 0.03);
        let h = HoverStats { mu_x: 0.02, mu_y: -0.01, sigma_x: 0.0, sigma_y: 0.0 };
        assert_eq!(average_gml(&rx, &h, A), conditional_gml(0.02, -0.01, &rx, A));
    }

    #[test]
    fn average_matches_simpson_of_conditional() {
        // Independent oracle: composite Simpson over ±10σ of the Gaussian-weighted kernel.
        let (w, mu, sigma) = (0.3, 0.3, 0.2);
        let n = 4000;
        let (lo, hi) = (mu - 10.0 * sigma, mu + 10.0 * sigma);
        let h = (hi - lo) / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = lo + i as f64 * h;
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let pdf = (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
            s += c * conditional_axis(x, w, A) * pdf;
        }
        s *= h / 3.0;
        let got = average_axis(mu, sigma, w, A);
        assert!(((got - s) / s).abs() < 1e-10, "{got} vs {s}");
    }

    #[test]
    fn monotone_in_offset_and_spread() {
        let w = 0.1;
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let v = average_axis(i as f64 * 0.01, 0.1, w, A);
            assert!(v <= prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let v = average_axis(0.0, i as f64 * 0.01, w, A);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn far_tail_stays_positive() {
        // 30 beam widths off axis the naive erf difference is exactly 0.
        let v = average_axis(0.9, 0.0, 0.03, A);
        assert!(v > 0.0 && v < 1e-100);
    }

    #[test]
    fn presets() {
        assert_eq!((HoverStats::WEAK.mu_x, HoverStats::WEAK.sigma_y), (0.3, 0.1));
        assert!(HoverStats { sigma_x: -1.0, ..HoverStats::NONE }.validate().is_err());
        assert!(ReceiverSpec { tau_eff: 0.0, ..ReceiverSpec::REFERENCE }.validate().is_err());
    }
}
