//! Gaussian-beam propagation through the two hops: the turbulence-broadened
//! waist at the ORIS, the ORIS phase profiles, and the equivalent beam widths
//! in the receiver plane.

use core::f64::consts::PI;

use crate::atmosphere::Turbulence;
use crate::geometry::LinkGeometry;
use crate::{error::config, Error, Result};

/// Transmit beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxBeam {
    /// Wavelength, m.
    pub lambda: f64,
    /// Half-angle divergence, rad.
    pub theta_div: f64,
    pub w0: f64,
    /// Wavenumber, rad/m.
    pub k: f64,
    /// Rayleigh range, m.
    pub z_r1: f64,
}

impl TxBeam {
    pub fn new(lambda: f64, theta_div: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(config("lambda_nm", "must be finite and > 0"));
        }
        if !(theta_div > 0.0) || !theta_div.is_finite() {
            return Err(config("theta_div_urad", "must be finite and > 0"));
        }
        let w0 = lambda / (PI * theta_div);
        Ok(Self { lambda, theta_div, w0, k: 2.0 * PI / lambda, z_r1: PI * w0 * w0 / lambda })
    }
}

/// Beam state on the ORIS plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamAtOris {
    /// Long-term waist at distance `d1`, m.
    pub w_d1: f64,
    /// Turbulence broadening factor.
    pub t: f64,
    pub lambda0: f64,
    pub lambda: f64,
    /// Incident footprint semi-widths, m.
    pub w_ix: f64,
    pub w_iy: f64,
    /// Footprint diameter fits inside the surface on both axes.
    pub fits_oris: bool,
}

/// ORIS phase-shift profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseProfile {
    Lps,
    /// Quadratic profile focusing at `focus` metres.
    Qps {
        focus: f64,
    },
    Fps,
}

impl PhaseProfile {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseProfile::Lps => "lps",
            PhaseProfile::Qps { .. } => "qps",
            PhaseProfile::Fps => "fps",
        }
    }
}

/// Physical surface dimensions and the constant phase term `Φ0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrisSurface {
    pub side_x: f64,
    pub side_y: f64,
    /// `Φ0`, m (the profile multiplies it by `k`).
    pub phi_0: f64,
}

impl OrisSurface {
    pub const SQUARE_METRE: Self = Self { side_x: 1.0, side_y: 1.0, phi_0: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if !(self.side_x > 0.0 && self.side_y > 0.0) || !self.side_x.is_finite() || !self.side_y.is_finite() {
            return Err(config("oris_side_m", "must be finite and > 0"));
        }
        Ok(())
    }
}

impl Default for OrisSurface {
    fn default() -> Self {
        Self::SQUARE_METRE
    }
}

/// Equivalent beam widths in the receiver plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxBeam {
    pub w_rx_x: f64,
    pub w_rx_y: f64,
    pub epsilon: f64,
    /// Coherence length, m; infinite in vacuum.
    pub rho0: f64,
    /// `2 d2 / (k w(d1)²)`.
    pub lambda1: f64,
}

fn fresnel_ratios(tx: &TxBeam, geom: &LinkGeometry) -> (f64, f64) {
    let lambda0 = 2.0 * geom.d1 / (tx.k * tx.w0 * tx.w0);
    (lambda0, lambda0 / (1.0 + lambda0 * lambda0))
}

/// Turbulence-induced broadening factor `T` of the HAP → ORIS hop.
pub fn turbulence_t(tx: &TxBeam, geom: &LinkGeometry, turb: &Turbulence) -> Result<f64> {
    if turb.spec().vacuum_mode {
        return Ok(0.0);
    }
    let (_, lambda) = fresnel_ratios(tx, geom);
    let h = geom.h_hap - geom.h_oris;
    let integral = turb.weighted_integral(geom.h_oris, geom.h_hap, |u| libm::pow(u / h, 5.0 / 3.0))?;
    Ok(4.35
        * libm::pow(lambda, 5.0 / 6.0)
        * libm::pow(tx.k, 7.0 / 6.0)
        * libm::pow(h, 5.0 / 6.0)
        * libm::pow(libm::cos(geom.phi_i), -11.0 / 6.0)
        * integral)
}

pub fn beam_at_oris(tx: &TxBeam, geom: &LinkGeometry, turb: &Turbulence, surface: &OrisSurface) -> Result<BeamAtOris> {
    let t = turbulence_t(tx, geom, turb)?;
    Ok(beam_with_broadening(tx, geom, t, surface))
}

/// [`beam_at_oris`] for a precomputed `T`.
pub fn beam_with_broadening(tx: &TxBeam, geom: &LinkGeometry, t: f64, surface: &OrisSurface) -> BeamAtOris {
    let (lambda0, lambda) = fresnel_ratios(tx, geom);
    let w_d1 = tx.w0 * libm::sqrt((1.0 + lambda0 * lambda0) * (1.0 + t));
    let w_ix = w_d1 / libm::sin(geom.theta_i);
    let w_iy = w_d1;
    BeamAtOris {
        w_d1,
        t,
        lambda0,
        lambda,
        w_ix,
        w_iy,
        fits_oris: 2.0 * w_ix <= surface.side_x && 2.0 * w_iy <= surface.side_y,
    }
}

/// Spherical-wave coherence length of the ORIS → LAP hop.
pub fn coherence_length_rho0(geom: &LinkGeometry, turb: &Turbulence, k: f64) -> Result<f64> {
    if turb.spec().vacuum_mode {
        return Ok(f64::INFINITY);
    }
    let integral = turb.weighted_integral(geom.h_oris, geom.h_lap, |_| 1.0)?;
    Ok(libm::pow(1.45 * k * k * integral, -3.0 / 5.0) * libm::pow(libm::cos(geom.phi_r), 3.0 / 5.0))
}

/// Receiver-plane beam widths for a phase profile.
pub fn rx_beam_widths(
    profile: &PhaseProfile,
    boris: &BeamAtOris,
    geom: &LinkGeometry,
    rho0: f64,
    k: f64,
) -> Result<RxBeam> {
    let w = boris.w_d1;
    let epsilon = 1.0 + 2.0 * w * w / (rho0 * rho0);
    let lambda1 = 2.0 * geom.d2 / (k * w * w);
    let si = libm::fabs(libm::sin(geom.theta_i));
    let sr = libm::fabs(libm::sin(geom.theta_r));
    let (w_rx_x, w_rx_y) = match *profile {
        PhaseProfile::Lps => lps_like(w, si, sr, epsilon, lambda1, 1.0),
        PhaseProfile::Qps { focus } => {
            if !(focus > 0.0) || !focus.is_finite() {
                return Err(Error::InvalidFocus(focus));
            }
            let c = geom.d2 / (2.0 * focus);
            lps_like(w, si, sr, epsilon, lambda1, c * c)
        }
        PhaseProfile::Fps => {
            let s = libm::sqrt(epsilon) * lambda1;
            (w * si / sr * s, w * s)
        }
    };
    Ok(RxBeam { w_rx_x, w_rx_y, epsilon, rho0, lambda1 })
}

// Shared by LPS (c = 1) and QPS (c = (d2/2f)²) so f = d2/2 reproduces LPS bit for bit.
fn lps_like(w: f64, si: f64, sr: f64, epsilon: f64, lambda1: f64, c: f64) -> (f64, f64) {
    let gx = si * si / (sr * sr) * lambda1;
    (w * sr / si * libm::sqrt(epsilon * gx * gx + c), w * libm::sqrt(epsilon * lambda1 * lambda1 + c))
}

/// Phase shift, rad, applied by the profile at `(x, y)` on the surface.
///
/// Uses the coplanar configuration (incidence and reflection azimuths 0 and
/// π), so `Φ_y = 0`, and `R(d1) = d1` for the incident radius of curvature.
pub fn phase_profile_value(
    profile: &PhaseProfile,
    point: (f64, f64),
    geom: &LinkGeometry,
    tx: &TxBeam,
    surface: &OrisSurface,
) -> Result<f64> {
    let (x, y) = point;
    if x.abs() > 0.5 * surface.side_x || y.abs() > 0.5 * surface.side_y || !x.is_finite() || !y.is_finite() {
        return Err(Error::OutOfSurface { x, y, side_x: surface.side_x, side_y: surface.side_y });
    }
    let k = tx.k;
    let r_d1 = geom.d1;
    let (si, ci) = (libm::sin(geom.theta_i), libm::cos(geom.theta_i));
    let (sr, cr) = (libm::sin(geom.theta_r), libm::cos(geom.theta_r));
    let phi_x = ci - cr;
    let phi_y = 0.0;
    match *profile {
        PhaseProfile::Lps => Ok(k * (phi_x * x + phi_y * y + surface.phi_0)),
        PhaseProfile::Qps { focus } => {
            if !(focus > 0.0) || !focus.is_finite() {
                return Err(Error::InvalidFocus(focus));
            }
            let d2 = geom.d2;
            let phi_x2 = -si * si / (2.0 * r_d1) - sr * sr / (2.0 * d2) + sr * sr / (4.0 * focus);
            let phi_y2 = -1.0 / (2.0 * r_d1) - 1.0 / (2.0 * d2) + 1.0 / (4.0 * focus);
            Ok(k * (phi_x2 * x * x + phi_y2 * y * y + phi_x * x + phi_y * y + surface.phi_0))
        }
        PhaseProfile::Fps => {
            let psi_in =
                k * (geom.d1 - x * ci + (x * x * si * si + y * y) / (2.0 * r_d1)) - libm::atan(geom.d1 / tx.z_r1);
            let (ox, oz) = (-geom.d2 * cr, geom.d2 * sr);
            let dist = libm::sqrt((ox - x) * (ox - x) + y * y + oz * oz);
            Ok(-psi_in - k * dist)
        }
    }
}
