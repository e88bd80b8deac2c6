//! HAP → ORIS → LAP geometry over a spherical Earth.

use core::f64::consts::FRAC_PI_2;

use crate::atmosphere::check_zenith;
use crate::{error::config, Result};

/// Default Earth radius, m.
pub const EARTH_RADIUS_M: f64 = 6_370_000.0;

/// Fixed parameters of the link; only the incidence zenith angle varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub h_hap: f64,
    pub h_oris: f64,
    pub h_lap: f64,
    /// Horizontal ORIS-LAP distance, m.
    pub d_lap: f64,
    /// ORIS-LAP zenith angle, rad.
    pub phi_r: f64,
    pub r_e: f64,
    /// Minimum ORIS-LAP distance for the far-field model, m.
    pub d_n_threshold: Option<f64>,
}

impl GeometryParams {
    pub const REFERENCE: Self = Self {
        h_hap: 20_000.0,
        h_oris: 50.0,
        h_lap: 300.0,
        d_lap: 250.0,
        phi_r: core::f64::consts::FRAC_PI_4,
        r_e: EARTH_RADIUS_M,
        d_n_threshold: None,
    };

    /// Validates the fixed part and returns `d2`.
    pub fn oris_lap_distance(&self) -> Result<f64> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.r_e) {
            return Err(config("R_E_m", "must be finite and > 0"));
        }
        if !(self.h_oris >= 0.0) || !self.h_oris.is_finite() {
            return Err(config("h_oris_m", "must be finite and >= 0"));
        }
        if !(self.h_hap > self.h_oris) || !self.h_hap.is_finite() {
            return Err(config("h_hap_m", "must be finite and > h_oris_m"));
        }
        if !(self.h_lap > self.h_oris) || !self.h_lap.is_finite() {
            return Err(config("h_lap_m", "must be finite and > h_oris_m"));
        }
        if !(self.d_lap >= 0.0) || !self.d_lap.is_finite() {
            return Err(config("d_lap_m", "must be finite and >= 0"));
        }
        if !(0.0..FRAC_PI_2).contains(&self.phi_r) {
            return Err(config("phi_r_deg", "phi_r must be < 90 and >= 0"));
        }
        let theta_r = FRAC_PI_2 - self.phi_r;
        let d2 = if self.d_lap == 0.0 {
            if self.phi_r != 0.0 {
                return Err(config("phi_r_deg", "a vertical link (d_lap_m = 0) needs phi_r = 0"));
            }
            self.h_lap - self.h_oris
        } else {
            if self.phi_r == 0.0 {
                return Err(config("phi_r_deg", "phi_r = 0 needs d_lap_m = 0"));
            }
            let derived = self.d_lap * libm::tan(theta_r) + self.h_oris;
            if (derived - self.h_lap).abs() > 1e-9 * self.h_lap {
                return Err(config("h_lap_m", "must equal d_lap_m·tan(90° − phi_r) + h_oris_m"));
            }
            self.d_lap / libm::cos(theta_r)
        };
        if let Some(dn) = self.d_n_threshold {
            if !(dn >= 0.0) {
                return Err(config("d_n_threshold_m", "must be >= 0"));
            }
            if !(d2 > dn) {
                return Err(config("d_n_threshold_m", "ORIS-LAP distance must exceed the threshold"));
            }
        }
        Ok(d2)
    }
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// Complete geometry at one incidence zenith angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub h_hap: f64,
    pub h_oris: f64,
    pub h_lap: f64,
    pub d_lap: f64,
    pub phi_i: f64,
    pub phi_r: f64,
    /// Elevation angles, `π/2 − φ`.
    pub theta_i: f64,
    pub theta_r: f64,
    pub d1: f64,
    pub d2: f64,
    pub r_e: f64,
    pub d_n_threshold: Option<f64>,
}

/// HAP → ORIS slant distance for a HAP seen at zenith angle `phi_i` from the ORIS.
pub fn slant_distance_d1(phi_i: f64, h_hap: f64, h_oris: f64, r_e: f64) -> Result<f64> {
    check_zenith("phi_i", phi_i)?;
    if !(h_hap > h_oris) {
        return Err(config("h_hap_m", "must be > h_oris_m"));
    }
    let c = libm::cos(phi_i);
    let rh = r_e + h_hap;
    let ro = r_e + h_oris;
    Ok(libm::sqrt(rh * rh + ro * ro * (c * c - 1.0)) - ro * c)
}

pub fn derive_geometry(params: &GeometryParams, phi_i: f64) -> Result<LinkGeometry> {
    let d2 = params.oris_lap_distance()?;
    let d1 = slant_distance_d1(phi_i, params.h_hap, params.h_oris, params.r_e)?;
    Ok(LinkGeometry {
        h_hap: params.h_hap,
        h_oris: params.h_oris,
        h_lap: params.h_lap,
        d_lap: params.d_lap,
        phi_i,
        phi_r: params.phi_r,
        theta_i: FRAC_PI_2 - phi_i,
        theta_r: FRAC_PI_2 - params.phi_r,
        d1,
        d2,
        r_e: params.r_e,
        d_n_threshold: params.d_n_threshold,
    })
}
