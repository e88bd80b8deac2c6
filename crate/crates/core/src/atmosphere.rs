//! Hufnagel-Valley turbulence, Greenwood wind profile, Rytov variances,
//! scintillation index, and deterministic slant-path losses.

use core::f64::consts::LN_10;

use crate::geometry::LinkGeometry;
use crate::numerics::{integrate_adaptive, integrate_adaptive_with_breaks, ALTITUDE_REL_TOL};
use crate::{error::config, Error, Result};

/// Atmospheric channel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphereSpec {
    /// Ground refractive-index structure constant `A`, m^{−2/3}.
    pub a: f64,
    /// Ground wind speed, m/s.
    pub v_g: f64,
    /// Zenith transmission efficiency.
    pub tau_zen: f64,
    /// Extinction coefficient, dB/km.
    pub beta_l_db_per_km: f64,
    /// Forces `Cn² ≡ 0`.
    pub vacuum_mode: bool,
}

impl AtmosphereSpec {
    pub const REFERENCE: Self = Self { a: 3e-13, v_g: 5.0, tau_zen: 0.78, beta_l_db_per_km: 0.43, vacuum_mode: false };

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return Err(config("A", "must be finite and >= 0"));
        }
        if !(self.v_g >= 0.0) || !self.v_g.is_finite() {
            return Err(config("v_g", "must be finite and >= 0"));
        }
        if !(self.tau_zen > 0.0 && self.tau_zen <= 1.0) {
            return Err(config("tau_zen", "must be in (0, 1]"));
        }
        if !(self.beta_l_db_per_km >= 0.0) || !self.beta_l_db_per_km.is_finite() {
            return Err(config("beta_l_db_per_km", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Extinction coefficient in nepers per metre.
    pub fn beta_per_m(&self) -> f64 {
        self.beta_l_db_per_km * LN_10 / (10.0 * 1000.0)
    }
}

impl Default for AtmosphereSpec {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// A straight path between two altitudes, tilted by its zenith angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub h_low: f64,
    pub h_high: f64,
    pub zenith_angle: f64,
}

impl PathSegment {
    pub fn new(h_low: f64, h_high: f64, zenith_angle: f64) -> Result<Self> {
        if !(h_low < h_high) || !h_low.is_finite() || !h_high.is_finite() {
            return Err(Error::InvalidArgument("segment needs finite h_low < h_high"));
        }
        check_zenith("zenith_angle", zenith_angle)?;
        Ok(Self { h_low, h_high, zenith_angle })
    }
}

pub(crate) fn check_zenith(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..core::f64::consts::FRAC_PI_2).contains(&value) {
        return Err(Error::InvalidAngle { name, value });
    }
    Ok(())
}

fn sec_pow(angle: f64, p: f64) -> f64 {
    libm::pow(libm::cos(angle), -p)
}

/// Hufnagel-Valley `Cn²(h)`.
pub fn cn2(h: f64, spec: &AtmosphereSpec, v_rms: f64) -> f64 {
    if spec.vacuum_mode {
        return 0.0;
    }
    let v = v_rms / 27.0;
    0.00594 * v * v * libm::pow(1e-5 * h, 10.0) * libm::exp(-h / 1000.0)
        + 2.7e-16 * libm::exp(-h / 1500.0)
        + spec.a * libm::exp(-h / 100.0)
}

/// Greenwood wind profile with its jet-stream peak referenced to the ORIS altitude.
pub fn wind_profile(h: f64, v_g: f64, h_oris: f64) -> f64 {
    let t = (h - 12448.0 + h_oris) / 4800.0;
    v_g + 30.0 * libm::exp(-t * t)
}

/// RMS of an arbitrary wind profile over the 5-20 km band.
pub fn rms_wind_of<V: FnMut(f64) -> f64>(mut profile: V) -> Result<f64> {
    let mean_sq = integrate_adaptive(
        |h| {
            let v = profile(h);
            v * v
        },
        5000.0,
        20000.0,
        ALTITUDE_REL_TOL,
    )? / 15000.0;
    Ok(libm::sqrt(mean_sq))
}

/// RMS transverse wind speed above 5 km.
pub fn rms_wind(v_g: f64, h_oris: f64) -> Result<f64> {
    rms_wind_of(|h| wind_profile(h, v_g, h_oris))
}

/// `∫_{h_low}^{h_high} Cn²(h)·kernel(h − h_low) dh`, integrated in `u = h − h_low`.
pub fn weighted_cn2_integral<K: FnMut(f64) -> f64>(
    h_low: f64,
    h_high: f64,
    spec: &AtmosphereSpec,
    v_rms: f64,
    mut kernel: K,
) -> Result<f64> {
    if spec.vacuum_mode {
        return Ok(0.0);
    }
    let span = h_high - h_low;
    let mut points = [0.0; 6];
    let mut n = 1;
    for brk in [100.0, 1000.0, 5000.0, 10000.0] {
        if brk < span {
            points[n] = brk;
            n += 1;
        }
    }
    points[n] = span;
    integrate_adaptive_with_breaks(|u| cn2(h_low + u, spec, v_rms) * kernel(u), &points[..=n], ALTITUDE_REL_TOL)
}

/// Rytov variance of a slanted segment, with the `(h − h_low)^{5/6}` kernel.
pub fn rytov_variance(seg: &PathSegment, spec: &AtmosphereSpec, v_rms: f64, k: f64) -> Result<f64> {
    if spec.vacuum_mode {
        return Ok(0.0);
    }
    let integral = weighted_cn2_integral(seg.h_low, seg.h_high, spec, v_rms, |u| libm::pow(u, 5.0 / 6.0))?;
    Ok(2.25 * libm::pow(k, 7.0 / 6.0) * sec_pow(seg.zenith_angle, 11.0 / 6.0) * integral)
}

/// Scintillation index from the Rytov variance, valid across weak and strong fluctuations.
pub fn scintillation_index(sigma_r_sq: f64) -> f64 {
    let s = sigma_r_sq;
    let p = libm::pow(s, 6.0 / 5.0);
    libm::expm1(0.49 * s / libm::pow(1.0 + 1.11 * p, 7.0 / 6.0) + 0.51 * s / libm::pow(1.0 + 0.69 * p, 5.0 / 6.0))
}

/// Deterministic atmospheric transmittances of the two hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLosses {
    /// HAP → ORIS.
    pub tau_l1: f64,
    /// ORIS → LAP.
    pub tau_l2: f64,
    pub tau_l: f64,
}

pub fn atmospheric_loss(geom: &LinkGeometry, spec: &AtmosphereSpec) -> Result<PathLosses> {
    path_losses(geom.phi_i, geom.d2, spec)
}

/// [`atmospheric_loss`] from the incidence zenith angle and ORIS-LAP distance alone.
pub fn path_losses(phi_i: f64, d2: f64, spec: &AtmosphereSpec) -> Result<PathLosses> {
    check_zenith("phi_i", phi_i)?;
    let tau_l1 = libm::pow(spec.tau_zen, 1.0 / libm::cos(phi_i));
    let tau_l2 = libm::exp(-spec.beta_per_m() * d2);
    Ok(PathLosses { tau_l1, tau_l2, tau_l: tau_l1 * tau_l2 })
}

/// Turbulence profile with its RMS wind speed evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Turbulence {
    spec: AtmosphereSpec,
    v_rms: f64,
}

impl Turbulence {
    pub fn new(spec: AtmosphereSpec, h_oris: f64) -> Result<Self> {
        spec.validate()?;
        let v_rms = rms_wind(spec.v_g, h_oris)?;
        Ok(Self { spec, v_rms })
    }

    pub fn spec(&self) -> &AtmosphereSpec {
        &self.spec
    }

    pub fn v_rms(&self) -> f64 {
        self.v_rms
    }

    pub fn cn2(&self, h: f64) -> f64 {
        cn2(h, &self.spec, self.v_rms)
    }

    pub fn rytov_variance(&self, seg: &PathSegment, k: f64) -> Result<f64> {
        rytov_variance(seg, &self.spec, self.v_rms, k)
    }

    pub fn weighted_integral<K: FnMut(f64) -> f64>(&self, h_low: f64, h_high: f64, kernel: K) -> Result<f64> {
        weighted_cn2_integral(h_low, h_high, &self.spec, self.v_rms, kernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deg_to_rad;

    const K: f64 = 2.0 * core::f64::consts::PI / 810e-9;

    fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            s += f(a + (i as f64 + 0.5) * h);
        }
        s * h
    }

    fn v_rms() -> f64 {
        rms_wind(5.0, 50.0).unwrap()
    }

    #[test]
    fn cn2_at_ground() {
        let v = cn2(0.0, &AtmosphereSpec::REFERENCE, v_rms());
        assert!((v - 3.0027e-13).abs() < 1e-26);
        let vac = AtmosphereSpec { vacuum_mode: true, ..AtmosphereSpec::REFERENCE };
        assert_eq!(cn2(0.0, &vac, 20.0), 0.0);
        assert_eq!(cn2(12000.0, &vac, 20.0), 0.0);
    }

    #[test]
    fn cn2_at_ten_km_term_by_term() {
        let v = v_rms();
        let t1 = 0.00594 * (v / 27.0) * (v / 27.0) * 0.1f64.powi(10) * (-10.0f64).exp();
        let t2 = 2.7e-16 * (-10000.0f64 / 1500.0).exp();
        let t3 = 3e-13 * (-100.0f64).exp();
        let got = cn2(10000.0, &AtmosphereSpec::REFERENCE, v);
        assert!(((got - (t1 + t2 + t3)) / got).abs() < 1e-14);
    }

    #[test]
    fn wind_profile_shape() {
        assert!((wind_profile(12448.0 - 50.0, 5.0, 50.0) - 35.0).abs() < 1e-12);
        assert!((wind_profile(1e6, 5.0, 50.0) - 5.0).abs() < 1e-12);
        let want = 5.0 + 30.0 * (-(7398.0f64 / 4800.0).powi(2)).exp();
        assert!((wind_profile(5000.0, 5.0, 50.0) - want).abs() < 1e-12);
        assert!((wind_profile(5000.0, 5.0, 50.0) - 7.79).abs() < 0.01);
    }

    #[test]
    fn rms_wind_against_midpoint_oracle() {
        assert_eq!(rms_wind_of(|_| 0.0).unwrap(), 0.0);
        assert!((rms_wind_of(|_| 7.5).unwrap() - 7.5).abs() < 1e-12);
        let oracle = (midpoint(|h| wind_profile(h, 5.0, 50.0).powi(2), 5000.0, 20000.0, 1_000_000) / 15000.0).sqrt();
        let got = v_rms();
        assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn cn2_integral_against_midpoint_oracle() {
        let v = v_rms();
        let spec = AtmosphereSpec::REFERENCE;
        let got = integrate_adaptive(|h| cn2(h, &spec, v), 50.0, 20000.0, ALTITUDE_REL_TOL).unwrap();
        let oracle = midpoint(|h| cn2(h, &spec, v), 50.0, 20000.0, 1_000_000);
        assert!(((got - oracle) / oracle).abs() < 1e-8);
    }

    #[test]
    fn rytov_against_midpoint_oracle() {
        let v = v_rms();
        let spec = AtmosphereSpec::REFERENCE;
        let seg = PathSegment::new(50.0, 20000.0, 0.0).unwrap();
        let got = rytov_variance(&seg, &spec, v, K).unwrap();
        let integral = midpoint(|u| cn2(50.0 + u, &spec, v) * u.powf(5.0 / 6.0), 0.0, 19950.0, 1_000_000);
        let oracle = 2.25 * K.powf(7.0 / 6.0) * integral;
        assert!(((got - oracle) / oracle).abs() < 1e-7, "{got} vs {oracle}");
    }

    #[test]
    fn rytov_angular_factor_separates() {
        let v = v_rms();
        let spec = AtmosphereSpec::REFERENCE;
        let s0 = rytov_variance(&PathSegment::new(50.0, 20000.0, 0.0).unwrap(), &spec, v, K).unwrap();
        let s60 = rytov_variance(&PathSegment::new(50.0, 20000.0, deg_to_rad(60.0)).unwrap(), &spec, v, K).unwrap();
        assert!((s60 / s0 - 2f64.powf(11.0 / 6.0)).abs() < 1e-9);
        let vac = AtmosphereSpec { vacuum_mode: true, ..spec };
        assert_eq!(rytov_variance(&PathSegment::new(50.0, 300.0, 0.3).unwrap(), &vac, v, K).unwrap(), 0.0);
    }

    #[test]
    fn rytov_monotone_in_angle_and_ground_strength() {
        let v = v_rms();
        let mut prev = 0.0;
        for deg in 0..85 {
            let seg = PathSegment::new(50.0, 300.0, deg_to_rad(deg as f64)).unwrap();
            let s = rytov_variance(&seg, &AtmosphereSpec::REFERENCE, v, K).unwrap();
            assert!(s >= prev);
            prev = s;
        }
        let seg = PathSegment::new(50.0, 300.0, 0.2).unwrap();
        let mut prev = 0.0;
        for i in 0..10 {
            let spec = AtmosphereSpec { a: i as f64 * 1e-13, ..AtmosphereSpec::REFERENCE };
            let s = rytov_variance(&seg, &spec, v, K).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn scintillation_limits() {
        assert_eq!(scintillation_index(0.0), 0.0);
        let s = 1e-4;
        assert!(((scintillation_index(s) - s) / s).abs() < 0.01);
        let mut prev = 0.0;
        for i in 1..500 {
            let v = scintillation_index(i as f64 * 0.02);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn losses() {
        let spec = AtmosphereSpec::REFERENCE;
        let l = path_losses(0.0, 0.0, &spec).unwrap();
        assert_eq!(l.tau_l1, 0.78);
        assert_eq!(l.tau_l2, 1.0);
        let l = path_losses(0.0, 353.553, &spec).unwrap();
        let db = 0.43 * 0.353553;
        assert!((l.tau_l2 - 10f64.powf(-db / 10.0)).abs() < 1e-12);
        assert!((l.tau_l2 - 0.96560).abs() < 1e-5);
        let mut prev = 1.0;
        for deg in 0..89 {
            let l = path_losses(deg_to_rad(deg as f64), 353.553, &spec).unwrap();
            assert!(l.tau_l1 < prev && l.tau_l1 > 0.0 && l.tau_l <= 1.0);
            prev = l.tau_l1;
        }
        assert!(matches!(path_losses(core::f64::consts::FRAC_PI_2, 1.0, &spec), Err(Error::InvalidAngle { .. })));
    }

    #[test]
    fn spec_validation_names_field() {
        let bad = AtmosphereSpec { tau_zen: 1.5, ..AtmosphereSpec::REFERENCE };
        match bad.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "tau_zen"),
            other => panic!("{other:?}"),
        }
    }
}
