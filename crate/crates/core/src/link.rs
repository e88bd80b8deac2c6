//! End-to-end link: fixed parameters plus per-angle evaluation of every
//! channel factor.

use crate::atmosphere::{path_losses, scintillation_index, AtmosphereSpec, PathLosses, PathSegment, Turbulence};
use crate::beam::{
    beam_at_oris, coherence_length_rho0, rx_beam_widths, BeamAtOris, OrisSurface, PhaseProfile, RxBeam, TxBeam,
};
use crate::geometry::{derive_geometry, GeometryParams, LinkGeometry};
use crate::gml::{average_gml, HoverStats, ReceiverSpec};
use crate::numerics::QuadratureRule;
use crate::skr::{optimize_focus, plob_average_gl, ChannelBudget, FocusSearch};
use crate::{deg_to_rad, Error, Result};

/// Every scenario parameter, defaulting to the reference scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Wavelength, m.
    pub lambda_m: f64,
    /// Transmit half-angle divergence, rad.
    pub theta_div_rad: f64,
    pub atmosphere: AtmosphereSpec,
    pub geometry: GeometryParams,
    pub aperture_radius_m: f64,
    pub tau_eff: f64,
    pub surface: OrisSurface,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            lambda_m: 810e-9,
            theta_div_rad: 16.5e-6,
            atmosphere: AtmosphereSpec::REFERENCE,
            geometry: GeometryParams::REFERENCE,
            aperture_radius_m: 0.045,
            tau_eff: 0.5,
            surface: OrisSurface::SQUARE_METRE,
        }
    }
}

impl LinkParams {
    pub fn receiver(&self) -> ReceiverSpec {
        ReceiverSpec { aperture_radius: self.aperture_radius_m, tau_eff: self.tau_eff }
    }
}

/// Validated link with the angle-independent quantities precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    params: LinkParams,
    tx: TxBeam,
    turbulence: Turbulence,
    d2: f64,
}

impl Link {
    pub fn new(params: LinkParams) -> Result<Self> {
        let tx = TxBeam::new(params.lambda_m, params.theta_div_rad)?;
        params.receiver().validate()?;
        params.surface.validate()?;
        let d2 = params.geometry.oris_lap_distance()?;
        let turbulence = Turbulence::new(params.atmosphere, params.geometry.h_oris)?;
        Ok(Self { params, tx, turbulence, d2 })
    }

    pub fn params(&self) -> &LinkParams {
        &self.params
    }

    pub fn tx(&self) -> &TxBeam {
        &self.tx
    }

    pub fn turbulence(&self) -> &Turbulence {
        &self.turbulence
    }

    /// ORIS-LAP distance `d2`, m.
    pub fn d2(&self) -> f64 {
        self.d2
    }

    /// Smallest focus distance of the narrowing QPS regime, `d2/2`.
    pub fn min_focus(&self) -> f64 {
        0.5 * self.d2
    }

    pub fn at_zenith_deg(&self, phi_i_deg: f64) -> Result<LinkState> {
        self.at_zenith(deg_to_rad(phi_i_deg))
    }

    pub fn at_zenith(&self, phi_i: f64) -> Result<LinkState> {
        let geometry = derive_geometry(&self.params.geometry, phi_i)?;
        let g = &geometry;
        let k = self.tx.k;
        let beam = beam_at_oris(&self.tx, g, &self.turbulence, &self.params.surface)?;
        let rho0 = coherence_length_rho0(g, &self.turbulence, k)?;
        let sigma_r1_sq = self.turbulence.rytov_variance(&PathSegment::new(g.h_oris, g.h_hap, g.phi_i)?, k)?;
        let sigma_r2_sq = self.turbulence.rytov_variance(&PathSegment::new(g.h_oris, g.h_lap, g.phi_r)?, k)?;
        let losses = path_losses(g.phi_i, g.d2, &self.params.atmosphere)?;
        Ok(LinkState {
            geometry,
            beam,
            rho0,
            sigma_r1_sq,
            sigma_r2_sq,
            losses,
            k,
            aperture_radius: self.params.aperture_radius_m,
            tau_eff: self.params.tau_eff,
        })
    }
}

/// Link evaluated at one incidence zenith angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub geometry: LinkGeometry,
    pub beam: BeamAtOris,
    /// ORIS → LAP coherence length, m.
    pub rho0: f64,
    /// Rytov variance of the HAP → ORIS hop.
    pub sigma_r1_sq: f64,
    /// Rytov variance of the ORIS → LAP hop.
    pub sigma_r2_sq: f64,
    pub losses: PathLosses,
    k: f64,
    aperture_radius: f64,
    tau_eff: f64,
}

impl LinkState {
    /// Scintillation index of the HAP → ORIS hop.
    pub fn scintillation_index(&self) -> f64 {
        scintillation_index(self.sigma_r1_sq)
    }

    pub fn rx_beam(&self, profile: PhaseProfile) -> Result<RxBeam> {
        rx_beam_widths(&profile, &self.beam, &self.geometry, self.rho0, self.k)
    }

    pub fn average_gml(&self, profile: PhaseProfile, hover: &HoverStats) -> Result<f64> {
        Ok(average_gml(&self.rx_beam(profile)?, hover, self.aperture_radius))
    }

    pub fn budget(&self, tau_p: f64) -> ChannelBudget {
        ChannelBudget {
            tau_eff: self.tau_eff,
            tau_l: self.losses.tau_l,
            tau_p,
            sigma_r_sq: self.sigma_r1_sq + self.sigma_r2_sq,
        }
    }

    /// Averaged PLOB bound for a profile and hovering model.
    pub fn skr(&self, profile: PhaseProfile, hover: &HoverStats, rule: &QuadratureRule) -> Result<f64> {
        plob_average_gl(&self.budget(self.average_gml(profile, hover)?), rule)
    }

    /// QPS focus maximising the averaged bound; grid points must be `≥ d2/2`.
    pub fn optimize_focus(
        &self,
        hover: &HoverStats,
        f_grid: &[f64],
        refine: bool,
        rule: &QuadratureRule,
    ) -> Result<FocusSearch> {
        let f_min = 0.5 * self.geometry.d2;
        if let Some(&bad) = f_grid.iter().find(|&&f| !(f >= f_min) || !f.is_finite()) {
            return Err(Error::InvalidFocus(bad));
        }
        optimize_focus(|f| self.skr(PhaseProfile::Qps { focus: f }, hover, rule), f_grid, refine)
    }
}
