//! Channel, beam, and key-rate models for an optical-RIS assisted
//! HAP → rooftop ORIS → drone free-space QKD link.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation: turbulence profiles, beam propagation, the closed-form
//! geometric-and-misalignment loss for the LPS/QPS/FPS phase profiles, the
//! turbulence-averaged PLOB bound, and a seeded Monte-Carlo sampler that
//! validates the closed forms. File formats, the CLI, and thread pools live
//! in the `oris-link` companion crate.
//!
//! ```
//! use oris_link_core::{link::{Link, LinkParams}, beam::PhaseProfile, gml, HoverStats};
//!
//! let link = Link::new(LinkParams::default()).unwrap();
//! let state = link.at_zenith_deg(30.0).unwrap();
//! let rx = state.rx_beam(PhaseProfile::Lps).unwrap();
//! let tau_p = gml::average_gml(&rx, &HoverStats::WEAK, link.params().aperture_radius_m);
//! assert!(tau_p > 0.0 && tau_p < 1.0);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod atmosphere;
pub mod beam;
mod error;
pub mod geometry;
pub mod gml;
pub mod link;
pub mod montecarlo;
pub mod numerics;
pub mod skr;

pub use error::{Error, Result};
pub use gml::HoverStats;
pub use skr::ChannelBudget;

/// Degrees to radians.
#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * (core::f64::consts::PI / 180.0)
}

/// Linear power ratio to decibels (`10·log10`); losses come out negative.
#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}
