use oris_link_core::beam::PhaseProfile;
use oris_link_core::gml::average_gml;
use oris_link_core::link::{Link, LinkParams};
use oris_link_core::numerics::gauss_laguerre;
use oris_link_core::skr::focus_grid;
use oris_link_core::{to_db, HoverStats};

fn links() -> (Link, Link) {
    let mut vac = LinkParams::default();
    vac.atmosphere.vacuum_mode = true;
    (Link::new(LinkParams::default()).unwrap(), Link::new(vac).unwrap())
}

#[test]
fn qps_and_lps_lose_about_a_tenth_of_a_db_to_turbulence_at_68_deg() {
    let (turb, vac) = links();
    let a = turb.params().aperture_radius_m;
    for p in [PhaseProfile::Qps { focus: turb.d2() }, PhaseProfile::Lps] {
        let g =
            |l: &Link| to_db(average_gml(&l.at_zenith_deg(68.0).unwrap().rx_beam(p).unwrap(), &HoverStats::NONE, a));
        let diff = (g(&turb) - g(&vac)).abs();
        assert!((diff - 0.1).abs() <= 0.05, "{}: {diff} dB", p.name());
    }
}

#[test]
fn weak_pe_prefers_focusing_at_every_angle() {
    let (link, _) = links();
    let rule = gauss_laguerre(180).unwrap();
    let grid = focus_grid(link.d2(), 60);
    for deg in (0..=68).step_by(4) {
        let s = link.at_zenith_deg(deg as f64).unwrap();
        let r = s.optimize_focus(&HoverStats::WEAK, &grid, true, &rule).unwrap();
        assert!(r.f_opt > link.min_focus(), "{deg} deg: f_opt = {}", r.f_opt);
    }
}

#[test]
fn vacuum_fps_spot_is_far_below_aperture() {
    let (_, vac) = links();
    let s = vac.at_zenith_deg(68.0).unwrap();
    let rx = s.rx_beam(PhaseProfile::Fps).unwrap();
    let a = vac.params().aperture_radius_m;
    assert!(rx.w_rx_x < 0.1 * a && rx.w_rx_y < 0.1 * a);
}

#[test]
fn footprint_at_68_deg_overfills_the_surface() {
    let (link, _) = links();
    let s = link.at_zenith_deg(68.0).unwrap();
    let b = s.beam;
    let sin_ti = s.geometry.theta_i.sin();
    assert_eq!(b.w_iy, b.w_d1);
    assert!((b.w_ix - b.w_d1 / sin_ti).abs() <= 1e-12 * b.w_ix);
    // far-field spread alone already exceeds the 1 m side
    assert!(b.w_d1 >= link.params().theta_div_rad * s.geometry.d1);
    assert!(!b.fits_oris);
}
