use oris_link_core::beam::PhaseProfile;
use oris_link_core::gml::{average_gml, conditional_gml};
use oris_link_core::link::{Link, LinkParams};
use oris_link_core::numerics::{erf, erf_diff};
use oris_link_core::skr::{plob_average_exact, plob_pointwise, ChannelBudget};
use oris_link_core::HoverStats;
use proptest::prelude::*;

fn link() -> Link {
    Link::new(LinkParams::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erf_is_monotone(a in -6.0f64..6.0, d in 1e-6f64..3.0) {
        prop_assert!(erf(a + d) >= erf(a));
    }

    #[test]
    fn erf_diff_matches_plain_difference(p in -3.0f64..3.0, q in -3.0f64..3.0) {
        prop_assert!((erf_diff(p, q) - (erf(p) - erf(q))).abs() < 1e-14);
    }

    #[test]
    fn plob_grows_with_transmittance(t in 1e-6f64..0.9, d in 1e-6f64..0.09) {
        prop_assert!(plob_pointwise(t + d).unwrap() > plob_pointwise(t).unwrap());
    }

    #[test]
    fn averaged_plob_is_above_pointwise_at_mean(c in 1e-3f64..0.05, s2 in 1e-3f64..0.3) {
        // -log2(1 - cI) is convex in I; ranges keep the truncated tail cI >= 1 negligible
        let b = ChannelBudget { tau_eff: 1.0, tau_l: 1.0, tau_p: c, sigma_r_sq: s2 };
        let avg = plob_average_exact(&b).unwrap();
        prop_assert!(avg >= plob_pointwise(c).unwrap() * (1.0 - 1e-9));
    }

    #[test]
    fn gml_stays_in_unit_interval(deg in 0.0f64..75.0, mx in 0.0f64..0.5, sx in 0.0f64..0.5) {
        let link = link();
        let s = link.at_zenith_deg(deg).unwrap();
        let a = link.params().aperture_radius_m;
        let h = HoverStats { mu_x: mx, mu_y: mx, sigma_x: sx, sigma_y: sx };
        for p in [PhaseProfile::Lps, PhaseProfile::Qps { focus: 2.0 * link.d2() }, PhaseProfile::Fps] {
            let g = average_gml(&s.rx_beam(p).unwrap(), &h, a);
            prop_assert!((0.0..=1.0).contains(&g));
        }
    }

    #[test]
    fn gml_drops_with_offset(deg in 0.0f64..70.0, x in 0.0f64..0.2, dx in 1e-3f64..0.2) {
        let link = link();
        let rx = link.at_zenith_deg(deg).unwrap().rx_beam(PhaseProfile::Lps).unwrap();
        let a = link.params().aperture_radius_m;
        prop_assert!(conditional_gml(x + dx, 0.0, &rx, a) <= conditional_gml(x, 0.0, &rx, a));
    }

    #[test]
    fn qps_at_min_focus_is_lps(deg in 0.0f64..80.0) {
        let link = link();
        let s = link.at_zenith_deg(deg).unwrap();
        let lps = s.rx_beam(PhaseProfile::Lps).unwrap();
        let qps = s.rx_beam(PhaseProfile::Qps { focus: link.min_focus() }).unwrap();
        prop_assert_eq!(lps.w_rx_x.to_bits(), qps.w_rx_x.to_bits());
        prop_assert_eq!(lps.w_rx_y.to_bits(), qps.w_rx_y.to_bits());
    }

    #[test]
    fn slant_distance_grows_with_zenith(deg in 0.0f64..80.0, d in 0.01f64..5.0) {
        let link = link();
        let a = link.at_zenith_deg(deg).unwrap().geometry.d1;
        let b = link.at_zenith_deg(deg + d).unwrap().geometry.d1;
        prop_assert!(b > a);
    }
}

#[test]
fn zenith_at_right_angle_is_rejected() {
    assert!(link().at_zenith_deg(90.0).is_err());
}
