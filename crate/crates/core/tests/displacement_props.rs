use census_core::displacement::oracle::verify_laws;
use census_core::displacement::{
    disp_ell, disp_loxo, disp_loxo_bounds, disp_para, displacement, psi_asymptotic, psi_exact, ConjClassInvariants,
};
use census_core::hyperbolic::{dist_h2, dist_to_axis, Horoball, Isometry2, UH2Point};
use num_complex::Complex64;
use proptest::prelude::*;

fn class() -> impl Strategy<Value = ConjClassInvariants> {
    prop_oneof![
        (0.05f64..5.0, -3.1f64..3.1).prop_map(|(l, t)| ConjClassInvariants::loxodromic(l, t).unwrap()),
        (0.05f64..5.0).prop_map(|l| ConjClassInvariants::parabolic(l).unwrap()),
        (0.05f64..std::f64::consts::PI).prop_map(|t| ConjClassInvariants::elliptic(t).unwrap()),
    ]
}

fn isometry() -> impl Strategy<Value = Isometry2> {
    (-3.0f64..3.0, -2.0f64..2.0, 0.0f64..std::f64::consts::PI).prop_map(|(t, a, r)| {
        Isometry2::translation(t).compose(&Isometry2::dilation(a)).compose(&Isometry2::rotation(r))
    })
}

#[test]
fn thousand_samples_per_law_match_matrices() {
    let report = verify_laws(1000, 1000, 2024).unwrap();
    for law in &report.laws {
        assert_eq!(law.samples, 1000);
        assert!(law.max_rel_error <= 1e-9, "{law:?}");
    }
    assert_eq!(report.violations(), 0, "{:?}", report.bounds);
}

proptest! {
    #[test]
    fn laws_increase_in_s(inv in class(), s in 0.0f64..8.0, ds in 1e-3f64..2.0) {
        prop_assert!(displacement(&inv, s + ds).unwrap() > displacement(&inv, s).unwrap());
    }

    #[test]
    fn psi_increases_in_t(inv in class(), extra in 0.0f64..10.0, dt in 1e-3f64..2.0) {
        let t = inv.min_displacement() + 1e-3 + extra;
        prop_assert!(psi_exact(&inv, t + dt).unwrap() > psi_exact(&inv, t).unwrap());
        prop_assert!(psi_asymptotic(&inv, t + dt).unwrap() > psi_asymptotic(&inv, t).unwrap());
    }

    #[test]
    fn psi_inverts_the_law(inv in class(), s in 0.0f64..8.0) {
        let t = displacement(&inv, s).unwrap();
        let back = displacement(&inv, psi_exact(&inv, t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 1e-10 * (1.0 + t));
    }

    #[test]
    fn tau_controls_the_asymptotics(inv in class()) {
        let t = 60.0;
        let lhs = (psi_asymptotic(&inv, t).unwrap() - t / 2.0).exp();
        prop_assert!((lhs * inv.tau() - 1.0).abs() < 1e-12);
        let exact = (psi_exact(&inv, t).unwrap() - t / 2.0).exp();
        prop_assert!((exact * inv.tau() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tau_matches_the_half_length_at_zero_holonomy(l in 0.05f64..5.0) {
        let inv = ConjClassInvariants::loxodromic(l, 0.0).unwrap();
        prop_assert!((inv.tau() - (l / 2.0).sinh()).abs() <= 1e-12 * (1.0 + inv.tau()));
    }

    #[test]
    fn bounds_sandwich_the_law(l in 0.05f64..5.0, theta in -3.1f64..3.1, s in 0.0f64..10.0) {
        let (lo, hi) = disp_loxo_bounds(s, l).unwrap();
        let d = disp_loxo(s, Complex64::new(l, theta)).unwrap();
        prop_assert!(lo <= d * (1.0 + 1e-12) && d <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn loxodromic_law_with_library_axis_distance(h in isometry(), l in 0.1f64..4.0, re in -4.0f64..4.0, lim in -2.0f64..2.0) {
        let g = Isometry2::dilation(l).conjugate_by(&h);
        let x = UH2Point::new(re, lim.exp()).unwrap();
        let s = dist_to_axis(x, &g).unwrap();
        let oracle = dist_h2(x, g.apply(x)).unwrap();
        let law = disp_loxo(s, Complex64::new(l, 0.0)).unwrap();
        prop_assert!((law - oracle).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn parabolic_law_with_library_horoball(h in isometry(), c in 0.3f64..3.0, height in 0.3f64..3.0, re in -4.0f64..4.0, lim in -3.0f64..1.0) {
        let g = Isometry2::translation(c).conjugate_by(&h);
        let ball = Horoball::new(census_core::hyperbolic::BoundaryPoint::Infinity, height).unwrap().image(&h);
        let data = census_core::hyperbolic::parabolic_data(&g, ball).unwrap();
        let x = h.apply(UH2Point::new(re, lim.exp()).unwrap());
        let s = ball.signed_distance(x);
        prop_assume!(s >= 0.0);
        let oracle = dist_h2(x, g.apply(x)).unwrap();
        let law = disp_para(s, data.length).unwrap();
        prop_assert!((law - oracle).abs() <= 1e-8 * oracle, "law {} oracle {}", law, oracle);
    }

    #[test]
    fn elliptic_law_against_rotation(phi in 0.05f64..1.5, s in 0.1f64..5.0, dir in 0.0f64..6.28) {
        let x = census_core::hyperbolic::point_at(UH2Point::I, dir, s);
        let oracle = dist_h2(x, Isometry2::rotation(phi).apply(x)).unwrap();
        prop_assert!((disp_ell(s, 2.0 * phi).unwrap() - oracle).abs() <= 1e-10 * oracle);
    }
}
