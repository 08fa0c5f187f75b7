//! Word-expansion balls in Γ(2) against a direct search over integer matrices.

use std::collections::BTreeSet;

use census_core::groups::{matrix_ball_enumerate, BallConfig, GroupSpec};
use census_core::hyperbolic::ExactIsometry;
use proptest::prelude::*;

/// All `±[[a,b],[c,d]]` in SL(2, Z), congruent to the identity mod 2, with
/// `a² + b² + c² + d² ≤ 2 cosh R` (that is, `d(i, γi) ≤ R`).
fn congruence_oracle(radius: f64) -> BTreeSet<[i64; 4]> {
    let bound = 2.0 * radius.cosh();
    let limit = bound.sqrt().floor() as i64;
    let mut out = BTreeSet::new();
    let canon = |m: [i64; 4]| {
        let first = m.iter().copied().find(|x| *x != 0).unwrap();
        if first < 0 { m.map(|x| -x) } else { m }
    };
    for a in -limit..=limit {
        for b in -limit..=limit {
            for c in -limit..=limit {
                let partial = (a * a + b * b + c * c) as f64;
                if partial > bound {
                    continue;
                }
                let ds: Vec<i64> = if a != 0 {
                    if (1 + b * c) % a != 0 {
                        continue;
                    }
                    vec![(1 + b * c) / a]
                } else if b * c == -1 {
                    (-limit..=limit).collect()
                } else {
                    continue;
                };
                for d in ds {
                    let m = [a, b, c, d];
                    let norm = (a * a + b * b + c * c + d * d) as f64;
                    let congruent = (a - 1) % 2 == 0 && b % 2 == 0 && c % 2 == 0 && (d - 1) % 2 == 0;
                    if norm <= bound && congruent {
                        out.insert(canon(m));
                    }
                }
            }
        }
    }
    out
}

fn as_set(radius: f64, config: &BallConfig) -> BTreeSet<[i64; 4]> {
    matrix_ball_enumerate(&GroupSpec::gamma2(), radius, config)
        .unwrap()
        .elements
        .into_iter()
        .map(|e| match e.element {
            ExactIsometry::Small(m) => m,
            ExactIsometry::Big(_) => panic!("unexpected big entry"),
        })
        .collect()
}

#[test]
fn word_expansion_matches_congruence_search() {
    let config = BallConfig::default();
    for r in [0.5, 2.0, 3.5, 5.0, 6.3, 8.0, 9.5, 10.5] {
        let oracle = congruence_oracle(r);
        let ball = as_set(r, &config);
        assert_eq!(ball.len(), oracle.len(), "R = {r}");
        assert_eq!(ball, oracle, "R = {r}");
    }
}

#[test]
fn radius_five_count() {
    assert_eq!(congruence_oracle(5.0).len(), 73);
}

#[test]
fn zero_margin_still_matches() {
    // The default margin is generous; even without it the expansion stays exact here.
    let config = BallConfig { margin: 0.0, ..BallConfig::default() };
    for r in [4.0, 7.5, 9.0] {
        assert_eq!(as_set(r, &config), congruence_oracle(r), "R = {r}");
    }
}

#[test]
fn growth_slope_is_one() {
    let ball = matrix_ball_enumerate(&GroupSpec::gamma2(), 12.0, &BallConfig::default()).unwrap();
    let xs: Vec<f64> = (6..=12).map(|r| r as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&r| (ball.within(r).count() as f64).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_are_nested_and_symmetric(r1 in 0.0f64..7.0, dr in 0.0f64..2.0) {
        let config = BallConfig::default();
        let small = matrix_ball_enumerate(&GroupSpec::gamma2(), r1, &config).unwrap();
        let large = matrix_ball_enumerate(&GroupSpec::gamma2(), r1 + dr, &config).unwrap();
        for e in &small.elements {
            prop_assert!(large.contains(&e.element));
        }
        for e in &large.elements {
            prop_assert!(large.contains(&e.element.inverse()));
            prop_assert!(e.element.is_identity_mod(2));
        }
    }
}
