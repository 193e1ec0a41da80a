use std::f64::consts::PI;

use isocomp_core::barriers::{
    barrier_bounds, equidistant_perimeter_bound, equidistant_volume_bound, geometric_mean_bound, Side,
};
use isocomp_core::comparison::{cos_sin_k, jacobian, model_ball_volume, model_sphere_area, s_lambda, unit_ball_volume};
use isocomp_core::epsreg::{delta_for_epsilon, euclidean_constant, radius_cap, volume_lower_bound_from_profile};
use isocomp_core::numeric::{integrate, log_grid};
use isocomp_core::profile::{check_viscosity_inequality, cone_profile, generalized_profile};
use isocomp_core::rearrangement::{
    distribution_function, monotone_rearrangement, p_eigenvalue_radial, SampledFunction, SolverOptions,
};
use isocomp_core::spaces::{ricci_warped, Warp};
use isocomp_core::ModelSpace;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn wronskian(k in prop::sample::select(vec![-4.0, -1.0, 0.0, 1.0, 4.0]), r in 0.0..3.0f64) {
        let (c, s) = cos_sin_k(k, r);
        // cos_k · sin_k' − cos_k' · sin_k = c² + k s²
        let w = c * c + k * s * s;
        prop_assert!((w - 1.0).abs() <= 1e-10 * (1.0 + (k * s * s).abs()));
    }

    #[test]
    fn s_lambda_solves_its_ode(k in -3.0..3.0f64, d in -2.0..2.0f64, r in 0.1..2.0f64) {
        let h = 1e-4;
        let f = |x: f64| s_lambda(k, -d, x).value;
        let second = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
        prop_assert!((second + k * f(r)).abs() < 1e-5);
        prop_assert_eq!(s_lambda(k, -d, 0.0).value, 1.0);
        prop_assert!((s_lambda(k, -d, 0.0).derivative - d).abs() < 1e-15);
    }

    #[test]
    fn jacobian_nonnegative(h in -5.0..5.0f64, k in -3.0..3.0f64, n in 1.5..8.0f64, r in 0.0..6.0f64) {
        prop_assert!(jacobian(h, k, n, r).unwrap() >= 0.0);
        prop_assert_eq!(jacobian(h, k, n, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn ball_volume_derivative_is_area(n in 2.0..7.0f64, k in -2.0..1.0f64, frac in 0.05..0.9f64) {
        let r = if k > 0.0 { frac * PI / k.sqrt() } else { 3.0 * frac };
        let h = 1e-5 * r;
        let d = (model_ball_volume(n, k, r + h).unwrap() - model_ball_volume(n, k, r - h).unwrap()) / (2.0 * h);
        prop_assert!(rel(d, model_sphere_area(n, k, r).unwrap()) < 1e-6);
    }

    #[test]
    fn cone_balls_below_euclidean(theta in 0.01..1.0f64, n in 2.0..9.0f64, r in 0.01..50.0f64) {
        let cone = ModelSpace::cone(theta, n).unwrap();
        let v = cone.ball_volume(r).unwrap();
        prop_assert!(v <= model_ball_volume(n, 0.0, r).unwrap() * (1.0 + 1e-14));
        prop_assert!(rel(v / model_ball_volume(n, 0.0, r).unwrap(), theta) < 1e-12);
    }

    #[test]
    fn cone_homogeneity(theta in 0.01..1.0f64, n in 2.0..10.0f64, v in 1e-4..1e4f64, lambda in 1e-3..1e3f64) {
        let c = cone_profile(theta, n).unwrap();
        let a = (n - 1.0) / n;
        prop_assert!(rel(c.eval(lambda * v), lambda.powf(a) * c.eval(v)) < 1e-12);
    }

    #[test]
    fn geometric_mean_is_sharp_bound(theta in 0.05..1.0f64, n in 2.0..7.0f64, radius in 0.2..5.0f64, s in 0.0..1.0f64) {
        // a Euclidean ball and any admissible c for avr = theta
        let w = unit_ball_volume(n);
        let (per, vol) = (n * w * radius.powf(n - 1.0), w * radius.powf(n));
        let cert = barrier_bounds(n, per, vol, Some(theta)).unwrap();
        let c = cert.c_lo + s * (cert.c_hi - cert.c_lo);
        prop_assert!(per >= geometric_mean_bound(n, vol, theta, c).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn volume_bound_integrates_perimeter(c in 0.1..3.0f64, k in -1.0..0.5f64, n in 2.0..6.0f64, t in 0.05..2.0f64, outward in any::<bool>()) {
        let side = if outward { Side::Outward } else { Side::Inward };
        let per = 2.5;
        let vol = equidistant_volume_bound(per, c, k, n, t, side).unwrap();
        let q = integrate(|s| equidistant_perimeter_bound(per, c, k, n, s, side).unwrap(), 0.0, t, 1e-13, 1e-12);
        prop_assert!((vol - q.value).abs() <= 1e-6 * vol.abs().max(1e-6));
        let h = 1e-5;
        let at = |s: f64| equidistant_perimeter_bound(per, c, k, n, s, side).unwrap();
        // skip the difference quotient across the focal point, where J has a kink
        if (at(t - 2.0 * h) > 0.0) == (at(t + 2.0 * h) > 0.0) {
            let d = (equidistant_volume_bound(per, c, k, n, t + h, side).unwrap()
                - equidistant_volume_bound(per, c, k, n, t - h, side).unwrap()) / (2.0 * h);
            let p = equidistant_perimeter_bound(per, c, k, n, t, side).unwrap();
            prop_assert!((d - p).abs() <= 1e-6 * p.max(1e-3));
        }
    }

    #[test]
    fn inward_bound_vanishes_past_focal_distance(c in 0.1..5.0f64, n in 2.0..8.0f64, extra in 0.0..3.0f64) {
        let t = (n - 1.0) / c * (1.0 + extra);
        prop_assert_eq!(equidistant_perimeter_bound(1.0, c, 0.0, n, t, Side::Inward).unwrap(), 0.0);
    }

    #[test]
    fn ratio_bound_decreasing_in_delta(n in 2.0..10.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let e = euclidean_constant(n);
        let (lo, hi) = (a.min(b) * 0.999 * e, a.max(b) * 0.999 * e);
        prop_assume!(hi > lo);
        let r = 0.5 * radius_cap(n, 2.0);
        let x = volume_lower_bound_from_profile(lo, n, 2.0, r).unwrap().ratio_bound;
        let y = volume_lower_bound_from_profile(hi, n, 2.0, r).unwrap().ratio_bound;
        prop_assert!(y < x);
        prop_assert!((0.0..=1.0).contains(&y));
        // no dependence on r or v
        let other = volume_lower_bound_from_profile(hi, n, 50.0, 0.01).unwrap().ratio_bound;
        prop_assert_eq!(y, other);
    }

    #[test]
    fn epsilon_round_trip(eps in 1e-8..0.9999f64, n in 2.0..20.0f64) {
        let d = delta_for_epsilon(eps, n).unwrap();
        let b = volume_lower_bound_from_profile(d, n, 1.0, 0.1 * radius_cap(n, 1.0)).unwrap();
        prop_assert!((b.ratio_bound - (1.0 - eps)).abs() <= 1e-12);
    }
}

proptest! {
    // each case searches a 20301-point simplex
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn union_below_min(t1 in 0.05..1.0f64, t2 in 0.05..1.0f64, t3 in 0.05..1.0f64, n in 2.0..5.0f64, v in 0.01..100.0f64) {
        let parts = [cone_profile(t1, n).unwrap(), cone_profile(t2, n).unwrap(), cone_profile(t3, n).unwrap()];
        let g = generalized_profile(&parts, v, 200).unwrap().value;
        let m = parts.iter().map(|p| p.eval(v)).fold(f64::INFINITY, f64::min);
        prop_assert!(g <= m * (1.0 + 1e-12));
        // cone profiles are strictly subadditive, so the infimum is a single part
        prop_assert!(rel(g, m) < 1e-12);
    }
}

#[test]
fn subadditivity_of_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [2.0, 3.0, 5.5] {
        let e = (n - 1.0) / n;
        for _ in 0..10_000 {
            let a: f64 = rng.gen_range(1e-6..1e6);
            let b: f64 = rng.gen_range(1e-6..1e6);
            assert!((a + b).powf(e) <= (a.powf(e) + b.powf(e)) * (1.0 + 1e-15), "{a} {b} {n}");
        }
    }
}

#[test]
fn bishop_gromov_on_model_spaces() {
    let spaces = [
        (ModelSpace::cone(0.4, 3.0).unwrap(), 0.0),
        (ModelSpace::space_form(1.0, 2.0).unwrap(), 1.0),
        (ModelSpace::space_form(-1.0, 4.0).unwrap(), -3.0),
        (ModelSpace::space_form(0.0, 2.5).unwrap(), 0.0),
    ];
    for (space, k_ricci) in spaces {
        let n = space.dim().unwrap();
        let k_sec = k_ricci / (n - 1.0);
        let top = if k_sec > 0.0 { 0.99 * PI / k_sec.sqrt() } else { 20.0 };
        let mut prev = f64::INFINITY;
        for r in log_grid(1e-2, top, 80) {
            let ratio = space.ball_volume(r).unwrap() / model_ball_volume(n, k_sec, r).unwrap();
            assert!(ratio <= prev * (1.0 + 1e-12), "{space:?} r={r}");
            prev = ratio;
            let h = 1e-6 * r;
            let d = (space.ball_volume(r + h).unwrap() - space.ball_volume(r - h).unwrap()) / (2.0 * h);
            let p = space.ball_perimeter(r).unwrap();
            assert!(rel(d, p) < 1e-6, "{space:?} r={r}: {d} vs {p}");
        }
    }
}

#[test]
fn smoothed_cone_ric_rr_nonnegative() {
    let w = Warp::SmoothedCone { eps0: 0.3, length: 2.0 };
    for t in [-3.0, -1.0, 0.0, 0.5, 2.0] {
        for r in [0.01, 0.1, 0.5, 1.0, 4.0] {
            let ric = ricci_warped(&w, t, r, 1e-4).unwrap();
            assert!(ric.ric_rr >= -1e-6, "t={t} r={r}: {ric:?}");
        }
    }
}

#[test]
fn viscosity_margin_on_cones() {
    for (theta, n) in [(1.0, 2.0), (0.3, 3.0), (0.05, 8.0)] {
        let c = cone_profile(theta, n).unwrap().sampled_on(&log_grid(0.01, 100.0, 50)).unwrap();
        let r = check_viscosity_inequality(&c, 1e-6).unwrap();
        assert!(r.pass && r.worst_violation.abs() <= 1e-6, "{r:?}");
    }
}

#[test]
fn equimeasurability_at_random_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let len = rng.gen_range(1..300);
        let nodes = (0..len).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..5.0)).collect();
        let weights = (0..len).map(|_| rng.gen_range(0.1..2.0)).collect();
        let u = SampledFunction::new(nodes, values, weights, rng.gen_range(1.0..5.0)).unwrap();
        let mut levels: Vec<f64> = (0..50).map(|_| rng.gen_range(-0.5..5.5)).collect();
        levels.sort_by(f64::total_cmp);
        let star = monotone_rearrangement(&u).unwrap();
        assert_eq!(
            distribution_function(&u, &levels).unwrap().points,
            star.distribution(&levels).unwrap().points
        );
        assert!(star.values.windows(2).all(|w| w[1] <= w[0]));
        // rearranging u* (one cell per step) gives u* back
        let mut prev = 0.0;
        let cells: Vec<f64> = star
            .masses
            .iter()
            .map(|&m| {
                let w = m - prev;
                prev = m;
                w
            })
            .collect();
        let again = SampledFunction::new(star.breaks.clone(), star.values.clone(), cells, u.n).unwrap();
        let twice = monotone_rearrangement(&again).unwrap();
        assert_eq!(twice.values, star.values);
        for (a, b) in twice.breaks.iter().zip(&star.breaks) {
            assert!(rel(*a, *b) < 1e-12);
        }
    }
}

#[test]
fn eigenvalue_power_law_two_decades() {
    let opts = SolverOptions { grid_points: 4000, ..SolverOptions::default() };
    for (n, p) in [(3.0, 2.0), (2.0, 1.5), (5.0, 4.0)] {
        let w = unit_ball_volume(n);
        let scaled = |v: f64| {
            let r = (v / w).powf(1.0 / n);
            p_eigenvalue_radial(n, p, r, 1.0, &opts).unwrap().lambda * v.powf(p / n)
        };
        let c = scaled(1.0);
        for v in [0.1, 0.37, 10.0, 100.0] {
            assert!(rel(scaled(v), c) < 1e-6, "N={n} p={p} v={v}");
        }
    }
}
