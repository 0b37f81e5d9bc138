mod common;

use std::f64::consts::{PI, TAU};

use common::{gap_gcd, random_positive_state, random_real_state, random_state};
use majorana::assignment::matched_max_distance;
use majorana::classical::{solve_thomson, solve_toth, thomson_cost, toth_cost};
use majorana::geometric::{find_cpps, geometric_measure, overlap, overlap_from_points, sphere_mean_g2};
use majorana::majorana::{
    normalization_constant, points_to_state, raw_norm_sqr, rotate_points, rotate_y_via_points, state_to_points,
    y_rotation,
};
use majorana::state::make_dicke;
use majorana::{CppSet, InnerConfig, SearchConfig, SpherePoint, SymmetricState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<SpherePoint> {
    (0..n)
        .map(|_| SpherePoint::new((rng.gen::<f64>() * 2.0 - 1.0).acos(), rng.gen::<f64>() * TAU))
        .collect()
}

fn z_rotation(a: f64) -> [[f64; 3]; 3] {
    [[a.cos(), -a.sin(), 0.0], [a.sin(), a.cos(), 0.0], [0.0, 0.0, 1.0]]
}

fn matmul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

fn e_g(state: &SymmetricState) -> f64 {
    geometric_measure(state).expect("analysis")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rotations_preserve_norm(seed in any::<u64>(), n in 1usize..=12, a in -10.0f64..10.0) {
        let s = random_state(n, &mut rng(seed));
        prop_assert!((s.rotate_z(a).norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((s.rotate_y(a).norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_symmetry_iff_gap_condition(seed in any::<u64>(), n in 2usize..=12, stride in 1usize..=6) {
        let mut r = rng(seed);
        let stride = stride.min(n);
        let s = random_positive_state(n, stride, &mut r).rotate_z(r.gen::<f64>() * TAU);
        let g = gap_gcd(&s.support());
        for m in 2..=n {
            let invariant = s.fidelity(&s.rotate_z(TAU / m as f64)).unwrap() > 1.0 - 1e-12;
            prop_assert_eq!(invariant, g % m == 0, "m = {}, support {:?}", m, s.support());
        }
        let expected = if (2..=n).contains(&g) { g } else { 1 };
        prop_assert_eq!(s.classify().rotational_order, expected);
    }

    #[test]
    fn rotate_y_agrees_with_point_rotation(seed in any::<u64>(), n in 1usize..=12, a in -4.0f64..4.0) {
        let s = random_state(n, &mut rng(seed));
        let via_points = rotate_y_via_points(&s, a).unwrap();
        prop_assert!(s.rotate_y(a).fidelity(&via_points).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn points_round_trip(seed in any::<u64>(), n in 2usize..=12) {
        let pts = random_points(n, &mut rng(seed));
        let (state, _) = points_to_state(&pts, n).unwrap();
        let back = state_to_points(&state).unwrap();
        prop_assert!(matched_max_distance(&pts, &back.points) < 1e-6);
    }

    #[test]
    fn normalization_constant_is_raw_norm(seed in any::<u64>(), n in 1usize..=10) {
        let pts = random_points(n, &mut rng(seed));
        let k = normalization_constant(&pts);
        let raw = raw_norm_sqr(&pts);
        prop_assert!((k - raw).abs() <= 1e-8 * raw.max(1.0), "K = {}, raw = {}", k, raw);
    }

    #[test]
    fn overlap_forms_agree(seed in any::<u64>(), n in 1usize..=12) {
        let mut r = rng(seed);
        let s = random_state(n, &mut r);
        let dist = state_to_points(&s).unwrap();
        for sigma in random_points(4, &mut r) {
            prop_assert!((overlap(&s, &sigma) - overlap_from_points(&dist, &sigma)).abs() < 1e-9);
        }
    }

    #[test]
    fn conjugation_closed_points_give_real_state(seed in any::<u64>(), pairs in 0usize..=5, lone in 0usize..=3) {
        prop_assume!(2 * pairs + lone >= 1);
        let mut r = rng(seed);
        let mut pts = Vec::new();
        for p in random_points(pairs, &mut r) {
            pts.push(p);
            pts.push(p.conjugate());
        }
        for _ in 0..lone {
            let phi = if r.gen_bool(0.5) { 0.0 } else { PI };
            pts.push(SpherePoint::new(r.gen::<f64>() * PI, phi));
        }
        let (s, _) = points_to_state(&pts, pts.len()).unwrap();
        prop_assert!(s.classify().is_real, "{:?}", s.coeffs());
    }

    #[test]
    fn sphere_mean_is_inverse_dimension(seed in any::<u64>(), n in 1usize..=12) {
        let s = random_state(n, &mut rng(seed));
        prop_assert!((sphere_mean_g2(&s, n + 1) - 1.0 / (n as f64 + 1.0)).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn joint_point_rotation_keeps_entanglement(seed in any::<u64>(), n in 2usize..=10, a in 0.0f64..TAU, b in 0.0f64..PI) {
        let pts = random_points(n, &mut rng(seed));
        let moved = rotate_points(&pts, matmul(z_rotation(a), y_rotation(b)));
        let e1 = e_g(&points_to_state(&pts, n).unwrap().0);
        let e2 = e_g(&points_to_state(&moved, n).unwrap().0);
        prop_assert!((e1 - e2).abs() < 1e-8, "{} vs {}", e1, e2);
    }

    #[test]
    fn entanglement_is_rotation_invariant(seed in any::<u64>(), n in 2usize..=10, a in 0.0f64..TAU, b in 0.0f64..PI) {
        let s = random_state(n, &mut rng(seed));
        let e = e_g(&s);
        prop_assert!((e - e_g(&s.rotate_z(a))).abs() < 1e-8);
        prop_assert!((e - e_g(&s.rotate_y(b))).abs() < 1e-8);
        prop_assert!(e <= (n as f64 + 1.0).log2() + 1e-9);
    }

    #[test]
    fn real_state_cpps_are_reflection_closed(seed in any::<u64>(), n in 2usize..=10) {
        let s = random_real_state(n, &mut rng(seed));
        let a = find_cpps(&s, &InnerConfig::default()).unwrap();
        if let CppSet::Discrete { points } = &a.cpps {
            for p in points {
                let q = p.conjugate();
                prop_assert!(points.iter().any(|x| x.angular_distance(&q) < 1e-5), "{:?}", points);
            }
        }
    }
}

#[test]
fn dicke_index_is_recovered() {
    for n in 1..=12 {
        for k in 0..=n {
            assert_eq!(make_dicke(n, k).unwrap().classify().dicke_index, Some(k));
        }
    }
}

#[test]
fn classical_costs_recompute_exactly() {
    let cfg = SearchConfig::default();
    for n in [3, 5, 8] {
        let c = solve_thomson(n, &cfg).unwrap();
        assert_eq!(c.thomson_cost, thomson_cost(&c.points));
        assert_eq!(c.toth_cost, toth_cost(&c.points));
    }
}

#[test]
fn toth_five_is_degenerate_but_cost_is_not() {
    let a = solve_toth(5, &SearchConfig { seed: 1, ..SearchConfig::default() }).unwrap();
    let b = solve_toth(5, &SearchConfig { seed: 2, ..SearchConfig::default() }).unwrap();
    assert!((a.toth_cost - b.toth_cost).abs() < 1e-8);
    assert!((a.toth_cost - 2f64.sqrt()).abs() < 1e-8);
}
