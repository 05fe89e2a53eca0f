//! Structural invariants: arc geometry versus geodesic distance, rotation
//! behavior, estimator bounds, distance-matrix contracts.

use cqa_core::circular::{
    circular_median, circular_quantile, Angle, Arc, CircularSeries,
};
use cqa_core::dependence::{
    cqa, joint_arc_indicator_prob, rho_fl, rho_js, AcfKind, CircularAcfFeatures, CqaFeatures,
};
use cqa_core::dissimilarity::{d_cqa, d_fl, d_js, pairwise_matrix, MetricKind, MetricParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn series(vals: &[f64]) -> CircularSeries {
    CircularSeries::from_radians(vals).unwrap()
}

#[test]
fn arc_membership_equals_geodesic_ball_membership() {
    // 1e5 random (center, radius, angle) triples; the boundary case
    // d == w is excluded by the strict comparisons
    let mut rng = ChaCha8Rng::seed_from_u64(424_242);
    let mut checked = 0usize;
    while checked < 100_000 {
        let c = rng.random::<f64>() * TAU;
        let w = rng.random::<f64>() * PI;
        let theta = rng.random::<f64>() * TAU;
        let center = Angle::new(c).unwrap();
        let arc = Arc::new(center, w).unwrap();
        let d = center.geodesic(Angle::new(theta).unwrap());
        if d < w {
            assert!(arc.contains(Angle::new(theta).unwrap()), "c={c} w={w} theta={theta}");
        } else if d > w {
            assert!(!arc.contains(Angle::new(theta).unwrap()), "c={c} w={w} theta={theta}");
        } else {
            continue; // exact boundary, convention-dependent
        }
        checked += 1;
    }
}

#[test]
fn quantile_is_rotation_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tested = 0;
    while tested < 200 {
        let t = 5 + (rng.random::<u32>() % 40) as usize;
        let vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * TAU).collect();
        let s = series(&vals);
        let delta = rng.random::<f64>() * TAU;
        let rotated = s.rotated(delta);
        // the property holds whenever the rotated median is the median of
        // the rotated series (ties can move it elsewhere)
        let med_rot = circular_median(&rotated);
        if circular_median(&s).rotated(delta).geodesic(med_rot) > 1e-9 {
            continue;
        }
        for p in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let q = circular_quantile(&s, p).unwrap().rotated(delta);
            let q_rot = circular_quantile(&rotated, p).unwrap();
            assert!(
                q.geodesic(q_rot) < 1e-9,
                "p={p} delta={delta}: {} vs {}",
                q.radians(),
                q_rot.radians()
            );
        }
        tested += 1;
    }
}

#[test]
fn extreme_levels_return_unwrapped_support_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..100 {
        let t = 3 + (rng.random::<u32>() % 30) as usize;
        let vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * TAU).collect();
        let s = series(&vals);
        let med = circular_median(&s).radians();
        let lo_ref = med - PI;
        let unwrapped: Vec<f64> = vals
            .iter()
            .map(|&x| {
                let mut v = x;
                while v < lo_ref {
                    v += TAU;
                }
                while v >= lo_ref + TAU {
                    v -= TAU;
                }
                v
            })
            .collect();
        let lo = unwrapped.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = unwrapped.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let q0 = circular_quantile(&s, 0.0).unwrap();
        let q1 = circular_quantile(&s, 1.0).unwrap();
        assert!(q0.geodesic(Angle::new(lo).unwrap()) < 1e-12);
        assert!(q1.geodesic(Angle::new(hi).unwrap()) < 1e-12);
    }
}

#[test]
fn fl_and_js_are_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for _ in 0..50 {
        let t = 20 + (rng.random::<u32>() % 80) as usize;
        let vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * TAU).collect();
        let s = series(&vals);
        let delta = rng.random::<f64>() * TAU;
        let rot = s.rotated(delta);
        for lag in [1usize, 3] {
            let fl = rho_fl(&s, lag).unwrap();
            let fl_rot = rho_fl(&rot, lag).unwrap();
            assert!((fl - fl_rot).abs() < 1e-10, "FL: {fl} vs {fl_rot}");
            let js = rho_js(&s, lag).unwrap();
            let js_rot = rho_js(&rot, lag).unwrap();
            assert!((js - js_rot).abs() < 1e-12, "JS: {js} vs {js_rot}");
        }
    }
}

#[test]
fn cqa_is_rotation_invariant_when_quantiles_rotate() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut tested = 0;
    while tested < 60 {
        let t = 15 + (rng.random::<u32>() % 30) as usize;
        let vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * TAU).collect();
        let s = series(&vals);
        let delta = rng.random::<f64>() * TAU;
        let rot = s.rotated(delta);
        let med_moves = circular_median(&s)
            .rotated(delta)
            .geodesic(circular_median(&rot));
        if med_moves > 1e-9 {
            continue;
        }
        // quantile rotation can still break at arc boundaries when a point
        // sits exactly on one; random data avoids that almost surely
        for tau in [0.1, 0.5, 0.9] {
            let v = cqa(&s, tau, tau, 1, 1.0).unwrap();
            let v_rot = cqa(&rot, tau, tau, 1, 1.0).unwrap();
            assert!((v - v_rot).abs() < 1e-9, "tau={tau}: {v} vs {v_rot}");
        }
        tested += 1;
    }
}

#[test]
fn joint_prob_is_level_symmetric_on_palindromes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4040);
    for _ in 0..50 {
        let half: Vec<f64> = (0..12).map(|_| rng.random::<f64>() * TAU).collect();
        let mut vals = half.clone();
        vals.extend(half.iter().rev());
        let s = series(&vals);
        for lag in [1usize, 2, 5] {
            for (p, p2) in [(0.1, 0.9), (0.25, 0.5), (0.0, 1.0)] {
                let a = joint_arc_indicator_prob(&s, p, p2, 1.1, lag).unwrap();
                let b = joint_arc_indicator_prob(&s, p2, p, 1.1, lag).unwrap();
                assert!((a - b).abs() < 1e-15, "lag {lag}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn estimators_stay_in_unit_interval_on_random_series() {
    // 10^4 random short series through all three estimators
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..10_000 {
        let t = 5 + (rng.random::<u32>() % 26) as usize;
        let vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * TAU).collect();
        let s = series(&vals);
        let lag = 1 + (rng.random::<u32>() % 3) as usize;
        if lag + 2 > t {
            continue;
        }
        let tau = rng.random::<f64>();
        let tau2 = rng.random::<f64>();
        let r = rng.random::<f64>() * PI;
        let v = cqa(&s, tau, tau2, lag, r).unwrap();
        assert!((-1.0..=1.0).contains(&v), "cqa {v}");
        let v = rho_fl(&s, lag).unwrap();
        assert!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12, "fl {v}");
        let v = rho_js(&s, lag).unwrap();
        assert!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12, "js {v}");
    }
}

#[cfg(feature = "parallel")]
#[test]
fn thread_count_does_not_change_outputs() {
    use cqa_core::clustering::{run_multistart, ClusterConfig};

    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let data: Vec<CircularSeries> = (0..10)
        .map(|_| {
            let vals: Vec<f64> = (0..80).map(|_| rng.random::<f64>() * TAU).collect();
            series(&vals)
        })
        .collect();
    let params = MetricParams {
        lags: vec![1, 2],
        levels: vec![0.1, 0.5, 0.9],
        radius: Some(1.0),
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();

    let wide_matrix = pairwise_matrix(&data, MetricKind::Cqa, &params).unwrap();
    let narrow_matrix = single
        .install(|| pairwise_matrix(&data, MetricKind::Cqa, &params))
        .unwrap();
    assert_eq!(wide_matrix, narrow_matrix);

    let config = ClusterConfig {
        clusters: 2,
        fuzziness: 1.6,
        max_iter: 100,
        restarts: 16,
        seed: 8,
    };
    let wide = run_multistart(&wide_matrix, &config).unwrap();
    let narrow = single.install(|| run_multistart(&narrow_matrix, &config)).unwrap();
    assert_eq!(wide, narrow);
}

proptest! {
    #[test]
    fn cqa_distance_bounds_and_symmetry(
        a in prop::collection::vec(-1.0f64..=1.0, 18),
        b in prop::collection::vec(-1.0f64..=1.0, 18),
    ) {
        let lags = vec![1usize, 2];
        let levels = vec![0.1, 0.5, 0.9];
        let fa = CqaFeatures::new(lags.clone(), levels.clone(), 1.0, a).unwrap();
        let fb = CqaFeatures::new(lags, levels, 1.0, b).unwrap();
        let dab = d_cqa(&fa, &fb).unwrap();
        let dba = d_cqa(&fb, &fa).unwrap();
        prop_assert!((0.0..=1.0).contains(&dab));
        prop_assert_eq!(dab, dba);
        prop_assert_eq!(d_cqa(&fa, &fa).unwrap(), 0.0);
    }

    #[test]
    fn acf_distance_bounds_and_symmetry(
        a in prop::collection::vec(-1.0f64..=1.0, 3),
        b in prop::collection::vec(-1.0f64..=1.0, 3),
    ) {
        let lags = vec![1usize, 2, 3];
        let fa = CircularAcfFeatures { kind: AcfKind::FisherLee, lags: lags.clone(), values: a.clone() };
        let fb = CircularAcfFeatures { kind: AcfKind::FisherLee, lags: lags.clone(), values: b.clone() };
        let dab = d_fl(&fa, &fb).unwrap();
        prop_assert!((0.0..=1.0).contains(&dab));
        prop_assert_eq!(dab, d_fl(&fb, &fa).unwrap());
        prop_assert_eq!(d_fl(&fa, &fa).unwrap(), 0.0);

        let ja = CircularAcfFeatures { kind: AcfKind::JammalamadakaSarma, lags: lags.clone(), values: a };
        let jb = CircularAcfFeatures { kind: AcfKind::JammalamadakaSarma, lags, values: b };
        let djs = d_js(&ja, &jb).unwrap();
        prop_assert!((0.0..=1.0).contains(&djs));
        // kind mismatch is rejected
        prop_assert!(d_fl(&ja, &fb).is_err());
    }

    #[test]
    fn pairwise_matrix_contract(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed % 4) as usize;
        let data: Vec<CircularSeries> = (0..n)
            .map(|_| {
                let t = 12 + (rng.random::<u32>() % 20) as usize;
                let vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * TAU).collect();
                series(&vals)
            })
            .collect();
        let params = MetricParams { lags: vec![1, 2], levels: vec![0.1, 0.5, 0.9], radius: Some(1.2) };
        for kind in [MetricKind::Cqa, MetricKind::Fl, MetricKind::Js, MetricKind::Qa] {
            let m = pairwise_matrix(&data, kind, &params).unwrap();
            for i in 0..n {
                prop_assert_eq!(m.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(m.get(i, j), m.get(j, i));
                    prop_assert!(m.get(i, j) >= 0.0);
                    if kind != MetricKind::Qa {
                        prop_assert!(m.get(i, j) <= 1.0);
                    }
                }
            }
        }
    }
}
