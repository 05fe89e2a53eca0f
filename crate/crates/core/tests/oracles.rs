//! Estimator checks against independently coded brute-force oracles.
//!
//! Every oracle here re-derives its quantity straight from the defining
//! formulas (explicit counting loops, literal sine sums, textbook
//! contingency formulas) without touching the library's internals.

use cqa_core::circular::{circular_median, circular_quantile, Angle, CircularSeries};
use cqa_core::dependence::{cqa, qa, qa_features, rho_fl, rho_js};
use cqa_core::dissimilarity::d_qa;
use cqa_core::evaluation::{arif, jif, GroundTruth};
use cqa_core::simulation::{GeneratorSpec, QarCoeff};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

const TOL: f64 = 1e-12;

fn series(vals: &[f64]) -> CircularSeries {
    CircularSeries::from_radians(vals).unwrap()
}

// ---------- naive circular pipeline ----------

fn naive_deviation(data: &[f64], center: f64) -> f64 {
    data.iter()
        .map(|&x| PI - (PI - (x - center).abs()).abs())
        .sum::<f64>()
        / data.len() as f64
}

fn naive_median(data: &[f64]) -> f64 {
    let mut best = data[0];
    let mut best_dev = naive_deviation(data, best);
    for &cand in &data[1..] {
        let dev = naive_deviation(data, cand);
        if dev < best_dev || (dev == best_dev && cand < best) {
            best = cand;
            best_dev = dev;
        }
    }
    best
}

fn naive_quantile(data: &[f64], p: f64) -> f64 {
    let med = naive_median(data);
    let lo = med - PI;
    let mut unwrapped: Vec<f64> = data
        .iter()
        .map(|&x| {
            let mut v = x;
            while v < lo {
                v += TAU;
            }
            while v >= lo + TAU {
                v -= TAU;
            }
            v
        })
        .collect();
    unwrapped.sort_by(f64::total_cmp);
    let n = unwrapped.len();
    let idx = ((p * n as f64).ceil() as usize).clamp(1, n);
    unwrapped[idx - 1].rem_euclid(TAU)
}

fn naive_arc_contains(center: f64, w: f64, theta: f64) -> bool {
    let lo = (center - w).rem_euclid(TAU);
    let hi = (center + w).rem_euclid(TAU);
    let psi1 = lo.min(hi);
    let psi2 = lo.max(hi);
    if (center - w) > 0.0 && (center + w) < TAU {
        psi1 <= theta && theta <= psi2
    } else {
        !(psi1 < theta && theta < psi2)
    }
}

fn naive_cqa(data: &[f64], tau: f64, tau2: f64, lag: usize, r: f64) -> f64 {
    let t = data.len();
    let q1 = naive_quantile(data, tau);
    let q2 = naive_quantile(data, tau2);
    let in1: Vec<bool> = data.iter().map(|&x| naive_arc_contains(q1, r, x)).collect();
    let in2: Vec<bool> = data.iter().map(|&x| naive_arc_contains(q2, r, x)).collect();
    let c1 = in1.iter().filter(|&&b| b).count();
    let c2 = in2.iter().filter(|&&b| b).count();
    if c1 == 0 || c1 == t || c2 == 0 || c2 == t {
        return 0.0;
    }
    let m = t - lag;
    let mut joint = 0.0;
    for i in 0..m {
        if in1[i] && in2[i + lag] {
            joint += 1.0;
        }
    }
    joint /= m as f64;
    let p1 = c1 as f64 / t as f64;
    let p2 = c2 as f64 / t as f64;
    let rho = (joint - p1 * p2) / (p1 * p2 * (1.0 - p1) * (1.0 - p2)).sqrt();
    rho.clamp(-1.0, 1.0)
}

fn naive_fl(data: &[f64], lag: usize) -> f64 {
    let m = data.len() - lag;
    let mut num = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            num += (data[i] - data[j]).sin() * (data[i + lag] - data[j + lag]).sin();
            d1 += (data[i] - data[j]).sin().powi(2);
            d2 += (data[i + lag] - data[j + lag]).sin().powi(2);
        }
    }
    let den = d1.sqrt() * d2.sqrt();
    if den < 1e-12 {
        0.0
    } else {
        num / den
    }
}

fn naive_js(data: &[f64], lag: usize) -> f64 {
    let sum_sin: f64 = data.iter().map(|x| x.sin()).sum();
    let sum_cos: f64 = data.iter().map(|x| x.cos()).sum();
    let mean = sum_sin.atan2(sum_cos).rem_euclid(TAU);
    let m = data.len() - lag;
    let mut num = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for i in 0..m {
        num += (data[i] - mean).sin() * (data[i + lag] - mean).sin();
        d1 += (data[i] - mean).sin().powi(2);
        d2 += (data[i + lag] - mean).sin().powi(2);
    }
    let den = d1.sqrt() * d2.sqrt();
    if den < 1e-12 {
        0.0
    } else {
        num / den
    }
}

fn naive_qa(data: &[f64], tau: f64, tau2: f64, lag: usize) -> f64 {
    let t = data.len();
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pick = |p: f64| {
        let idx = ((p * t as f64).ceil() as usize).clamp(1, t);
        sorted[idx - 1]
    };
    let q1 = pick(tau);
    let q2 = pick(tau2);
    let m = t - lag;
    let mut joint = 0.0;
    for i in 0..m {
        if data[i] <= q1 && data[i + lag] <= q2 {
            joint += 1.0;
        }
    }
    joint /= m as f64;
    let p1 = data.iter().filter(|&&y| y <= q1).count() as f64 / t as f64;
    let p2 = data.iter().filter(|&&y| y <= q2).count() as f64 / t as f64;
    joint - p1 * p2
}

/// A deterministic batch of short test series: random uniform angles plus
/// a few structured ones (drifts, near-constant, cut-straddling).
fn short_series_batch() -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_517);
    let mut batch = Vec::new();
    for t in [5usize, 8, 12, 17, 23, 30] {
        batch.push((0..t).map(|_| rng.random::<f64>() * TAU).collect());
    }
    batch.push((0..24).map(|i| (0.45 * i as f64).rem_euclid(TAU)).collect());
    batch.push((0..20).map(|i| 6.1 + 0.03 * (i % 5) as f64).collect::<Vec<_>>()
        .iter().map(|x| x.rem_euclid(TAU)).collect());
    batch.push(vec![1.0; 15]);
    batch
}

#[test]
fn estimators_match_naive_oracles_on_short_series() {
    let levels = [0.0, 0.1, 0.5, 0.9, 1.0];
    let radii = [0.3, 1.0, 2.2];
    for data in short_series_batch() {
        let s = series(&data);
        let t = data.len();
        for lag in 1..=3usize.min(t - 2) {
            for &tau in &levels {
                for &tau2 in &levels {
                    for &r in &radii {
                        let ours = cqa(&s, tau, tau2, lag, r).unwrap();
                        let naive = naive_cqa(&data, tau, tau2, lag, r);
                        assert!(
                            (ours - naive).abs() <= TOL,
                            "cqa(tau={tau}, tau2={tau2}, lag={lag}, r={r}) on T={t}: {ours} vs {naive}"
                        );
                    }
                    let ours = qa(&data, tau, tau2, lag).unwrap();
                    let naive = naive_qa(&data, tau, tau2, lag);
                    assert!((ours - naive).abs() <= TOL, "qa: {ours} vs {naive}");
                }
            }
            let ours = rho_fl(&s, lag).unwrap();
            let naive = naive_fl(&data, lag);
            assert!((ours - naive).abs() <= TOL, "rho_fl lag {lag}: {ours} vs {naive}");
            let ours = rho_js(&s, lag).unwrap();
            let naive = naive_js(&data, lag);
            assert!((ours - naive).abs() <= TOL, "rho_js lag {lag}: {ours} vs {naive}");
        }
    }
}

#[test]
fn quantiles_match_naive_oracle_on_short_series() {
    for data in short_series_batch() {
        let s = series(&data);
        for p in [0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            let ours = circular_quantile(&s, p).unwrap().radians();
            let naive = naive_quantile(&data, p);
            assert!(
                (ours - naive).abs() <= TOL || (ours - naive).abs() >= TAU - TOL,
                "quantile p={p}: {ours} vs {naive}"
            );
        }
    }
}

// ---------- grid-search oracle for the circular median ----------

#[test]
fn median_matches_grid_search_on_wrapped_cloud() {
    // 20 angles concentrated around 6.0, wrapping past the 0/2pi cut
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data: Vec<f64> = (0..20)
        .map(|_| (6.0 + 0.8 * (rng.random::<f64>() - 0.5)).rem_euclid(TAU))
        .collect();
    let s = series(&data);
    let med = circular_median(&s).radians();

    // the cloud spans about [5.6, 6.4] mod 2pi, so "near 6.0"
    let dist_to_six = (med - 6.0).abs().min(TAU - (med - 6.0).abs());
    assert!(dist_to_six < 0.45, "median {med}");

    // exhaustive grid minimization with step 1e-4: the data-point
    // minimizer cannot lose by more than one grid step of objective
    let steps = (TAU / 1e-4) as usize;
    let mut grid_best = f64::INFINITY;
    for k in 0..steps {
        let cand = k as f64 * 1e-4;
        let dev = naive_deviation(&data, cand);
        if dev < grid_best {
            grid_best = dev;
        }
    }
    let ours = naive_deviation(&data, med);
    assert!(
        ours <= grid_best + 1e-4,
        "median objective {ours} vs grid optimum {grid_best}"
    );
}

// ---------- sampling-noise null bounds ----------

#[test]
fn cqa_is_small_under_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..3 {
        let data: Vec<f64> = (0..10_000)
            .map(|_| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                (1.3 * z + trial as f64).rem_euclid(TAU)
            })
            .collect();
        let s = series(&data);
        for tau in [0.1, 0.5, 0.9] {
            let v = cqa(&s, tau, tau, 1, 1.0).unwrap();
            assert!(v.abs() < 0.05, "trial {trial}, tau {tau}: {v}");
        }
    }
}

#[test]
fn qa_is_small_under_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for trial in 0..3 {
        let data: Vec<f64> = (0..10_000)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let v = qa(&data, 0.5, 0.5, 1).unwrap();
        assert!(v.abs() < 0.02, "trial {trial}: {v}");
    }
}

// ---------- Yule-Walker oracle for the ARMA generator ----------

/// Solves the 3 x 3 Yule-Walker system for an AR(3) process by Gaussian
/// elimination and returns (rho1, rho2, rho3).
fn yule_walker_ar3(a: [f64; 3]) -> [f64; 3] {
    // unknowns x = (rho1, rho2, rho3)
    let mut m = [
        [1.0 - a[1], -a[2], 0.0, a[0]],
        [-(a[0] + a[2]), 1.0, 0.0, a[1]],
        [-a[1], -a[0], 1.0, a[2]],
    ];
    for col in 0..3 {
        let pivot = (col..3).max_by(|&r1, &r2| m[r1][col].abs().total_cmp(&m[r2][col].abs())).unwrap();
        m.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
}

#[test]
fn arma_sample_acf_matches_yule_walker() {
    let a = [0.2, -0.2, 0.2];
    let [rho1, rho2, _] = yule_walker_ar3(a);
    let spec = GeneratorSpec::arma(a.to_vec(), vec![0.0; 3]).unwrap();
    let xs = spec.generate(200_000, 12345);
    let acf = |lag: usize| {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        let cov: f64 = (0..n - lag).map(|i| (xs[i] - mean) * (xs[i + lag] - mean)).sum();
        cov / var
    };
    assert!((acf(1) - rho1).abs() < 0.01, "{} vs {rho1}", acf(1));
    assert!((acf(2) - rho2).abs() < 0.01, "{} vs {rho2}", acf(2));
}

// ---------- QA distance hand oracle ----------

#[test]
fn d_qa_matches_direct_formula_on_hand_series() {
    let y1 = [0.3, -1.2, 0.8, 2.1, -0.4, 1.4, -2.2, 0.1, 0.9, -0.6];
    let y2 = [1.1, 0.2, -0.7, -1.4, 2.3, 0.5, -0.1, 1.9, -1.0, 0.4];
    let lags = [1usize, 2];
    let levels = [0.1, 0.5, 0.9];
    let f1 = qa_features(&y1, &lags, &levels).unwrap();
    let f2 = qa_features(&y2, &lags, &levels).unwrap();
    let ours = d_qa(&f1, &f2).unwrap();

    let mut sum = 0.0;
    for &lag in &lags {
        for &ti in &levels {
            for &tj in &levels {
                let diff = naive_qa(&y1, ti, tj, lag) - naive_qa(&y2, ti, tj, lag);
                sum += diff * diff;
            }
        }
    }
    let direct = sum / (4.0 * lags.len() as f64 * (levels.len() * levels.len()) as f64);
    assert!((ours - direct).abs() <= TOL, "{ours} vs {direct}");
}

// ---------- motivating QAR pair stays uncorrelated after wrapping ----------

#[test]
fn wrapped_qar_keeps_small_circular_autocorrelation() {
    // the circular-autocorrelation features cannot separate the pair, so
    // both coefficients should sit near zero for both processes
    let p1 = GeneratorSpec::qar(vec![QarCoeff::new(0.2, 0.5), QarCoeff::new(1.2, 0.5)]).unwrap();
    let xs = p1.generate(5_000, 77);
    let s = cqa_core::simulation::wrap(&xs, cqa_core::simulation::WrapTransform::Eta1).unwrap();
    for lag in [1, 2] {
        assert!(rho_js(&s, lag).unwrap().abs() < 0.08);
    }
}

// ---------- crisp reduction of the fuzzy indices ----------

fn choose2(k: f64) -> f64 {
    k * (k - 1.0) / 2.0
}

/// Classical crisp adjusted Rand and Jaccard from the contingency table.
fn crisp_ari_jaccard(a: &[usize], b: &[usize], ca: usize, cb: usize) -> (f64, f64) {
    let n = a.len();
    let mut table = vec![vec![0f64; cb]; ca];
    for i in 0..n {
        table[a[i]][b[i]] += 1.0;
    }
    let row: Vec<f64> = (0..ca).map(|i| table[i].iter().sum()).collect();
    let col: Vec<f64> = (0..cb).map(|j| (0..ca).map(|i| table[i][j]).sum()).collect();
    let sum_ij: f64 = table.iter().flatten().map(|&v| choose2(v)).sum();
    let sum_a: f64 = row.iter().map(|&v| choose2(v)).sum();
    let sum_b: f64 = col.iter().map(|&v| choose2(v)).sum();
    let total = choose2(n as f64);
    let expected = sum_a * sum_b / total;
    let ari = (sum_ij - expected) / (0.5 * (sum_a + sum_b) - expected);
    // pair-counting Jaccard: together in both / together in at least one
    let jac = sum_ij / (sum_a + sum_b - sum_ij);
    (ari, jac)
}

#[test]
fn fuzzy_indices_reduce_to_crisp_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20 {
        let n = 12 + (trial % 9);
        let c = 2 + (trial % 3);
        let truth_labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let pred_labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        // force both partitions to use at least two clusters
        let mut truth_labels = truth_labels;
        let mut pred_labels = pred_labels;
        truth_labels[0] = 0;
        truth_labels[1] = 1;
        pred_labels[0] = 0;
        pred_labels[1] = 1;

        let memberships: Vec<Vec<f64>> = pred_labels
            .iter()
            .map(|&l| {
                let mut row = vec![0.0; c];
                row[l] = 1.0;
                row
            })
            .collect();
        let truth = GroundTruth::from_labels(truth_labels.clone());
        let (ari, jac) = crisp_ari_jaccard(&pred_labels, &truth_labels, c, c);
        let f_ari = arif(&memberships, &truth).unwrap();
        let f_jac = jif(&memberships, &truth).unwrap();
        assert!((f_ari - ari).abs() <= TOL, "trial {trial}: {f_ari} vs {ari}");
        assert!((f_jac - jac).abs() <= TOL, "trial {trial}: {f_jac} vs {jac}");
    }
}

// ---------- arc membership: both formulations agree ----------

#[test]
fn wrapped_arc_example_agrees_with_both_formulations() {
    let s = series(&[0.2, 0.5, 0.9, 1.5, 3.0, 4.5, 5.5, 6.1]);
    let q = circular_quantile(&s, 0.5).unwrap().radians();
    let arc = cqa_core::circular::Arc::new(Angle::new(q).unwrap(), 1.0).unwrap();
    for k in 0..1000 {
        let theta = k as f64 * TAU / 1000.0;
        assert_eq!(
            arc.contains(Angle::new(theta).unwrap()),
            naive_arc_contains(q, 1.0, theta),
        );
    }
}
