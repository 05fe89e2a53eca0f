//! Metric two-dimensional scaling by stress majorization.
//!
//! The optimizer is SMACOF with unit weights: starting from the classical
//! double-centered eigendecomposition embedding, each Guttman transform
//! step is guaranteed not to increase the raw stress, hence also the
//! normalized stress reported here.

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A planar embedding with its fit statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding2D {
    /// One `(a, b)` pair per series.
    pub points: Vec<(f64, f64)>,
    /// Normalized residual stress of the final configuration.
    pub stress: f64,
    /// `1 - stress^2`, clamped to `[0, 1]`: the share of squared
    /// dissimilarity preserved by the plane.
    pub r_squared: f64,
    /// Majorization iterations performed.
    pub iterations: usize,
}

/// Normalized stress: root of the squared mismatch between embedded
/// Euclidean distances and the dissimilarities, over the total squared
/// dissimilarity. All-zero dissimilarities give 0 for a collapsed
/// configuration and the +infinity sentinel otherwise.
pub fn stress(dissim: &DissimilarityMatrix, points: &[(f64, f64)]) -> Result<f64> {
    let n = dissim.len();
    if points.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} points for a {n} x {n} matrix",
            points.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            let dij = dissim.get(i, j);
            let diff = (dx * dx + dy * dy).sqrt() - dij;
            num += diff * diff;
            den += dij * dij;
        }
    }
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((num / den).sqrt())
}

/// Jacobi eigendecomposition of a symmetric matrix (row-major, n x n).
/// Returns eigenvalues with matching eigenvectors as columns.
fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigvals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (eigvals, v)
}

/// Classical scaling: double-center the squared dissimilarities and embed
/// along the top two positive eigendirections.
fn classical_init(dissim: &DissimilarityMatrix) -> Vec<(f64, f64)> {
    let n = dissim.len();
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = dissim.get(i, j);
            b[i * n + j] = -0.5 * d * d;
        }
    }
    let row_mean: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| b[i * n + j]).sum::<f64>() / n as f64)
        .collect();
    let total = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] += total - row_mean[i] - row_mean[j];
        }
    }
    let (eigvals, eigvecs) = jacobi_eigen(b, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eigvals[y].total_cmp(&eigvals[x]));
    let mut points = vec![(0.0, 0.0); n];
    for (axis, &k) in order.iter().take(2).enumerate() {
        if eigvals[k] <= 0.0 {
            continue;
        }
        let scale = eigvals[k].sqrt();
        for i in 0..n {
            let coord = eigvecs[i * n + k] * scale;
            if axis == 0 {
                points[i].0 = coord;
            } else {
                points[i].1 = coord;
            }
        }
    }
    points
}

fn guttman_step(dissim: &DissimilarityMatrix, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = dissim.len();
    let mut next = vec![(0.0, 0.0); n];
    for i in 0..n {
        let (mut bx, mut by) = (0.0, 0.0);
        let mut bii = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            let dist = (dx * dx + dy * dy).sqrt();
            let w = if dist > 0.0 { dissim.get(i, j) / dist } else { 0.0 };
            bii += w;
            bx -= w * points[j].0;
            by -= w * points[j].1;
        }
        next[i].0 = (bii * points[i].0 + bx) / n as f64;
        next[i].1 = (bii * points[i].1 + by) / n as f64;
    }
    next
}

/// Runs the scaling and returns the embedding together with the stress
/// value after every iteration (the monotonicity witness).
pub fn mds_2d_with_history(
    dissim: &DissimilarityMatrix,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<(Embedding2D, Vec<f64>)> {
    let n = dissim.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "scaling needs at least 3 series, got {n}"
        )));
    }
    if dissim.values().iter().all(|&v| v == 0.0) {
        let embedding = Embedding2D {
            points: vec![(0.0, 0.0); n],
            stress: 0.0,
            r_squared: 1.0,
            iterations: 0,
        };
        return Ok((embedding, vec![0.0]));
    }

    let mut points = classical_init(dissim);
    // a fully collapsed start cannot move under majorization; jitter it
    if points.iter().all(|&p| p == points[0]) {
        let mut rng = rng_from_seed(seed);
        for p in &mut points {
            p.0 += rng.random::<f64>() - 0.5;
            p.1 += rng.random::<f64>() - 0.5;
        }
    }

    let mut current = stress(dissim, &points)?;
    let mut history = vec![current];
    let mut iterations = 0;
    for _ in 0..max_iter {
        let candidate = guttman_step(dissim, &points);
        let next = stress(dissim, &candidate)?;
        points = candidate;
        iterations += 1;
        history.push(next);
        let drop = current - next;
        current = next;
        if current == 0.0 || drop <= tol * current.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    let embedding = Embedding2D {
        points,
        stress: current,
        r_squared: (1.0 - current * current).clamp(0.0, 1.0),
        iterations,
    };
    Ok((embedding, history))
}

/// Metric 2-D scaling of a dissimilarity matrix by stress majorization.
pub fn mds_2d(
    dissim: &DissimilarityMatrix,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Embedding2D> {
    mds_2d_with_history(dissim, seed, max_iter, tol).map(|(e, _)| e)
}
