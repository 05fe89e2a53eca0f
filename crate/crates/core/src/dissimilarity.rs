//! Distances between circular series built on feature tensors, and the
//! pairwise dissimilarity matrix feeding the clustering stage.
//!
//! All four distances are mean squared differences of features scaled so
//! the correlation-based ones live in `[0, 1]`. They are symmetric with a
//! zero diagonal; no triangle inequality is claimed.

use crate::circular::CircularSeries;
use crate::dependence::{
    circular_acf_features, cqa_features, qa_features, AcfKind, CircularAcfFeatures, CqaFeatures,
    QaFeatures,
};
use crate::error::{Error, Result};
use crate::exec;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Squared-difference mean of the CQA tensors, in `[0, 1]`.
pub fn d_cqa(a: &CqaFeatures, b: &CqaFeatures) -> Result<f64> {
    if !a.same_params(b) {
        return Err(Error::IncompatibleFeatures(
            "CQA features differ in lags, levels or radius".into(),
        ));
    }
    let l = a.lags.len() as f64;
    let p = a.levels.len() as f64;
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / (4.0 * l * p * p))
}

fn d_acf(a: &CircularAcfFeatures, b: &CircularAcfFeatures, kind: AcfKind) -> Result<f64> {
    if a.kind != kind || b.kind != kind || !a.same_params(b) {
        return Err(Error::IncompatibleFeatures(
            "circular ACF features differ in kind or lags".into(),
        ));
    }
    let l = a.lags.len() as f64;
    let sum: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / (4.0 * l))
}

/// Squared-difference mean of Fisher-Lee autocorrelations, in `[0, 1]`.
pub fn d_fl(a: &CircularAcfFeatures, b: &CircularAcfFeatures) -> Result<f64> {
    d_acf(a, b, AcfKind::FisherLee)
}

/// Squared-difference mean of Jammalamadaka-Sarma autocorrelations.
pub fn d_js(a: &CircularAcfFeatures, b: &CircularAcfFeatures) -> Result<f64> {
    d_acf(a, b, AcfKind::JammalamadakaSarma)
}

/// Squared-difference mean of the QA covariance tensors.
pub fn d_qa(a: &QaFeatures, b: &QaFeatures) -> Result<f64> {
    if !a.same_params(b) {
        return Err(Error::IncompatibleFeatures(
            "QA features differ in lags or levels".into(),
        ));
    }
    let l = a.lags.len() as f64;
    let p = a.levels.len() as f64;
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / (4.0 * l * p * p))
}

/// Which dissimilarity a matrix was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MetricKind {
    Cqa,
    Fl,
    Js,
    Qa,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MetricKind::Cqa => "CQA",
            MetricKind::Fl => "FL",
            MetricKind::Js => "JS",
            MetricKind::Qa => "QA",
        };
        f.write_str(s)
    }
}

/// Feature parameters attached to a dissimilarity matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub lags: Vec<usize>,
    pub levels: Vec<f64>,
    /// Arc radius; only meaningful for the CQA metric.
    pub radius: Option<f64>,
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix {
    pub metric_kind: MetricKind,
    pub params: MetricParams,
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Wraps raw row-major values; checks shape, symmetry and diagonal.
    pub fn from_values(
        metric_kind: MetricKind,
        params: MetricParams,
        n: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "matrix for {n} series needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::InvalidInput(format!("asymmetry at ({i}, {j})")));
                }
            }
        }
        Ok(DissimilarityMatrix {
            metric_kind,
            params,
            n,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The matrix scaled by a positive constant (same structure).
    pub fn scaled(&self, factor: f64) -> DissimilarityMatrix {
        DissimilarityMatrix {
            metric_kind: self.metric_kind,
            params: self.params.clone(),
            n: self.n,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Writes the matrix as `n` rows of `n` comma-separated decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Serializes kind, params and values as JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serialization cannot fail")
    }
}

/// Assembles the full pairwise matrix for a dataset. Features are
/// extracted once per series (in parallel under the `parallel` feature)
/// and the upper triangle is mirrored.
pub fn pairwise_matrix(
    dataset: &[CircularSeries],
    kind: MetricKind,
    params: &MetricParams,
) -> Result<DissimilarityMatrix> {
    match kind {
        MetricKind::Cqa => {
            let radius = params.radius.ok_or_else(|| {
                Error::InvalidInput("CQA matrix requires a radius parameter".into())
            })?;
            pairwise_from_fn(
                dataset,
                kind,
                params,
                |s| cqa_features(s, &params.lags, &params.levels, radius),
                d_cqa,
            )
        }
        MetricKind::Fl => pairwise_from_fn(
            dataset,
            kind,
            params,
            |s| circular_acf_features(s, &params.lags, AcfKind::FisherLee),
            d_fl,
        ),
        MetricKind::Js => pairwise_from_fn(
            dataset,
            kind,
            params,
            |s| circular_acf_features(s, &params.lags, AcfKind::JammalamadakaSarma),
            d_js,
        ),
        MetricKind::Qa => pairwise_from_fn(
            dataset,
            kind,
            params,
            |s| {
                let values: Vec<f64> = s.radians().collect();
                qa_features(&values, &params.lags, &params.levels)
            },
            d_qa,
        ),
    }
}

/// Generic pairwise assembly over a feature extractor and a distance.
/// Exposed so tests can instrument the extractor invocation count.
pub fn pairwise_from_fn<F, E, D>(
    dataset: &[CircularSeries],
    kind: MetricKind,
    params: &MetricParams,
    extract: E,
    dist: D,
) -> Result<DissimilarityMatrix>
where
    F: Send + Sync,
    E: Fn(&CircularSeries) -> Result<F> + Sync + Send,
    D: Fn(&F, &F) -> Result<f64> + Sync + Send,
{
    let features = exec::map_slice(dataset, |s| extract(s));
    let features: Vec<F> = features
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::InvalidInput(format!("series {i}: {e}"))))
        .collect::<Result<_>>()?;

    let n = dataset.len();
    let rows = exec::map_range(n, |i| {
        let mut row = vec![0.0; n];
        for j in (i + 1)..n {
            row[j] = dist(&features[i], &features[j])?;
        }
        Ok::<_, Error>(row)
    });
    let mut values = vec![0.0; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        let row = row.map_err(|e| Error::InvalidInput(format!("row {i}: {e}")))?;
        for (j, v) in row.into_iter().enumerate() {
            values[i * n + j] = v;
        }
    }
    for i in 0..n {
        for j in 0..i {
            values[i * n + j] = values[j * n + i];
        }
    }
    DissimilarityMatrix::from_values(kind, params.clone(), n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::cqa_features;

    fn series(vals: &[f64]) -> CircularSeries {
        CircularSeries::from_radians(vals).unwrap()
    }

    fn cqa_tensor(values: Vec<f64>, lags: usize, levels: usize) -> CqaFeatures {
        let lags: Vec<usize> = (1..=lags).collect();
        let levels: Vec<f64> = (1..=levels)
            .map(|i| i as f64 / (levels + 1) as f64)
            .collect();
        CqaFeatures::new(lags, levels, 1.0, values).unwrap()
    }

    #[test]
    fn d_cqa_identity_and_extremes() {
        let x = cqa_tensor(vec![0.25; 12], 3, 2);
        let y = cqa_tensor(vec![1.0; 12], 3, 2);
        let z = cqa_tensor(vec![-1.0; 12], 3, 2);
        assert_eq!(d_cqa(&x, &x).unwrap(), 0.0);
        // all +1 vs all -1 attains the upper bound exactly
        assert_eq!(d_cqa(&y, &z).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_features_are_rejected() {
        let a = cqa_tensor(vec![0.0; 12], 3, 2);
        let b = cqa_tensor(vec![0.0; 27], 3, 3);
        assert!(d_cqa(&a, &b).is_err());
    }

    #[test]
    fn d_qa_extremal_bound_for_indicator_covariances() {
        // covariance entries capped at +-1/4 bound the distance by 1/16
        let lags = vec![1usize, 2];
        let levels = vec![0.1, 0.5, 0.9];
        let hi = QaFeatures::new(lags.clone(), levels.clone(), vec![0.25; 18]).unwrap();
        let lo = QaFeatures::new(lags, levels, vec![-0.25; 18]).unwrap();
        assert_eq!(d_qa(&hi, &lo).unwrap(), 1.0 / 16.0);
        assert_eq!(d_qa(&hi, &hi).unwrap(), 0.0);
    }

    #[test]
    fn single_series_matrix_is_zero() {
        let data = vec![series(&[0.1, 0.4, 1.0, 2.0, 3.0, 4.0])];
        let params = MetricParams {
            lags: vec![1],
            levels: vec![0.1, 0.5, 0.9],
            radius: Some(1.0),
        };
        let m = pairwise_matrix(&data, MetricKind::Cqa, &params).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn matrix_entries_match_pointwise_distances() {
        let data: Vec<CircularSeries> = (0..4)
            .map(|k| {
                let vals: Vec<f64> = (0..40)
                    .map(|i| ((i * (k + 2)) as f64 * 0.37).rem_euclid(std::f64::consts::TAU))
                    .collect();
                series(&vals)
            })
            .collect();
        let params = MetricParams {
            lags: vec![1, 2],
            levels: vec![0.1, 0.5, 0.9],
            radius: Some(0.8),
        };
        let m = pairwise_matrix(&data, MetricKind::Cqa, &params).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let fi = cqa_features(&data[i], &params.lags, &params.levels, 0.8).unwrap();
                let fj = cqa_features(&data[j], &params.lags, &params.levels, 0.8).unwrap();
                let expect = if i == j {
                    0.0
                } else {
                    d_cqa(&fi, &fj).unwrap()
                };
                assert_eq!(m.get(i, j), expect);
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn extraction_runs_once_per_series() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let data: Vec<CircularSeries> = (0..6)
            .map(|k| {
                let vals: Vec<f64> = (0..30).map(|i| (i + k) as f64 * 0.21).collect();
                series(&vals)
            })
            .collect();
        let params = MetricParams {
            lags: vec![1],
            levels: vec![0.5],
            radius: Some(1.0),
        };
        let count = AtomicUsize::new(0);
        let m = pairwise_from_fn(
            &data,
            MetricKind::Cqa,
            &params,
            |s| {
                count.fetch_add(1, Ordering::SeqCst);
                cqa_features(s, &params.lags, &params.levels, 1.0)
            },
            |a, b| d_cqa(a, b),
        )
        .unwrap();
        assert_eq!(count.load(Ordering::SeqCst), data.len());
        assert_eq!(m.len(), 6);
    }

    #[test]
    fn series_of_unequal_lengths_are_comparable() {
        // features are length-normalized, so no padding or truncation
        let a = series(&(0..40).map(|i| (0.43 * i as f64).rem_euclid(std::f64::consts::TAU)).collect::<Vec<_>>());
        let b = series(&(0..65).map(|i| (0.31 * i as f64 + 1.0).rem_euclid(std::f64::consts::TAU)).collect::<Vec<_>>());
        let fa = cqa_features(&a, &[1, 2], &[0.1, 0.5, 0.9], 1.0).unwrap();
        let fb = cqa_features(&b, &[1, 2], &[0.1, 0.5, 0.9], 1.0).unwrap();
        let d = d_cqa(&fa, &fb).unwrap();
        assert!((0.0..=1.0).contains(&d));
        let m = pairwise_matrix(
            &[a, b],
            MetricKind::Cqa,
            &MetricParams {
                lags: vec![1, 2],
                levels: vec![0.1, 0.5, 0.9],
                radius: Some(1.0),
            },
        )
        .unwrap();
        assert_eq!(m.get(0, 1), d);
    }

    #[test]
    fn matrix_csv_has_n_rows() {
        let data = vec![
            series(&[0.1, 0.2, 0.9, 1.4]),
            series(&[2.1, 2.9, 3.3, 4.0]),
            series(&[5.1, 5.9, 0.3, 1.0]),
        ];
        let params = MetricParams {
            lags: vec![1],
            levels: vec![0.5],
            radius: None,
        };
        let m = pairwise_matrix(&data, MetricKind::Js, &params).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 3);
        // JSON round-trip preserves kind and values
        let parsed: DissimilarityMatrix = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(parsed, m);
    }
}
