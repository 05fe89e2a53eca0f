//! Serial-dependence feature estimators.
//!
//! The central quantity is the circular quantile autocorrelation (CQA): the
//! normalized covariance of arc-membership indicators at a lag, where the
//! arcs are centered at circular quantiles of the series. Alongside it live
//! two circular autocorrelation coefficients (Fisher-Lee and
//! Jammalamadaka-Sarma) and the real-line quantile autocovariance used as a
//! noncircular baseline.

use crate::circular::{circular_mean, circular_quantiles, Angle, Arc, CircularSeries};
use crate::error::{Error, Result};
use crate::math::quantile_type1_sorted;
use serde::{Deserialize, Serialize};

/// Degenerate-denominator cutoff for the sine-based coefficients.
const SIN_DENOM_EPS: f64 = 1e-12;

fn check_lag(lag: usize, len: usize) -> Result<()> {
    if lag == 0 || lag >= len {
        return Err(Error::InvalidLag { lag, len });
    }
    Ok(())
}

fn check_grids(lags: &[usize], levels: &[f64]) -> Result<()> {
    if lags.is_empty() || levels.is_empty() {
        return Err(Error::InvalidInput("lags and levels must be nonempty".into()));
    }
    Ok(())
}

/// Fraction of sample points lying in the arc centered at the `p`-quantile.
pub fn arc_indicator_prob(series: &CircularSeries, p: f64, radius: f64) -> Result<f64> {
    let arc = Arc::from_quantile(series, p, radius)?;
    let hits = series.angles().iter().filter(|a| arc.contains(**a)).count();
    Ok(hits as f64 / series.len() as f64)
}

/// Fraction of lagged pairs with the first point in the `p`-arc and the
/// point `lag` steps later in the `p2`-arc, averaged over the `T - lag`
/// available pairs.
pub fn joint_arc_indicator_prob(
    series: &CircularSeries,
    p: f64,
    p2: f64,
    radius: f64,
    lag: usize,
) -> Result<f64> {
    check_lag(lag, series.len())?;
    let arc1 = Arc::from_quantile(series, p, radius)?;
    let arc2 = Arc::from_quantile(series, p2, radius)?;
    let angles = series.angles();
    let m = series.len() - lag;
    let hits = (0..m)
        .filter(|&i| arc1.contains(angles[i]) && arc2.contains(angles[i + lag]))
        .count();
    Ok(hits as f64 / m as f64)
}

fn cqa_from_indicators(ind1: &[bool], ind2: &[bool], lag: usize) -> f64 {
    let t = ind1.len();
    let m = t - lag;
    let c1 = ind1.iter().filter(|&&b| b).count();
    let c2 = ind2.iter().filter(|&&b| b).count();
    // a marginal probability of exactly 0 or 1 kills the denominator
    if c1 == 0 || c1 == t || c2 == 0 || c2 == t {
        return 0.0;
    }
    let joint = (0..m).filter(|&i| ind1[i] && ind2[i + lag]).count() as f64 / m as f64;
    let p1 = c1 as f64 / t as f64;
    let p2 = c2 as f64 / t as f64;
    let gamma = joint - p1 * p2;
    // the joint sum runs over T - lag pairs while the marginals run over
    // all T points, so the raw ratio can overshoot the normalized range
    // by O(lag / T) on short series; clip it to the declared range
    (gamma / (p1 * p2 * (1.0 - p1) * (1.0 - p2)).sqrt()).clamp(-1.0, 1.0)
}

/// Circular quantile autocorrelation at levels `(tau, tau2)`, lag `lag` and
/// radius `radius`. Returns 0 when either arc captures all or none of the
/// sample (vanishing denominator).
pub fn cqa(series: &CircularSeries, tau: f64, tau2: f64, lag: usize, radius: f64) -> Result<f64> {
    check_lag(lag, series.len())?;
    let qs = circular_quantiles(series, &[tau, tau2])?;
    let arc1 = Arc::new(qs[0], radius)?;
    let arc2 = Arc::new(qs[1], radius)?;
    let ind1: Vec<bool> = series.angles().iter().map(|a| arc1.contains(*a)).collect();
    let ind2: Vec<bool> = series.angles().iter().map(|a| arc2.contains(*a)).collect();
    Ok(cqa_from_indicators(&ind1, &ind2, lag))
}

/// CQA feature tensor: entries indexed by `(lag, level, level)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqaFeatures {
    pub lags: Vec<usize>,
    pub levels: Vec<f64>,
    pub radius: f64,
    values: Vec<f64>,
}

impl CqaFeatures {
    /// Wraps raw row-major `(lag, level, level)` values; checks the shape
    /// and the `[-1, 1]` bound.
    pub fn new(lags: Vec<usize>, levels: Vec<f64>, radius: f64, values: Vec<f64>) -> Result<Self> {
        let expect = lags.len() * levels.len() * levels.len();
        if values.len() != expect {
            return Err(Error::InvalidInput(format!(
                "expected {expect} feature values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput("CQA features must lie in [-1, 1]".into()));
        }
        Ok(CqaFeatures {
            lags,
            levels,
            radius,
            values,
        })
    }

    pub fn get(&self, lag_idx: usize, i: usize, j: usize) -> f64 {
        let p = self.levels.len();
        self.values[(lag_idx * p + i) * p + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_params(&self, other: &CqaFeatures) -> bool {
        self.lags == other.lags && self.levels == other.levels && self.radius == other.radius
    }
}

/// Extracts the CQA tensor for every `(lag, level, level)` combination.
/// Quantiles and arc indicators are computed once per level and reused.
pub fn cqa_features(
    series: &CircularSeries,
    lags: &[usize],
    levels: &[f64],
    radius: f64,
) -> Result<CqaFeatures> {
    let quantiles = circular_quantiles(series, levels)?;
    cqa_features_from_quantiles(series, &quantiles, lags, levels, radius)
}

/// Same as [`cqa_features`] with precomputed quantiles, so sweeps over the
/// radius do not repeat the quantile pass.
pub fn cqa_features_from_quantiles(
    series: &CircularSeries,
    quantiles: &[Angle],
    lags: &[usize],
    levels: &[f64],
    radius: f64,
) -> Result<CqaFeatures> {
    check_grids(lags, levels)?;
    for &lag in lags {
        check_lag(lag, series.len())?;
    }
    let indicators: Vec<Vec<bool>> = quantiles
        .iter()
        .map(|&q| {
            let arc = Arc::new(q, radius)?;
            Ok(series.angles().iter().map(|a| arc.contains(*a)).collect())
        })
        .collect::<Result<_>>()?;
    let p = levels.len();
    let mut values = Vec::with_capacity(lags.len() * p * p);
    for &lag in lags {
        for ind1 in &indicators {
            for ind2 in &indicators {
                values.push(cqa_from_indicators(ind1, ind2, lag));
            }
        }
    }
    Ok(CqaFeatures {
        lags: lags.to_vec(),
        levels: levels.to_vec(),
        radius,
        values,
    })
}

/// Which circular autocorrelation coefficient a feature vector holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AcfKind {
    FisherLee,
    JammalamadakaSarma,
}

/// Circular autocorrelation features, one value per lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularAcfFeatures {
    pub kind: AcfKind,
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
}

impl CircularAcfFeatures {
    pub fn same_params(&self, other: &CircularAcfFeatures) -> bool {
        self.kind == other.kind && self.lags == other.lags
    }
}

/// Fisher-Lee circular autocorrelation at lag `lag`.
///
/// Double sum over pairs `i < j` of the first `T - lag` points; quadratic
/// in the usable length. Sines of differences are expanded through
/// precomputed sin/cos so the inner loop stays transcendental-free.
pub fn rho_fl(series: &CircularSeries, lag: usize) -> Result<f64> {
    let t = series.len();
    check_lag(lag, t)?;
    let m = t - lag;
    if m < 2 {
        return Err(Error::InvalidLag { lag, len: t });
    }
    let sin: Vec<f64> = series.radians().map(f64::sin).collect();
    let cos: Vec<f64> = series.radians().map(f64::cos).collect();
    let mut num = 0.0;
    let mut den1 = 0.0;
    let mut den2 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let s_ij = sin[i] * cos[j] - cos[i] * sin[j];
            let s_lag = sin[i + lag] * cos[j + lag] - cos[i + lag] * sin[j + lag];
            num += s_ij * s_lag;
            den1 += s_ij * s_ij;
            den2 += s_lag * s_lag;
        }
    }
    let den = den1.sqrt() * den2.sqrt();
    if den < SIN_DENOM_EPS {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Jammalamadaka-Sarma circular autocorrelation at lag `lag`, centered at
/// the circular mean of the full realization.
pub fn rho_js(series: &CircularSeries, lag: usize) -> Result<f64> {
    let t = series.len();
    check_lag(lag, t)?;
    let m = t - lag;
    if m < 2 {
        return Err(Error::InvalidLag { lag, len: t });
    }
    let mean = circular_mean(series).radians();
    let dev: Vec<f64> = series.radians().map(|x| (x - mean).sin()).collect();
    let mut num = 0.0;
    let mut den1 = 0.0;
    let mut den2 = 0.0;
    for i in 0..m {
        num += dev[i] * dev[i + lag];
        den1 += dev[i] * dev[i];
        den2 += dev[i + lag] * dev[i + lag];
    }
    let den = den1.sqrt() * den2.sqrt();
    if den < SIN_DENOM_EPS {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Circular autocorrelation features of the requested kind over a lag set.
pub fn circular_acf_features(
    series: &CircularSeries,
    lags: &[usize],
    kind: AcfKind,
) -> Result<CircularAcfFeatures> {
    if lags.is_empty() {
        return Err(Error::InvalidInput("lags must be nonempty".into()));
    }
    let values = lags
        .iter()
        .map(|&l| match kind {
            AcfKind::FisherLee => rho_fl(series, l),
            AcfKind::JammalamadakaSarma => rho_js(series, l),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CircularAcfFeatures {
        kind,
        lags: lags.to_vec(),
        values,
    })
}

/// Quantile autocovariance of a real-valued series: joint indicator
/// frequency over `T - lag` pairs minus the product of marginal indicator
/// frequencies over `T`, with type-1 empirical quantiles as thresholds.
pub fn qa(series: &[f64], tau: f64, tau2: f64, lag: usize) -> Result<f64> {
    let t = series.len();
    check_lag(lag, t)?;
    for &p in &[tau, tau2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "quantile level must be in [0, 1], got {p}"
            )));
        }
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_type1_sorted(&sorted, tau);
    let q2 = quantile_type1_sorted(&sorted, tau2);
    Ok(qa_from_thresholds(series, q1, q2, lag))
}

fn qa_from_thresholds(series: &[f64], q1: f64, q2: f64, lag: usize) -> f64 {
    let t = series.len();
    let m = t - lag;
    let ind1: Vec<bool> = series.iter().map(|&y| y <= q1).collect();
    let ind2: Vec<bool> = series.iter().map(|&y| y <= q2).collect();
    let joint = (0..m).filter(|&i| ind1[i] && ind2[i + lag]).count() as f64 / m as f64;
    let p1 = ind1.iter().filter(|&&b| b).count() as f64 / t as f64;
    let p2 = ind2.iter().filter(|&&b| b).count() as f64 / t as f64;
    joint - p1 * p2
}

/// Quantile autocovariance tensor (covariances, not correlations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaFeatures {
    pub lags: Vec<usize>,
    pub levels: Vec<f64>,
    values: Vec<f64>,
}

impl QaFeatures {
    /// Wraps raw row-major `(lag, level, level)` covariance values.
    pub fn new(lags: Vec<usize>, levels: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let expect = lags.len() * levels.len() * levels.len();
        if values.len() != expect {
            return Err(Error::InvalidInput(format!(
                "expected {expect} feature values, got {}",
                values.len()
            )));
        }
        Ok(QaFeatures {
            lags,
            levels,
            values,
        })
    }

    pub fn get(&self, lag_idx: usize, i: usize, j: usize) -> f64 {
        let p = self.levels.len();
        self.values[(lag_idx * p + i) * p + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_params(&self, other: &QaFeatures) -> bool {
        self.lags == other.lags && self.levels == other.levels
    }
}

/// Extracts the QA tensor for every `(lag, level, level)` combination.
pub fn qa_features(series: &[f64], lags: &[usize], levels: &[f64]) -> Result<QaFeatures> {
    check_grids(lags, levels)?;
    for &lag in lags {
        check_lag(lag, series.len())?;
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let thresholds: Vec<f64> = levels
        .iter()
        .map(|&p| quantile_type1_sorted(&sorted, p))
        .collect();
    let p = levels.len();
    let mut values = Vec::with_capacity(lags.len() * p * p);
    for &lag in lags {
        for &q1 in &thresholds {
            for &q2 in &thresholds {
                values.push(qa_from_thresholds(series, q1, q2, lag));
            }
        }
    }
    Ok(QaFeatures {
        lags: lags.to_vec(),
        levels: levels.to_vec(),
        values,
    })
}
