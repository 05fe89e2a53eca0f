//! Process generators (ARMA, QAR, GARCH, white noise), real-line-to-circle
//! wrapping transforms, the six benchmark scenarios and the two-process
//! example contrasting the CQA distance with circular-autocorrelation
//! distances.

use crate::circular::CircularSeries;
use crate::dependence::{circular_acf_features, cqa_features_from_quantiles, AcfKind};
use crate::circular::circular_quantiles;
use crate::dissimilarity::{d_cqa, d_fl, d_js};
use crate::error::{Error, Result};
use crate::exec;
use crate::math::{norm_quantile, quantile_type1_sorted};
use crate::rng::{derive_seed, rng_from_seed};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Samples discarded before the reported stretch of a recursive generator.
pub const DEFAULT_BURN_IN: usize = 500;

/// One lag function of a QAR recursion: `f(u) = slope * (u - offset)`.
/// The intercept function is fixed to the standard normal quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QarCoeff {
    pub slope: f64,
    pub offset: f64,
}

impl QarCoeff {
    pub fn new(slope: f64, offset: f64) -> Self {
        QarCoeff { slope, offset }
    }

    fn eval(&self, u: f64) -> f64 {
        self.slope * (u - self.offset)
    }
}

/// Generator family with its coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Arma { ar: Vec<f64>, ma: Vec<f64> },
    Qar { coeffs: Vec<QarCoeff> },
    Garch { alpha0: f64, alpha: Vec<f64>, beta: Vec<f64> },
    WhiteNoise,
}

/// A validated generator with its burn-in length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub burn_in: usize,
}

/// Step-down (Schur-Cohn) stationarity test for an AR coefficient vector:
/// the recursion peels one reflection coefficient per level, and the
/// process is stationary exactly when all of them are inside (-1, 1).
fn ar_is_stationary(ar: &[f64]) -> bool {
    let mut phi = ar.to_vec();
    while let Some(&kappa) = phi.last() {
        if kappa.abs() >= 1.0 {
            return false;
        }
        let k = phi.len() - 1;
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k)
            .map(|i| (phi[i] + kappa * phi[k - 1 - i]) / denom)
            .collect();
        phi = prev;
    }
    true
}

impl GeneratorSpec {
    /// ARMA generator; rejects AR coefficients violating stationarity.
    pub fn arma(ar: Vec<f64>, ma: Vec<f64>) -> Result<Self> {
        if ar.iter().chain(&ma).any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("non-finite ARMA coefficient".into()));
        }
        if !ar_is_stationary(&ar) {
            return Err(Error::InvalidSpec(format!(
                "AR coefficients {ar:?} are not stationary"
            )));
        }
        Ok(GeneratorSpec {
            family: Family::Arma { ar, ma },
            burn_in: DEFAULT_BURN_IN,
        })
    }

    /// QAR generator with one linear lag function per lag.
    pub fn qar(coeffs: Vec<QarCoeff>) -> Result<Self> {
        if coeffs
            .iter()
            .any(|c| !c.slope.is_finite() || !c.offset.is_finite())
        {
            return Err(Error::InvalidSpec("non-finite QAR coefficient".into()));
        }
        Ok(GeneratorSpec {
            family: Family::Qar { coeffs },
            burn_in: DEFAULT_BURN_IN,
        })
    }

    /// GARCH generator; requires positivity and a summability margin.
    pub fn garch(alpha0: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if !(alpha0 > 0.0) {
            return Err(Error::InvalidSpec(format!("alpha0 must be positive, got {alpha0}")));
        }
        if alpha.iter().chain(&beta).any(|&c| !c.is_finite() || c < 0.0) {
            return Err(Error::InvalidSpec("GARCH coefficients must be nonnegative".into()));
        }
        let total: f64 = alpha.iter().chain(&beta).sum();
        if total >= 1.0 {
            return Err(Error::InvalidSpec(format!(
                "GARCH coefficients sum to {total}, must be below 1"
            )));
        }
        Ok(GeneratorSpec {
            family: Family::Garch { alpha0, alpha, beta },
            burn_in: DEFAULT_BURN_IN,
        })
    }

    /// Independent standard normal draws.
    pub fn white_noise() -> Self {
        GeneratorSpec {
            family: Family::WhiteNoise,
            burn_in: 0,
        }
    }

    /// Generates a `length`-sample realization, burn-in discarded.
    pub fn generate(&self, length: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        let total = length + self.burn_in;
        let out = match &self.family {
            Family::Arma { ar, ma } => {
                let eps: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
                arma_recursion(ar, ma, &eps)
            }
            Family::Qar { coeffs } => {
                let uniforms: Vec<f64> = (0..total)
                    .map(|_| rng.random::<f64>().max(f64::MIN_POSITIVE))
                    .collect();
                qar_recursion(coeffs, &uniforms)
            }
            Family::Garch { alpha0, alpha, beta } => {
                let eps: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
                garch_recursion(*alpha0, alpha, beta, &eps)
            }
            Family::WhiteNoise => (0..total).map(|_| rng.sample(StandardNormal)).collect(),
        };
        out[self.burn_in..].to_vec()
    }
}

/// ARMA recursion over a given innovation sequence (pre-sample state 0).
fn arma_recursion(ar: &[f64], ma: &[f64], eps: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; eps.len()];
    for t in 0..eps.len() {
        let mut v = eps[t];
        for (i, &a) in ar.iter().enumerate() {
            if t > i {
                v += a * x[t - i - 1];
            }
        }
        for (j, &b) in ma.iter().enumerate() {
            if t > j {
                v += b * eps[t - j - 1];
            }
        }
        x[t] = v;
    }
    x
}

/// QAR recursion over a given uniform sequence (pre-sample state 0).
/// Exposed to tests so the recursion can be checked against hand unrolls.
pub fn qar_recursion(coeffs: &[QarCoeff], uniforms: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; uniforms.len()];
    for t in 0..uniforms.len() {
        let u = uniforms[t];
        let mut v = norm_quantile(u);
        for (i, c) in coeffs.iter().enumerate() {
            if t > i {
                v += c.eval(u) * x[t - i - 1];
            }
        }
        x[t] = v;
    }
    x
}

/// GARCH recursion: the conditional variance starts at the unconditional
/// variance and pre-sample observations are 0.
fn garch_recursion(alpha0: f64, alpha: &[f64], beta: &[f64], eps: &[f64]) -> Vec<f64> {
    let margin: f64 = 1.0 - alpha.iter().sum::<f64>() - beta.iter().sum::<f64>();
    let uncond = alpha0 / margin;
    let n = eps.len();
    let mut x = vec![0.0; n];
    let mut sigma2 = vec![uncond; n];
    for t in 0..n {
        let mut v = alpha0;
        for (i, &a) in alpha.iter().enumerate() {
            v += a * if t > i { x[t - i - 1] * x[t - i - 1] } else { 0.0 };
        }
        for (j, &b) in beta.iter().enumerate() {
            v += b * if t > j { sigma2[t - j - 1] } else { uncond };
        }
        sigma2[t] = v;
        x[t] = v.sqrt() * eps[t];
    }
    x
}

/// Real-line-to-circle wrapping transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrapTransform {
    /// `x mod 2*pi`.
    Eta1,
    /// `2 * arctan(x) + pi`, a monotone map onto `(0, 2*pi)`.
    Eta2,
}

impl WrapTransform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            WrapTransform::Eta1 => x.rem_euclid(TAU),
            WrapTransform::Eta2 => 2.0 * x.atan() + PI,
        }
    }
}

/// Wraps a real-valued series onto the circle.
pub fn wrap(series: &[f64], transform: WrapTransform) -> Result<CircularSeries> {
    let vals: Vec<f64> = series.iter().map(|&x| transform.apply(x)).collect();
    CircularSeries::from_radians(&vals)
}

/// Scenario identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioId {
    One,
    Two,
    Three,
    Four,
    Five,
    Six,
    Motivating,
}

impl ScenarioId {
    pub fn from_index(idx: u8) -> Result<Self> {
        Ok(match idx {
            1 => ScenarioId::One,
            2 => ScenarioId::Two,
            3 => ScenarioId::Three,
            4 => ScenarioId::Four,
            5 => ScenarioId::Five,
            6 => ScenarioId::Six,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "scenario index must be 1..=6, got {idx}"
                )))
            }
        })
    }

    /// Lag set used for every metric in this scenario's experiments.
    pub fn lags(self) -> Vec<usize> {
        match self {
            ScenarioId::One | ScenarioId::Four => vec![1, 2, 3],
            _ => vec![1, 2],
        }
    }

    /// Whether the scenario carries an isolated eleventh series.
    pub fn has_isolated(self) -> bool {
        matches!(self, ScenarioId::Four | ScenarioId::Five | ScenarioId::Six)
    }
}

/// A fully specified data-generating scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    /// `(generator, series count)` per cluster.
    pub clusters: Vec<(GeneratorSpec, usize)>,
    /// Generator of the single unclustered series, if any.
    pub isolated: Option<GeneratorSpec>,
    pub wrap: WrapTransform,
    pub length: usize,
}

fn scenario1_generators() -> Result<[GeneratorSpec; 3]> {
    Ok([
        GeneratorSpec::arma(vec![0.2, -0.2, 0.2], vec![0.0, 0.0, 0.0])?,
        GeneratorSpec::arma(vec![-0.2, 0.2, -0.2], vec![0.0, 0.0, 0.0])?,
        GeneratorSpec::arma(vec![0.0, 0.0, 0.0], vec![0.2, -0.2, 0.2])?,
    ])
}

fn scenario2_generators() -> Result<[GeneratorSpec; 3]> {
    Ok([
        GeneratorSpec::qar(vec![QarCoeff::new(0.2, 0.4), QarCoeff::new(1.2, 0.4)])?,
        GeneratorSpec::qar(vec![QarCoeff::new(-0.2, 0.6), QarCoeff::new(-1.2, 0.6)])?,
        GeneratorSpec::qar(vec![QarCoeff::new(0.0, 0.0), QarCoeff::new(0.0, 0.0)])?,
    ])
}

fn scenario3_generators() -> Result<[GeneratorSpec; 3]> {
    Ok([
        GeneratorSpec::garch(0.1, vec![0.4, 0.4], vec![0.05, 0.05])?,
        GeneratorSpec::garch(0.1, vec![0.05, 0.05], vec![0.4, 0.4])?,
        GeneratorSpec::garch(0.1, vec![0.05, 0.4], vec![0.4, 0.05])?,
    ])
}

/// The generators of the two-process example: a QAR pair whose members are
/// serially uncorrelated yet differ in their nonlinear dependence.
pub fn motivating_generators() -> Result<[GeneratorSpec; 2]> {
    Ok([
        GeneratorSpec::qar(vec![QarCoeff::new(0.2, 0.5), QarCoeff::new(1.2, 0.5)])?,
        GeneratorSpec::qar(vec![QarCoeff::new(-0.2, 0.5), QarCoeff::new(-1.2, 0.5)])?,
    ])
}

/// Builds the spec of one of the six benchmark scenarios (five series per
/// cluster; scenarios 4-6 add one isolated series).
pub fn scenario(id: ScenarioId, wrap: WrapTransform, length: usize) -> Result<ScenarioSpec> {
    if length == 0 {
        return Err(Error::InvalidConfig("scenario length must be positive".into()));
    }
    let spec = match id {
        ScenarioId::One => ScenarioSpec {
            id,
            clusters: scenario1_generators()?.into_iter().map(|g| (g, 5)).collect(),
            isolated: None,
            wrap,
            length,
        },
        ScenarioId::Two => ScenarioSpec {
            id,
            clusters: scenario2_generators()?.into_iter().map(|g| (g, 5)).collect(),
            isolated: None,
            wrap,
            length,
        },
        ScenarioId::Three => ScenarioSpec {
            id,
            clusters: scenario3_generators()?.into_iter().map(|g| (g, 5)).collect(),
            isolated: None,
            wrap,
            length,
        },
        ScenarioId::Four => {
            let [c1, c2, _] = scenario1_generators()?;
            ScenarioSpec {
                id,
                clusters: vec![(c1, 5), (c2, 5)],
                isolated: Some(GeneratorSpec::white_noise()),
                wrap,
                length,
            }
        }
        ScenarioId::Five => {
            let [c1, c2, _] = scenario2_generators()?;
            ScenarioSpec {
                id,
                clusters: vec![(c1, 5), (c2, 5)],
                isolated: Some(GeneratorSpec::white_noise()),
                wrap,
                length,
            }
        }
        ScenarioId::Six => {
            let [c1, c2, _] = scenario3_generators()?;
            ScenarioSpec {
                id,
                clusters: vec![(c1, 5), (c2, 5)],
                isolated: Some(GeneratorSpec::garch(0.1, vec![0.225, 0.225], vec![0.225, 0.225])?),
                wrap,
                length,
            }
        }
        ScenarioId::Motivating => {
            let [p1, p2] = motivating_generators()?;
            ScenarioSpec {
                id,
                clusters: vec![(p1, 1), (p2, 1)],
                isolated: None,
                wrap,
                length,
            }
        }
    };
    Ok(spec)
}

impl ScenarioSpec {
    /// Reads a spec from its JSON form (family, coefficients, length,
    /// wrap, per-cluster counts).
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("bad scenario spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario spec serialization cannot fail")
    }
}

/// Writes a dataset as CSV, one series per row of comma-separated radian
/// values (for cross-tool checks).
pub fn write_dataset_csv<W: std::io::Write>(
    dataset: &[CircularSeries],
    mut w: W,
) -> std::io::Result<()> {
    for series in dataset {
        let row: Vec<String> = series.radians().map(|x| x.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Generates the dataset of a scenario: each series gets an independent
/// sub-seed, and the label vector marks the isolated series with `None`.
pub fn build_scenario(
    spec: &ScenarioSpec,
    seed: u64,
) -> Result<(Vec<CircularSeries>, Vec<Option<usize>>)> {
    let mut generators: Vec<(GeneratorSpec, Option<usize>)> = Vec::new();
    for (cluster_idx, (gen, count)) in spec.clusters.iter().enumerate() {
        if *count == 0 {
            return Err(Error::InvalidConfig("cluster series count must be positive".into()));
        }
        for _ in 0..*count {
            generators.push((gen.clone(), Some(cluster_idx)));
        }
    }
    if let Some(gen) = &spec.isolated {
        generators.push((gen.clone(), None));
    }

    let series = exec::map_range(generators.len(), |i| {
        let raw = generators[i].0.generate(spec.length, derive_seed(seed, i as u64));
        wrap(&raw, spec.wrap)
    });
    let series: Vec<CircularSeries> = series.into_iter().collect::<Result<_>>()?;
    let labels: Vec<Option<usize>> = generators.iter().map(|(_, l)| *l).collect();
    Ok((series, labels))
}

/// Replicate summary of one distance in the two-process experiment, on the
/// x100 reporting scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    pub label: String,
    /// Arc radius for CQA rows, absent for the autocorrelation distances.
    pub radius: Option<f64>,
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q95: f64,
}

fn summarize(label: &str, radius: Option<f64>, samples: &[f64]) -> DistanceSummary {
    let n = samples.len() as f64;
    let scaled: Vec<f64> = samples.iter().map(|v| v * 100.0).collect();
    let mean = scaled.iter().sum::<f64>() / n;
    let var = if scaled.len() > 1 {
        scaled.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mut sorted = scaled.clone();
    sorted.sort_by(f64::total_cmp);
    DistanceSummary {
        label: label.to_string(),
        radius,
        mean,
        sd: var.sqrt(),
        q05: quantile_type1_sorted(&sorted, 0.05),
        q95: quantile_type1_sorted(&sorted, 0.95),
    }
}

/// Replicated two-process experiment: for each replicate pair of wrapped
/// QAR realizations, the CQA distance over a radius grid (lags {1, 2},
/// levels {0.1, 0.5, 0.9}) and the two circular-autocorrelation distances.
/// Rows report mean, standard deviation and the 5th/95th replicate
/// quantiles, scaled by 100.
pub fn motivating_example(
    length: usize,
    replicates: usize,
    r_grid: &[f64],
    seed: u64,
) -> Result<Vec<DistanceSummary>> {
    if replicates == 0 || length < 10 {
        return Err(Error::InvalidConfig(
            "need at least one replicate and length >= 10".into(),
        ));
    }
    for &r in r_grid {
        if !(0.0..PI).contains(&r) {
            return Err(Error::InvalidConfig(format!("radius {r} outside [0, pi)")));
        }
    }
    let lags = [1usize, 2];
    let levels = [0.1, 0.5, 0.9];
    let [p1, p2] = motivating_generators()?;

    // per replicate: one d_cqa sample per radius, then d_fl, d_js
    let samples = exec::map_range(replicates, |rep| {
        let rep_seed = derive_seed(seed, rep as u64);
        let s1 = wrap(&p1.generate(length, derive_seed(rep_seed, 0)), WrapTransform::Eta1)?;
        let s2 = wrap(&p2.generate(length, derive_seed(rep_seed, 1)), WrapTransform::Eta1)?;

        let q1 = circular_quantiles(&s1, &levels)?;
        let q2 = circular_quantiles(&s2, &levels)?;
        let mut row = Vec::with_capacity(r_grid.len() + 2);
        for &r in r_grid {
            let f1 = cqa_features_from_quantiles(&s1, &q1, &lags, &levels, r)?;
            let f2 = cqa_features_from_quantiles(&s2, &q2, &lags, &levels, r)?;
            row.push(d_cqa(&f1, &f2)?);
        }
        let fl1 = circular_acf_features(&s1, &lags, AcfKind::FisherLee)?;
        let fl2 = circular_acf_features(&s2, &lags, AcfKind::FisherLee)?;
        row.push(d_fl(&fl1, &fl2)?);
        let js1 = circular_acf_features(&s1, &lags, AcfKind::JammalamadakaSarma)?;
        let js2 = circular_acf_features(&s2, &lags, AcfKind::JammalamadakaSarma)?;
        row.push(d_js(&js1, &js2)?);
        Ok::<_, Error>(row)
    });
    let samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_>>()?;

    let column = |idx: usize| -> Vec<f64> { samples.iter().map(|row| row[idx]).collect() };
    let mut rows = Vec::with_capacity(r_grid.len() + 2);
    for (k, &r) in r_grid.iter().enumerate() {
        rows.push(summarize("d_cqa", Some(r), &column(k)));
    }
    rows.push(summarize("d_fl", None, &column(r_grid.len())));
    rows.push(summarize("d_js", None, &column(r_grid.len() + 1)));
    Ok(rows)
}
