//! Circular statistics foundation: angles, circular series, circular
//! mean/median/quantiles and arcs on the unit circle.
//!
//! Quantiles follow the construction used throughout the crate: unwrap the
//! sample into the half-open interval `[median - pi, median + pi)` and take
//! the type-1 order statistic of the unwrapped values.

use crate::error::{Error, Result};
use crate::math::quantile_type1_sorted;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Reduces a radian value into `[0, 2*pi)`.
///
/// `rem_euclid` can round up to exactly `TAU` for tiny negative inputs;
/// that case is folded back to 0 to keep the half-open invariant.
fn wrap_radians(x: f64) -> f64 {
    let v = x.rem_euclid(TAU);
    if v >= TAU {
        0.0
    } else {
        v
    }
}

/// An angle in radians, always normalized to `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Normalizes an arbitrary finite radian value into `[0, 2*pi)`.
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::InvalidInput(format!(
                "angle must be finite, got {radians}"
            )));
        }
        Ok(Angle(wrap_radians(radians)))
    }

    /// Converts degrees to a normalized angle.
    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Self::new(degrees * PI / 180.0)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Shortest distance along the circle to `other`, in `[0, pi]`.
    pub fn geodesic(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    /// The angle rotated by `delta` radians (reduced mod `2*pi`).
    pub fn rotated(self, delta: f64) -> Angle {
        Angle(wrap_radians(self.0 + delta))
    }
}

/// An ordered sequence of angles: the clustering unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularSeries {
    angles: Vec<Angle>,
}

impl CircularSeries {
    /// Builds a series from normalized angles. Fails on empty input.
    pub fn new(angles: Vec<Angle>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidInput("series must not be empty".into()));
        }
        Ok(CircularSeries { angles })
    }

    /// Builds a series from raw radian values, normalizing each one.
    pub fn from_radians(values: &[f64]) -> Result<Self> {
        let angles = values
            .iter()
            .map(|&x| Angle::new(x))
            .collect::<Result<Vec<_>>>()?;
        Self::new(angles)
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one element
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    /// Radian values in order.
    pub fn radians(&self) -> impl Iterator<Item = f64> + '_ {
        self.angles.iter().map(|a| a.radians())
    }

    /// The series rotated by a common offset (used by invariance tests).
    pub fn rotated(&self, delta: f64) -> CircularSeries {
        CircularSeries {
            angles: self.angles.iter().map(|a| a.rotated(delta)).collect(),
        }
    }
}

/// Circular sample mean: direction of the resultant vector.
///
/// Returns angle 0 for a vanishing resultant (e.g. perfectly balanced
/// antipodal data), which downstream estimators treat as degenerate.
pub fn circular_mean(series: &CircularSeries) -> Angle {
    let (s, c) = series
        .radians()
        .fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
    Angle(wrap_radians(s.atan2(c)))
}

/// Mean circular deviation of the sample around a candidate center.
fn mean_circular_deviation(series: &CircularSeries, center: Angle) -> f64 {
    let t = series.len() as f64;
    series
        .angles()
        .iter()
        .map(|a| PI - (PI - (a.radians() - center.radians()).abs()).abs())
        .sum::<f64>()
        / t
}

/// Empirical circular median: the data point minimizing the mean circular
/// deviation, ties broken by the smallest angle value.
pub fn circular_median(series: &CircularSeries) -> Angle {
    let mut best = series.angles()[0];
    let mut best_dev = mean_circular_deviation(series, best);
    for &cand in &series.angles()[1..] {
        let dev = mean_circular_deviation(series, cand);
        if dev < best_dev || (dev == best_dev && cand.radians() < best.radians()) {
            best = cand;
            best_dev = dev;
        }
    }
    best
}

/// Sample angles unwrapped into `[median - pi, median + pi)`, sorted.
fn unwrapped_sorted(series: &CircularSeries, median: Angle) -> Vec<f64> {
    let lo = median.radians() - PI;
    let mut vals: Vec<f64> = series
        .radians()
        .map(|x| {
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
    vals.sort_by(f64::total_cmp);
    vals
}

/// Empirical circular quantile of level `p`: type-1 order statistic of the
/// sample unwrapped around the circular median, re-normalized to `[0, 2*pi)`.
pub fn circular_quantile(series: &CircularSeries, p: f64) -> Result<Angle> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "quantile level must be in [0, 1], got {p}"
        )));
    }
    let median = circular_median(series);
    let vals = unwrapped_sorted(series, median);
    Angle::new(quantile_type1_sorted(&vals, p))
}

/// Circular quantiles for several levels, sharing one median/unwrap pass.
pub fn circular_quantiles(series: &CircularSeries, levels: &[f64]) -> Result<Vec<Angle>> {
    for &p in levels {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "quantile level must be in [0, 1], got {p}"
            )));
        }
    }
    let median = circular_median(series);
    let vals = unwrapped_sorted(series, median);
    levels
        .iter()
        .map(|&p| Angle::new(quantile_type1_sorted(&vals, p)))
        .collect()
}

/// An arc of a given center and radius on the unit circle.
///
/// `wraps` marks the complement branch: the naive interval
/// `[center - radius, center + radius]` crosses the 0/2*pi cut, and the
/// arc is represented as the closed complement of the interval
/// `(psi1, psi2)` spanned by the reduced endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    center: Angle,
    radius: f64,
    wraps: bool,
    psi1: f64,
    psi2: f64,
}

impl Arc {
    /// Builds the arc of `center` and `radius`, with the branch split on
    /// whether `center - radius > 0` and `center + radius < 2*pi`.
    pub fn new(center: Angle, radius: f64) -> Result<Self> {
        if !radius.is_finite() || !(0.0..PI).contains(&radius) {
            return Err(Error::InvalidInput(format!(
                "arc radius must be in [0, pi), got {radius}"
            )));
        }
        let c = center.radians();
        let wraps = !((c - radius) > 0.0 && (c + radius) < TAU);
        let lo = wrap_radians(c - radius);
        let hi = wrap_radians(c + radius);
        Ok(Arc {
            center,
            radius,
            wraps,
            psi1: lo.min(hi),
            psi2: lo.max(hi),
        })
    }

    /// The arc centered at the `p`-quantile of the series.
    pub fn from_quantile(series: &CircularSeries, p: f64, radius: f64) -> Result<Self> {
        Arc::new(circular_quantile(series, p)?, radius)
    }

    pub fn center(&self) -> Angle {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn wraps(&self) -> bool {
        self.wraps
    }

    /// Membership test. Non-wrapping arcs are the closed interval
    /// `[psi1, psi2]`; wrapping arcs are the closed complement of the open
    /// interval `(psi1, psi2)`.
    pub fn contains(&self, theta: Angle) -> bool {
        let x = theta.radians();
        if self.wraps {
            !(self.psi1 < x && x < self.psi2)
        } else {
            self.psi1 <= x && x <= self.psi2
        }
    }
}
