//! External clustering quality measures: fuzzy extensions of the Adjusted
//! Rand and Jaccard indices, the cutoff-based correct-classification check
//! for the isolated-series scenarios, and the area under the fuzziness
//! curve.
//!
//! The fuzzy indices follow the pairwise fuzzy-set reformulation: for each
//! unordered pair the same-cluster strength is `max_c min(u_ic, u_jc)` and
//! the split strength is `max_{c != c'} min(u_ic, u_jc')`; pair-level
//! contingency sums then enter the classical index formulas. With a crisp
//! membership matrix both indices reduce exactly to their classical
//! counterparts.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard reference partition; `None` marks the isolated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub labels: Vec<Option<usize>>,
}

impl GroundTruth {
    pub fn from_labels(labels: Vec<usize>) -> Self {
        GroundTruth {
            labels: labels.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn fully_labeled(&self) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .map(|l| {
                l.ok_or_else(|| {
                    Error::InvalidInput(
                        "index requires fully labeled data (no isolated series)".into(),
                    )
                })
            })
            .collect()
    }
}

/// Pair-level contingency sums (together/together, together/apart,
/// apart/together, apart/apart) between a fuzzy partition and a crisp one.
fn fuzzy_pair_sums(memberships: &[Vec<f64>], labels: &[usize]) -> Result<(f64, f64, f64, f64)> {
    let n = memberships.len();
    if n != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} membership rows vs {} labels",
            n,
            labels.len()
        )));
    }
    let c = memberships.first().map_or(0, |r| r.len());
    let (mut a, mut b, mut cc, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut together: f64 = 0.0;
            let mut split: f64 = 0.0;
            for ci in 0..c {
                for cj in 0..c {
                    let strength = memberships[i][ci].min(memberships[j][cj]);
                    if ci == cj {
                        together = together.max(strength);
                    } else {
                        split = split.max(strength);
                    }
                }
            }
            let same_truth = labels[i] == labels[j];
            if same_truth {
                a += together;
                cc += split;
            } else {
                b += together;
                d += split;
            }
        }
    }
    Ok((a, b, cc, d))
}

/// Fuzzy Adjusted Rand Index between a membership matrix and a hard truth.
/// 1 for perfect crisp agreement, about 0 for chance-level memberships.
pub fn arif(memberships: &[Vec<f64>], truth: &GroundTruth) -> Result<f64> {
    let labels = truth.fully_labeled()?;
    let (a, b, c, d) = fuzzy_pair_sums(memberships, &labels)?;
    let denom = (a + b) * (b + d) + (a + c) * (c + d);
    if denom == 0.0 {
        // a degenerate contingency (single cluster on both sides) counts
        // as perfect agreement when nothing is split, chance otherwise
        return Ok(if b + c == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(2.0 * (a * d - b * c) / denom)
}

/// Fuzzy Jaccard index: together-in-both over all pairs together anywhere.
pub fn jif(memberships: &[Vec<f64>], truth: &GroundTruth) -> Result<f64> {
    let labels = truth.fully_labeled()?;
    let (a, b, c, _) = fuzzy_pair_sums(memberships, &labels)?;
    if a + b + c == 0.0 {
        return Ok(0.0);
    }
    Ok(a / (a + b + c))
}

/// Correct-classification check for the two-cluster scenarios with one
/// isolated series: each cluster's series must all cross the cutoff in a
/// common column (one column per cluster), and the isolated series must
/// stay below the cutoff in both.
pub fn cutoff_success(
    memberships: &[Vec<f64>],
    truth: &GroundTruth,
    cutoff: f64,
) -> Result<bool> {
    let n = memberships.len();
    if n != truth.len() {
        return Err(Error::InvalidInput(format!(
            "{} membership rows vs {} labels",
            n,
            truth.len()
        )));
    }
    if memberships.iter().any(|row| row.len() != 2) {
        return Err(Error::InvalidInput("cutoff check requires exactly 2 clusters".into()));
    }
    let isolated: Vec<usize> = (0..n).filter(|&i| truth.labels[i].is_none()).collect();
    if isolated.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "cutoff check requires exactly one isolated series, found {}",
            isolated.len()
        )));
    }
    let cluster_ids: Vec<usize> = {
        let mut ids: Vec<usize> = truth.labels.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    };
    if cluster_ids.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "cutoff check requires exactly two true clusters, found {}",
            cluster_ids.len()
        )));
    }

    // the isolated series must sit below the cutoff in both columns
    let iso_row = &memberships[isolated[0]];
    if !(iso_row[0] < cutoff && iso_row[1] < cutoff) {
        return Ok(false);
    }

    // try both assignments of truth clusters to membership columns
    'assignment: for (col_a, col_b) in [(0usize, 1usize), (1, 0)] {
        for i in 0..n {
            let col = match truth.labels[i] {
                Some(l) if l == cluster_ids[0] => col_a,
                Some(_) => col_b,
                None => continue,
            };
            if memberships[i][col] <= cutoff {
                continue 'assignment;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Correct-classification rate as a function of the fuzziness parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzinessCurve {
    pub m_values: Vec<f64>,
    pub rates: Vec<f64>,
}

impl FuzzinessCurve {
    pub fn new(m_values: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if m_values.len() != rates.len() {
            return Err(Error::InvalidInput("curve lengths differ".into()));
        }
        if m_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("m grid must be strictly increasing".into()));
        }
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidInput("rates must lie in [0, 1]".into()));
        }
        Ok(FuzzinessCurve { m_values, rates })
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().cloned().fold(0.0, f64::max)
    }
}

/// Area under the fuzziness curve: trapezoidal rule over the m grid.
pub fn aufc(curve: &FuzzinessCurve) -> Result<f64> {
    if curve.m_values.len() < 2 {
        return Err(Error::InvalidInput("need at least two grid points".into()));
    }
    let mut area = 0.0;
    for k in 1..curve.m_values.len() {
        let dm = curve.m_values[k] - curve.m_values[k - 1];
        area += 0.5 * (curve.rates[k] + curve.rates[k - 1]) * dm;
    }
    Ok(area)
}
