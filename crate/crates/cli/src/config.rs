//! Run configuration shared by every subcommand, serializable as the run
//! manifest so any output directory can be reproduced from its
//! `manifest.json`.

use crate::experiment::RadiusSelection;
use crate::wind::MonthFilter;
use anyhow::Context;
use cqa_core::simulation::WrapTransform;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub fn default_levels() -> Vec<f64> {
    vec![0.1, 0.5, 0.9]
}

/// Radius grid 0.1, 0.2, ..., 2.0.
pub fn default_radius_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 10.0).collect()
}

/// Fuzziness grid 1.1, 1.2, ..., 2.0.
pub fn default_fuzziness_grid() -> Vec<f64> {
    (11..=20).map(|i| i as f64 / 10.0).collect()
}

/// Candidate lag sets tried during hyperparameter selection.
pub fn default_lag_candidates() -> Vec<Vec<usize>> {
    vec![vec![1], vec![1, 2], (1..=10).collect()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Which subcommand this config drives (echoed into manifests).
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<u8>,
    #[serde(default = "eta1")]
    pub wrap: WrapTransform,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub trials: usize,
    pub restarts: usize,
    pub length: usize,
    /// Fixed lag set; `None` selects lags by the permutation test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lags: Option<Vec<usize>>,
    pub levels: Vec<f64>,
    /// Radius values; a single entry fixes the radius, several form the
    /// selection grid.
    pub radius: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    /// Fuzziness values; a single entry fixes m, several form a grid.
    pub fuzziness: Vec<f64>,
    pub cutoff: f64,
    pub seed: u64,
    #[serde(default)]
    pub months: MonthFilter,
    pub max_iter: usize,
    /// CQA radius policy of the scenario experiments.
    #[serde(default)]
    pub radius_selection: RadiusSelection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            scenario: None,
            wrap: WrapTransform::Eta1,
            input: None,
            trials: 200,
            restarts: 200,
            length: 500,
            lags: None,
            levels: default_levels(),
            radius: default_radius_grid(),
            clusters: None,
            fuzziness: default_fuzziness_grid(),
            cutoff: 0.7,
            seed: 1,
            months: MonthFilter::All,
            max_iter: 100,
            radius_selection: RadiusSelection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("bad config {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

fn eta1() -> WrapTransform {
    WrapTransform::Eta1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let mut cfg = RunConfig::default();
        cfg.command = "simulate".into();
        cfg.scenario = Some(2);
        cfg.lags = Some(vec![1, 2]);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn default_grids_match_documented_ranges() {
        assert_eq!(default_radius_grid().len(), 20);
        assert_eq!(default_fuzziness_grid().len(), 10);
        assert_eq!(default_radius_grid()[0], 0.1);
        assert_eq!(*default_radius_grid().last().unwrap(), 2.0);
    }
}
