//! Fuzzy C-medoids clustering on a precomputed dissimilarity matrix, with
//! a multi-restart protocol, the Xie-Beni validity index, permutation-based
//! lag selection and grid search over `(C, m, r)`.

use crate::circular::CircularSeries;
use crate::dependence::rho_js;
use crate::dissimilarity::{pairwise_matrix, DissimilarityMatrix, MetricKind, MetricParams};
use crate::error::{Error, Result};
use crate::exec;
use crate::rng::{derive_seed, rng_from_seed};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Fuzzy partition: memberships, medoid indices and the final objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyPartition {
    /// Row-stochastic n x C membership matrix, row major.
    pub memberships: Vec<Vec<f64>>,
    /// Dataset indices of the C medoids (pairwise distinct).
    pub medoids: Vec<usize>,
    /// Final value of the weighted-distance objective.
    pub objective: f64,
    /// Update iterations performed.
    pub iterations: usize,
    /// Whether the medoid set stabilized before the iteration budget.
    pub converged: bool,
}

impl FuzzyPartition {
    /// Membership row of series `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.memberships[i]
    }

    pub fn cluster_count(&self) -> usize {
        self.medoids.len()
    }
}

/// Clustering run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub clusters: usize,
    pub fuzziness: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl ClusterConfig {
    pub fn new(clusters: usize, fuzziness: f64, seed: u64) -> Self {
        ClusterConfig {
            clusters,
            fuzziness,
            max_iter: 100,
            restarts: 1,
            seed,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.clusters < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 clusters, got {}",
                self.clusters
            )));
        }
        if self.clusters >= n {
            return Err(Error::InvalidConfig(format!(
                "{} clusters do not fit {} series",
                self.clusters, n
            )));
        }
        if !(self.fuzziness > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fuzziness must exceed 1, got {}",
                self.fuzziness
            )));
        }
        Ok(())
    }
}

/// Membership update: inverse power-ratio of distances to the medoids.
/// A zero distance hard-assigns the row to the first such cluster.
pub fn update_memberships(
    dissim: &DissimilarityMatrix,
    medoids: &[usize],
    fuzziness: f64,
) -> Vec<Vec<f64>> {
    let n = dissim.len();
    let c = medoids.len();
    let exponent = 1.0 / (fuzziness - 1.0);
    (0..n)
        .map(|i| {
            let dists: Vec<f64> = medoids.iter().map(|&mid| dissim.get(i, mid)).collect();
            if let Some(zero) = dists.iter().position(|&d| d == 0.0) {
                let mut row = vec![0.0; c];
                row[zero] = 1.0;
                return row;
            }
            (0..c)
                .map(|ci| {
                    let sum: f64 = dists
                        .iter()
                        .map(|&other| (dists[ci] / other).powf(exponent))
                        .sum();
                    1.0 / sum
                })
                .collect()
        })
        .collect()
}

/// Weighted cost of placing cluster `ci`'s medoid at candidate `j`.
fn medoid_cost(dissim: &DissimilarityMatrix, memberships: &[Vec<f64>], ci: usize, j: usize, fuzziness: f64) -> f64 {
    (0..dissim.len())
        .map(|i| memberships[i][ci].powf(fuzziness) * dissim.get(i, j))
        .sum()
}

/// Medoid update: per-cluster argmin of the membership-weighted distance
/// sum, ties by smallest index. When two clusters pick the same series the
/// later cluster takes its next-best candidate, keeping medoids distinct.
pub fn update_medoids(
    dissim: &DissimilarityMatrix,
    memberships: &[Vec<f64>],
    fuzziness: f64,
) -> Vec<usize> {
    let n = dissim.len();
    let c = memberships.first().map_or(0, |row| row.len());
    let mut chosen: Vec<usize> = Vec::with_capacity(c);
    for ci in 0..c {
        let mut ranked: Vec<(f64, usize)> = (0..n)
            .map(|j| (medoid_cost(dissim, memberships, ci, j, fuzziness), j))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let pick = ranked
            .iter()
            .find(|(_, j)| !chosen.contains(j))
            .expect("fewer candidates than clusters")
            .1;
        chosen.push(pick);
    }
    chosen
}

/// Objective of a (membership, medoid) pair.
pub fn objective(
    dissim: &DissimilarityMatrix,
    memberships: &[Vec<f64>],
    medoids: &[usize],
    fuzziness: f64,
) -> f64 {
    let mut total = 0.0;
    for (i, row) in memberships.iter().enumerate() {
        for (ci, &u) in row.iter().enumerate() {
            total += u.powf(fuzziness) * dissim.get(i, medoids[ci]);
        }
    }
    total
}

fn same_medoid_set(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// One fuzzy C-medoids run from a random distinct medoid set, alternating
/// membership and medoid updates until the medoid set repeats or the
/// iteration budget runs out. The returned memberships are always the
/// optimal ones for the returned medoids.
pub fn run_fcmedoids(dissim: &DissimilarityMatrix, config: &ClusterConfig) -> Result<FuzzyPartition> {
    let n = dissim.len();
    config.validate(n)?;

    let mut rng = rng_from_seed(config.seed);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let mut medoids: Vec<usize> = indices[..config.clusters].to_vec();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        let memberships = update_memberships(dissim, &medoids, config.fuzziness);
        let next = update_medoids(dissim, &memberships, config.fuzziness);
        iterations += 1;
        let stable = same_medoid_set(&next, &medoids);
        medoids = next;
        if stable {
            converged = true;
            break;
        }
    }

    let memberships = update_memberships(dissim, &medoids, config.fuzziness);
    let objective = objective(dissim, &memberships, &medoids, config.fuzziness);
    Ok(FuzzyPartition {
        memberships,
        medoids,
        objective,
        iterations,
        converged,
    })
}

/// Multi-restart protocol: independent runs from per-restart sub-seeds,
/// keeping the partition with the smallest objective (ties by restart
/// index, so the reduction is order-independent).
pub fn run_multistart(dissim: &DissimilarityMatrix, config: &ClusterConfig) -> Result<FuzzyPartition> {
    if config.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be positive".into()));
    }
    config.validate(dissim.len())?;
    let runs = exec::map_range(config.restarts, |r| {
        let sub = ClusterConfig {
            seed: derive_seed(config.seed, r as u64),
            restarts: 1,
            ..config.clone()
        };
        run_fcmedoids(dissim, &sub)
    });
    let mut best: Option<FuzzyPartition> = None;
    for run in runs {
        let run = run?;
        best = Some(match best {
            None => run,
            Some(cur) if run.objective < cur.objective => run,
            Some(cur) => cur,
        });
    }
    Ok(best.expect("at least one restart"))
}

/// Xie-Beni index: objective over `n` times the minimum medoid separation.
/// Coincident medoids (zero separation) give the +infinity sentinel.
pub fn xie_beni(
    dissim: &DissimilarityMatrix,
    memberships: &[Vec<f64>],
    medoids: &[usize],
    fuzziness: f64,
) -> f64 {
    let mut min_sep = f64::INFINITY;
    for (a, &ma) in medoids.iter().enumerate() {
        for &mb in &medoids[a + 1..] {
            min_sep = min_sep.min(dissim.get(ma, mb));
        }
    }
    if min_sep == 0.0 {
        return f64::INFINITY;
    }
    objective(dissim, memberships, medoids, fuzziness) / (dissim.len() as f64 * min_sep)
}

/// Lag selection: a permutation test of the Jammalamadaka-Sarma
/// autocorrelation per series and lag. A lag enters the selected set when
/// more than half of the series reject the no-dependence null at level
/// `alpha`; an empty selection falls back to `{1}`.
pub fn select_lags(
    dataset: &[CircularSeries],
    max_lag: usize,
    alpha: f64,
    permutations: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if dataset.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    let min_len = dataset.iter().map(|s| s.len()).min().unwrap();
    if max_lag == 0 || max_lag + 2 > min_len {
        return Err(Error::InvalidInput(format!(
            "max_lag {max_lag} too large for series of length {min_len}"
        )));
    }

    // rejects[s][l-1] = series s rejects the null at lag l
    let rejects = exec::map_range(dataset.len(), |s_idx| {
        let series = &dataset[s_idx];
        let observed: Vec<f64> = (1..=max_lag)
            .map(|l| rho_js(series, l).map(f64::abs))
            .collect::<Result<_>>()?;
        let mut rng = rng_from_seed(derive_seed(seed, s_idx as u64));
        let mut exceed = vec![0usize; max_lag];
        let mut shuffled: Vec<f64> = series.radians().collect();
        for _ in 0..permutations {
            shuffled.shuffle(&mut rng);
            let perm = CircularSeries::from_radians(&shuffled)?;
            for l in 1..=max_lag {
                if rho_js(&perm, l)?.abs() >= observed[l - 1] {
                    exceed[l - 1] += 1;
                }
            }
        }
        let flags: Vec<bool> = (0..max_lag)
            .map(|k| {
                let p_value = (1 + exceed[k]) as f64 / (permutations + 1) as f64;
                p_value <= alpha
            })
            .collect();
        Ok::<_, Error>(flags)
    });

    let mut votes = vec![0usize; max_lag];
    for r in rejects {
        for (k, flag) in r?.into_iter().enumerate() {
            if flag {
                votes[k] += 1;
            }
        }
    }
    let majority = dataset.len() as f64 / 2.0;
    let selected: Vec<usize> = (0..max_lag)
        .filter(|&k| votes[k] as f64 > majority)
        .map(|k| k + 1)
        .collect();
    if selected.is_empty() {
        Ok(vec![1])
    } else {
        Ok(selected)
    }
}

/// Candidate grids for the `(C, m, r)` search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub cluster_values: Vec<usize>,
    pub fuzziness_values: Vec<f64>,
    pub radius_values: Vec<f64>,
}

impl HyperGrid {
    fn validate(&self) -> Result<()> {
        if self.cluster_values.is_empty()
            || self.fuzziness_values.is_empty()
            || self.radius_values.is_empty()
        {
            return Err(Error::InvalidConfig("empty hyperparameter grid".into()));
        }
        Ok(())
    }
}

/// Winner of a hyperparameter search.
#[derive(Debug, Clone)]
pub struct HyperSelection {
    pub clusters: usize,
    pub fuzziness: f64,
    pub radius: f64,
    pub partition: FuzzyPartition,
    pub xie_beni: f64,
}

/// Grid search over `(C, m, r)`: one CQA matrix per radius, a multistart
/// clustering per tuple, and the Xie-Beni argmin (ties by grid order,
/// clusters outermost and radius innermost).
pub fn select_hyperparameters(
    dataset: &[CircularSeries],
    grid: &HyperGrid,
    lags: &[usize],
    levels: &[f64],
    max_iter: usize,
    restarts: usize,
    seed: u64,
) -> Result<HyperSelection> {
    grid.validate()?;
    let matrices: Vec<DissimilarityMatrix> = grid
        .radius_values
        .iter()
        .map(|&r| {
            let params = MetricParams {
                lags: lags.to_vec(),
                levels: levels.to_vec(),
                radius: Some(r),
            };
            pairwise_matrix(dataset, MetricKind::Cqa, &params)
        })
        .collect::<Result<_>>()?;

    let n_m = grid.fuzziness_values.len();
    let n_r = grid.radius_values.len();
    let total = grid.cluster_values.len() * n_m * n_r;
    let runs = exec::map_range(total, |idx| {
        let ci = idx / (n_m * n_r);
        let mi = (idx / n_r) % n_m;
        let ri = idx % n_r;
        let config = ClusterConfig {
            clusters: grid.cluster_values[ci],
            fuzziness: grid.fuzziness_values[mi],
            max_iter,
            restarts,
            seed: derive_seed(seed, idx as u64),
        };
        let partition = run_multistart(&matrices[ri], &config)?;
        let score = xie_beni(
            &matrices[ri],
            &partition.memberships,
            &partition.medoids,
            config.fuzziness,
        );
        Ok::<_, Error>((score, idx, partition))
    });

    let mut best: Option<(f64, usize, FuzzyPartition)> = None;
    for run in runs {
        let (score, idx, partition) = run?;
        let better = match &best {
            None => true,
            Some((bs, bi, _)) => score < *bs || (score == *bs && idx < *bi),
        };
        if better {
            best = Some((score, idx, partition));
        }
    }
    let (score, idx, partition) = best.expect("nonempty grid");
    let ci = idx / (n_m * n_r);
    let mi = (idx / n_r) % n_m;
    let ri = idx % n_r;
    Ok(HyperSelection {
        clusters: grid.cluster_values[ci],
        fuzziness: grid.fuzziness_values[mi],
        radius: grid.radius_values[ri],
        partition,
        xie_beni: score,
    })
}
