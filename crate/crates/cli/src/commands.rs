//! Subcommand implementations: each one resolves a [`RunConfig`], runs the
//! corresponding pipeline and writes its tables plus a `manifest.json`
//! that reproduces the run.

use anyhow::{bail, Context};
use cqa_core::clustering::{
    run_multistart, select_hyperparameters, select_lags, ClusterConfig, FuzzyPartition, HyperGrid,
};
use cqa_core::dependence::cqa_features;
use cqa_core::dissimilarity::{pairwise_matrix, MetricKind, MetricParams};
use cqa_core::embedding::mds_2d;
use cqa_core::simulation::{build_scenario, motivating_example, scenario, ScenarioId};
use cqa_core::CircularSeries;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::experiment::{run_cutoff_experiment, run_index_experiment, METRICS};
use crate::wind::{ingest_wind_csv, monthly_split, IngestReport};

fn ensure_out_dir(out: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))
}

fn write_text(path: PathBuf, text: &str) -> anyhow::Result<()> {
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json<T: Serialize>(path: PathBuf, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `simulate`: scenario experiment, ARIF/JIF tables for scenarios 1-3 and
/// cutoff-rate curves plus AUFC summary for scenarios 4-6.
pub fn cmd_simulate(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    ensure_out_dir(out)?;
    let id = ScenarioId::from_index(config.scenario.context("simulate needs --scenario")?)?;
    if !id.has_isolated() {
        let table = run_index_experiment(config)?;
        let mut text = String::from(
            "m,arif_fl,arif_js,arif_cqa,arif_qa,jif_fl,jif_js,jif_cqa,jif_qa\n",
        );
        for (mi, &m) in table.m_values.iter().enumerate() {
            let a = table.arif[mi];
            let j = table.jif[mi];
            text.push_str(&format!(
                "{m},{},{},{},{},{},{},{},{}\n",
                a[0], a[1], a[2], a[3], j[0], j[1], j[2], j[3]
            ));
        }
        write_text(out.join("indices.csv"), &text)?;
        write_json(out.join("indices.json"), &table)?;
    } else {
        let table = run_cutoff_experiment(config)?;
        let mut text = String::from("m,rate_fl,rate_js,rate_cqa,rate_qa\n");
        for (mi, &m) in table.m_values.iter().enumerate() {
            let r = table.rates[mi];
            text.push_str(&format!("{m},{},{},{},{}\n", r[0], r[1], r[2], r[3]));
        }
        write_text(out.join("rates.csv"), &text)?;

        #[derive(Serialize)]
        struct MetricSummary {
            metric: String,
            maximum: f64,
            aufc: f64,
        }
        let summary: Vec<MetricSummary> = METRICS
            .iter()
            .enumerate()
            .map(|(k, kind)| MetricSummary {
                metric: kind.to_string(),
                maximum: table.maximum[k],
                aufc: table.aufc[k],
            })
            .collect();
        let mut text = String::from("metric,maximum,aufc\n");
        for s in &summary {
            text.push_str(&format!("{},{},{}\n", s.metric, s.maximum, s.aufc));
        }
        write_text(out.join("summary.csv"), &text)?;
        write_json(out.join("summary.json"), &summary)?;
    }
    config.save(&out.join("manifest.json"))?;
    Ok(())
}

/// Labeled dataset assembled from a wind CSV: one circular series per
/// station-month.
pub struct WindDataset {
    pub labels: Vec<String>,
    pub series: Vec<CircularSeries>,
    pub report: IngestReport,
}

pub fn load_wind_dataset(config: &RunConfig) -> anyhow::Result<WindDataset> {
    let input = config.input.as_ref().context("this command needs --input")?;
    let (stations, report) = ingest_wind_csv(input)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let multi = stations.len() > 1;
    let mut labels = Vec::new();
    let mut series = Vec::new();
    for (station, records) in &stations {
        let (months, warnings) = monthly_split(records, config.months)?;
        for w in warnings {
            eprintln!("warning: station {station}: {w}");
        }
        for (label, s) in months {
            labels.push(if multi {
                format!("{station} {label}")
            } else {
                label
            });
            series.push(s);
        }
    }
    if series.is_empty() {
        bail!("no usable series in {}", input.display());
    }
    Ok(WindDataset {
        labels,
        series,
        report,
    })
}

/// Outcome of the parameter-resolution step of `cluster`.
#[derive(Debug, Clone, Serialize)]
pub struct SelectedParams {
    pub clusters: usize,
    pub fuzziness: f64,
    pub radius: f64,
    pub lags: Vec<usize>,
    pub lags_selected_by_test: bool,
    pub grid_searched: bool,
}

/// Clusters a labeled dataset with fixed or grid-selected parameters.
/// Returns the partition and the resolved parameters.
pub fn cluster_dataset(
    config: &RunConfig,
    dataset: &[CircularSeries],
) -> anyhow::Result<(FuzzyPartition, SelectedParams)> {
    let clusters = config.clusters.context("clustering needs --clusters")?;
    let min_len = dataset.iter().map(|s| s.len()).min().unwrap_or(0);

    let (lags, lags_selected_by_test) = match &config.lags {
        Some(l) => (l.clone(), false),
        None => {
            let max_lag = 10.min(min_len.saturating_sub(2)).max(1);
            (
                select_lags(dataset, max_lag, 0.05, 200, config.seed)?,
                true,
            )
        }
    };

    let fixed = config.radius.len() == 1 && config.fuzziness.len() == 1;
    if fixed {
        let radius = config.radius[0];
        let fuzziness = config.fuzziness[0];
        let params = MetricParams {
            lags: lags.clone(),
            levels: config.levels.clone(),
            radius: Some(radius),
        };
        let matrix = pairwise_matrix(dataset, MetricKind::Cqa, &params)?;
        let partition = run_multistart(
            &matrix,
            &ClusterConfig {
                clusters,
                fuzziness,
                max_iter: config.max_iter,
                restarts: config.restarts,
                seed: config.seed,
            },
        )?;
        Ok((
            partition,
            SelectedParams {
                clusters,
                fuzziness,
                radius,
                lags,
                lags_selected_by_test,
                grid_searched: false,
            },
        ))
    } else {
        let grid = HyperGrid {
            cluster_values: vec![clusters],
            fuzziness_values: config.fuzziness.clone(),
            radius_values: config.radius.clone(),
        };
        let sel = select_hyperparameters(
            dataset,
            &grid,
            &lags,
            &config.levels,
            config.max_iter,
            config.restarts,
            config.seed,
        )?;
        Ok((
            sel.partition,
            SelectedParams {
                clusters: sel.clusters,
                fuzziness: sel.fuzziness,
                radius: sel.radius,
                lags,
                lags_selected_by_test,
                grid_searched: true,
            },
        ))
    }
}

fn write_membership_csv(
    path: PathBuf,
    labels: &[String],
    partition: &FuzzyPartition,
) -> anyhow::Result<()> {
    let c = partition.cluster_count();
    let mut text = String::from("series");
    for k in 1..=c {
        text.push_str(&format!(",C{k}"));
    }
    text.push('\n');
    for (i, label) in labels.iter().enumerate() {
        text.push_str(label);
        for u in partition.row(i) {
            text.push_str(&format!(",{u:.6}"));
        }
        text.push('\n');
    }
    write_text(path, &text)
}

/// `cluster`: wind CSV in, fuzzy partition artifacts out.
pub fn cmd_cluster(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    ensure_out_dir(out)?;
    let data = load_wind_dataset(config)?;
    let (partition, selected) = cluster_dataset(config, &data.series)?;

    write_membership_csv(out.join("membership.csv"), &data.labels, &partition)?;

    let mut text = String::from("cluster,series_index,label\n");
    for (c, &mid) in partition.medoids.iter().enumerate() {
        text.push_str(&format!("C{},{mid},{}\n", c + 1, data.labels[mid]));
    }
    write_text(out.join("medoids.csv"), &text)?;

    // dependence fingerprint of each medoid: its CQA tensor at the
    // selected lags/levels/radius
    let mut text = String::from("cluster,label,lag,tau_row,tau_col,rho\n");
    for (c, &mid) in partition.medoids.iter().enumerate() {
        let features = cqa_features(
            &data.series[mid],
            &selected.lags,
            &config.levels,
            selected.radius,
        )?;
        for (k, &lag) in selected.lags.iter().enumerate() {
            for (i, &ti) in config.levels.iter().enumerate() {
                for (j, &tj) in config.levels.iter().enumerate() {
                    text.push_str(&format!(
                        "C{},{},{lag},{ti},{tj},{}\n",
                        c + 1,
                        data.labels[mid],
                        features.get(k, i, j)
                    ));
                }
            }
        }
    }
    write_text(out.join("fingerprint.csv"), &text)?;

    #[derive(Serialize)]
    struct PartitionRecord<'a> {
        memberships: &'a Vec<Vec<f64>>,
        medoids: &'a Vec<usize>,
        objective: f64,
        iterations: usize,
        converged: bool,
        selected: &'a SelectedParams,
        config: &'a RunConfig,
    }
    write_json(
        out.join("partition.json"),
        &PartitionRecord {
            memberships: &partition.memberships,
            medoids: &partition.medoids,
            objective: partition.objective,
            iterations: partition.iterations,
            converged: partition.converged,
            selected: &selected,
            config,
        },
    )?;
    write_json(out.join("ingest_report.json"), &data.report)?;
    config.save(&out.join("manifest.json"))?;
    Ok(())
}

/// `mds`: a 2-D stress embedding of a wind CSV or a simulated scenario.
pub fn cmd_mds(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    ensure_out_dir(out)?;
    let (labels, series): (Vec<String>, Vec<CircularSeries>) = if config.input.is_some() {
        let data = load_wind_dataset(config)?;
        (data.labels, data.series)
    } else if let Some(idx) = config.scenario {
        let id = ScenarioId::from_index(idx)?;
        let spec = scenario(id, config.wrap, config.length)?;
        let (series, truth) = build_scenario(&spec, config.seed)?;
        let labels = truth
            .iter()
            .map(|l| match l {
                Some(c) => format!("C{}", c + 1),
                None => "none".to_string(),
            })
            .collect();
        (labels, series)
    } else {
        bail!("mds needs either --input or --scenario");
    };

    let lags = config.lags.clone().unwrap_or_else(|| vec![1]);
    let radius = *config.radius.first().context("mds needs a radius")?;
    let params = MetricParams {
        lags,
        levels: config.levels.clone(),
        radius: Some(radius),
    };
    let matrix = pairwise_matrix(&series, MetricKind::Cqa, &params)?;
    let embedding = mds_2d(&matrix, config.seed, 300, 1e-9)?;

    let mut text = String::from("index,a,b,label\n");
    for (i, (a, b)) in embedding.points.iter().enumerate() {
        text.push_str(&format!("{i},{a},{b},{}\n", labels[i]));
    }
    write_text(out.join("coords.csv"), &text)?;

    #[derive(Serialize)]
    struct StressRecord {
        stress: f64,
        r_squared: f64,
        iterations: usize,
    }
    write_json(
        out.join("stress.json"),
        &StressRecord {
            stress: embedding.stress,
            r_squared: embedding.r_squared,
            iterations: embedding.iterations,
        },
    )?;
    config.save(&out.join("manifest.json"))?;
    Ok(())
}

/// `motivating`: the replicated two-process distance table.
pub fn cmd_motivating(config: &RunConfig, out: &Path) -> anyhow::Result<()> {
    ensure_out_dir(out)?;
    let rows = motivating_example(config.length, config.trials, &config.radius, config.seed)?;
    let mut text = String::from("distance,radius,mean,sd,q05,q95\n");
    for r in &rows {
        let radius = r.radius.map_or(String::new(), |v| v.to_string());
        text.push_str(&format!(
            "{},{radius},{},{},{},{}\n",
            r.label, r.mean, r.sd, r.q05, r.q95
        ));
    }
    write_text(out.join("table.csv"), &text)?;
    write_json(out.join("table.json"), &rows)?;
    config.save(&out.join("manifest.json"))?;
    Ok(())
}

/// Writes a wind-style CSV from labeled series (test fixtures and
/// round-trip checks).
pub fn write_wind_csv(
    path: &Path,
    station: &str,
    series: &[(String, Vec<f64>)],
) -> anyhow::Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "station,timestamp,direction_deg")?;
    for (start, vals) in series {
        let mut t = chrono::NaiveDateTime::parse_from_str(start, "%Y-%m-%dT%H:%M:%S")?;
        for &v in vals {
            writeln!(f, "{station},{},{v}", t.format("%Y-%m-%dT%H:%M:%S"))?;
            t += chrono::Duration::hours(1);
        }
    }
    Ok(())
}
