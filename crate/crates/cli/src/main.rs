use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use cqa_cli::commands::{cmd_cluster, cmd_mds, cmd_motivating, cmd_simulate};
use cqa_cli::config::RunConfig;
use cqa_cli::wind::MonthFilter;
use cqa_core::simulation::WrapTransform;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "cqa",
    about = "Fuzzy clustering of circular time series via circular quantile autocorrelation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Load a full run configuration (e.g. a previous manifest.json);
    /// other flags are ignored when set.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for tables and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// RNG seed; every stochastic step derives from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Restarts of the fuzzy C-medoids per clustering run.
    #[arg(long, default_value_t = 200)]
    restarts: usize,

    /// Probability levels of the quantile-based features.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.5, 0.9])]
    levels: Vec<f64>,

    /// Arc radius values: one fixes the radius, several form the
    /// selection grid (default 0.1..2.0 step 0.1).
    #[arg(long, value_delimiter = ',')]
    radius: Option<Vec<f64>>,

    /// Lag set for the dependence features (e.g. 1,2,3). Omitted:
    /// scenario defaults or the permutation-test selection.
    #[arg(long, value_delimiter = ',')]
    lags: Option<Vec<usize>>,

    /// Iteration cap of one fuzzy C-medoids run.
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark scenario experiment (ARIF/JIF tables for
    /// scenarios 1-3, cutoff-rate curves for 4-6).
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Scenario id, 1..=6.
        #[arg(long)]
        scenario: Option<u8>,
        /// Wrapping transform: eta1 (x mod 2pi) or eta2 (2 atan x + pi).
        #[arg(long, default_value = "eta1")]
        wrap: String,
        /// Monte Carlo trials.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Series length.
        #[arg(long, default_value_t = 500)]
        length: usize,
        /// Fuzziness values (grid).
        #[arg(long, value_delimiter = ',')]
        fuzziness: Option<Vec<f64>>,
        /// Cluster count (defaults to the scenario's true count).
        #[arg(long)]
        clusters: Option<usize>,
        /// Membership cutoff for scenarios 4-6.
        #[arg(long, default_value_t = 0.7)]
        cutoff: f64,
    },
    /// Cluster a wind-direction CSV into monthly circular series.
    Cluster {
        #[command(flatten)]
        common: CommonArgs,
        /// Input CSV (station, timestamp, direction_deg).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of clusters.
        #[arg(long)]
        clusters: Option<usize>,
        /// Fuzziness values: one fixes m, several form the grid
        /// (default 1.1..2.0 step 0.1).
        #[arg(long, value_delimiter = ',')]
        fuzziness: Option<Vec<f64>>,
        /// Keep only winter (Dec-Mar) and summer (Jun-Sep) months.
        #[arg(long)]
        winter_summer: bool,
    },
    /// Project series onto the plane by stress-minimizing 2-D scaling.
    Mds {
        #[command(flatten)]
        common: CommonArgs,
        /// Input CSV; alternative to --scenario.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Scenario id to embed instead of a CSV.
        #[arg(long)]
        scenario: Option<u8>,
        #[arg(long, default_value = "eta1")]
        wrap: String,
        #[arg(long, default_value_t = 500)]
        length: usize,
        /// Keep only winter and summer months of a CSV input.
        #[arg(long)]
        winter_summer: bool,
    },
    /// Replicated two-process distance table over a radius grid.
    Motivating {
        #[command(flatten)]
        common: CommonArgs,
        /// Replicate pairs.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Series length.
        #[arg(long, default_value_t = 5000)]
        length: usize,
    },
}

fn parse_wrap(s: &str) -> Result<WrapTransform> {
    match s {
        "eta1" => Ok(WrapTransform::Eta1),
        "eta2" => Ok(WrapTransform::Eta2),
        other => anyhow::bail!("unknown wrap {other:?}, expected eta1 or eta2"),
    }
}

fn base_config(common: &CommonArgs, command: &str) -> RunConfig {
    let mut cfg = RunConfig {
        command: command.to_string(),
        seed: common.seed,
        restarts: common.restarts,
        levels: common.levels.clone(),
        max_iter: common.max_iter,
        ..RunConfig::default()
    };
    if let Some(r) = &common.radius {
        cfg.radius = r.clone();
    }
    cfg.lags = common.lags.clone();
    cfg
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            common,
            scenario,
            wrap,
            trials,
            length,
            fuzziness,
            clusters,
            cutoff,
        } => {
            let cfg = match &common.config {
                Some(path) => RunConfig::load(path)?,
                None => {
                    let mut cfg = base_config(&common, "simulate");
                    cfg.scenario = scenario;
                    cfg.wrap = parse_wrap(&wrap)?;
                    cfg.trials = trials;
                    cfg.length = length;
                    cfg.clusters = clusters;
                    cfg.cutoff = cutoff;
                    cfg.fuzziness = fuzziness.unwrap_or_else(|| {
                        if matches!(scenario, Some(4..=6)) {
                            // cutoff curves scan m over (1, 4]
                            (11..=40).map(|i| i as f64 / 10.0).collect()
                        } else {
                            vec![1.2, 1.4, 1.6, 1.8, 2.0]
                        }
                    });
                    cfg
                }
            };
            cmd_simulate(&cfg, &common.out)
        }
        Command::Cluster {
            common,
            input,
            clusters,
            fuzziness,
            winter_summer,
        } => {
            let cfg = match &common.config {
                Some(path) => RunConfig::load(path)?,
                None => {
                    let mut cfg = base_config(&common, "cluster");
                    cfg.input = input;
                    cfg.clusters = clusters;
                    if let Some(m) = fuzziness {
                        cfg.fuzziness = m;
                    }
                    cfg.months = if winter_summer {
                        MonthFilter::WinterSummer
                    } else {
                        MonthFilter::All
                    };
                    cfg
                }
            };
            cmd_cluster(&cfg, &common.out)
        }
        Command::Mds {
            common,
            input,
            scenario,
            wrap,
            length,
            winter_summer,
        } => {
            let cfg = match &common.config {
                Some(path) => RunConfig::load(path)?,
                None => {
                    let mut cfg = base_config(&common, "mds");
                    cfg.input = input;
                    cfg.scenario = scenario;
                    cfg.wrap = parse_wrap(&wrap)?;
                    cfg.length = length;
                    if common.radius.is_none() {
                        cfg.radius = vec![0.7];
                    }
                    cfg.months = if winter_summer {
                        MonthFilter::WinterSummer
                    } else {
                        MonthFilter::All
                    };
                    cfg
                }
            };
            cmd_mds(&cfg, &common.out)
        }
        Command::Motivating {
            common,
            trials,
            length,
        } => {
            let cfg = match &common.config {
                Some(path) => RunConfig::load(path)?,
                None => {
                    let mut cfg = base_config(&common, "motivating");
                    cfg.trials = trials;
                    cfg.length = length;
                    if common.radius.is_none() {
                        // the radius sweep of the two-process experiment
                        cfg.radius = (1..=31).map(|i| i as f64 / 10.0).collect();
                    }
                    cfg
                }
            };
            cmd_motivating(&cfg, &common.out)
        }
    }
}
