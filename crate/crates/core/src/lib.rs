//! Clustering of circular time series via circular quantile
//! autocorrelation (CQA).
//!
//! The crate implements the full stack: circular quantiles and arcs, the
//! CQA dependence measure with three baseline measures, squared-difference
//! feature distances, fuzzy C-medoids with restarts and hyperparameter
//! selection, process generators for benchmark scenarios, external
//! validity indices and 2-D stress scaling.
//!
//! Data-parallel sections run on rayon under the default `parallel`
//! feature; disabling it yields a dependency-light sequential build with
//! identical outputs.

pub mod circular;
pub mod clustering;
pub mod dependence;
pub mod dissimilarity;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod math;
pub mod rng;
pub mod simulation;

pub use circular::{
    circular_mean, circular_median, circular_quantile, circular_quantiles, Angle, Arc,
    CircularSeries,
};
pub use clustering::{
    run_fcmedoids, run_multistart, select_hyperparameters, select_lags, update_medoids,
    update_memberships, xie_beni, ClusterConfig, FuzzyPartition, HyperGrid, HyperSelection,
};
pub use dependence::{
    arc_indicator_prob, circular_acf_features, cqa, cqa_features, joint_arc_indicator_prob, qa,
    qa_features, rho_fl, rho_js, AcfKind, CircularAcfFeatures, CqaFeatures, QaFeatures,
};
pub use dissimilarity::{
    d_cqa, d_fl, d_js, d_qa, pairwise_matrix, DissimilarityMatrix, MetricKind, MetricParams,
};
pub use embedding::{mds_2d, mds_2d_with_history, stress, Embedding2D};
pub use error::{Error, Result};
pub use evaluation::{arif, aufc, cutoff_success, jif, FuzzinessCurve, GroundTruth};
pub use simulation::{
    build_scenario, motivating_example, scenario, wrap, write_dataset_csv, DistanceSummary,
    Family, GeneratorSpec, QarCoeff, ScenarioId, ScenarioSpec, WrapTransform,
};
