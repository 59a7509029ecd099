use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use clustcert::simulate::{Clustering, DesignKind, Measure};
use clustcert::{Linkage, Metric};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "clustcert",
    version,
    about = "Cluster-membership certainties for hard partitions"
)]
pub struct Cli {
    /// Directory that receives every output file (created if missing).
    #[arg(long, global = true, default_value = "clustcert-out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Cluster a dataset and compute certainties, rates and ambiguous individuals.
    Certainty(CertaintyArgs),
    /// FANNY fuzzy memberships for a dataset.
    Fanny(FannyArgs),
    /// Replicated hybrid-individual experiment.
    Simulate(SimulateArgs),
    /// Re-run a reference table's scenarios and compare.
    Reproduce(ReproduceArgs),
    /// 20-bin histogram over [0, 1] of a CSV column.
    Hist(HistArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Certainty(a) => Some(a.measure.seed),
            Command::Fanny(a) => Some(a.seed),
            Command::Simulate(a) => a.seed,
            Command::Reproduce(a) => Some(a.seed),
            Command::Hist(_) | Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Euclidean,
    Smd,
    Chord,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Smd => Metric::SimpleMatching,
            MetricArg::Chord => Metric::Chord,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterArg {
    Pam,
    Hier,
    Kmeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkageArg {
    Average,
    Complete,
    Ward,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Ward => Linkage::Ward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureArg {
    Sil,
    Dis,
    Fanny,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Sil => Measure::Silhouette,
            MeasureArg::Dis => Measure::Dissimilarity,
            MeasureArg::Fanny => Measure::Fanny,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignArg {
    BinaryTwo,
    BinaryThree,
    ContinuousTwo,
    ContinuousThree,
}

impl From<DesignArg> for DesignKind {
    fn from(d: DesignArg) -> Self {
        match d {
            DesignArg::BinaryTwo => DesignKind::BinaryTwo,
            DesignArg::BinaryThree => DesignKind::BinaryThree,
            DesignArg::ContinuousTwo => DesignKind::ContinuousTwo,
            DesignArg::ContinuousThree => DesignKind::ContinuousThree,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(group(ArgGroup::new("input").required(true).args(["data", "matrix", "iris"])))]
pub struct InputArgs {
    /// Feature CSV with a header; optional `group` and `hybrid` columns.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Dissimilarity matrix CSV (`n=N` header, then N rows).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Use the bundled iris data.
    #[arg(long)]
    pub iris: bool,
    /// Ground-truth groups as `index,group` lines (for matrix input).
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub dissimilarity: MetricArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    #[arg(long, value_enum, default_value = "hier")]
    pub cluster: ClusterArg,
    #[arg(long, value_enum, default_value = "ward")]
    pub linkage: LinkageArg,
    #[arg(long, default_value_t = clustcert::partition::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Existing partition (`index,label` lines) used instead of clustering.
    #[arg(long)]
    pub partition: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[arg(long, value_enum, default_value = "sil")]
    pub measure: MeasureArg,
    /// Fixed exponent (`l`, `v`, or FANNY `r`).
    #[arg(long, conflicts_with_all = ["tune_sd", "tune_rsm"])]
    pub exponent: Option<f64>,
    /// Tune the exponent so sd(P_h1) over replicates equals this value.
    #[arg(long, conflicts_with = "tune_rsm")]
    pub tune_sd: Option<f64>,
    /// Tune the exponent so the soft-misclassification rate equals this value.
    #[arg(long)]
    pub tune_rsm: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl MeasureArgs {
    pub fn default_exponent(&self) -> f64 {
        match self.measure {
            MeasureArg::Fanny => clustcert::fanny::DEFAULT_MEMBERSHIP_EXPONENT,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CertaintyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Number of clusters C.
    #[arg(long)]
    pub clusters: usize,
    /// Sample quantile of assigned-cluster certainty below which individuals are flagged.
    #[arg(long, default_value_t = 0.05)]
    pub quantile: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FannyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub clusters: usize,
    /// Membership exponent r (> 1).
    #[arg(long, default_value_t = clustcert::fanny::DEFAULT_MEMBERSHIP_EXPONENT)]
    pub exponent: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = clustcert::fanny::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = clustcert::fanny::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Scenario TOML; flags given alongside it override its fields.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub design: Option<DesignArg>,
    #[arg(long, value_enum)]
    pub dissimilarity: Option<MetricArg>,
    #[arg(long, value_enum)]
    pub cluster: Option<ClusterArg>,
    #[arg(long, value_enum)]
    pub linkage: Option<LinkageArg>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    #[arg(long, conflicts_with_all = ["tune_sd", "tune_rsm"])]
    pub exponent: Option<f64>,
    #[arg(long, conflicts_with = "tune_rsm")]
    pub tune_sd: Option<f64>,
    #[arg(long)]
    pub tune_rsm: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SimulateArgs {
    pub fn clustering(&self, base: Option<Clustering>) -> Option<Clustering> {
        let linkage = self.linkage.map(Linkage::from);
        let restarts = self.restarts;
        match (self.cluster, base) {
            (Some(ClusterArg::Pam), _) => Some(Clustering::Pam),
            (Some(ClusterArg::Hier), _) => Some(Clustering::Hierarchical {
                linkage: linkage.unwrap_or_default(),
            }),
            (Some(ClusterArg::Kmeans), _) => Some(Clustering::Kmeans {
                restarts: restarts.unwrap_or(clustcert::partition::DEFAULT_RESTARTS),
            }),
            (None, Some(Clustering::Hierarchical { linkage: l })) => Some(Clustering::Hierarchical {
                linkage: linkage.unwrap_or(l),
            }),
            (None, Some(Clustering::Kmeans { restarts: r })) => Some(Clustering::Kmeans {
                restarts: restarts.unwrap_or(r),
            }),
            (None, other) => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum TableId {
    #[value(name = "t1")]
    #[serde(rename = "t1")]
    T1,
    #[value(name = "t2")]
    #[serde(rename = "t2")]
    T2,
    #[value(name = "t3")]
    #[serde(rename = "t3")]
    T3,
    #[value(name = "t4")]
    #[serde(rename = "t4")]
    T4,
    #[value(name = "t5-binary")]
    #[serde(rename = "t5-binary")]
    T5Binary,
    #[value(name = "t5-continuous")]
    #[serde(rename = "t5-continuous")]
    T5Continuous,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub table: TableId,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HistArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "p_h1")]
    pub column: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
