//! Cluster-membership certainties for hard partitions.
//!
//! Given a dissimilarity matrix and a hard partition, the [`certainty`]
//! module turns each individual's fit to every cluster into a probability-like
//! row vector, either from counterfactual silhouette widths or from mean
//! dissimilarities. [`evaluation`] scores those rows against ground truth or
//! against the partition itself, [`fanny`] provides fuzzy memberships as a
//! benchmark, and [`simulate`] runs the hybrid-individual experiments.

pub mod certainty;
pub mod datasets;
pub mod dissimilarity;
pub mod error;
pub mod evaluation;
pub mod fanny;
pub mod partition;
pub mod projection;
pub mod simulate;

pub use certainty::{certainty_dissimilarity, certainty_silhouette, CertaintyBasis, CertaintyMatrix, MeasureKind};
pub use dissimilarity::{Dataset, DissimilarityMatrix, FeatureKind, Metric};
pub use error::{Error, ErrorFamily, Result};
pub use evaluation::{match_clusters, EvaluationReport};
pub use fanny::{fanny, FannyOptions, FannyResult};
pub use partition::{hierarchical, kmeans, pam, Linkage, Partition};
pub use simulate::{run_replications, Scenario};
