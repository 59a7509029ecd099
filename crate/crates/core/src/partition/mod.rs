//! Hard partitions and the algorithms that produce them.
//!
//! Labels are zero-based internally (`0..C`). The text format written by
//! [`Partition::to_text`] uses one-based individuals and labels.

mod hierarchical;
mod kmeans;
mod pam;

use std::fmt::Write as _;
use std::path::Path;

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

pub use hierarchical::{hierarchical, linkage_tree, Dendrogram, Linkage, Merge};
pub use kmeans::{kmeans, KMeansResult, DEFAULT_RESTARTS};
pub use pam::{pam, PamResult};

/// A hard assignment of `n` individuals to `C` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    clusters: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, clusters: usize) -> Result<Self> {
        if clusters == 0 {
            return Err(Error::Argument("a partition needs at least one cluster".into()));
        }
        let mut sizes = vec![0usize; clusters];
        for (i, &z) in labels.iter().enumerate() {
            if z >= clusters {
                return Err(Error::Validation(format!(
                    "individual {} has label {} outside 1..{clusters}",
                    i + 1,
                    z + 1
                )));
            }
            sizes[z] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Validation(format!("cluster {} is empty", empty + 1)));
        }
        Ok(Self { labels, clusters })
    }

    /// Infers `C` as the largest label plus one.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let clusters = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, clusters)
    }

    /// Renumbers arbitrary labels by order of first appearance.
    pub fn canonical(raw: &[usize]) -> Result<Self> {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let labels = raw
            .iter()
            .map(|&r| match map.iter().find(|(k, _)| *k == r) {
                Some(&(_, v)) => v,
                None => {
                    let v = map.len();
                    map.push((r, v));
                    v
                }
            })
            .collect();
        Self::new(labels, map.len())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.clusters];
        for &z in &self.labels {
            sizes[z] += 1;
        }
        sizes
    }

    pub fn members(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &z)| z == k)
            .map(|(i, _)| i)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, z) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, z + 1);
        }
        out
    }

    /// Parses `index,label` lines (one-based, indices in order).
    pub fn parse_text(text: &str, origin: &Path) -> Result<Self> {
        let mut labels = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let mut parts = line.split(',').map(str::trim);
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::ingest(origin, lineno, "expected 'index,label'"));
            };
            let index: usize = a
                .parse()
                .map_err(|_| Error::ingest(origin, lineno, format!("bad index '{a}'")))?;
            let label: usize = b
                .parse()
                .ok()
                .filter(|&l| l >= 1)
                .ok_or_else(|| Error::ingest(origin, lineno, format!("bad label '{b}'")))?;
            if index != labels.len() + 1 {
                return Err(Error::ingest(
                    origin,
                    lineno,
                    format!("expected index {}, found {index}", labels.len() + 1),
                ));
            }
            labels.push(label - 1);
        }
        Self::from_labels(labels)
    }

    fn check_matrix(&self, m: &DissimilarityMatrix) -> Result<()> {
        if m.n() != self.n() {
            return Err(Error::Dimension(format!(
                "partition has {} individuals but matrix has {}",
                self.n(),
                m.n()
            )));
        }
        Ok(())
    }
}

/// Per-cluster dissimilarity totals and member counts for individual `i`,
/// excluding `i` itself.
pub(crate) fn cluster_totals(m: &DissimilarityMatrix, z: &Partition, i: usize) -> (Vec<f64>, Vec<usize>) {
    let mut sums = vec![0.0; z.clusters()];
    let mut counts = vec![0usize; z.clusters()];
    for (j, (&d, &k)) in m.row(i).iter().zip(z.labels()).enumerate() {
        if j != i {
            sums[k] += d;
            counts[k] += 1;
        }
    }
    (sums, counts)
}

/// Silhouette of `i` were it a member of cluster `k`, given totals from
/// [`cluster_totals`]. A cluster with no other members yields 0, as does a
/// vanishing denominator.
pub(crate) fn silhouette_if_member(sums: &[f64], counts: &[usize], k: usize) -> f64 {
    if counts[k] == 0 {
        return 0.0;
    }
    let a = sums[k] / counts[k] as f64;
    let b = (0..sums.len())
        .filter(|&j| j != k && counts[j] > 0)
        .map(|j| sums[j] / counts[j] as f64)
        .fold(f64::INFINITY, f64::min);
    if !b.is_finite() {
        return 0.0;
    }
    let denom = a.max(b);
    if denom == 0.0 {
        0.0
    } else {
        (b - a) / denom
    }
}

/// Classic silhouette width `(b - a) / max(a, b)` of individual `i`.
///
/// `a` is the mean dissimilarity to the rest of `i`'s cluster and `b` the
/// smallest mean dissimilarity to another cluster. Singletons get 0.
pub fn silhouette_width(m: &DissimilarityMatrix, z: &Partition, i: usize) -> Result<f64> {
    z.check_matrix(m)?;
    if z.clusters() < 2 {
        return Err(Error::UndefinedSilhouette);
    }
    if i >= z.n() {
        return Err(Error::Argument(format!("individual {i} out of range")));
    }
    let (sums, counts) = cluster_totals(m, z, i);
    Ok(silhouette_if_member(&sums, &counts, z.label(i)))
}

pub fn silhouettes(m: &DissimilarityMatrix, z: &Partition) -> Result<Vec<f64>> {
    (0..z.n()).map(|i| silhouette_width(m, z, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn five_points() -> (DissimilarityMatrix, Partition) {
        // Points on a line: 0, 1, 2 | 6, 8
        let x: [f64; _] = [0.0, 1.0, 2.0, 6.0, 8.0];
        let m = DissimilarityMatrix::from_fn(5, |i, j| (x[i] - x[j]).abs());
        (m, Partition::new(vec![0, 0, 0, 1, 1], 2).unwrap())
    }

    #[test]
    fn silhouette_matches_hand_computation() {
        let (m, z) = five_points();
        // a_i and b_i worked out by hand from the coordinates above.
        let hand = [(1.5, 7.0), (1.0, 6.0), (1.5, 5.0), (2.0, 5.0), (2.0, 7.0)];
        for (i, (a, b)) in hand.iter().enumerate() {
            let expected = (b - a) / f64::max(*a, *b);
            assert!((silhouette_width(&m, &z, i).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn silhouette_zero_when_a_equals_b() {
        // 0 sits at distance 1 from its cluster mate and from both members of the other.
        let m = DissimilarityMatrix::from_dense(
            4,
            vec![
                0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 2.0, 1.0, 2.0, 0.0, 0.5, 1.0, 2.0, 0.5, 0.0,
            ],
        )
        .unwrap();
        let z = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(silhouette_width(&m, &z, 0).unwrap(), 0.0);
    }

    #[test]
    fn silhouette_one_when_a_is_zero() {
        let m = DissimilarityMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { 0.0 } else { 3.0 });
        let z = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(silhouette_width(&m, &z, 0).unwrap(), 1.0);
    }

    #[test]
    fn singleton_silhouette_is_zero() {
        let (m, _) = five_points();
        let z = Partition::new(vec![0, 0, 0, 0, 1], 2).unwrap();
        assert_eq!(silhouette_width(&m, &z, 4).unwrap(), 0.0);
    }

    #[test]
    fn single_cluster_is_undefined() {
        let (m, _) = five_points();
        let z = Partition::new(vec![0; 5], 1).unwrap();
        assert!(matches!(silhouette_width(&m, &z, 0), Err(Error::UndefinedSilhouette)));
    }

    #[test]
    fn partition_rejects_empty_cluster() {
        assert!(Partition::new(vec![0, 0, 2], 3).is_err());
        assert!(Partition::new(vec![0, 1], 0).is_err());
    }

    #[test]
    fn canonical_relabels_by_first_appearance() {
        let z = Partition::canonical(&[7, 3, 7, 9]).unwrap();
        assert_eq!(z.labels(), &[0, 1, 0, 2]);
    }

    #[test]
    fn text_round_trip() {
        let z = Partition::new(vec![1, 0, 2, 1], 3).unwrap();
        let back = Partition::parse_text(&z.to_text(), Path::new("z")).unwrap();
        assert_eq!(z, back);
        assert!(Partition::parse_text("1,1\n3,2\n", Path::new("z")).is_err());
    }

    proptest! {
        #[test]
        fn silhouette_is_bounded_and_scale_free(
            raw in prop::collection::vec(0.0f64..10.0, 45),
            labels in prop::collection::vec(0usize..3, 10),
            c in 0.01f64..1000.0,
        ) {
            let m = DissimilarityMatrix::from_fn(10, |i, j| raw[i * 10 - i * (i + 1) / 2 + j - i - 1]);
            let Ok(z) = Partition::canonical(&labels) else { return Ok(()) };
            prop_assume!(z.clusters() >= 2);
            let scaled = m.scaled(c);
            for i in 0..10 {
                let s = silhouette_width(&m, &z, i).unwrap();
                prop_assert!((-1.0..=1.0).contains(&s));
                prop_assert!((s - silhouette_width(&scaled, &z, i).unwrap()).abs() < 1e-12);
            }
        }
    }
}
