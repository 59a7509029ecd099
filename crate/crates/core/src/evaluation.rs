//! Partition scoring: cluster-to-group matching, soft-misclassification and
//! partition-disagreement rates, and bisection tuning of the exponent.

use serde::Serialize;

use crate::certainty::{CertaintyMatrix, MeasureKind};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Bijection from cluster labels to group labels (both zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterMapping {
    to_group: Vec<usize>,
    to_cluster: Vec<usize>,
}

impl ClusterMapping {
    pub fn identity(c: usize) -> Self {
        Self {
            to_group: (0..c).collect(),
            to_cluster: (0..c).collect(),
        }
    }

    pub fn from_cluster_to_group(to_group: Vec<usize>) -> Result<Self> {
        let c = to_group.len();
        let mut to_cluster = vec![usize::MAX; c];
        for (k, &g) in to_group.iter().enumerate() {
            if g >= c || to_cluster[g] != usize::MAX {
                return Err(Error::Validation("cluster mapping is not a bijection".into()));
            }
            to_cluster[g] = k;
        }
        Ok(Self { to_group, to_cluster })
    }

    pub fn group_of(&self, cluster: usize) -> usize {
        self.to_group[cluster]
    }

    pub fn cluster_of(&self, group: usize) -> usize {
        self.to_cluster[group]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.to_group
    }
}

/// `C x G` table of counts: entry `(k, g)` counts individuals in cluster `k` from group `g`.
pub fn contingency(labels: &[usize], c: usize, groups: &[usize], g: usize) -> Vec<Vec<usize>> {
    let mut table = vec![vec![0; g]; c];
    for (&k, &t) in labels.iter().zip(groups) {
        table[k][t] += 1;
    }
    table
}

/// Assignment maximising `sum_k weight[k][perm[k]]` over permutations
/// (Hungarian algorithm with potentials, O(C^3)).
pub fn max_weight_assignment(weight: &[Vec<i64>]) -> Vec<usize> {
    let n = weight.len();
    // Minimise cost = -weight. Rows and columns are 1-based inside the loop.
    let cost = |i: usize, j: usize| -weight[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    perm
}

/// Matches raw cluster labels to groups by maximal total overlap. Clusters may
/// be empty; `c` must equal the number of groups.
pub fn match_labels(labels: &[usize], c: usize, groups: &[usize], g: usize) -> Result<ClusterMapping> {
    if c != g {
        return Err(Error::Mismatch(format!("{c} clusters but {g} groups")));
    }
    if labels.len() != groups.len() {
        return Err(Error::Dimension(format!(
            "{} labels but {} group labels",
            labels.len(),
            groups.len()
        )));
    }
    let table = contingency(labels, c, groups, g);
    let weight: Vec<Vec<i64>> = table
        .iter()
        .map(|row| row.iter().map(|&x| x as i64).collect())
        .collect();
    ClusterMapping::from_cluster_to_group(max_weight_assignment(&weight))
}

pub fn match_clusters(z: &Partition, groups: &[usize]) -> Result<ClusterMapping> {
    let g = groups.iter().max().map_or(0, |m| m + 1);
    match_labels(z.labels(), z.clusters(), groups, g)
}

fn included(i: usize, exclude: Option<usize>) -> bool {
    Some(i) != exclude
}

/// Mean over individuals (except `exclude`) of `1 - P[i, cluster matched to g_i]`.
pub fn soft_misclassification(
    p: &CertaintyMatrix,
    groups: &[usize],
    mapping: &ClusterMapping,
    exclude: Option<usize>,
) -> Result<f64> {
    if groups.len() != p.n() {
        return Err(Error::Argument(format!(
            "{} group labels for {} individuals",
            groups.len(),
            p.n()
        )));
    }
    let (sum, count) = (0..p.n())
        .filter(|&i| included(i, exclude))
        .fold((0.0, 0usize), |(s, c), i| {
            (s + 1.0 - p.get(i, mapping.cluster_of(groups[i])), c + 1)
        });
    mean(sum, count)
}

/// Mean over individuals (except `exclude`) of `1 - P[i, z_i]`.
pub fn partition_disagreement(p: &CertaintyMatrix, assigned: &[usize], exclude: Option<usize>) -> Result<f64> {
    if assigned.len() != p.n() || assigned.iter().any(|&k| k >= p.clusters()) {
        return Err(Error::Argument(format!(
            "assignment of {} individuals does not fit a {}x{} certainty matrix",
            assigned.len(),
            p.n(),
            p.clusters()
        )));
    }
    let (sum, count) = (0..p.n())
        .filter(|&i| included(i, exclude))
        .fold((0.0, 0usize), |(s, c), i| (s + 1.0 - p.get(i, assigned[i]), c + 1));
    mean(sum, count)
}

fn mean(sum: f64, count: usize) -> Result<f64> {
    if count == 0 {
        return Err(Error::Argument("no individuals to average over".into()));
    }
    Ok(sum / count as f64)
}

/// Individuals whose matched cluster differs from their true group.
pub fn hard_misclassified(assigned: &[usize], groups: &[usize], mapping: &ClusterMapping) -> Vec<usize> {
    assigned
        .iter()
        .zip(groups)
        .enumerate()
        .filter(|(_, (&k, &g))| mapping.group_of(k) != g)
        .map(|(i, _)| i)
        .collect()
}

/// Serialised summary of how a certainty matrix scores a partition.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub r_sm: Option<f64>,
    pub r_pd: f64,
    /// One-based group label for each one-based cluster, when groups are known.
    pub mapping: Option<Vec<usize>>,
    /// One-based indices of hard-misclassified individuals.
    pub misclassified: Vec<usize>,
    pub exponent: f64,
    pub measure: MeasureKind,
}

impl EvaluationReport {
    pub fn build(
        p: &CertaintyMatrix,
        assigned: &[usize],
        groups: Option<&[usize]>,
        exclude: Option<usize>,
    ) -> Result<Self> {
        let r_pd = partition_disagreement(p, assigned, exclude)?;
        let (r_sm, mapping, misclassified) = match groups {
            Some(g) => {
                if g.len() != assigned.len() {
                    return Err(Error::Dimension(format!(
                        "{} group labels for {} individuals",
                        g.len(),
                        assigned.len()
                    )));
                }
                let gc = g.iter().max().map_or(0, |m| m + 1);
                let keep: Vec<usize> = (0..assigned.len()).filter(|&i| included(i, exclude)).collect();
                let kept_z: Vec<usize> = keep.iter().map(|&i| assigned[i]).collect();
                let kept_g: Vec<usize> = keep.iter().map(|&i| g[i]).collect();
                let mapping = match_labels(&kept_z, p.clusters(), &kept_g, gc)?;
                let r_sm = soft_misclassification(p, g, &mapping, exclude)?;
                let mis = hard_misclassified(assigned, g, &mapping)
                    .into_iter()
                    .filter(|&i| included(i, exclude))
                    .map(|i| i + 1)
                    .collect();
                let one_based = mapping.as_slice().iter().map(|g| g + 1).collect();
                (Some(r_sm), Some(one_based), mis)
            }
            None => (None, None, Vec::new()),
        };
        Ok(Self {
            r_sm,
            r_pd,
            mapping,
            misclassified,
            exponent: p.exponent(),
            measure: p.kind(),
        })
    }
}

pub const TUNE_LOWER: f64 = 1e-3;
pub const TUNE_UPPER: f64 = 64.0;
pub const TUNE_ITERATIONS: usize = 60;
pub const TUNE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TuneObjective {
    /// Standard deviation of the hybrid's certainty for cluster 1 (increases with the exponent).
    HybridSd,
    /// Soft-misclassification rate (decreases with the exponent).
    SoftMisclassification,
    /// Partition-disagreement rate (decreases with the exponent).
    PartitionDisagreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tuned {
    pub exponent: f64,
    pub value: f64,
    /// False when the target lies outside the objective's range on the bracket;
    /// `exponent` is then the nearer bracket endpoint.
    pub attained: bool,
    /// False when some midpoint fell outside the values at its bracket ends.
    pub monotone: bool,
}

/// Bisects `[TUNE_LOWER, TUNE_UPPER]` for the exponent at which the monotone
/// `objective` equals `target`.
///
/// Bisection always keeps the half that brackets the target. A midpoint value
/// outside the values at its bracket ends shows the objective is not monotone;
/// the search still finishes and the result carries `monotone = false`.
pub fn tune_exponent<F>(mut objective: F, target: f64) -> Result<Tuned>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (TUNE_LOWER, TUNE_UPPER);
    let (mut f_lo, mut f_hi) = (objective(lo)?, objective(hi)?);
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::Tuning("objective is not finite at the bracket ends".into()));
    }
    let (min_f, max_f) = (f_lo.min(f_hi), f_lo.max(f_hi));
    if target <= min_f || target >= max_f {
        let (exponent, value) = if (target - f_lo).abs() <= (target - f_hi).abs() {
            (lo, f_lo)
        } else {
            (hi, f_hi)
        };
        return Ok(Tuned {
            exponent,
            value,
            attained: (value - target).abs() <= TUNE_TOLERANCE,
            monotone: true,
        });
    }
    let between = |x: f64, y: f64| target >= x.min(y) && target <= x.max(y);
    let mut best = (lo, f_lo);
    let mut monotone = true;
    for _ in 0..TUNE_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = objective(mid)?;
        let (a, b) = (f_lo.min(f_hi), f_lo.max(f_hi));
        let outside = !(a - 1e-12..=b + 1e-12).contains(&f_mid);
        monotone &= !outside;
        let in_lo = between(f_lo, f_mid);
        if (f_mid - target).abs() < (best.1 - target).abs() {
            best = (mid, f_mid);
        }
        if in_lo {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if f_mid == target || hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(Tuned {
        exponent: best.0,
        value: best.1,
        attained: (best.1 - target).abs() <= TUNE_TOLERANCE,
        monotone,
    })
}
