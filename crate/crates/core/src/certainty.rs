//! Probability-like cluster-membership certainties for a hard partition.
//!
//! Two measures are provided, both derived from the dissimilarity matrix and
//! the partition alone:
//!
//! * **silhouette-based**: individual `i` is re-assigned to each cluster `k` in
//!   turn (everyone else fixed) and its silhouette `sil_ik` recomputed. The
//!   certainty is `(sil_ik + 1)^l / sum_j (sil_ij + 1)^l`.
//! * **dissimilarity-based**: with `h_ik` the mean dissimilarity from `i` to the
//!   other members of cluster `k`, the certainty is `h_ik^-v / sum_j h_ij^-v`.
//!
//! Both reduce to a per-row *basis* (the shifted silhouettes, or the `h_ik`)
//! raised to an exponent and normalised. [`CertaintyBasis`] holds that basis so
//! the exponent can be varied cheaply, which is what exponent tuning does.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::{cluster_totals, silhouette_if_member, Partition};

/// Row sums of every certainty matrix must equal one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_SILHOUETTE_EXPONENT: f64 = 1.0;
pub const DEFAULT_DISSIMILARITY_EXPONENT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    SilhouetteBased,
    DissimilarityBased,
    Fanny,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::SilhouetteBased => "silhouette_based",
            MeasureKind::DissimilarityBased => "dissimilarity_based",
            MeasureKind::Fanny => "fanny",
        }
    }
}

/// An `N x C` row-stochastic matrix of membership certainties.
#[derive(Debug, Clone, PartialEq)]
pub struct CertaintyMatrix {
    kind: MeasureKind,
    exponent: f64,
    n: usize,
    c: usize,
    values: Vec<f64>,
}

impl CertaintyMatrix {
    /// Wraps externally computed memberships after checking they are row-stochastic.
    pub fn from_rows(kind: MeasureKind, exponent: f64, n: usize, c: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * c {
            return Err(Error::Dimension(format!(
                "expected {} certainties for {n}x{c}, got {}",
                n * c,
                values.len()
            )));
        }
        for (i, row) in values.chunks_exact(c.max(1)).enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::Validation(format!("row {} has an entry outside [0, 1]", i + 1)));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Validation(format!("row {} sums to {s}", i + 1)));
            }
        }
        Ok(Self {
            kind,
            exponent,
            n,
            c,
            values,
        })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clusters(&self) -> usize {
        self.c
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.c + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.c..(i + 1) * self.c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column of the largest certainty in row `i` (smallest index on ties).
    pub fn argmax(&self, i: usize) -> usize {
        argmax(self.row(i))
    }

    pub fn argmax_labels(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.argmax(i)).collect()
    }

    /// CSV with header `individual,cluster_1..cluster_C,assigned,argmax`
    /// (one-based indices and labels).
    pub fn to_csv(&self, assigned: &[usize]) -> Result<String> {
        if assigned.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} assignments for {} rows",
                assigned.len(),
                self.n
            )));
        }
        let mut out = String::from("individual");
        for k in 1..=self.c {
            let _ = write!(out, ",cluster_{k}");
        }
        out.push_str(",assigned,argmax\n");
        for i in 0..self.n {
            let _ = write!(out, "{}", i + 1);
            for p in self.row(i) {
                let _ = write!(out, ",{p:.10}");
            }
            let _ = writeln!(out, ",{},{}", assigned[i] + 1, self.argmax(i) + 1);
        }
        Ok(out)
    }
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = k;
        }
    }
    best
}

/// Per-row quantities from which certainties follow for any exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct CertaintyBasis {
    kind: MeasureKind,
    n: usize,
    c: usize,
    /// Shifted silhouettes `sil_ik + 1` or mean dissimilarities `h_ik`.
    values: Vec<f64>,
}

impl CertaintyBasis {
    /// Shifted silhouette vectors for every individual.
    ///
    /// Only `i`'s own `a`/`b` change under re-assignment, so each row needs a
    /// single pass over row `i` of the matrix.
    pub fn silhouette(m: &DissimilarityMatrix, z: &Partition) -> Result<Self> {
        check_inputs(m, z)?;
        let c = z.clusters();
        let mut values = Vec::with_capacity(m.n() * c);
        for i in 0..m.n() {
            let (sums, counts) = cluster_totals(m, z, i);
            values.extend((0..c).map(|k| silhouette_if_member(&sums, &counts, k) + 1.0));
        }
        Ok(Self {
            kind: MeasureKind::SilhouetteBased,
            n: m.n(),
            c,
            values,
        })
    }

    /// Mean dissimilarities `h_ik` from each individual to each cluster.
    pub fn dissimilarity(m: &DissimilarityMatrix, z: &Partition) -> Result<Self> {
        check_inputs(m, z)?;
        let c = z.clusters();
        let mut values = Vec::with_capacity(m.n() * c);
        for i in 0..m.n() {
            let (sums, counts) = cluster_totals(m, z, i);
            for k in 0..c {
                if counts[k] == 0 {
                    return Err(Error::DegenerateCluster {
                        individual: i,
                        cluster: k,
                    });
                }
                values.push(sums[k] / counts[k] as f64);
            }
        }
        Ok(Self {
            kind: MeasureKind::DissimilarityBased,
            n: m.n(),
            c,
            values,
        })
    }

    pub fn new(kind: MeasureKind, m: &DissimilarityMatrix, z: &Partition) -> Result<Self> {
        match kind {
            MeasureKind::SilhouetteBased => Self::silhouette(m, z),
            MeasureKind::DissimilarityBased => Self::dissimilarity(m, z),
            MeasureKind::Fanny => Err(Error::Argument(
                "fanny memberships are not derived from a hard partition".into(),
            )),
        }
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clusters(&self) -> usize {
        self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.c..(i + 1) * self.c]
    }

    /// Certainties of row `i` at `exponent`, written into `out`.
    pub fn certainty_row(&self, i: usize, exponent: f64, out: &mut [f64]) {
        match self.kind {
            MeasureKind::SilhouetteBased => normalize_shifted(self.row(i), exponent, out),
            _ => normalize_inverse(self.row(i), exponent, out),
        }
    }

    pub fn certainty(&self, exponent: f64) -> Result<CertaintyMatrix> {
        check_exponent(exponent)?;
        let mut values = vec![0.0; self.n * self.c];
        for (i, out) in values.chunks_exact_mut(self.c).enumerate() {
            self.certainty_row(i, exponent, out);
        }
        Ok(CertaintyMatrix {
            kind: self.kind,
            exponent,
            n: self.n,
            c: self.c,
            values,
        })
    }
}

fn check_inputs(m: &DissimilarityMatrix, z: &Partition) -> Result<()> {
    if m.n() != z.n() {
        return Err(Error::Dimension(format!(
            "partition has {} individuals but matrix has {}",
            z.n(),
            m.n()
        )));
    }
    if z.clusters() < 2 {
        return Err(Error::UndefinedSilhouette);
    }
    Ok(())
}

fn check_exponent(exponent: f64) -> Result<()> {
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::Argument(format!("exponent must be positive, got {exponent}")));
    }
    Ok(())
}

/// `x_k^e / sum_j x_j^e` for shifted silhouettes in `[0, 2]`; uniform if all are zero.
fn normalize_shifted(shifted: &[f64], exponent: f64, out: &mut [f64]) {
    let top = shifted.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        out.fill(1.0 / shifted.len() as f64);
        return;
    }
    for (o, &s) in out.iter_mut().zip(shifted) {
        *o = (s / top).powf(exponent);
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= total);
}

/// `h_k^-e / sum_j h_j^-e`; clusters at zero mean dissimilarity share all the mass.
fn normalize_inverse(h: &[f64], exponent: f64, out: &mut [f64]) {
    let zeros = h.iter().filter(|&&x| x == 0.0).count();
    if zeros > 0 {
        for (o, &x) in out.iter_mut().zip(h) {
            *o = if x == 0.0 { 1.0 / zeros as f64 } else { 0.0 };
        }
        return;
    }
    let low = h.iter().copied().fold(f64::INFINITY, f64::min);
    for (o, &x) in out.iter_mut().zip(h) {
        *o = (low / x).powf(exponent);
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= total);
}

/// Silhouettes of `i` under each re-assignment `z_i := k`, others held fixed.
pub fn silhouette_vector(m: &DissimilarityMatrix, z: &Partition, i: usize) -> Result<Vec<f64>> {
    check_inputs(m, z)?;
    if i >= z.n() {
        return Err(Error::Argument(format!("individual {i} out of range")));
    }
    let (sums, counts) = cluster_totals(m, z, i);
    Ok((0..z.clusters())
        .map(|k| silhouette_if_member(&sums, &counts, k))
        .collect())
}

pub fn certainty_silhouette(m: &DissimilarityMatrix, z: &Partition, l: f64) -> Result<CertaintyMatrix> {
    check_exponent(l)?;
    CertaintyBasis::silhouette(m, z)?.certainty(l)
}

/// Mean dissimilarity between `i` and the members of cluster `k` other than `i`.
pub fn avg_dissim(m: &DissimilarityMatrix, z: &Partition, i: usize, k: usize) -> Result<f64> {
    if m.n() != z.n() || i >= z.n() || k >= z.clusters() {
        return Err(Error::Argument(format!("individual {i} / cluster {k} out of range")));
    }
    let (sum, count) = z
        .members(k)
        .filter(|&j| j != i)
        .fold((0.0, 0usize), |(s, c), j| (s + m.get(i, j), c + 1));
    if count == 0 {
        return Err(Error::DegenerateCluster {
            individual: i,
            cluster: k,
        });
    }
    Ok(sum / count as f64)
}

pub fn certainty_dissimilarity(m: &DissimilarityMatrix, z: &Partition, v: f64) -> Result<CertaintyMatrix> {
    check_exponent(v)?;
    CertaintyBasis::dissimilarity(m, z)?.certainty(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row_of(kind: MeasureKind, basis: &[f64], e: f64) -> Vec<f64> {
        let b = CertaintyBasis {
            kind,
            n: 1,
            c: basis.len(),
            values: basis.to_vec(),
        };
        b.certainty(e).unwrap().values
    }

    #[test]
    fn shifted_row_examples() {
        for l in [0.3, 1.0, 4.0] {
            let p = row_of(MeasureKind::SilhouetteBased, &[1.5, 1.5], l);
            assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
            let p = row_of(MeasureKind::SilhouetteBased, &[2.0, 0.0], l);
            assert_eq!(p, vec![1.0, 0.0]);
        }
        // sil (0.2, -0.4), l = 2: (1.44, 0.36) / 1.80
        let p = row_of(MeasureKind::SilhouetteBased, &[1.2, 0.6], 2.0);
        let direct = [1.2f64.powi(2) / (1.2f64.powi(2) + 0.6f64.powi(2)), 0.36 / 1.8];
        assert!((p[0] - 0.8).abs() < 1e-12 && (p[0] - direct[0]).abs() < 1e-15);
        assert!((p[1] - 0.2).abs() < 1e-12 && (p[1] - direct[1]).abs() < 1e-12);
    }

    #[test]
    fn all_minus_one_row_is_uniform() {
        let p = row_of(MeasureKind::SilhouetteBased, &[0.0, 0.0, 0.0], 1.7);
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn inverse_row_examples() {
        for v in [0.5, 1.0, 3.0] {
            let p = row_of(MeasureKind::DissimilarityBased, &[2.0, 2.0], v);
            assert_eq!(p, vec![0.5, 0.5]);
            let p = row_of(MeasureKind::DissimilarityBased, &[0.0, 5.0], v);
            assert_eq!(p, vec![1.0, 0.0]);
        }
        let p = row_of(MeasureKind::DissimilarityBased, &[1.0, 3.0], 1.0);
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
        let p = row_of(MeasureKind::DissimilarityBased, &[0.0, 0.0, 1.0], 1.0);
        assert_eq!(p, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn nonpositive_exponent_is_rejected() {
        let m = DissimilarityMatrix::from_fn(4, |i, j| (i as f64 - j as f64).abs());
        let z = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        assert!(matches!(certainty_silhouette(&m, &z, 0.0), Err(Error::Argument(_))));
        assert!(matches!(certainty_dissimilarity(&m, &z, -1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn own_component_is_classic_silhouette() {
        let x: [f64; _] = [0.0, 1.0, 2.0, 6.0, 8.0, 3.9];
        let m = DissimilarityMatrix::from_fn(6, |i, j| (x[i] - x[j]).abs());
        let z = Partition::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        for i in 0..6 {
            let v = silhouette_vector(&m, &z, i).unwrap();
            let classic = crate::partition::silhouette_width(&m, &z, i).unwrap();
            assert_eq!(v[z.label(i)], classic);
        }
    }

    #[test]
    fn reassignment_matches_rebuilt_partitions() {
        let x: [f64; _] = [0.0, 1.0, 2.0, 6.0, 8.0, 3.9];
        let m = DissimilarityMatrix::from_fn(6, |i, j| (x[i] - x[j]).abs());
        let z = Partition::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        for i in 0..6 {
            let v = silhouette_vector(&m, &z, i).unwrap();
            for (k, &got) in v.iter().enumerate() {
                let mut labels = z.labels().to_vec();
                labels[i] = k;
                let moved = Partition::new(labels, 2).unwrap();
                let oracle = crate::partition::silhouette_width(&m, &moved, i).unwrap();
                assert!((got - oracle).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mirror_midpoint_has_equal_components() {
        // Two mirror-image clusters on a line; point 4 sits at the origin.
        let x: [f64; _] = [-3.0, -2.0, 2.0, 3.0, 0.0];
        let m = DissimilarityMatrix::from_fn(5, |i, j| (x[i] - x[j]).abs());
        let z = Partition::new(vec![0, 0, 1, 1, 0], 2).unwrap();
        let v = silhouette_vector(&m, &z, 4).unwrap();
        assert!((v[0] - v[1]).abs() < 1e-15);
    }

    #[test]
    fn avg_dissim_examples() {
        let m = DissimilarityMatrix::from_dense(3, vec![0.0, 1.0, 1.0, 1.0, 0.0, 4.0, 1.0, 4.0, 0.0]).unwrap();
        let z = Partition::new(vec![0, 1, 1], 2).unwrap();
        assert_eq!(avg_dissim(&m, &z, 0, 1).unwrap(), 1.0);
        assert!(matches!(
            avg_dissim(&m, &z, 0, 0),
            Err(Error::DegenerateCluster {
                individual: 0,
                cluster: 0
            })
        ));
    }

    #[test]
    fn avg_dissim_matches_summation() {
        let x: [f64; _] = [0.0, 1.0, 2.5, 6.0, 8.0];
        let m = DissimilarityMatrix::from_fn(5, |i, j| (x[i] - x[j]).abs());
        let z = Partition::new(vec![0, 0, 0, 1, 1], 2).unwrap();
        for i in 0..5 {
            for k in 0..2 {
                let mut s = 0.0;
                let mut c = 0;
                for j in 0..5 {
                    if j != i && z.label(j) == k {
                        s += (x[i] - x[j]).abs();
                        c += 1;
                    }
                }
                if c > 0 {
                    assert!((avg_dissim(&m, &z, i, k).unwrap() - s / c as f64).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let m = DissimilarityMatrix::from_fn(4, |i, j| (i as f64 - j as f64).abs());
        let z = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let p = certainty_dissimilarity(&m, &z, 1.0).unwrap();
        let csv = p.to_csv(z.labels()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("individual,cluster_1,cluster_2,assigned,argmax"));
        assert_eq!(lines.next(), Some("1,0.7142857143,0.2857142857,1,1"));
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<usize>, f64, f64)> {
        (
            prop::collection::vec(0.01f64..10.0, 28),
            prop::collection::vec(0usize..3, 8),
            0.1f64..8.0,
            prop::sample::select(vec![0.1, 7.0, 1000.0]),
        )
    }

    proptest! {
        #[test]
        fn rows_are_stochastic_and_scale_free((raw, labels, e, c) in instance()) {
            let m = DissimilarityMatrix::from_fn(8, |i, j| raw[i * 8 - i * (i + 1) / 2 + j - i - 1]);
            let z = Partition::canonical(&labels).unwrap();
            prop_assume!(z.clusters() >= 2 && z.sizes().iter().all(|&s| s >= 2));
            for kind in [MeasureKind::SilhouetteBased, MeasureKind::DissimilarityBased] {
                let p = CertaintyBasis::new(kind, &m, &z).unwrap().certainty(e).unwrap();
                let q = CertaintyBasis::new(kind, &m.scaled(c), &z).unwrap().certainty(e).unwrap();
                for i in 0..8 {
                    let s: f64 = p.row(i).iter().sum();
                    prop_assert!((s - 1.0).abs() < ROW_SUM_TOLERANCE);
                    prop_assert!(p.row(i).iter().all(|&x| (0.0..=1.0).contains(&x)));
                    for k in 0..z.clusters() {
                        prop_assert!((p.get(i, k) - q.get(i, k)).abs() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn exponent_sharpens_without_moving_argmax((raw, labels, _e, _c) in instance()) {
            let m = DissimilarityMatrix::from_fn(8, |i, j| raw[i * 8 - i * (i + 1) / 2 + j - i - 1]);
            let z = Partition::canonical(&labels).unwrap();
            prop_assume!(z.clusters() >= 2 && z.sizes().iter().all(|&s| s >= 2));
            for kind in [MeasureKind::SilhouetteBased, MeasureKind::DissimilarityBased] {
                let basis = CertaintyBasis::new(kind, &m, &z).unwrap();
                let p1 = basis.certainty(1.0).unwrap();
                let p2 = basis.certainty(2.0).unwrap();
                for i in 0..8 {
                    let row = basis.row(i);
                    let top = argmax(p1.row(i));
                    let strict = row.iter().enumerate().all(|(k, &x)| k == top || x != row[top]);
                    if strict {
                        prop_assert_eq!(top, argmax(p2.row(i)));
                        prop_assert!(p2.get(i, top) > p1.get(i, top) || p1.get(i, top) == 1.0);
                    }
                }
            }
        }

        #[test]
        fn swapping_labels_permutes_rows((raw, labels, e, _c) in instance()) {
            let m = DissimilarityMatrix::from_fn(8, |i, j| raw[i * 8 - i * (i + 1) / 2 + j - i - 1]);
            let two: Vec<usize> = labels.iter().map(|l| l % 2).collect();
            let Ok(z) = Partition::new(two.clone(), 2) else { return Ok(()) };
            prop_assume!(z.sizes().iter().all(|&s| s >= 2));
            let swapped = Partition::new(two.iter().map(|l| 1 - l).collect(), 2).unwrap();
            for kind in [MeasureKind::SilhouetteBased, MeasureKind::DissimilarityBased] {
                let a = CertaintyBasis::new(kind, &m, &z).unwrap().certainty(e).unwrap();
                let b = CertaintyBasis::new(kind, &m, &swapped).unwrap().certainty(e).unwrap();
                for i in 0..8 {
                    prop_assert_eq!(a.get(i, 0), b.get(i, 1));
                    prop_assert_eq!(a.get(i, 1), b.get(i, 0));
                }
            }
        }
    }
}
