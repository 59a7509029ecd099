use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dissimilarity::{Dataset, FeatureKind};
use crate::error::{Error, Result};

use super::Partition;

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_ITER: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Row-major `C x p` cluster means.
    pub centers: Vec<f64>,
    /// Within-cluster sum of squared distances to the means.
    pub wss: f64,
    pub iterations: usize,
    /// Restart that produced this solution.
    pub restart: usize,
}

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` runs by WSS.
///
/// Restart `r` draws from stream `r` of a ChaCha generator keyed by `seed`,
/// so results do not depend on how restarts are scheduled.
pub fn kmeans(data: &Dataset, c: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    if data.kind() != FeatureKind::Continuous {
        return Err(Error::KindMismatch("k-means requires continuous features".into()));
    }
    if c == 0 || c > data.n() {
        return Err(Error::Argument(format!(
            "cluster count {c} must lie in 1..={}",
            data.n()
        )));
    }
    if restarts == 0 {
        return Err(Error::Argument("k-means needs at least one restart".into()));
    }
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            lloyd(data, c, &mut rng, r)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.wss.total_cmp(&b.wss).then(a.restart.cmp(&b.restart)))
        .ok_or_else(|| Error::Solver("no k-means restart completed".into()))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(data: &Dataset, c: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (n, p) = (data.n(), data.p());
    let mut centers = Vec::with_capacity(c * p);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(data.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(data.row(i), data.row(first))).collect();
    while centers.len() < c * p {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let start = centers.len();
        centers.extend_from_slice(data.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(data.row(i), &centers[start..]));
        }
    }
    centers
}

fn lloyd(data: &Dataset, c: usize, rng: &mut ChaCha8Rng, restart: usize) -> Result<KMeansResult> {
    let (n, p) = (data.n(), data.p());
    let mut centers = plus_plus(data, c, rng);
    let mut labels = vec![usize::MAX; n];
    let mut iterations = 0;

    loop {
        iterations += 1;
        let mut next: Vec<usize> = (0..n)
            .map(|i| {
                let row = data.row(i);
                (0..c)
                    .map(|k| (sq_dist(row, &centers[k * p..(k + 1) * p]), k))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                    .map(|(_, k)| k)
                    .unwrap_or(0)
            })
            .collect();

        repair_empty(data, c, &centers, &mut next);
        centers = means(data, c, &next);
        if next == labels || iterations >= MAX_ITER {
            labels = next;
            break;
        }
        labels = next;
    }

    let wss = (0..n)
        .map(|i| sq_dist(data.row(i), &centers[labels[i] * p..(labels[i] + 1) * p]))
        .sum();
    Ok(KMeansResult {
        partition: Partition::new(labels, c)?,
        centers,
        wss,
        iterations,
        restart,
    })
}

/// Moves the point farthest from its centre into each empty cluster, taking
/// only from clusters that keep at least one member.
fn repair_empty(data: &Dataset, c: usize, centers: &[f64], labels: &mut [usize]) {
    let p = data.p();
    loop {
        let mut sizes = vec![0usize; c];
        for &z in labels.iter() {
            sizes[z] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let far = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .map(|i| {
                let k = labels[i];
                (sq_dist(data.row(i), &centers[k * p..(k + 1) * p]), i)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, i)| i)
            .expect("c <= n guarantees a donor cluster");
        labels[far] = empty;
    }
}

fn means(data: &Dataset, c: usize, labels: &[usize]) -> Vec<f64> {
    let p = data.p();
    let mut sums = vec![0.0; c * p];
    let mut counts = vec![0usize; c];
    for (i, &k) in labels.iter().enumerate() {
        counts[k] += 1;
        for (s, v) in sums[k * p..(k + 1) * p].iter_mut().zip(data.row(i)) {
            *s += v;
        }
    }
    for k in 0..c {
        let cnt = counts[k].max(1) as f64;
        for s in &mut sums[k * p..(k + 1) * p] {
            *s /= cnt;
        }
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cont(rows: &[Vec<f64>]) -> Dataset {
        Dataset::from_rows(rows, FeatureKind::Continuous).unwrap()
    }

    fn wss_of(data: &Dataset, labels: &[usize], c: usize) -> f64 {
        let centers = means(data, c, labels);
        let p = data.p();
        labels
            .iter()
            .enumerate()
            .map(|(i, &k)| sq_dist(data.row(i), &centers[k * p..(k + 1) * p]))
            .sum()
    }

    #[test]
    fn one_cluster_centre_is_mean() {
        let d = cont(&[vec![1.0, 2.0], vec![3.0, 0.0], vec![5.0, 4.0]]);
        let r = kmeans(&d, 1, 7, 3).unwrap();
        assert!((r.centers[0] - 3.0).abs() < 1e-12);
        assert!((r.centers[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn separated_blobs_are_recovered() {
        let d = cont(&[
            vec![0.0, 0.1],
            vec![0.2, 0.0],
            vec![0.1, 0.2],
            vec![9.0, 9.1],
            vec![9.2, 8.9],
            vec![8.9, 9.0],
        ]);
        let r = kmeans(&d, 2, 1, 5).unwrap();
        let z = r.partition.labels();
        assert_eq!(z[0], z[1]);
        assert_eq!(z[1], z[2]);
        assert_eq!(z[3], z[4]);
        assert_eq!(z[4], z[5]);
        assert_ne!(z[0], z[3]);
    }

    #[test]
    fn eight_points_reach_global_optimum() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.3, 1.2],
            vec![2.0, 2.1],
            vec![4.0, 3.5],
            vec![5.2, 4.1],
            vec![4.6, 5.0],
            vec![3.1, 2.9],
        ];
        let d = cont(&rows);
        let r = kmeans(&d, 2, 11, 10).unwrap();
        let mut best = f64::INFINITY;
        for mask in 0u32..256 {
            let labels: Vec<usize> = (0..8).map(|i| ((mask >> i) & 1) as usize).collect();
            if labels.iter().all(|&l| l == 0) || labels.iter().all(|&l| l == 1) {
                continue;
            }
            best = best.min(wss_of(&d, &labels, 2));
        }
        assert!(r.wss <= best + 1e-9, "{} vs {best}", r.wss);
    }

    #[test]
    fn identical_points_still_fill_every_cluster() {
        let d = cont(&[vec![1.0], vec![1.0], vec![1.0]]);
        let r = kmeans(&d, 3, 0, 2).unwrap();
        assert_eq!(r.partition.clusters(), 3);
    }

    #[test]
    fn rejects_binary_data() {
        let d = Dataset::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]], FeatureKind::Binary).unwrap();
        assert!(matches!(kmeans(&d, 1, 0, 1), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn same_seed_same_answer() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![(i * 7 % 13) as f64, (i * 3 % 5) as f64]).collect();
        let d = cont(&rows);
        let a = kmeans(&d, 3, 99, 4).unwrap();
        let b = kmeans(&d, 3, 99, 4).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.wss.to_bits(), b.wss.to_bits());
    }
}
