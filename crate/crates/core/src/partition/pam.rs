use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

use super::Partition;

#[derive(Debug, Clone)]
pub struct PamResult {
    pub partition: Partition,
    /// Medoid indices in ascending order; cluster `k` is the one around `medoids[k]`.
    pub medoids: Vec<usize>,
    /// Total dissimilarity of every individual to its nearest medoid.
    pub cost: f64,
    pub build_cost: f64,
    pub swaps: usize,
}

/// Partitioning Around Medoids: greedy BUILD then steepest-descent SWAP.
///
/// Fully deterministic: every tie (equal gains, equal distances) resolves to
/// the smallest index.
pub fn pam(m: &DissimilarityMatrix, c: usize) -> Result<PamResult> {
    let n = m.n();
    if c == 0 || c > n {
        return Err(Error::Argument(format!("cluster count {c} must lie in 1..={n}")));
    }

    let mut medoids = build(m, c);
    let build_cost = total_cost(m, &medoids);
    let mut cost = build_cost;
    let mut swaps = 0;

    loop {
        let (nearest, dn, ds) = nearest_two(m, &medoids);
        let mut is_medoid = vec![false; n];
        for &md in &medoids {
            is_medoid[md] = true;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..medoids.len() {
            for o in (0..n).filter(|&o| !is_medoid[o]) {
                let mut delta = 0.0;
                for j in 0..n {
                    let djo = m.get(j, o);
                    let new = if nearest[j] == slot {
                        ds[j].min(djo)
                    } else {
                        dn[j].min(djo)
                    };
                    delta += new - dn[j];
                }
                if best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, slot, o));
                }
            }
        }
        match best {
            Some((delta, slot, o)) if delta < -1e-12 * cost.max(1.0) => {
                medoids[slot] = o;
                cost = total_cost(m, &medoids);
                swaps += 1;
            }
            _ => break,
        }
    }

    medoids.sort_unstable();
    let (mut nearest, _, _) = nearest_two(m, &medoids);
    // Duplicated points could otherwise pull a medoid out of its own cluster.
    for (slot, &md) in medoids.iter().enumerate() {
        nearest[md] = slot;
    }
    let partition = Partition::new(nearest, c)?;
    Ok(PamResult {
        partition,
        medoids,
        cost,
        build_cost,
        swaps,
    })
}

fn build(m: &DissimilarityMatrix, c: usize) -> Vec<usize> {
    let n = m.n();
    let first = (0..n)
        .map(|i| (m.row(i).iter().sum::<f64>(), i))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, i)| i)
        .expect("non-empty matrix");
    let mut medoids = vec![first];
    let mut dn: Vec<f64> = m.row(first).to_vec();
    while medoids.len() < c {
        let mut best: Option<(f64, usize)> = None;
        for cand in (0..n).filter(|i| !medoids.contains(i)) {
            let gain: f64 = (0..n).map(|j| (dn[j] - m.get(j, cand)).max(0.0)).sum();
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, cand));
            }
        }
        let (_, pick) = best.expect("c <= n leaves a candidate");
        medoids.push(pick);
        for j in 0..n {
            dn[j] = dn[j].min(m.get(j, pick));
        }
    }
    medoids
}

/// For each individual: slot of the nearest medoid, its distance, and the
/// distance to the second-nearest medoid (infinite with a single medoid).
fn nearest_two(m: &DissimilarityMatrix, medoids: &[usize]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = m.n();
    let mut nearest = vec![0; n];
    let mut dn = vec![f64::INFINITY; n];
    let mut ds = vec![f64::INFINITY; n];
    for j in 0..n {
        for (slot, &md) in medoids.iter().enumerate() {
            let d = m.get(j, md);
            if d < dn[j] {
                ds[j] = dn[j];
                dn[j] = d;
                nearest[j] = slot;
            } else if d < ds[j] {
                ds[j] = d;
            }
        }
    }
    (nearest, dn, ds)
}

fn total_cost(m: &DissimilarityMatrix, medoids: &[usize]) -> f64 {
    (0..m.n())
        .map(|j| medoids.iter().map(|&md| m.get(j, md)).fold(f64::INFINITY, f64::min))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six_points() -> DissimilarityMatrix {
        let pts: [(f64, f64); 6] = [(0.0, 0.0), (1.0, 0.2), (0.4, 1.1), (5.0, 5.0), (6.1, 4.7), (2.9, 3.3)];
        DissimilarityMatrix::from_fn(6, |i, j| {
            let (a, b) = (pts[i], pts[j]);
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
        })
    }

    #[test]
    fn every_point_a_medoid() {
        let m = six_points();
        let r = pam(&m, 6).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.medoids, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn single_medoid_minimises_row_sum() {
        let m = six_points();
        let r = pam(&m, 1).unwrap();
        let best = (0..6)
            .min_by(|&a, &b| m.row(a).iter().sum::<f64>().total_cmp(&m.row(b).iter().sum::<f64>()))
            .unwrap();
        assert_eq!(r.medoids, vec![best]);
    }

    #[test]
    fn two_medoids_match_exhaustive_search() {
        let m = six_points();
        let r = pam(&m, 2).unwrap();
        let mut brute = f64::INFINITY;
        for a in 0..6 {
            for b in a + 1..6 {
                let cost: f64 = (0..6).map(|j| m.get(j, a).min(m.get(j, b))).sum();
                brute = brute.min(cost);
            }
        }
        assert!((r.cost - brute).abs() < 1e-12);
        assert!(r.cost <= r.build_cost);
    }

    #[test]
    fn rejects_too_many_clusters() {
        assert!(matches!(pam(&six_points(), 7), Err(Error::Argument(_))));
    }
}
