//! Agglomerative clustering with Lance–Williams distance updates.
//!
//! Uses a stored distance matrix plus a cached nearest neighbour per row, so a
//! merge step costs a scan of the cache instead of the whole matrix. The
//! closest pair is always the lexicographically smallest `(i, j)`, `i < j`,
//! among those attaining the minimum distance.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

use super::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Average,
    Complete,
    /// Ward's update applied to the dissimilarities as given (not squared).
    #[default]
    Ward,
}

impl Linkage {
    /// New distance from the merge of clusters `i` and `j` (sizes `ni`, `nj`)
    /// to cluster `k` of size `nk`.
    fn update(self, dik: f64, djk: f64, dij: f64, ni: f64, nj: f64, nk: f64) -> f64 {
        match self {
            Linkage::Average => (ni * dik + nj * djk) / (ni + nj),
            Linkage::Complete => dik.max(djk),
            Linkage::Ward => ((ni + nk) * dik + (nj + nk) * djk - nk * dij) / (ni + nj + nk),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Average => "average",
            Linkage::Complete => "complete",
            Linkage::Ward => "ward",
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            "ward" => Ok(Linkage::Ward),
            other => Err(Error::Argument(format!("unknown linkage '{other}'"))),
        }
    }
}

/// One agglomeration step. Clusters are identified by their smallest member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Partition obtained by stopping after `n - c` merges.
    pub fn cut(&self, c: usize) -> Result<Partition> {
        if c == 0 || c > self.n {
            return Err(Error::Argument(format!("cluster count {c} must lie in 1..={}", self.n)));
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.merges[..self.n - c] {
            let a = find(&mut parent, m.left);
            let b = find(&mut parent, m.right);
            parent[a.max(b)] = a.min(b);
        }
        let roots: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Partition::canonical(&roots)
    }
}

/// Full merge history for `m` under the given linkage.
pub fn linkage_tree(m: &DissimilarityMatrix, linkage: Linkage) -> Dendrogram {
    let n = m.n();
    let mut d = m.values().to_vec();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    // nn[i] is the closest active j > i; nd[i] its distance.
    let mut nn = vec![usize::MAX; n];
    let mut nd = vec![f64::INFINITY; n];

    let refresh = |i: usize, d: &[f64], active: &[bool], nn: &mut [usize], nd: &mut [f64]| {
        nn[i] = usize::MAX;
        nd[i] = f64::INFINITY;
        for j in i + 1..n {
            if active[j] && d[i * n + j] < nd[i] {
                nd[i] = d[i * n + j];
                nn[i] = j;
            }
        }
    };
    for i in 0..n {
        refresh(i, &d, &active, &mut nn, &mut nd);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut i = usize::MAX;
        for k in 0..n {
            if active[k] && nn[k] != usize::MAX && (i == usize::MAX || nd[k] < nd[i]) {
                i = k;
            }
        }
        let j = nn[i];
        let dij = nd[i];
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        merges.push(Merge {
            left: i,
            right: j,
            height: dij,
            size: size[i] + size[j],
        });

        active[j] = false;
        for k in (0..n).filter(|&k| active[k] && k != i) {
            let nk = size[k] as f64;
            let v = linkage.update(d[i * n + k], d[j * n + k], dij, ni, nj, nk);
            d[i * n + k] = v;
            d[k * n + i] = v;
        }
        size[i] += size[j];

        for k in 0..i {
            if !active[k] {
                continue;
            }
            let v = d[k * n + i];
            if nn[k] == i || nn[k] == j {
                refresh(k, &d, &active, &mut nn, &mut nd);
            } else if v < nd[k] || (v == nd[k] && i < nn[k]) {
                nd[k] = v;
                nn[k] = i;
            }
        }
        for k in i + 1..j {
            if active[k] && nn[k] == j {
                refresh(k, &d, &active, &mut nn, &mut nd);
            }
        }
        refresh(i, &d, &active, &mut nn, &mut nd);
    }
    Dendrogram { n, merges }
}

/// Agglomerative clustering cut at `c` clusters.
pub fn hierarchical(m: &DissimilarityMatrix, c: usize, linkage: Linkage) -> Result<Partition> {
    if c == 0 || c > m.n() {
        return Err(Error::Argument(format!("cluster count {c} must lie in 1..={}", m.n())));
    }
    linkage_tree(m, linkage).cut(c)
}
