//! Principal-component scores for plotting.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dissimilarity::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Projection {
    /// Row-major `n x k` scores on the leading components.
    pub scores: Vec<f64>,
    pub k: usize,
    /// Sample variance (divisor `n - 1`) along each retained component.
    pub variances: Vec<f64>,
    /// Share of total variance carried by each retained component.
    pub explained: Vec<f64>,
}

impl Projection {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.scores[i * self.k..(i + 1) * self.k]
    }

    /// CSV with header `individual,pc1..pck`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("individual");
        for c in 1..=self.k {
            out.push_str(&format!(",pc{c}"));
        }
        out.push('\n');
        for i in 0..self.scores.len() / self.k.max(1) {
            out.push_str(&(i + 1).to_string());
            for v in self.row(i) {
                out.push_str(&format!(",{v:.10}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Scores on the `k` leading principal components of the centred data.
///
/// Each component's sign is fixed so that its largest-magnitude loading is
/// positive.
pub fn principal_components(data: &Dataset, k: usize) -> Result<Projection> {
    let (n, p) = (data.n(), data.p());
    if n < 2 {
        return Err(Error::Argument(
            "principal components need at least two individuals".into(),
        ));
    }
    if k == 0 || k > p.min(n) {
        return Err(Error::Argument(format!("cannot keep {k} of {} components", p.min(n))));
    }
    let mut x = DMatrix::from_row_slice(n, p, data.values());
    for mut col in x.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    let svd = x.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Solver("singular value decomposition failed".into()))?;

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();

    let mut scores = vec![0.0; n * k];
    let mut variances = Vec::with_capacity(k);
    let mut explained = Vec::with_capacity(k);
    for (c, &idx) in order.iter().take(k).enumerate() {
        let mut loading: Vec<f64> = v_t.row(idx).iter().copied().collect();
        let lead = loading
            .iter()
            .copied()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            loading.iter_mut().for_each(|v| *v = -*v);
        }
        for i in 0..n {
            scores[i * k + c] = x.row(i).iter().zip(&loading).map(|(a, b)| a * b).sum();
        }
        let s2 = svd.singular_values[idx].powi(2);
        variances.push(s2 / (n - 1) as f64);
        explained.push(if total > 0.0 { s2 / total } else { 0.0 });
    }
    Ok(Projection {
        scores,
        k,
        variances,
        explained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::iris;
    use crate::dissimilarity::FeatureKind;

    #[test]
    fn iris_matches_reference_decomposition() {
        let proj = principal_components(&iris(), 4).unwrap();
        let variances = [4.22824171, 0.24267075, 0.0782095, 0.02383509];
        for (v, r) in proj.variances.iter().zip(variances) {
            assert!((v - r).abs() < 1e-7, "{v} vs {r}");
        }
        assert!((proj.explained[0] - 0.92461872).abs() < 1e-7);
        assert!((proj.row(0)[0] + 2.68412563).abs() < 1e-7);
        assert!((proj.row(0)[1] - 0.31939725).abs() < 1e-7);
    }

    #[test]
    fn collinear_points_load_on_one_component() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let d = Dataset::from_rows(&rows, FeatureKind::Continuous).unwrap();
        let proj = principal_components(&d, 2).unwrap();
        assert!((proj.explained[0] - 1.0).abs() < 1e-12);
        assert!(proj.scores.chunks(2).all(|r| r[1].abs() < 1e-12));
    }

    #[test]
    fn rejects_too_many_components() {
        assert!(principal_components(&iris(), 5).is_err());
    }
}
