//! Pairwise dissimilarity matrices and the feature datasets they are built from.
//!
//! Three metrics are provided: Euclidean, simple matching (proportion of
//! mismatching binary features) and chord distance (Euclidean distance between
//! unit-normalised rows). Matrices are dense and row-major; every constructor
//! yields an exactly symmetric matrix with a zero diagonal.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance applied when validating externally supplied matrices.
pub const LOAD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    #[serde(rename = "smd")]
    SimpleMatching,
    Chord,
}

impl Metric {
    pub fn apply(self, data: &Dataset) -> Result<DissimilarityMatrix> {
        match self {
            Metric::Euclidean => euclidean(data),
            Metric::SimpleMatching => simple_matching(data),
            Metric::Chord => chord(data),
        }
    }
}

/// Individuals-by-features table with optional ground truth.
///
/// Group labels are stored zero-based (`0..G`); the CSV format uses `1..G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    values: Vec<f64>,
    kind: FeatureKind,
    groups: Option<Vec<usize>>,
    hybrid: Option<usize>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from row-major values, checking the kind and group invariants.
    pub fn new(n: usize, p: usize, values: Vec<f64>, kind: FeatureKind) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Dimension(format!("dataset must be non-empty, got {n}x{p}")));
        }
        if values.len() != n * p {
            return Err(Error::Dimension(format!(
                "expected {} values for {n}x{p}, got {}",
                n * p,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value at row {}, column {}",
                bad / p,
                bad % p
            )));
        }
        if kind == FeatureKind::Binary {
            if let Some(bad) = values.iter().position(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::KindMismatch(format!(
                    "binary dataset has value {} at row {}, column {}",
                    values[bad],
                    bad / p,
                    bad % p
                )));
            }
        }
        let feature_names = (1..=p).map(|j| format!("x{j}")).collect();
        Ok(Self {
            n,
            p,
            values,
            kind,
            groups: None,
            hybrid: None,
            feature_names,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], kind: FeatureKind) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Dimension("rows have differing lengths".into()));
        }
        Self::new(n, p, rows.concat(), kind)
    }

    /// Attaches zero-based group labels; they must cover `0..G` without gaps.
    pub fn with_groups(mut self, groups: Vec<usize>) -> Result<Self> {
        if groups.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} group labels for {} individuals",
                groups.len(),
                self.n
            )));
        }
        let count = groups.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; count];
        for &g in &groups {
            seen[g] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!(
                "group labels are not contiguous: group {} is absent",
                missing + 1
            )));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn with_hybrid(mut self, index: usize) -> Result<Self> {
        if index >= self.n {
            return Err(Error::Argument(format!(
                "hybrid index {index} out of range for {} individuals",
                self.n
            )));
        }
        self.hybrid = Some(index);
        Ok(self)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::Dimension(format!(
                "{} feature names for {} features",
                names.len(),
                self.p
            )));
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn groups(&self) -> Option<&[usize]> {
        self.groups.as_deref()
    }

    pub fn group_count(&self) -> Option<usize> {
        self.groups.as_ref().map(|g| g.iter().max().map_or(0, |m| m + 1))
    }

    pub fn hybrid(&self) -> Option<usize> {
        self.hybrid
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Reads the dataset CSV format: a header of feature names, optionally a
    /// `group` column (integers `1..G`) and a `hybrid` boolean column. The
    /// feature kind is binary when every value is 0 or 1.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    pub fn parse_csv(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::ingest(origin, 1, "empty dataset file"))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let group_col = columns.iter().position(|c| c.eq_ignore_ascii_case("group"));
        let hybrid_col = columns.iter().position(|c| c.eq_ignore_ascii_case("hybrid"));
        let feature_cols: Vec<usize> = (0..columns.len())
            .filter(|&c| Some(c) != group_col && Some(c) != hybrid_col)
            .collect();

        let mut values = Vec::new();
        let mut groups = Vec::new();
        let mut hybrids = Vec::new();
        let mut n = 0;
        for (idx, line) in lines {
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != columns.len() {
                return Err(Error::ingest(
                    origin,
                    lineno,
                    format!("expected {} fields, found {}", columns.len(), fields.len()),
                ));
            }
            for &c in &feature_cols {
                let v: f64 = fields[c]
                    .parse()
                    .map_err(|_| Error::ingest(origin, lineno, format!("cannot parse '{}' as a number", fields[c])))?;
                values.push(v);
            }
            if let Some(c) = group_col {
                let g: usize = fields[c].parse().ok().filter(|&g| g >= 1).ok_or_else(|| {
                    Error::ingest(origin, lineno, format!("group '{}' is not an integer >= 1", fields[c]))
                })?;
                groups.push(g - 1);
            }
            if let Some(c) = hybrid_col {
                let flag = match fields[c].to_ascii_lowercase().as_str() {
                    "1" | "true" | "yes" => true,
                    "0" | "false" | "no" | "" => false,
                    other => return Err(Error::ingest(origin, lineno, format!("'{other}' is not a boolean"))),
                };
                if flag {
                    hybrids.push(n);
                }
            }
            n += 1;
        }
        if hybrids.len() > 1 {
            return Err(Error::ingest(origin, 1, "more than one individual flagged as hybrid"));
        }
        let kind = if values.iter().all(|&v| v == 0.0 || v == 1.0) {
            FeatureKind::Binary
        } else {
            FeatureKind::Continuous
        };
        let names = feature_cols.iter().map(|&c| columns[c].clone()).collect();
        let mut data = Self::new(n, feature_cols.len(), values, kind)?.with_feature_names(names)?;
        if group_col.is_some() {
            data = data.with_groups(groups)?;
        }
        if let Some(&h) = hybrids.first() {
            data = data.with_hybrid(h)?;
        }
        Ok(data)
    }

    /// Reinterprets a 0/1 dataset as continuous (e.g. to allow k-means on it).
    pub fn as_continuous(mut self) -> Self {
        self.kind = FeatureKind::Continuous;
        self
    }
}

/// Dense symmetric matrix of nonnegative dissimilarities with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Fills the strict upper triangle from `f(i, j)` (`i < j`) and mirrors it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self { n, values }
    }

    /// Validates a row-major square matrix. Asymmetry and diagonal entries up to
    /// [`LOAD_TOLERANCE`] are absorbed (by averaging and zeroing respectively).
    pub fn from_dense(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix must have at least one row".into()));
        }
        if values.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for n={n}, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            let dii = values[i * n + i];
            if !dii.is_finite() || dii.abs() > LOAD_TOLERANCE {
                return Err(Error::Validation(format!(
                    "diagonal entry ({}, {}) is {dii}, expected 0",
                    i + 1,
                    i + 1
                )));
            }
            values[i * n + i] = 0.0;
            for j in i + 1..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Validation(format!("non-finite entry at ({}, {})", i + 1, j + 1)));
                }
                if a < 0.0 || b < 0.0 {
                    return Err(Error::Validation(format!("negative entry at ({}, {})", i + 1, j + 1)));
                }
                if (a - b).abs() > LOAD_TOLERANCE {
                    return Err(Error::Validation(format!(
                        "asymmetric entries: d({},{}) = {a} but d({},{}) = {b}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
                let avg = 0.5 * (a + b);
                values[i * n + j] = avg;
                values[j * n + i] = avg;
            }
        }
        Ok(Self { n, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Sub-matrix restricted to `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b]))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 24);
        let _ = writeln!(out, "n={}", self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (idx, header) = lines
            .next()
            .ok_or_else(|| Error::ingest(origin, 1, "empty matrix file"))?;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::ingest(origin, idx + 1, "expected header 'n=<N>'"))?;
        let mut values = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if rows == n {
                return Err(Error::ingest(origin, lineno, format!("more than {n} rows")));
            }
            let before = values.len();
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::ingest(origin, lineno, format!("cannot parse '{}' as a number", field.trim()))
                })?;
                values.push(v);
            }
            if values.len() - before != n {
                return Err(Error::ingest(
                    origin,
                    lineno,
                    format!("expected {n} values, found {}", values.len() - before),
                ));
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::ingest(
                origin,
                rows + 1,
                format!("expected {n} rows, found {rows}"),
            ));
        }
        Self::from_dense(n, values)
    }
}

/// Reads the matrix CSV format (`n=<N>` header, then N rows of N values).
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DissimilarityMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DissimilarityMatrix::parse_csv(&text, path)
}

pub fn save_matrix(m: &DissimilarityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, m.to_csv_string()).map_err(|e| Error::io(path, e))
}

fn require_pairs(data: &Dataset) -> Result<()> {
    if data.n() < 2 {
        return Err(Error::Dimension(format!(
            "need at least two individuals, got {}",
            data.n()
        )));
    }
    Ok(())
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn euclidean(data: &Dataset) -> Result<DissimilarityMatrix> {
    require_pairs(data)?;
    Ok(DissimilarityMatrix::from_fn(data.n(), |i, j| {
        l2(data.row(i), data.row(j))
    }))
}

/// Proportion of features on which two binary individuals disagree.
pub fn simple_matching(data: &Dataset) -> Result<DissimilarityMatrix> {
    require_pairs(data)?;
    if data.kind() != FeatureKind::Binary {
        return Err(Error::KindMismatch(
            "simple matching distance requires binary features".into(),
        ));
    }
    let p = data.p() as f64;
    Ok(DissimilarityMatrix::from_fn(data.n(), |i, j| {
        let mismatches = data.row(i).iter().zip(data.row(j)).filter(|(a, b)| a != b).count();
        mismatches as f64 / p
    }))
}

/// Euclidean distance after scaling every row to unit length.
pub fn chord(data: &Dataset) -> Result<DissimilarityMatrix> {
    require_pairs(data)?;
    let mut unit = Vec::with_capacity(data.values().len());
    for (i, row) in data.rows().enumerate() {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateRow { row: i });
        }
        unit.extend(row.iter().map(|v| v / norm));
    }
    let p = data.p();
    Ok(DissimilarityMatrix::from_fn(data.n(), |i, j| {
        l2(&unit[i * p..(i + 1) * p], &unit[j * p..(j + 1) * p])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn continuous(rows: &[Vec<f64>]) -> Dataset {
        Dataset::from_rows(rows, FeatureKind::Continuous).unwrap()
    }

    fn binary(rows: &[Vec<f64>]) -> Dataset {
        Dataset::from_rows(rows, FeatureKind::Binary).unwrap()
    }

    #[test]
    fn euclidean_three_four_five() {
        let m = euclidean(&continuous(&[vec![0.0, 0.0], vec![3.0, 4.0]])).unwrap();
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.get(1, 0), 5.0);
    }

    #[test]
    fn euclidean_identical_rows() {
        let m = euclidean(&continuous(&[vec![1.5, -2.0], vec![1.5, -2.0]])).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn euclidean_matches_double_loop() {
        let rows = vec![
            vec![0.3, -1.2, 2.5],
            vec![1.7, 0.4, -0.9],
            vec![-2.2, 3.1, 0.0],
            vec![0.05, 0.05, 0.05],
            vec![4.4, -3.3, 1.1],
        ];
        let m = euclidean(&continuous(&rows)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += (rows[i][k] - rows[j][k]).powi(2);
                }
                assert!((m.get(i, j) - s.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn euclidean_rejects_single_row() {
        let d = continuous(&[vec![1.0]]);
        assert!(matches!(euclidean(&d), Err(Error::Dimension(_))));
        assert!(matches!(
            Dataset::new(0, 0, vec![], FeatureKind::Continuous),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn smd_examples() {
        let m = simple_matching(&binary(&[
            vec![1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(2, 3), 1.0);
        assert_eq!(m.get(4, 5), 0.5);
    }

    #[test]
    fn smd_rejects_continuous() {
        let d = continuous(&[vec![0.5, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(simple_matching(&d), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn binary_kind_is_enforced() {
        assert!(matches!(
            Dataset::from_rows(&[vec![0.0, 2.0]], FeatureKind::Binary),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn chord_examples() {
        let m = chord(&continuous(&[
            vec![1.0, 2.0],
            vec![2.0, 4.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ]))
        .unwrap();
        assert!(m.get(0, 1).abs() < 1e-15);
        assert!((m.get(2, 3) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chord_names_zero_row() {
        let d = continuous(&[vec![1.0, 2.0], vec![0.0, 0.0]]);
        match chord(&d) {
            Err(Error::DegenerateRow { row }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn groups_must_be_contiguous() {
        let d = continuous(&[vec![1.0], vec![2.0], vec![3.0]]);
        assert!(d.clone().with_groups(vec![0, 0, 1]).is_ok());
        assert!(matches!(d.with_groups(vec![0, 2, 2]), Err(Error::Validation(_))));
    }

    #[test]
    fn matrix_round_trip() {
        let m = DissimilarityMatrix::from_fn(3, |i, j| 0.1 * (i + 2 * j) as f64 + 1.0 / 3.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        save_matrix(&m, &path).unwrap();
        let back = load_matrix(&path).unwrap();
        for (a, b) in m.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn load_rejects_asymmetric_matrix() {
        let text = "n=2\n0,1\n1.5,0\n";
        assert!(matches!(
            DissimilarityMatrix::parse_csv(text, Path::new("x")),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_rejects_nonzero_diagonal() {
        let text = "n=2\n0.1,1\n1,0\n";
        assert!(matches!(
            DissimilarityMatrix::parse_csv(text, Path::new("x")),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_rejects_negative_entry() {
        let text = "n=2\n0,-1\n-1,0\n";
        assert!(matches!(
            DissimilarityMatrix::parse_csv(text, Path::new("x")),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn load_symmetrizes_small_asymmetry() {
        let text = "n=2\n0,1.0000000001\n1,0\n";
        let m = DissimilarityMatrix::parse_csv(text, Path::new("x")).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn malformed_matrix_reports_line() {
        let text = "n=2\n0,1\n1,zero\n";
        match DissimilarityMatrix::parse_csv(text, Path::new("x")) {
            Err(Error::Ingestion { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dataset_csv_with_group_and_hybrid() {
        let text = "a,b,group,hybrid\n1,0,1,false\n0,1,2,0\n1,1,1,true\n";
        let d = Dataset::parse_csv(text, Path::new("d.csv")).unwrap();
        assert_eq!(d.kind(), FeatureKind::Binary);
        assert_eq!(d.groups(), Some(&[0, 1, 0][..]));
        assert_eq!(d.hybrid(), Some(2));
        assert_eq!(d.feature_names(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn dataset_csv_reports_bad_line() {
        let text = "a,b\n1,2\n3\n";
        match Dataset::parse_csv(text, Path::new("d.csv")) {
            Err(Error::Ingestion { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn matrix_ok(m: &DissimilarityMatrix) -> bool {
        (0..m.n()).all(|i| {
            m.get(i, i) == 0.0
                && (0..m.n()).all(|j| m.get(i, j) == m.get(j, i) && m.get(i, j) >= 0.0 && m.get(i, j).is_finite())
        })
    }

    proptest! {
        #[test]
        fn constructors_yield_valid_matrices(
            rows in prop::collection::vec(prop::collection::vec(0.1f64..10.0, 3), 2..8),
            bits in prop::collection::vec(prop::collection::vec(prop::bool::ANY, 5), 2..8),
        ) {
            let d = continuous(&rows);
            prop_assert!(matrix_ok(&euclidean(&d).unwrap()));
            let c = chord(&d).unwrap();
            prop_assert!(matrix_ok(&c));
            prop_assert!(c.values().iter().all(|&v| v <= 2.0 + 1e-12));
            let b: Vec<Vec<f64>> = bits.iter().map(|r| r.iter().map(|&x| f64::from(u8::from(x))).collect()).collect();
            let s = simple_matching(&binary(&b)).unwrap();
            prop_assert!(matrix_ok(&s));
            prop_assert!(s.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }

        #[test]
        fn chord_ignores_row_scaling(
            rows in prop::collection::vec(prop::collection::vec(0.1f64..10.0, 4), 2..7),
            scales in prop::collection::vec(0.01f64..100.0, 7),
        ) {
            let scaled: Vec<Vec<f64>> = rows.iter().zip(&scales).map(|(r, c)| r.iter().map(|v| v * c).collect()).collect();
            let a = chord(&continuous(&rows)).unwrap();
            let b = chord(&continuous(&scaled)).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
