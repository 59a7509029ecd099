//! Datasets bundled with the library.

use std::path::Path;

use crate::dissimilarity::Dataset;

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// Fisher's iris measurements: 150 flowers, four continuous features, groups
/// 1 = setosa, 2 = versicolor, 3 = virginica in blocks of 50.
pub fn iris() -> Dataset {
    Dataset::parse_csv(IRIS_CSV, Path::new("iris.csv")).expect("bundled iris data parse")
}

pub fn iris_csv() -> &'static str {
    IRIS_CSV
}

pub const IRIS_SPECIES: [&str; 3] = ["setosa", "versicolor", "virginica"];
