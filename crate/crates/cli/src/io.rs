use std::fs;
use std::path::{Path, PathBuf};

use clustcert::dissimilarity::load_matrix;
use clustcert::{datasets, Dataset, DissimilarityMatrix, Error, Metric, Partition, Result};
use serde::{Deserialize, Serialize};

use crate::args::{Command, InputArgs};

pub struct Loaded {
    pub data: Option<Dataset>,
    pub matrix: DissimilarityMatrix,
    pub groups: Option<Vec<usize>>,
    pub hybrid: Option<usize>,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    Ok(Partition::parse_text(&read_text(path)?, path)?.labels().to_vec())
}

pub fn load(input: &InputArgs) -> Result<Loaded> {
    let metric = Metric::from(input.dissimilarity);
    let (data, matrix) = if input.iris {
        let d = datasets::iris();
        let m = metric.apply(&d)?;
        (Some(d), m)
    } else if let Some(path) = &input.data {
        let d = Dataset::load_csv(path)?;
        let m = metric.apply(&d)?;
        (Some(d), m)
    } else if let Some(path) = &input.matrix {
        (None, load_matrix(path)?)
    } else {
        return Err(Error::Argument("no input given".into()));
    };

    let mut groups = data.as_ref().and_then(|d| d.groups().map(<[usize]>::to_vec));
    if let Some(path) = &input.groups {
        let g = read_labels(path)?;
        if g.len() != matrix.n() {
            return Err(Error::Dimension(format!(
                "{} group labels for {} individuals",
                g.len(),
                matrix.n()
            )));
        }
        groups = Some(g);
    }
    let hybrid = data.as_ref().and_then(Dataset::hybrid);
    Ok(Loaded {
        data,
        matrix,
        groups,
        hybrid,
    })
}

pub fn load_partition(path: &Path, n: usize) -> Result<Partition> {
    let z = Partition::parse_text(&read_text(path)?, path)?;
    if z.n() != n {
        return Err(Error::Dimension(format!(
            "partition covers {} individuals, input has {n}",
            z.n()
        )));
    }
    Ok(z)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub command: Command,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_text(path)?).map_err(|e| Error::Ingestion {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Collects the files a command writes and records them in `manifest.json`.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| Error::Io { path, source })?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Validation(format!("cannot serialise {name}: {e}")))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(mut self, command: &Command) -> Result<()> {
        self.written.sort();
        let manifest = Manifest {
            tool: "clustcert".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: command.seed(),
            command: command.clone(),
            outputs: self.written.clone(),
        };
        self.write_json("manifest.json", &manifest)
    }
}

fn absolute(path: &mut Option<PathBuf>) {
    if let Some(p) = path {
        if let Ok(abs) = fs::canonicalize(&*p) {
            *p = abs;
        }
    }
}

/// Rewrites input paths as absolute so a manifest replays from any directory.
pub fn absolutize(command: &mut Command) {
    let input = match command {
        Command::Certainty(a) => {
            absolute(&mut a.cluster.partition);
            Some(&mut a.input)
        }
        Command::Fanny(a) => Some(&mut a.input),
        Command::Simulate(a) => {
            absolute(&mut a.scenario);
            None
        }
        Command::Hist(a) => {
            let mut p = Some(a.input.clone());
            absolute(&mut p);
            a.input = p.unwrap_or_default();
            None
        }
        Command::Reproduce(_) | Command::Replay(_) => None,
    };
    if let Some(input) = input {
        absolute(&mut input.data);
        absolute(&mut input.matrix);
        absolute(&mut input.groups);
    }
}

/// Type-7 sample quantile (linear interpolation between order statistics).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}
