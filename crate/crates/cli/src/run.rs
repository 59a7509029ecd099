use std::fmt::Write as _;

use clustcert::evaluation::{contingency, match_labels, soft_misclassification, tune_exponent, Tuned};
use clustcert::fanny::{fanny, FannyOptions};
use clustcert::partition::{hierarchical, kmeans, pam, silhouettes};
use clustcert::projection::principal_components;
use clustcert::{
    CertaintyBasis, CertaintyMatrix, Dataset, DissimilarityMatrix, Error, EvaluationReport, FeatureKind, Linkage,
    Partition, Result,
};
use serde::Serialize;

use crate::args::{CertaintyArgs, ClusterArg, ClusterArgs, FannyArgs, HistArgs, MeasureArg};
use crate::io::{load, load_partition, quantile, read_text, Loaded, Outputs};

pub const HIST_BINS: usize = 20;

fn cluster(args: &ClusterArgs, loaded: &Loaded, c: usize, seed: u64) -> Result<Partition> {
    if let Some(path) = &args.partition {
        let z = load_partition(path, loaded.matrix.n())?;
        if z.clusters() != c {
            return Err(Error::Argument(format!(
                "partition has {} clusters but --clusters is {c}",
                z.clusters()
            )));
        }
        return Ok(z);
    }
    let m = &loaded.matrix;
    match args.cluster {
        ClusterArg::Pam => Ok(pam(m, c)?.partition),
        ClusterArg::Hier => hierarchical(m, c, Linkage::from(args.linkage)),
        ClusterArg::Kmeans => {
            let data = loaded
                .data
                .as_ref()
                .ok_or_else(|| Error::Argument("k-means needs feature data, not a matrix".into()))?;
            Ok(kmeans(data, c, seed, args.restarts)?.partition)
        }
    }
}

fn non_hybrid(n: usize, hybrid: Option<usize>) -> Vec<usize> {
    (0..n).filter(|&i| Some(i) != hybrid).collect()
}

fn partition_text(labels: &[usize]) -> String {
    let mut out = String::new();
    for (i, z) in labels.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, z + 1);
    }
    out
}

fn confusion_csv(labels: &[usize], c: usize, groups: &[usize], keep: &[usize]) -> String {
    let g = groups.iter().max().map_or(0, |m| m + 1);
    let z: Vec<usize> = keep.iter().map(|&i| labels[i]).collect();
    let t: Vec<usize> = keep.iter().map(|&i| groups[i]).collect();
    let table = contingency(&z, c, &t, g);
    let mut out = String::from("cluster");
    for j in 1..=g {
        let _ = write!(out, ",group_{j}");
    }
    out.push('\n');
    for (k, row) in table.iter().enumerate() {
        let _ = write!(out, "{}", k + 1);
        for x in row {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

fn pca_output(data: Option<&Dataset>, out: &mut Outputs) -> Result<()> {
    if let Some(d) = data.filter(|d| d.kind() == FeatureKind::Continuous && d.p() >= 2) {
        out.write("pca.csv", &principal_components(d, 2)?.to_csv())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CertaintyReport {
    n: usize,
    clusters: usize,
    measure: &'static str,
    exponent: f64,
    tuned: Option<Tuned>,
    r_pd: f64,
    r_sm: Option<f64>,
    mapping: Option<Vec<usize>>,
    misclassified: Vec<usize>,
    average_silhouette: Option<f64>,
    quantile: f64,
    threshold: f64,
    ambiguous: Vec<usize>,
}

struct Scored {
    labels: Vec<usize>,
    p: CertaintyMatrix,
    tuned: Option<Tuned>,
    average_silhouette: Option<f64>,
}

fn check_quantile(q: f64) -> Result<()> {
    if q > 0.0 && q < 0.5 {
        Ok(())
    } else {
        Err(Error::Validation(format!("quantile must lie in (0, 0.5), got {q}")))
    }
}

fn score_partition(args: &CertaintyArgs, loaded: &Loaded) -> Result<Scored> {
    let m = &loaded.matrix;
    let c = args.clusters;
    let measure = &args.measure;
    if measure.tune_sd.is_some() {
        return Err(Error::Argument(
            "tuning to sd(P_h1) needs replicated data; use `simulate --tune-sd`".into(),
        ));
    }
    if measure.measure == MeasureArg::Fanny {
        if measure.tune_rsm.is_some() {
            return Err(Error::Argument("FANNY runs take a fixed exponent".into()));
        }
        let opts = FannyOptions {
            r: measure.exponent.unwrap_or_else(|| measure.default_exponent()),
            seed: measure.seed,
            ..Default::default()
        };
        let res = fanny(m, c, &opts)?;
        return Ok(Scored {
            labels: res.hard_labels(),
            p: res.memberships,
            tuned: None,
            average_silhouette: None,
        });
    }

    let z = cluster(&args.cluster, loaded, c, measure.seed)?;
    let kind = clustcert::simulate::Measure::from(measure.measure).kind();
    let basis = CertaintyBasis::new(kind, m, &z)?;
    let sil = silhouettes(m, &z)?;
    let average_silhouette = Some(sil.iter().sum::<f64>() / sil.len() as f64);

    let (exponent, tuned) = match measure.tune_rsm {
        Some(target) => {
            let groups = loaded
                .groups
                .as_deref()
                .ok_or_else(|| Error::Argument("--tune-rsm needs ground-truth groups".into()))?;
            let keep = non_hybrid(m.n(), loaded.hybrid);
            let kz: Vec<usize> = keep.iter().map(|&i| z.label(i)).collect();
            let kg: Vec<usize> = keep.iter().map(|&i| groups[i]).collect();
            let g = kg.iter().max().map_or(0, |x| x + 1);
            let mapping = match_labels(&kz, c, &kg, g)?;
            let t = tune_exponent(
                |e| soft_misclassification(&basis.certainty(e)?, groups, &mapping, loaded.hybrid),
                target,
            )?;
            (t.exponent, Some(t))
        }
        None => (measure.exponent.unwrap_or(1.0), None),
    };
    Ok(Scored {
        labels: z.labels().to_vec(),
        p: basis.certainty(exponent)?,
        tuned,
        average_silhouette,
    })
}

pub fn certainty(args: &CertaintyArgs, out: &mut Outputs) -> Result<()> {
    check_quantile(args.quantile)?;
    if args.clusters == 0 {
        return Err(Error::Argument("--clusters must be at least 1".into()));
    }
    let loaded = load(&args.input)?;
    let Scored {
        labels,
        p,
        tuned,
        average_silhouette,
    } = score_partition(args, &loaded)?;
    let n = p.n();
    let c = p.clusters();
    let eval = EvaluationReport::build(&p, &labels, loaded.groups.as_deref(), loaded.hybrid)?;

    let keep = non_hybrid(n, loaded.hybrid);
    let assigned: Vec<f64> = keep.iter().map(|&i| p.get(i, labels[i])).collect();
    let threshold = quantile(&assigned, args.quantile);
    let ambiguous: Vec<usize> = keep
        .iter()
        .copied()
        .filter(|&i| p.get(i, labels[i]) < threshold)
        .collect();

    let mut amb = String::from("individual,assigned,group,certainty");
    for k in 1..=c {
        let _ = write!(amb, ",cluster_{k}");
    }
    amb.push('\n');
    for &i in &ambiguous {
        let group = loaded.groups.as_ref().map_or(String::new(), |g| (g[i] + 1).to_string());
        let _ = write!(amb, "{},{},{},{:.10}", i + 1, labels[i] + 1, group, p.get(i, labels[i]));
        for v in p.row(i) {
            let _ = write!(amb, ",{v:.10}");
        }
        amb.push('\n');
    }

    out.write("partition.csv", &partition_text(&labels))?;
    out.write("certainty.csv", &p.to_csv(&labels)?)?;
    out.write("ambiguous.csv", &amb)?;
    if let Some(g) = &loaded.groups {
        out.write("confusion.csv", &confusion_csv(&labels, c, g, &keep))?;
    }
    pca_output(loaded.data.as_ref(), out)?;
    out.write_json(
        "report.json",
        &CertaintyReport {
            n,
            clusters: c,
            measure: p.kind().as_str(),
            exponent: p.exponent(),
            tuned,
            r_pd: eval.r_pd,
            r_sm: eval.r_sm,
            mapping: eval.mapping,
            misclassified: eval.misclassified,
            average_silhouette,
            quantile: args.quantile,
            threshold,
            ambiguous: ambiguous.iter().map(|i| i + 1).collect(),
        },
    )
}

#[derive(Serialize)]
struct FannyReport {
    objective: f64,
    iterations: usize,
    converged: bool,
    r: f64,
    history: Vec<f64>,
    evaluation: EvaluationReport,
}

pub fn fanny_cmd(args: &FannyArgs, out: &mut Outputs) -> Result<()> {
    let loaded = load(&args.input)?;
    let m: &DissimilarityMatrix = &loaded.matrix;
    let opts = FannyOptions {
        r: args.exponent,
        seed: args.seed,
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let res = fanny(m, args.clusters, &opts)?;
    let labels = res.hard_labels();
    let evaluation = EvaluationReport::build(&res.memberships, &labels, loaded.groups.as_deref(), loaded.hybrid)?;
    out.write("memberships.csv", &res.memberships.to_csv(&labels)?)?;
    out.write("partition.csv", &partition_text(&labels))?;
    if let Some(g) = &loaded.groups {
        let keep = non_hybrid(m.n(), loaded.hybrid);
        out.write("confusion.csv", &confusion_csv(&labels, args.clusters, g, &keep))?;
    }
    out.write_json(
        "fanny.json",
        &FannyReport {
            objective: res.objective,
            iterations: res.iterations,
            converged: res.converged,
            r: res.r,
            history: res.history,
            evaluation,
        },
    )
}

/// Counts of `values` in `HIST_BINS` equal bins over [0, 1]; 1.0 falls in the last bin.
pub fn histogram(values: &[f64]) -> [usize; HIST_BINS] {
    let mut counts = [0; HIST_BINS];
    for &v in values {
        counts[((v * HIST_BINS as f64) as usize).min(HIST_BINS - 1)] += 1;
    }
    counts
}

pub fn hist(args: &HistArgs, out: &mut Outputs) -> Result<()> {
    let text = read_text(&args.input)?;
    let ingest = |line: usize, message: String| Error::Ingestion {
        path: args.input.clone(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| ingest(1, "empty file".into()))?;
    let col = header
        .split(',')
        .position(|h| h.trim() == args.column)
        .ok_or_else(|| ingest(1, format!("no column named '{}'", args.column)))?;
    let mut values = Vec::new();
    for (idx, line) in lines {
        let field = line
            .split(',')
            .nth(col)
            .ok_or_else(|| ingest(idx + 1, "row is too short".into()))?
            .trim();
        let v: f64 = field
            .parse()
            .map_err(|_| ingest(idx + 1, format!("cannot parse '{field}' as a number")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Validation(format!(
                "line {}: value {v} lies outside [0, 1]",
                idx + 1
            )));
        }
        values.push(v);
    }
    let mut csv = String::from("bin,lower,upper,count\n");
    for (b, count) in histogram(&values).iter().enumerate() {
        let lower = b as f64 / HIST_BINS as f64;
        let upper = (b + 1) as f64 / HIST_BINS as f64;
        let _ = writeln!(csv, "{},{lower:.2},{upper:.2},{count}", b + 1);
    }
    out.write("histogram.csv", &csv)
}
