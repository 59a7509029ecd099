//! Latent-group simulation designs with a single hybrid individual, and the
//! replicated experiments run on them.
//!
//! Every design places `per_group` individuals in each group, in group order,
//! followed by one hybrid whose latent vector sits between the groups. Feature
//! block `b` (of `features_per_latent` columns) is driven by latent component
//! `b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certainty::{CertaintyBasis, CertaintyMatrix, MeasureKind};
use crate::dissimilarity::{Dataset, FeatureKind, Metric};
use crate::error::{Error, Result};
use crate::evaluation::{match_labels, tune_exponent, ClusterMapping, Tuned};
use crate::fanny::{fanny, FannyOptions};
use crate::partition::{hierarchical, kmeans, pam, Linkage, Partition, DEFAULT_RESTARTS};

pub const INTERCEPT_BRACKET: (f64, f64) = (-50.0, 50.0);
pub const INTERCEPT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_BETA: f64 = 1.2;
pub const DEFAULT_PER_GROUP: usize = 20;

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn check_latents(group_latents: &[Vec<f64>], hybrid: &[f64]) -> Result<usize> {
    let dim = group_latents.first().map_or(0, Vec::len);
    if group_latents.len() < 2 || dim == 0 {
        return Err(Error::Argument(
            "a design needs at least two groups and one latent".into(),
        ));
    }
    if group_latents.iter().any(|u| u.len() != dim) || hybrid.len() != dim {
        return Err(Error::Dimension("latent vectors differ in length".into()));
    }
    if group_latents.iter().flatten().chain(hybrid).any(|v| !v.is_finite()) {
        return Err(Error::Argument("latent values must be finite".into()));
    }
    Ok(dim)
}

/// Intercept `t` at which `logistic(t + beta * u)`, averaged over groups and
/// latent components, equals one half.
pub fn solve_intercept(group_latents: &[Vec<f64>], beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::Argument(format!("slope must be finite, got {beta}")));
    }
    let values: Vec<f64> = group_latents.iter().flatten().copied().collect();
    if values.is_empty() {
        return Err(Error::Argument("no latent values to calibrate against".into()));
    }
    let excess = |t: f64| values.iter().map(|u| logistic(t + beta * u)).sum::<f64>() / values.len() as f64 - 0.5;
    let (mut lo, mut hi) = INTERCEPT_BRACKET;
    let (f_lo, f_hi) = (excess(lo), excess(hi));
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Solver(format!(
            "intercept bracket [{lo}, {hi}] does not straddle the root"
        )));
    }
    while hi - lo > INTERCEPT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn two_group_latents() -> (Vec<Vec<f64>>, Vec<f64>) {
    (vec![vec![3.0, 0.0], vec![0.0, 3.0]], vec![1.5, 1.5])
}

fn three_group_latents() -> (Vec<Vec<f64>>, Vec<f64>) {
    (
        vec![vec![3.0, 0.0, 0.0], vec![0.0, 3.0, 0.0], vec![0.0, 0.0, 3.0]],
        vec![1.0, 1.0, 1.0],
    )
}

fn group_labels(groups: usize, per_group: usize) -> Vec<usize> {
    (0..groups).flat_map(|g| std::iter::repeat_n(g, per_group)).collect()
}

fn latent_rows<'a>(latents: &'a [Vec<f64>], hybrid: &'a [f64], per_group: usize) -> impl Iterator<Item = &'a [f64]> {
    latents
        .iter()
        .flat_map(move |u| std::iter::repeat_n(u.as_slice(), per_group))
        .chain(std::iter::once(hybrid))
}

fn assemble(values: Vec<f64>, p: usize, kind: FeatureKind, groups: usize, per_group: usize) -> Result<Dataset> {
    let n = groups * per_group + 1;
    // The hybrid carries group 0 as a placeholder; it is excluded from every rate.
    let mut labels = group_labels(groups, per_group);
    labels.push(0);
    Dataset::new(n, p, values, kind)?
        .with_groups(labels)?
        .with_hybrid(n - 1)
}

/// Bernoulli features with success probability `logistic(t + beta * u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryDesign {
    pub group_latents: Vec<Vec<f64>>,
    pub hybrid_latent: Vec<f64>,
    pub beta: f64,
    pub per_group: usize,
    pub features_per_latent: usize,
    intercept: f64,
}

impl BinaryDesign {
    pub fn new(
        group_latents: Vec<Vec<f64>>,
        hybrid_latent: Vec<f64>,
        beta: f64,
        per_group: usize,
        features_per_latent: usize,
    ) -> Result<Self> {
        check_latents(&group_latents, &hybrid_latent)?;
        if per_group == 0 || features_per_latent == 0 {
            return Err(Error::Argument("group size and block size must be positive".into()));
        }
        let intercept = solve_intercept(&group_latents, beta)?;
        Ok(Self {
            group_latents,
            hybrid_latent,
            beta,
            per_group,
            features_per_latent,
            intercept,
        })
    }

    /// Two groups at (3,0) and (0,3), hybrid at (1.5,1.5), 10 features per latent.
    pub fn two_group() -> Self {
        let (g, h) = two_group_latents();
        Self::new(g, h, DEFAULT_BETA, DEFAULT_PER_GROUP, 10).expect("valid built-in design")
    }

    /// Three groups on the axes at 3, hybrid at (1,1,1), 8 features per latent.
    pub fn three_group() -> Self {
        let (g, h) = three_group_latents();
        Self::new(g, h, DEFAULT_BETA, DEFAULT_PER_GROUP, 8).expect("valid built-in design")
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn groups(&self) -> usize {
        self.group_latents.len()
    }

    pub fn n(&self) -> usize {
        self.groups() * self.per_group + 1
    }

    pub fn p(&self) -> usize {
        self.hybrid_latent.len() * self.features_per_latent
    }

    /// Success probability for an individual with latent `u` on feature `j`.
    pub fn probability(&self, u: &[f64], j: usize) -> f64 {
        logistic(self.intercept + self.beta * u[j / self.features_per_latent])
    }

    pub fn generate_with(&self, rng: &mut impl Rng) -> Result<Dataset> {
        let p = self.p();
        let mut values = Vec::with_capacity(self.n() * p);
        for u in latent_rows(&self.group_latents, &self.hybrid_latent, self.per_group) {
            for j in 0..p {
                let hit = rng.random::<f64>() < self.probability(u, j);
                values.push(if hit { 1.0 } else { 0.0 });
            }
        }
        assemble(values, p, FeatureKind::Binary, self.groups(), self.per_group)
    }
}

/// Gaussian features centred on the block's latent value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousDesign {
    pub group_latents: Vec<Vec<f64>>,
    pub hybrid_latent: Vec<f64>,
    pub per_group: usize,
    pub features_per_latent: usize,
    pub noise_sd: f64,
}

impl ContinuousDesign {
    pub fn new(
        group_latents: Vec<Vec<f64>>,
        hybrid_latent: Vec<f64>,
        per_group: usize,
        features_per_latent: usize,
        noise_sd: f64,
    ) -> Result<Self> {
        check_latents(&group_latents, &hybrid_latent)?;
        if per_group == 0 || features_per_latent == 0 {
            return Err(Error::Argument("group size and block size must be positive".into()));
        }
        if !(noise_sd > 0.0 && noise_sd.is_finite()) {
            return Err(Error::Argument(format!("noise sd must be positive, got {noise_sd}")));
        }
        Ok(Self {
            group_latents,
            hybrid_latent,
            per_group,
            features_per_latent,
            noise_sd,
        })
    }

    /// Two groups at (3,0) and (0,3), hybrid at (1.5,1.5), 10 + 10 features.
    pub fn two_group() -> Self {
        let (g, h) = two_group_latents();
        Self::new(g, h, DEFAULT_PER_GROUP, 10, 1.0).expect("valid built-in design")
    }

    /// Three groups on the axes at 3, hybrid at (1,1,1), 8 + 8 + 8 features.
    pub fn three_group() -> Self {
        let (g, h) = three_group_latents();
        Self::new(g, h, DEFAULT_PER_GROUP, 8, 1.0).expect("valid built-in design")
    }

    pub fn groups(&self) -> usize {
        self.group_latents.len()
    }

    pub fn n(&self) -> usize {
        self.groups() * self.per_group + 1
    }

    pub fn p(&self) -> usize {
        self.hybrid_latent.len() * self.features_per_latent
    }

    pub fn generate_with(&self, rng: &mut impl Rng) -> Result<Dataset> {
        let p = self.p();
        let mut values = Vec::with_capacity(self.n() * p);
        for u in latent_rows(&self.group_latents, &self.hybrid_latent, self.per_group) {
            for j in 0..p {
                let z: f64 = StandardNormal.sample(rng);
                values.push(u[j / self.features_per_latent] + self.noise_sd * z);
            }
        }
        assemble(values, p, FeatureKind::Continuous, self.groups(), self.per_group)
    }
}

pub fn gen_binary(design: &BinaryDesign, seed: u64) -> Result<Dataset> {
    design.generate_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn gen_continuous(design: &ContinuousDesign, seed: u64) -> Result<Dataset> {
    design.generate_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// The four built-in designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    BinaryTwo,
    BinaryThree,
    ContinuousTwo,
    ContinuousThree,
}

impl DesignKind {
    pub fn build(self) -> Design {
        match self {
            DesignKind::BinaryTwo => Design::Binary(BinaryDesign::two_group()),
            DesignKind::BinaryThree => Design::Binary(BinaryDesign::three_group()),
            DesignKind::ContinuousTwo => Design::Continuous(ContinuousDesign::two_group()),
            DesignKind::ContinuousThree => Design::Continuous(ContinuousDesign::three_group()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DesignKind::BinaryTwo => "binary-two",
            DesignKind::BinaryThree => "binary-three",
            DesignKind::ContinuousTwo => "continuous-two",
            DesignKind::ContinuousThree => "continuous-three",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Binary(BinaryDesign),
    Continuous(ContinuousDesign),
}

impl Design {
    pub fn groups(&self) -> usize {
        match self {
            Design::Binary(d) => d.groups(),
            Design::Continuous(d) => d.groups(),
        }
    }

    pub fn generate_with(&self, rng: &mut impl Rng) -> Result<Dataset> {
        match self {
            Design::Binary(d) => d.generate_with(rng),
            Design::Continuous(d) => d.generate_with(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Clustering {
    Pam,
    Hierarchical {
        #[serde(default)]
        linkage: Linkage,
    },
    Kmeans {
        #[serde(default = "default_restarts")]
        restarts: usize,
    },
}

fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Silhouette,
    Dissimilarity,
    Fanny,
}

impl Measure {
    pub fn kind(self) -> MeasureKind {
        match self {
            Measure::Silhouette => MeasureKind::SilhouetteBased,
            Measure::Dissimilarity => MeasureKind::DissimilarityBased,
            Measure::Fanny => MeasureKind::Fanny,
        }
    }
}

/// How the exponent (`l`, `v`, or the FANNY `r`) is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ExponentPolicy {
    Fixed {
        value: f64,
    },
    /// Exponent at which the standard deviation of `P_h1` over replicates hits the target.
    TuneSd {
        target: f64,
    },
    /// Exponent at which the mean soft-misclassification rate hits the target.
    TuneRsm {
        target: f64,
    },
}

/// A complete, declarative description of a replicated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub design: DesignKind,
    pub metric: Metric,
    pub clustering: Clustering,
    pub measure: Measure,
    pub exponent: ExponentPolicy,
    pub replicates: usize,
    pub seed: u64,
}

/// Everything needed to score one replicate at any exponent.
#[derive(Debug, Clone)]
pub struct ReplicateSheet {
    pub replicate: usize,
    source: SheetSource,
    labels: Vec<usize>,
    groups: Vec<usize>,
    mapping: ClusterMapping,
    hybrid: usize,
}

#[derive(Debug, Clone)]
enum SheetSource {
    Basis(CertaintyBasis),
    Fixed(CertaintyMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub p_h1: f64,
    pub r_sm: f64,
    pub r_pd: f64,
}

impl ReplicateSheet {
    pub fn clusters(&self) -> usize {
        self.mapping.as_slice().len()
    }

    /// Hybrid certainty for the cluster matched to group 1, and both rates
    /// over the non-hybrid individuals.
    pub fn evaluate(&self, exponent: f64) -> ReplicateRecord {
        let c = self.clusters();
        let mut buf = vec![0.0; c];
        let row = |i: usize, buf: &mut [f64]| match &self.source {
            SheetSource::Basis(b) => b.certainty_row(i, exponent, buf),
            SheetSource::Fixed(p) => buf.copy_from_slice(p.row(i)),
        };
        row(self.hybrid, &mut buf);
        let p_h1 = buf[self.mapping.cluster_of(0)];
        let (mut sm, mut pd) = (0.0, 0.0);
        let mut count = 0usize;
        for i in (0..self.labels.len()).filter(|&i| i != self.hybrid) {
            row(i, &mut buf);
            sm += 1.0 - buf[self.mapping.cluster_of(self.groups[i])];
            pd += 1.0 - buf[self.labels[i]];
            count += 1;
        }
        ReplicateRecord {
            replicate: self.replicate,
            p_h1,
            r_sm: sm / count as f64,
            r_pd: pd / count as f64,
        }
    }
}

fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

fn fanny_exponent(policy: ExponentPolicy) -> Result<f64> {
    match policy {
        ExponentPolicy::Fixed { value } => Ok(value),
        _ => Err(Error::Argument("FANNY runs take a fixed exponent".into())),
    }
}

/// Generates, clusters and prepares one replicate.
pub fn prepare_replicate(scenario: &Scenario, design: &Design, replicate: usize) -> Result<ReplicateSheet> {
    let mut rng = replicate_rng(scenario.seed, replicate);
    let data = design.generate_with(&mut rng)?;
    let m = scenario.metric.apply(&data)?;
    let c = design.groups();
    let hybrid = data.hybrid().expect("simulated data mark the hybrid");
    let groups = data.groups().expect("simulated data carry groups").to_vec();

    let (labels, source) = if scenario.measure == Measure::Fanny {
        let opts = FannyOptions {
            r: fanny_exponent(scenario.exponent)?,
            seed: rng.random(),
            ..Default::default()
        };
        let res = fanny(&m, c, &opts)?;
        (res.hard_labels(), SheetSource::Fixed(res.memberships))
    } else {
        let z: Partition = match scenario.clustering {
            Clustering::Pam => pam(&m, c)?.partition,
            Clustering::Hierarchical { linkage } => hierarchical(&m, c, linkage)?,
            Clustering::Kmeans { restarts } => kmeans(&data, c, rng.random(), restarts)?.partition,
        };
        let basis = CertaintyBasis::new(scenario.measure.kind(), &m, &z)?;
        (z.labels().to_vec(), SheetSource::Basis(basis))
    };

    let keep: Vec<usize> = (0..data.n()).filter(|&i| i != hybrid).collect();
    let kept_labels: Vec<usize> = keep.iter().map(|&i| labels[i]).collect();
    let kept_groups: Vec<usize> = keep.iter().map(|&i| groups[i]).collect();
    let mapping = match_labels(&kept_labels, c, &kept_groups, c)?;

    Ok(ReplicateSheet {
        replicate,
        source,
        labels,
        groups,
        mapping,
        hybrid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateFailure {
    pub replicate: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub mean_ph1: f64,
    /// Sample standard deviation (divisor `n - 1`).
    pub sd_ph1: f64,
    pub r_sm_mean: f64,
    pub r_pd_mean: f64,
    pub replicates: usize,
    pub exponent: f64,
}

/// Replicates prepared once and scored at any number of exponents.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub sheets: Vec<ReplicateSheet>,
    pub failures: Vec<ReplicateFailure>,
    fixed_exponent: Option<f64>,
}

pub fn prepare(scenario: &Scenario) -> Result<Prepared> {
    if scenario.replicates == 0 {
        return Err(Error::Argument("cannot summarise zero replicates".into()));
    }
    let fixed_exponent = match scenario.measure {
        Measure::Fanny => Some(fanny_exponent(scenario.exponent)?),
        _ => None,
    };
    let design = scenario.design.build();
    let outcomes: Vec<Result<ReplicateSheet>> = (0..scenario.replicates)
        .into_par_iter()
        .map(|r| prepare_replicate(scenario, &design, r))
        .collect();
    let mut sheets = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (replicate, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(s) => sheets.push(s),
            Err(e) => failures.push(ReplicateFailure {
                replicate,
                message: e.to_string(),
            }),
        }
    }
    if sheets.is_empty() {
        return Err(Error::Solver(format!(
            "all {} replicates failed; first: {}",
            failures.len(),
            failures[0].message
        )));
    }
    Ok(Prepared {
        sheets,
        failures,
        fixed_exponent,
    })
}

/// Neumaier-compensated sum in iteration order.
fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

pub fn summarize(records: &[ReplicateRecord], exponent: f64) -> ReplicationSummary {
    let n = records.len() as f64;
    let mean = |f: fn(&ReplicateRecord) -> f64| stable_sum(records.iter().map(f)) / n;
    let mean_ph1 = mean(|r| r.p_h1);
    let sd_ph1 = if records.len() > 1 {
        (stable_sum(records.iter().map(|r| (r.p_h1 - mean_ph1).powi(2))) / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    ReplicationSummary {
        mean_ph1,
        sd_ph1,
        r_sm_mean: mean(|r| r.r_sm),
        r_pd_mean: mean(|r| r.r_pd),
        replicates: records.len(),
        exponent,
    }
}

impl Prepared {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn records(&self, exponent: f64) -> Result<Vec<ReplicateRecord>> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Argument(format!("exponent must be positive, got {exponent}")));
        }
        if let Some(fixed) = self.fixed_exponent {
            if fixed != exponent {
                return Err(Error::Argument(format!(
                    "memberships were computed at exponent {fixed}, not {exponent}"
                )));
            }
        }
        Ok(self.sheets.par_iter().map(|s| s.evaluate(exponent)).collect())
    }

    pub fn summary(&self, exponent: f64) -> Result<ReplicationSummary> {
        Ok(summarize(&self.records(exponent)?, exponent))
    }

    /// Exponent meeting a tuning target on the pooled replicates.
    pub fn tune(&self, policy: ExponentPolicy) -> Result<Tuned> {
        if self.fixed_exponent.is_some() {
            return Err(Error::Argument("FANNY runs take a fixed exponent".into()));
        }
        match policy {
            ExponentPolicy::Fixed { value } => Ok(Tuned {
                exponent: value,
                value: f64::NAN,
                attained: true,
                monotone: true,
            }),
            ExponentPolicy::TuneSd { target } => tune_exponent(|e| Ok(self.summary(e)?.sd_ph1), target),
            ExponentPolicy::TuneRsm { target } => tune_exponent(|e| Ok(self.summary(e)?.r_sm_mean), target),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicationRun {
    pub summary: ReplicationSummary,
    pub records: Vec<ReplicateRecord>,
    pub failures: Vec<ReplicateFailure>,
    pub complete: bool,
    /// Present when the exponent was tuned.
    pub tuned: Option<Tuned>,
}

/// Runs the scenario end to end.
pub fn run_replications(scenario: &Scenario) -> Result<ReplicationRun> {
    let prepared = prepare(scenario)?;
    let (exponent, tuned) = match scenario.exponent {
        ExponentPolicy::Fixed { value } => (value, None),
        policy => {
            let t = prepared.tune(policy)?;
            (t.exponent, Some(t))
        }
    };
    let records = prepared.records(exponent)?;
    Ok(ReplicationRun {
        summary: summarize(&records, exponent),
        records,
        complete: prepared.complete(),
        failures: prepared.failures,
        tuned,
    })
}

/// Per-replicate dump with columns `replicate,p_h1,r_sm,r_pd`.
pub fn records_to_csv(records: &[ReplicateRecord]) -> String {
    let mut out = String::from("replicate,p_h1,r_sm,r_pd\n");
    for r in records {
        out.push_str(&format!(
            "{},{:.12},{:.12},{:.12}\n",
            r.replicate + 1,
            r.p_h1,
            r.r_sm,
            r.r_pd
        ));
    }
    out
}
