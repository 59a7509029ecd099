use clustcert::evaluation::{contingency, match_labels, max_weight_assignment};
use clustcert::simulate::{
    gen_continuous, run_replications, BinaryDesign, Clustering, ContinuousDesign, DesignKind, ExponentPolicy, Measure,
};
use clustcert::{
    certainty_silhouette, datasets, hierarchical, kmeans, pam, Dataset, FeatureKind, Linkage, Metric, Partition,
    Scenario,
};
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

proptest! {
    #[test]
    fn assignment_matches_brute_force(weights in prop::collection::vec(0i64..50, 16), c in 2usize..=4) {
        let w: Vec<Vec<i64>> = (0..c).map(|k| weights[k * 4..k * 4 + c].to_vec()).collect();
        let got = max_weight_assignment(&w);
        let score = |p: &[usize]| (0..c).map(|k| w[k][p[k]]).sum::<i64>();
        let best = permutations(c).iter().map(|p| score(p)).max().unwrap();
        prop_assert_eq!(score(&got), best);
    }
}

#[test]
fn matching_undoes_a_relabelling() {
    let groups = vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 2];
    let labels: Vec<usize> = groups.iter().map(|&g| [2, 0, 1][g]).collect();
    let mapping = match_labels(&labels, 3, &groups, 3).unwrap();
    assert_eq!(mapping.as_slice(), &[1, 2, 0]);
    assert_eq!(contingency(&labels, 3, &groups, 3)[2], vec![3, 0, 0]);
}

fn blobs() -> Dataset {
    let mut rows = Vec::new();
    for (cx, cy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)] {
        for k in 0..6 {
            let t = k as f64;
            rows.push(vec![cx + 0.3 * t.cos(), cy + 0.3 * t.sin()]);
        }
    }
    Dataset::from_rows(&rows, FeatureKind::Continuous).unwrap()
}

#[test]
fn all_methods_recover_well_separated_blobs() {
    let data = blobs();
    let m = Metric::Euclidean.apply(&data).unwrap();
    let truth = Partition::new((0..18).map(|i| i / 6).collect(), 3).unwrap();
    let found = [
        pam(&m, 3).unwrap().partition,
        hierarchical(&m, 3, Linkage::Average).unwrap(),
        hierarchical(&m, 3, Linkage::Complete).unwrap(),
        hierarchical(&m, 3, Linkage::Ward).unwrap(),
        kmeans(&data, 3, 11, 5).unwrap().partition,
    ];
    for z in &found {
        let mapping = clustcert::match_clusters(z, truth.labels()).unwrap();
        for i in 0..18 {
            assert_eq!(mapping.group_of(z.label(i)), truth.label(i));
        }
        let p = certainty_silhouette(&m, z, 1.0).unwrap();
        for i in 0..18 {
            assert!(p.get(i, z.label(i)) > 0.45);
        }
    }
}

#[test]
fn simulated_designs_have_the_documented_layout() {
    let two = BinaryDesign::two_group();
    assert_eq!((two.n(), two.p(), two.groups()), (41, 20, 2));
    assert!((two.intercept() + 1.8).abs() < 1e-9);
    let three = ContinuousDesign::three_group();
    assert_eq!((three.n(), three.p(), three.groups()), (61, 24, 3));
    let d = gen_continuous(&ContinuousDesign::two_group(), 5).unwrap();
    assert_eq!(d.hybrid(), Some(40));
    assert_eq!(d.groups().unwrap()[..21].iter().filter(|&&g| g == 0).count(), 20);
}

fn small(seed: u64) -> Scenario {
    Scenario {
        design: DesignKind::ContinuousTwo,
        metric: Metric::Euclidean,
        clustering: Clustering::Kmeans { restarts: 3 },
        measure: Measure::Silhouette,
        exponent: ExponentPolicy::TuneSd { target: 0.1 },
        replicates: 40,
        seed,
    }
}

#[test]
fn replications_are_reproducible_from_the_seed() {
    let a = run_replications(&small(3)).unwrap();
    let b = run_replications(&small(3)).unwrap();
    let c = run_replications(&small(4)).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.summary.exponent, b.summary.exponent);
    assert_ne!(a.records, c.records);
    assert!(a.complete && a.failures.is_empty());
    assert!(a.tuned.unwrap().attained);
    assert!((a.summary.sd_ph1 - 0.1).abs() < 1e-3);
}

#[test]
fn iris_chord_distances_ignore_scale() {
    let data = datasets::iris();
    let m = Metric::Chord.apply(&data).unwrap();
    let rows: Vec<Vec<f64>> = data.rows().map(|r| r.iter().map(|x| 3.5 * x).collect()).collect();
    let scaled = Dataset::from_rows(&rows, FeatureKind::Continuous).unwrap();
    let m2 = Metric::Chord.apply(&scaled).unwrap();
    for (a, b) in m.values().iter().zip(m2.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}
