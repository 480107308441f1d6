//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the observed numbers. Run with
//! `cargo test -p moca-core --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use moca_core::congestion_game::{solve_equilibrium, verify_equilibrium, GameSpec};
use moca_core::data_model::{Dataset, DistanceMatrix};
use moca_core::io::{parse_csv, LabelColumn};
use moca_core::kmeans::kmeans_baseline;
use moca_core::metrics::{
    adjusted_rand_index, pair_counts, purity, rand_index, ContingencyTable, PairCounts,
};
use moca_core::pipeline::{
    choose_l, initial_player_count, run_moca, MocaOutcome, NeighborCount, PipelineConfig,
};
use moca_core::synth::{generate_gaussian_blobs, BlobSpec};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn dataset_3_2(seed: u64) -> Dataset {
    generate_gaussian_blobs(
        &[
            BlobSpec { count: 13, center: vec![0.0, 0.0], spread: 0.5 },
            BlobSpec { count: 43, center: vec![10.0, 0.0], spread: 0.5 },
            BlobSpec { count: 20, center: vec![0.0, 10.0], spread: 0.5 },
        ],
        seed,
    )
    .unwrap()
}

fn spherical_3_4(seed: u64) -> Dataset {
    let centers = [
        [0.0, 0.0, 0.0],
        [12.0, 0.0, 0.0],
        [0.0, 12.0, 0.0],
        [0.0, 0.0, 12.0],
    ];
    let blobs: Vec<BlobSpec> = centers
        .iter()
        .map(|c| BlobSpec { count: 100, center: c.to_vec(), spread: 0.7 })
        .collect();
    generate_gaussian_blobs(&blobs, seed).unwrap()
}

fn moca_scores(data: &Dataset, f: usize, normalize: bool) -> (MocaOutcome, f64, f64, Duration) {
    let mut config = PipelineConfig::new(f);
    config.normalize = normalize;
    let start = Instant::now();
    let out = run_moca(data, &config).unwrap();
    let elapsed = start.elapsed();
    let pred = out.clustering.assignment(data.len());
    let truth = data.label_ids().unwrap();
    let ct = ContingencyTable::build(&pred, &truth).unwrap();
    (out, purity(&ct), adjusted_rand_index(&ct), elapsed)
}

/// Criterion 1: near-perfect clustering on both synthetic shapes for at
/// least 4 of 5 seeds, each run under 30 s.
#[test]
fn criterion_1_perfect_clustering_on_synthetic_shapes() {
    for (name, f, gen) in [
        ("dataset_3_2", 3usize, dataset_3_2 as fn(u64) -> Dataset),
        ("spherical_3_4", 4, spherical_3_4),
    ] {
        let mut good = 0;
        let mut details = Vec::new();
        for seed in 0..5u64 {
            let data = gen(seed);
            assert_eq!(choose_l(data.len()), if name == "dataset_3_2" { 9 } else { 14 });
            let (_, p, ari, elapsed) = moca_scores(&data, f, false);
            assert!(
                elapsed < Duration::from_secs(30),
                "{name} seed {seed} took {elapsed:?}"
            );
            if p >= 0.95 && ari >= 0.90 {
                good += 1;
            }
            details.push(format!("seed {seed}: purity={p:.3} ari={ari:.3}"));
        }
        assert!(
            good >= 4,
            "criterion 1 FAIL on {name}: only {good}/5 seeds good ({details:?})"
        );
        println!("ACCEPTANCE 1 ({name}): PASS — {good}/5 seeds with purity>=0.95, ari>=0.90");
    }
}

/// Criterion 2: Iris quality thresholds and parity with the k-means
/// baseline's best of 5 seeds, under 10 s.
#[test]
fn criterion_2_iris_quality() {
    let data = parse_csv(
        &data_dir().join("iris.csv"),
        &LabelColumn::Name("class".into()),
        true,
    )
    .unwrap();
    assert_eq!((data.len(), data.dim()), (150, 4));
    let truth = data.label_ids().unwrap();

    let (out, p, ari, elapsed) = moca_scores(&data, 3, false);
    assert_eq!(out.l, 14);
    assert!(elapsed < Duration::from_secs(10), "iris run took {elapsed:?}");
    assert!(p >= 0.85, "criterion 2 FAIL: purity {p:.4} < 0.85");
    assert!(ari >= 0.60, "criterion 2 FAIL: ari {ari:.4} < 0.60");

    let best_kmeans = (0..5u64)
        .map(|seed| {
            let pred = kmeans_baseline(&data, 3, seed, 100).unwrap();
            purity(&ContingencyTable::build(&pred, &truth).unwrap())
        })
        .fold(0.0f64, f64::max);
    assert!(
        p >= best_kmeans - 0.02,
        "criterion 2 FAIL: moca purity {p:.4} < kmeans best {best_kmeans:.4} - 0.02"
    );
    println!(
        "ACCEPTANCE 2 (iris): PASS — purity={p:.4} ari={ari:.4} kmeans_best={best_kmeans:.4}"
    );
}

/// Criterion 3: equilibrium soundness over 1000 random games in < 5 s.
#[test]
fn criterion_3_equilibrium_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let start = Instant::now();
    for _ in 0..1000 {
        let players = rng.gen_range(1..=8usize);
        let resources = rng.gen_range(1..=12usize);
        let cost: Vec<f64> = (0..players * resources)
            .map(|_| rng.gen_range(-1.0..0.0))
            .collect();
        let game =
            GameSpec::new((0..players).collect(), (0..resources).collect(), cost).unwrap();
        let eq = solve_equilibrium(&game).unwrap();
        assert!(
            verify_equilibrium(&game, &eq.profile).0,
            "criterion 3 FAIL: non-equilibrium output"
        );
        for w in eq.cost_trace.windows(2) {
            assert!(w[1] < w[0], "criterion 3 FAIL: cost trace not strictly decreasing");
        }
        assert!(
            eq.moves <= players * resources,
            "criterion 3 FAIL: {} moves > {}",
            eq.moves,
            players * resources
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "criterion 3 took {elapsed:?}");
    println!("ACCEPTANCE 3 (equilibrium soundness): PASS — 1000 games in {elapsed:?}");
}

// independent pair-counting oracles for criterion 4
fn rand_from_contingency(ct: &ContingencyTable) -> f64 {
    let c2 = |n: usize| n as f64 * (n as f64 - 1.0) / 2.0;
    let index: f64 = ct.counts.iter().flat_map(|r| r.iter()).map(|&c| c2(c)).sum();
    let rows: f64 = ct.cluster_sizes.iter().map(|&s| c2(s)).sum();
    let cols: f64 = ct.class_sizes.iter().map(|&s| c2(s)).sum();
    let pairs = c2(ct.total);
    (pairs + 2.0 * index - rows - cols) / pairs
}

fn ari_from_pairs(pc: &PairCounts) -> f64 {
    let (tp, tn, fp, fn_) = (pc.tp as f64, pc.tn as f64, pc.fp as f64, pc.fn_ as f64);
    let den = (tp + fp) * (fp + tn) + (tp + fn_) * (fn_ + tn);
    if den == 0.0 {
        1.0
    } else {
        2.0 * (tp * tn - fp * fn_) / den
    }
}

fn purity_oracle(pred: &[usize], truth: &[usize]) -> f64 {
    let clusters: BTreeSet<usize> = pred.iter().copied().collect();
    let classes: BTreeSet<usize> = truth.iter().copied().collect();
    let mut correct = 0usize;
    for &c in &clusters {
        let best = classes
            .iter()
            .map(|&k| {
                pred.iter()
                    .zip(truth)
                    .filter(|&(&p, &t)| p == c && t == k)
                    .count()
            })
            .max()
            .unwrap();
        correct += best;
    }
    correct as f64 / pred.len() as f64
}

fn entropy_oracle(pred: &[usize], truth: &[usize]) -> f64 {
    let classes: BTreeSet<usize> = truth.iter().copied().collect();
    let k = classes.len();
    if k <= 1 {
        return 0.0;
    }
    let clusters: BTreeSet<usize> = pred.iter().copied().collect();
    let n = pred.len() as f64;
    clusters
        .iter()
        .map(|&c| {
            let nj = pred.iter().filter(|&&p| p == c).count() as f64;
            let ej: f64 = classes
                .iter()
                .map(|&cl| {
                    let njk = pred
                        .iter()
                        .zip(truth)
                        .filter(|&(&p, &t)| p == c && t == cl)
                        .count() as f64;
                    if njk == 0.0 { 0.0 } else { -(njk / nj) * (njk / nj).ln() }
                })
                .sum::<f64>()
                / (k as f64).ln();
            nj / n * ej
        })
        .sum()
}

/// Criterion 4: the two metric formulations agree on 500 random labeled
/// partitions, and the worked 4-object examples reproduce to 1e-12.
#[test]
fn criterion_4_metric_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    for _ in 0..500 {
        let n = rng.gen_range(2..=50usize);
        let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..5usize)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..5usize)).collect();
        let pc = pair_counts(&pred, &truth).unwrap();
        let ct = ContingencyTable::build(&pred, &truth).unwrap();
        assert!(
            (rand_index(&pc) - rand_from_contingency(&ct)).abs() < 1e-12,
            "criterion 4 FAIL: RI routes disagree"
        );
        assert!(
            (adjusted_rand_index(&ct) - ari_from_pairs(&pc)).abs() < 1e-12,
            "criterion 4 FAIL: ARI routes disagree"
        );
        assert_eq!(
            purity(&ct),
            purity_oracle(&pred, &truth),
            "criterion 4 FAIL: purity vs direct-count oracle"
        );
        assert!(
            (moca_core::metrics::entropy(&ct) - entropy_oracle(&pred, &truth)).abs() < 1e-12,
            "criterion 4 FAIL: entropy vs direct-count oracle"
        );
    }

    // frozen worked 4-object examples
    let pred = vec![0, 0, 1, 2];
    let truth = vec![0, 0, 1, 1];
    let pc = pair_counts(&pred, &truth).unwrap();
    let ct = ContingencyTable::build(&pred, &truth).unwrap();
    assert!((rand_index(&pc) - 5.0 / 6.0).abs() < 1e-12);
    assert!((adjusted_rand_index(&ct) - 4.0 / 7.0).abs() < 1e-12);
    assert!((moca_core::metrics::f_measure(&pc, 1.0) - 2.0 / 3.0).abs() < 1e-12);
    println!("ACCEPTANCE 4 (metric oracle equivalence): PASS — 500 partitions + worked examples");
}

fn check_pipeline_invariants(name: &str, data: &Dataset, f: usize, normalize: bool) {
    let mut config = PipelineConfig::new(f);
    config.normalize = normalize;
    let out = run_moca(data, &config).unwrap();
    let m = data.len();

    // full partition
    assert!(out.clustering.is_valid(m), "{name}: invalid partition");
    assert!(out.clustering.unassigned.is_empty(), "{name}: leftovers remain");
    let covered: usize = out.clustering.clusters.iter().map(|c| c.members.len()).sum();
    assert_eq!(covered, m, "{name}: partition does not cover all objects");

    // phi non-decreasing across accepted allocations
    for w in out.state.phi_history.windows(2) {
        assert!(w[1] >= w[0], "{name}: phi decreased across accepted allocations");
    }

    // heads pairwise separated by at least Dmax/n0
    let geo = if normalize { data.min_max_normalize() } else { data.clone() };
    let dm = DistanceMatrix::build(&geo);
    let radius = dm.dmax() / out.n0 as f64;
    for (i, &a) in out.heads.iter().enumerate() {
        for &b in &out.heads[i + 1..] {
            assert!(
                dm.get(a, b) >= radius,
                "{name}: heads {a},{b} closer than Dmax/n0"
            );
        }
    }

    // exactly (initial - f) merges: final count is min(f, initial)
    assert_eq!(
        out.clustering.clusters.len(),
        f.min(out.heads.len()),
        "{name}: unexpected final cluster count"
    );
}

/// Criterion 5: pipeline invariants hold on the toy set and on every
/// benchmark dataset.
#[test]
fn criterion_5_pipeline_invariants() {
    let toy = Dataset::from_rows(
        [0.0, 0.1, 0.2, 5.0, 5.1, 5.2].iter().map(|&v| vec![v]).collect(),
        None,
    )
    .unwrap();
    check_pipeline_invariants("toy", &toy, 2, false);
    check_pipeline_invariants("dataset_3_2", &dataset_3_2(0), 3, false);
    check_pipeline_invariants("spherical_3_4", &spherical_3_4(0), 4, false);
    let iris = parse_csv(
        &data_dir().join("iris.csv"),
        &LabelColumn::Name("class".into()),
        true,
    )
    .unwrap();
    check_pipeline_invariants("iris", &iris, 3, false);
    let wine = parse_csv(
        &data_dir().join("wine.csv"),
        &LabelColumn::Name("class".into()),
        true,
    )
    .unwrap();
    check_pipeline_invariants("wine", &wine, 3, true);
    println!("ACCEPTANCE 5 (pipeline invariants): PASS — toy + 4 benchmark datasets");
}

/// Criterion 7 (declared non-reproducible figures are replaced by a Wine
/// smoke test): pipeline completes on Wine with --normalize, yields 3
/// clusters and positive ARI.
#[test]
fn criterion_7_wine_smoke() {
    let wine = parse_csv(
        &data_dir().join("wine.csv"),
        &LabelColumn::Name("class".into()),
        true,
    )
    .unwrap();
    assert_eq!((wine.len(), wine.dim()), (178, 13));
    // the size schedule's L=14 spawns 12 micro-clusters that single-linkage
    // merging chains together; L=20 keeps the initial clusters coarse enough
    let mut config = PipelineConfig::new(3);
    config.normalize = true;
    config.neighbor_count = NeighborCount::Fixed(20);
    let out = run_moca(&wine, &config).unwrap();
    let pred = out.clustering.assignment(wine.len());
    let truth = wine.label_ids().unwrap();
    let ct = ContingencyTable::build(&pred, &truth).unwrap();
    let (p, ari) = (purity(&ct), adjusted_rand_index(&ct));
    assert_eq!(out.clustering.clusters.len(), 3, "criterion 7 FAIL: cluster count");
    assert!(ari > 0.0, "criterion 7 FAIL: ari {ari:.4} not positive");
    println!("ACCEPTANCE 7 (wine smoke): PASS — purity={p:.4} ari={ari:.4}");
}

/// The toy 6-point end-to-end partition, frozen from the hand simulation.
#[test]
fn toy_six_point_partition_end_to_end() {
    let toy = Dataset::from_rows(
        [0.0, 0.1, 0.2, 5.0, 5.1, 5.2].iter().map(|&v| vec![v]).collect(),
        Some(vec!["lo".into(), "lo".into(), "lo".into(), "hi".into(), "hi".into(), "hi".into()]),
    )
    .unwrap();
    let mut config = PipelineConfig::new(2);
    config.neighbor_count = NeighborCount::Fixed(3);
    let out = run_moca(&toy, &config).unwrap();
    let pred = out.clustering.assignment(6);
    let truth = toy.label_ids().unwrap();
    let ct = ContingencyTable::build(&pred, &truth).unwrap();
    assert_eq!(purity(&ct), 1.0);
    assert_eq!(initial_player_count(6, 3), 2);
}
