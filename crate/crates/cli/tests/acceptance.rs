//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).
//!
//! Criterion 7 needs network access to OpenML and is `#[ignore]`d by
//! default; run `cargo test --release -p cdf-cli --test acceptance --
//! --ignored --nocapture` when online (or with a pre-populated
//! `CDF_CACHE_DIR`).

use std::time::Instant;

use rand::Rng;

use cdf_core::cdt::{compute_centroids, partition};
use cdf_core::css::{class_stats, css_scores, dataset_css, select_top_m};
use cdf_core::dataset::{load_csv, LabelColumn, MissingPolicy};
use cdf_core::forest::{train_forest, ForestConfig};
use cdf_core::harness::{make_blobs, repeated_holdout, sweep, EvalProtocol, SweepParam};
use cdf_core::matrix::Matrix;
use cdf_core::model::{load_model, save_model, SavedModel};
use cdf_core::rng::stream_rng;

fn check(name: &str, ok: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{name}: {detail}");
}

/// Default hyper-parameters throughout: B = 500, depth 3, n_min 3,
/// m_try 20%, m = ceil(2 ln p).
fn default_protocol(reps: usize, seed: u64) -> EvalProtocol {
    EvalProtocol {
        repetitions: reps,
        master_seed: seed,
        ..EvalProtocol::default()
    }
}

#[test]
fn c1_wcss_optimality() {
    let start = Instant::now();
    let mut rng = stream_rng(101, 0);
    let mut checked = 0u64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=3);
        let p = rng.gen_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let centroids: Vec<(usize, Vec<f64>)> = (0..k)
            .map(|c| (c, (0..p).map(|_| rng.gen_range(-3.0..3.0)).collect()))
            .collect();
        let idx: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (0..p).collect();
        let nearest = partition(&m, &idx, &cols, &centroids);

        let wcss = |assign: &[usize]| -> f64 {
            assign
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    m.row(i)
                        .iter()
                        .zip(&centroids[c].1)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .sum()
        };
        let best = wcss(&nearest);

        // exhaustive enumeration of all k^n assignments
        let mut alt = vec![0usize; n];
        loop {
            checked += 1;
            assert!(
                best <= wcss(&alt) + 1e-12,
                "c1: nearest-centroid assignment beaten by {alt:?}"
            );
            let mut i = 0;
            while i < n {
                alt[i] += 1;
                if alt[i] < k {
                    break;
                }
                alt[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        "C1 wcss-optimality",
        elapsed < 10.0,
        &format!("0 violations over 200 instances, {checked} assignments, {elapsed:.2}s"),
    );
}

#[test]
fn c2_centroid_stability() {
    let mut rng = stream_rng(202, 0);
    let mut worst_ratio = 0.0f64;
    for &delta in &[1e-3, 1e-1] {
        for _ in 0..100 {
            let n = rng.gen_range(3..=30);
            let p = rng.gen_range(1..=8);
            let k = rng.gen_range(1..=4);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..p).map(|_| rng.gen_range(-10.0..10.0)).collect())
                .collect();
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();

            // per-row perturbation with norm <= delta
            let perturbed: Vec<Vec<f64>> = rows
                .iter()
                .map(|row| {
                    let dir: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                    let scale = rng.gen_range(0.0..=1.0) * delta / norm;
                    row.iter().zip(&dir).map(|(v, d)| v + d * scale).collect()
                })
                .collect();

            let idx: Vec<usize> = (0..n).collect();
            let cols: Vec<usize> = (0..p).collect();
            let c0 = compute_centroids(&Matrix::from_rows(&rows).unwrap(), &idx, &cols, &labels, k);
            let c1 = compute_centroids(
                &Matrix::from_rows(&perturbed).unwrap(),
                &idx,
                &cols,
                &labels,
                k,
            );
            for ((_, a), (_, b)) in c0.iter().zip(&c1) {
                let shift = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    shift <= delta + 1e-12,
                    "c2: centroid shifted {shift} for delta {delta}"
                );
                worst_ratio = worst_ratio.max(shift / delta);
            }
        }
    }
    check(
        "C2 centroid-stability",
        true,
        &format!("0 violations, worst shift/delta = {worst_ratio:.4}"),
    );
}

#[test]
fn c3_css_convergence() {
    // two Gaussians N(0,1) and N(2,1): analytic CSS = 2/(1+1) = 1
    let css_error = |n_per_class: usize, seed: u64| -> f64 {
        let mut rng = stream_rng(303, seed);
        let normal = rand_distr::Normal::new(0.0f64, 1.0).unwrap();
        let mut rows = Vec::with_capacity(2 * n_per_class);
        let mut labels = Vec::with_capacity(2 * n_per_class);
        for class in 0..2usize {
            for _ in 0..n_per_class {
                rows.push(vec![
                    2.0 * class as f64 + rand_distr::Distribution::sample(&normal, &mut rng),
                ]);
                labels.push(class);
            }
        }
        let m = Matrix::from_rows(&rows).unwrap();
        let all: Vec<usize> = (0..m.rows()).collect();
        let stats = class_stats(&m, &all, &[0], &labels, 2);
        (css_scores(&stats, 1e-7).unwrap().scores[0] - 1.0).abs()
    };

    let coarse: f64 = (0..20).map(|s| css_error(50, s)).sum::<f64>() / 20.0;
    let fine: f64 = (0..20).map(|s| css_error(5000, s)).sum::<f64>() / 20.0;
    check(
        "C3 css-convergence",
        fine < 0.05 && fine < coarse,
        &format!("|err| n_c=50: {coarse:.4}, n_c=5000: {fine:.4} (need < 0.05 and shrinking)"),
    );
}

#[test]
fn c4_planted_feature_recovery() {
    let mut successes = 0;
    for seed in 0..10u64 {
        let d = make_blobs::<f64>(50, 2, 1000, 5, 4.0, 1.0, seed).unwrap();
        let scores = dataset_css(&d, 1e-7).unwrap();
        let all: Vec<usize> = (0..d.p()).collect();
        let top = select_top_m(&scores, &all, 5);
        let recovered = top.iter().filter(|&&j| j < 5).count();
        if recovered >= 4 {
            successes += 1;
        }
    }
    check(
        "C4 planted-feature-recovery",
        successes >= 9,
        &format!("{successes}/10 seeds recovered >= 4 of 5 planted features in the top 5"),
    );
}

#[test]
fn c5_separable_learning() {
    let d = make_blobs::<f64>(40, 3, 200, 20, 10.0, 1.0, 42).unwrap();
    let report = repeated_holdout(&d, &default_protocol(20, 7)).unwrap();
    check(
        "C5 separable-learning",
        report.mean_accuracy >= 0.99 && report.mean_kappa >= 0.98,
        &format!(
            "mean acc {:.4} (need >= 0.99), mean kappa {:.4} (need >= 0.98)",
            report.mean_accuracy, report.mean_kappa
        ),
    );
}

#[test]
fn c6_null_data_sanity() {
    let d = make_blobs::<f64>(40, 3, 50, 5, 0.0, 1.0, 43).unwrap();
    let report = repeated_holdout(&d, &default_protocol(20, 11)).unwrap();
    let chance = 1.0 / 3.0;
    check(
        "C6 null-data-sanity",
        (report.mean_accuracy - chance).abs() <= 0.15 && report.mean_kappa.abs() <= 0.1,
        &format!(
            "mean acc {:.4} (chance {:.4} +/- 0.15), mean kappa {:.4} (0 +/- 0.1)",
            report.mean_accuracy, chance, report.mean_kappa
        ),
    );
}

/// Optional-online: reproduces the published Colon numbers at desk scale.
/// Skips with a message when OpenML is unreachable and no cache exists.
#[test]
#[ignore = "requires network access to OpenML (or a populated CDF_CACHE_DIR)"]
fn c7_colon_reproduction() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("colon.csv");
    let summary = match cdf_cli::openml::fetch_openml(45087, &csv_path) {
        Ok(s) => s,
        Err(cdf_core::CdfError::Network(e)) => {
            println!("ACCEPTANCE C7 colon-reproduction: SKIP (network unavailable: {e})");
            return;
        }
        Err(e) => panic!("c7: fetch failed: {e}"),
    };
    assert_eq!(
        (summary.n, summary.p, summary.k),
        (62, 2000, 2),
        "c7: Colon shape mismatch"
    );

    let data = load_csv::<f64>(
        &csv_path,
        &LabelColumn::Name(summary.label_column.clone()),
        MissingPolicy::Reject,
    )
    .unwrap();
    let report = repeated_holdout(&data, &default_protocol(50, 1)).unwrap();
    check(
        "C7 colon-reproduction",
        (report.mean_accuracy - 0.838).abs() <= 0.06
            && (report.mean_kappa - 0.641).abs() <= 0.10,
        &format!(
            "mean acc {:.4} (0.838 +/- 0.06), mean kappa {:.4} (0.641 +/- 0.10), {} reps",
            report.mean_accuracy,
            report.mean_kappa,
            report.per_rep.len()
        ),
    );
}

#[test]
fn c8_ensemble_improvement_trend() {
    let d = make_blobs::<f64>(60, 2, 100, 10, 2.0, 1.0, 44).unwrap();
    let protocol = default_protocol(20, 13);
    let results = sweep(
        &d,
        &protocol,
        SweepParam::NTrees,
        &[1.0, 5.0, 25.0, 100.0],
    )
    .unwrap();
    let acc: Vec<f64> = results.iter().map(|(_, r)| r.mean_accuracy).collect();
    let improved = acc[3] >= acc[0] + 0.02;
    let plateaued = (acc[3] - acc[2]).abs() <= 0.03;
    check(
        "C8 ensemble-improvement",
        improved && plateaued,
        &format!(
            "acc by trees 1/5/25/100 = {:.4}/{:.4}/{:.4}/{:.4} (need +0.02 at 100 vs 1, |100-25| <= 0.03)",
            acc[0], acc[1], acc[2], acc[3]
        ),
    );
}

#[test]
fn c9_determinism_suite() {
    let d = make_blobs::<f64>(25, 3, 40, 8, 3.0, 1.0, 45).unwrap();
    let config = ForestConfig {
        n_trees: 40,
        seed: 77,
        ..ForestConfig::default()
    };

    // serial vs maximal-parallel training, byte-identical model files
    let serial_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let parallel_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let serial = serial_pool.install(|| train_forest(&d, &config).unwrap());
    let parallel = parallel_pool.install(|| train_forest(&d, &config).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("serial.json");
    let path_b = dir.path().join("parallel.json");
    save_model(&serial, None, &path_a).unwrap();
    save_model(&parallel, None, &path_b).unwrap();
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    let models_identical = bytes_a == bytes_b;

    // identical evaluation reports
    let protocol = default_protocol(5, 21);
    let small = make_blobs::<f64>(15, 2, 20, 5, 3.0, 1.0, 46).unwrap();
    let report_a = serde_json::to_string(&repeated_holdout(&small, &protocol).unwrap()).unwrap();
    let report_b =
        parallel_pool.install(|| serde_json::to_string(&repeated_holdout(&small, &protocol).unwrap()).unwrap());
    let reports_identical = report_a == report_b;

    // identical predictions
    let preds_a = serial.predict_batch(&d).unwrap();
    let preds_b = parallel_pool.install(|| parallel.predict_batch(&d).unwrap());
    let preds_identical = preds_a == preds_b;

    check(
        "C9 determinism",
        models_identical && reports_identical && preds_identical,
        &format!(
            "model files identical: {models_identical}, reports identical: {reports_identical}, predictions identical: {preds_identical}"
        ),
    );
}

#[test]
fn c10_model_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = stream_rng(404, 0);
    let mut all_equal = true;
    for i in 0..10u64 {
        let k = 2 + (i as usize % 3);
        let p = 10 + (i as usize * 7) % 40;
        let d = make_blobs::<f64>(12, k, p, p.min(5), 3.0, 1.0, 100 + i).unwrap();
        let forest = train_forest(
            &d,
            &ForestConfig {
                n_trees: 8,
                seed: i,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let path = dir.path().join(format!("model_{i}.json"));
        save_model(&forest, None, &path).unwrap();
        let (loaded, std) = load_model::<f64>(&path).unwrap();
        assert!(std.is_none());
        assert_eq!(
            SavedModel::from_forest(&forest, None).to_json().unwrap(),
            SavedModel::from_forest(&loaded, None).to_json().unwrap()
        );

        for _ in 0..100 {
            let probe: Vec<f64> = (0..p).map(|_| rng.gen_range(-8.0..12.0)).collect();
            if forest.predict(&probe).unwrap() != loaded.predict(&probe).unwrap() {
                all_equal = false;
            }
        }
    }
    check(
        "C10 model-round-trip",
        all_equal,
        "10 forests x 100 probes predicted identically after save/load",
    );
}
