use xges::simulate::{sample_data, sample_ground_truth, SimConfig, TruthJson};

#[test]
fn mean_edge_count_is_rho_times_d() {
    let total: usize = (0..10_000)
        .map(|seed| sample_ground_truth(&SimConfig::new(5, 2.0, seed)).unwrap().dag.num_edges())
        .sum();
    let mean = total as f64 / 10_000.0;
    assert!((mean - 10.0).abs() <= 0.3, "mean edge count {mean}");
}

#[test]
fn sample_covariance_converges_to_implied() {
    for (d, seed) in [(3, 1), (6, 2), (10, 3)] {
        let gt = sample_ground_truth(&SimConfig::new(d, 2.0, seed)).unwrap();
        let data = sample_data(&gt, 100_000, seed).unwrap();
        let emp = data.covariance();
        let imp = gt.implied_covariance();
        let diff: f64 = emp.iter().zip(&imp).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = imp.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(diff / norm <= 0.05, "d={d}: relative Frobenius error {}", diff / norm);
    }
}

#[test]
fn truth_json_round_trip() {
    let mut cfg = SimConfig::new(9, 2.5, 17);
    cfg.allow_negative = true;
    let gt = sample_ground_truth(&cfg).unwrap();
    let text = serde_json::to_string(&gt.to_json()).unwrap();
    let back: TruthJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.dag().unwrap(), gt.dag);
    assert_eq!(back.noise, gt.noise);
    assert_eq!(back.weights.len(), gt.dag.num_edges());
    assert_eq!(xges::Pdag::try_from(back.cpdag).unwrap(), gt.cpdag);
}

#[test]
fn different_seeds_differ() {
    let a = sample_ground_truth(&SimConfig::new(10, 2.0, 1)).unwrap();
    let b = sample_ground_truth(&SimConfig::new(10, 2.0, 2)).unwrap();
    let da = sample_data(&a, 10, 1).unwrap();
    let db = sample_data(&b, 10, 2).unwrap();
    assert_ne!(da, db);
}

#[test]
fn data_csv_round_trip_is_lossless() {
    let gt = sample_ground_truth(&SimConfig::new(4, 1.0, 3)).unwrap();
    let data = sample_data(&gt, 25, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    data.write_csv(&path).unwrap();
    assert_eq!(xges::DataSet::read_csv(&path).unwrap(), data);
}
