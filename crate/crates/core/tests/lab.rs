use std::path::PathBuf;

use imbalance_core::audit::condition1::trial_rng;
use imbalance_core::lab::{
    generate_gaussian_dataset, resample_matrix_to_rrt, resample_points_to_rrt, run_experiment,
    synthetic_multiclass_confusion, threshold_classifier_confusion, type1_specs, write_long_csv, write_summary_csv,
    ExperimentSpec, Side, Statistic, ThresholdRule,
};
use imbalance_core::{ConfusionMatrix, Error, IndexId};
use num::BigRational;

fn bundled(name: &str) -> ExperimentSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name);
    ExperimentSpec::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn csv_bytes(spec: &ExperimentSpec) -> (Vec<u8>, Vec<u8>) {
    let result = run_experiment(spec).unwrap();
    let (mut long, mut summary) = (Vec::new(), Vec::new());
    write_long_csv(&mut long, &result).unwrap();
    write_summary_csv(&mut summary, &result).unwrap();
    (long, summary)
}

#[test]
fn bundled_specs_parse() {
    for name in [
        "type1_sweep.json",
        "type2_growth.json",
        "rrt_stability.json",
        "rrt_stability_points.json",
        "class_count_growth.json",
    ] {
        bundled(name).validate().unwrap();
    }
}

#[test]
fn point_resampling_preserves_row_profiles() {
    // Subsampling a test set leaves each class's expected rates unchanged.
    let data = generate_gaussian_dataset(&type1_specs(), 5).unwrap();
    let rule = ThresholdRule {
        threshold: 5.0,
        positive_class: 1,
        positive_side: Side::Above,
    };
    let full = threshold_classifier_confusion(&data, &rule).unwrap();
    let recall = full.class_accuracy(0);
    let spec = full.class_accuracy(1);
    let trials = 40;
    let (mut recall_mean, mut spec_mean) = (0.0, 0.0);
    for t in 0..trials {
        let sub = resample_points_to_rrt(&mut trial_rng(5, t + 1), &data, 0, 1, 10.0).unwrap();
        let m = threshold_classifier_confusion(&sub, &rule).unwrap();
        assert_eq!(m.row_sums(), &[500, 5000]);
        recall_mean += m.class_accuracy(0) / trials as f64;
        spec_mean += m.class_accuracy(1) / trials as f64;
    }
    // Four standard errors of a mean over `trials` hypergeometric draws.
    let se = |p: f64, n: f64| 4.0 * (p * (1.0 - p) / n / trials as f64).sqrt() + 1e-9;
    assert!((recall_mean - recall).abs() <= se(recall, 500.0), "{recall_mean} vs {recall}");
    assert!((spec_mean - spec).abs() <= 1e-12, "the majority is never subsampled");
}

#[test]
fn matrix_resampling_commutes_with_invariant_indices() {
    let m = ConfusionMatrix::new(vec![vec![16, 4], vec![20, 180]]).unwrap();
    for rrt in [0.5, 1.0, 5.0, 10.0, 20.0] {
        let r = resample_matrix_to_rrt(&m, rrt).unwrap();
        for id in [IndexId::GMean2, IndexId::Auroc, IndexId::MPrecision, IndexId::MAurpc] {
            assert_eq!(id.evaluate(&r).unwrap(), id.evaluate(&m).unwrap(), "{id} at {rrt}");
        }
    }
    let r = resample_matrix_to_rrt(&m, 0.5).unwrap();
    assert_ne!(IndexId::Precision.evaluate(&r).unwrap(), IndexId::Precision.evaluate(&m).unwrap());
    assert!(matches!(resample_matrix_to_rrt(&m, 0.33), Err(Error::IntegralityImpossible { .. })));
}

#[test]
fn experiments_are_deterministic() {
    let mut spec = bundled("rrt_stability_points.json");
    spec.trials = 3;
    let first = csv_bytes(&spec);
    assert_eq!(first, csv_bytes(&spec));
    spec.seed += 1;
    assert_ne!(first.0, csv_bytes(&spec).0);
}

#[test]
fn stability_separates_invariant_indices() {
    let result = run_experiment(&bundled("rrt_stability.json")).unwrap();
    let std_dev = |setting: &str, id| result.summary_value(setting, id, Statistic::StdDev, None);
    for id in [IndexId::GMean2, IndexId::Auroc, IndexId::MPrecision, IndexId::MAurpc] {
        assert_eq!(std_dev("two_class_ir10", id), Some(0.0), "{id}");
    }
    for id in [IndexId::GMeanC, IndexId::Acsa, IndexId::AurocOvo, IndexId::MAurpcOva] {
        assert_eq!(std_dev("three_class", id), Some(0.0), "{id}");
    }
    assert!(std_dev("two_class_ir10", IndexId::Precision).unwrap() > 0.0);
    assert!(std_dev("three_class", IndexId::AurpcOva).unwrap() > 0.0);
}

#[test]
fn type2_accuracy_is_exact() {
    let three_fifths = BigRational::new(3.into(), 5.into());
    for profile in [vec![5000, 1500, 4000], vec![5000, 1500, 4000, 500, 3500, 4500]] {
        let m = synthetic_multiclass_confusion(0.6, &profile).unwrap();
        assert_eq!(IndexId::Acsa.evaluate_exact(&m).unwrap().unwrap(), three_fifths);
        let c = profile.len() as i64;
        // Even off-diagonal spread: ρ_a = ρ_o = ½(1 + a − (1 − a)/(C − 1)).
        let rho = BigRational::new((8 * c - 10).into(), (10 * (c - 1)).into());
        assert_eq!(IndexId::AurocOvo.evaluate_exact(&m).unwrap().unwrap(), rho);
        assert_eq!(IndexId::AurocOva.evaluate_exact(&m).unwrap().unwrap(), rho);
    }
}

#[test]
fn malformed_specs_name_the_field() {
    let cases = [
        (r#"{"name":"x","kind":"type1_sweep","thresholds":[],"rrt":[1]}"#, "thresholds"),
        (r#"{"name":"x","kind":"type1_sweep","thresholds":[4],"rrt":[-1]}"#, "rrt"),
        (r#"{"name":"x","kind":"type2_growth","profiles":[[3,0]],"accuracies":[0.5]}"#, "profiles"),
        (r#"{"name":"","kind":"type2_growth","profiles":[[4,4]],"accuracies":[0.5]}"#, "name"),
    ];
    for (text, field) in cases {
        match ExperimentSpec::from_json(text) {
            Err(Error::InvalidSpec { path, .. }) => assert!(path.contains(field), "{path} for {text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    assert!(matches!(ExperimentSpec::from_json("{"), Err(Error::InvalidSpec { .. })));
}
