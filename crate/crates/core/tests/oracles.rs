// Every index checked against a second, deliberately different computation.
// Multi-class OVA indices are rebuilt from the collapsed 2x2 matrix of each
// class, OVO from the pairwise two-class AUROCs.

use imbalance_core::index::evaluate_all;
use imbalance_core::{ConfusionMatrix, IndexId, IndexValue, VALUE_TOLERANCE};
use proptest::prelude::*;

fn matrix_strategy(max_classes: usize) -> impl Strategy<Value = ConfusionMatrix> {
    (2..=max_classes)
        .prop_flat_map(|c| prop::collection::vec(prop::collection::vec(0u64..25, c), c))
        .prop_map(|mut rows| {
            for (i, row) in rows.iter_mut().enumerate() {
                if row.iter().all(|&v| v == 0) {
                    row[i] = 1;
                }
            }
            ConfusionMatrix::new(rows).unwrap()
        })
}

fn rate(m: &ConfusionMatrix, i: usize, j: usize) -> f64 {
    m.get(i, j) as f64 / m.row_sum(i) as f64
}

/// Two-class matrix with class `i` as the positive and everything else merged.
fn one_vs_all(m: &ConfusionMatrix, i: usize) -> ConfusionMatrix {
    let tp = m.get(i, i);
    let fn_ = m.row_sum(i) - tp;
    let fp = m.col_sum(i) - tp;
    let tn = m.total() - tp - fn_ - fp;
    ConfusionMatrix::new(vec![vec![tp, fn_], vec![fp, tn]]).unwrap()
}

fn value(id: IndexId, m: &ConfusionMatrix) -> Option<f64> {
    id.evaluate(m).unwrap().value()
}

fn oracle(id: IndexId, m: &ConfusionMatrix) -> Option<f64> {
    let c = m.class_count();
    let cf = c as f64;
    if id.is_binary() {
        let (tp, fn_, fp, tn) = (m.get(0, 0) as f64, m.get(0, 1) as f64, m.get(1, 0) as f64, m.get(1, 1) as f64);
        let recall = tp / (tp + fn_);
        let spec = tn / (fp + tn);
        let precision = (tp + fp > 0.0).then(|| tp / (tp + fp));
        let fpr = fp / (fp + tn);
        let m_precision = (recall + fpr > 0.0).then(|| recall / (recall + fpr));
        return match id {
            IndexId::GMean2 => Some((recall * spec).sqrt()),
            IndexId::Auroc => Some((recall + spec) / 2.0),
            IndexId::Precision => precision,
            IndexId::Recall => Some(recall),
            IndexId::Specificity => Some(spec),
            IndexId::Aurpc => precision.map(|p| (p + recall) / 2.0),
            IndexId::MPrecision => m_precision,
            IndexId::MAurpc => m_precision.map(|p| (p + recall) / 2.0),
            _ => unreachable!(),
        };
    }
    let acc: Vec<f64> = (0..c).map(|i| rate(m, i, i)).collect();
    match id {
        IndexId::GMeanC => Some((acc.iter().map(|a| a.ln()).sum::<f64>() / cf).exp()),
        IndexId::Acsa => Some(acc.iter().sum::<f64>() / cf),
        IndexId::AurocOvo => {
            let mut total = 0.0;
            for (i, a) in acc.iter().enumerate() {
                for j in (0..c).filter(|&j| j != i) {
                    total += (a + 1.0 - rate(m, j, i)) / 2.0;
                }
            }
            Some(total / (cf * (cf - 1.0)))
        }
        IndexId::AurocOva | IndexId::NAurocOva => {
            let rho = (0..c)
                .map(|i| value(IndexId::Auroc, &one_vs_all(m, i)).unwrap())
                .sum::<f64>()
                / cf;
            if id == IndexId::AurocOva {
                Some(rho)
            } else {
                let lambda = (cf - 2.0) / (2.0 * cf);
                Some((rho - lambda) / (1.0 - lambda))
            }
        }
        IndexId::AurpcOva => {
            let parts: Option<Vec<f64>> = (0..c).map(|i| value(IndexId::Aurpc, &one_vs_all(m, i))).collect();
            parts.map(|p| p.iter().sum::<f64>() / cf)
        }
        IndexId::MAurpcOva => {
            let mut total = 0.0;
            for (i, a) in acc.iter().enumerate() {
                let column: f64 = (0..c).map(|j| rate(m, j, i)).sum();
                if column == 0.0 {
                    return None;
                }
                total += (a / column + a) / 2.0;
            }
            Some(total / cf)
        }
        _ => unreachable!(),
    }
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-10 || (x.is_infinite() && x == y),
        (None, None) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn every_index_matches_its_oracle(m in matrix_strategy(6)) {
        for e in evaluate_all(&m) {
            let expected = oracle(e.index, &m);
            prop_assert!(close(e.value.value(), expected), "{} on {:?}: {:?} vs {:?}", e.index, m.rows(), e.value, expected);
        }
    }

    #[test]
    fn ovo_identity_with_acsa(m in matrix_strategy(10)) {
        let c = m.class_count() as f64;
        let alpha = value(IndexId::Acsa, &m).unwrap();
        let rho = value(IndexId::AurocOvo, &m).unwrap();
        prop_assert!((rho - (c * alpha + c - 2.0) / (2.0 * (c - 1.0))).abs() <= VALUE_TOLERANCE);
    }

    #[test]
    fn exact_and_float_agree(m in matrix_strategy(5)) {
        use num::ToPrimitive;
        for id in IndexId::ALL.into_iter().filter(|id| id.applies_to(m.class_count())) {
            let float = id.evaluate(&m).unwrap();
            let exact = id.evaluate_exact(&m).unwrap();
            match (float, exact) {
                (IndexValue::Defined(v), Ok(q)) => {
                    let q = q.to_f64().unwrap();
                    // GMean's exact key is the product of accuracies.
                    let q = if id.is_gmean() { q.powf(1.0 / m.class_count() as f64) } else { q };
                    prop_assert!((v - q).abs() <= 1e-12, "{id}: {v} vs {q}");
                }
                (IndexValue::Undefined(a), Err(b)) => prop_assert_eq!(a, b),
                other => prop_assert!(false, "{id}: {other:?}"),
            }
        }
    }
}

#[test]
fn two_class_reductions() {
    let m = ConfusionMatrix::new(vec![vec![8, 2], vec![10, 90]]).unwrap();
    let v = |id| value(id, &m).unwrap();
    assert!((v(IndexId::GMeanC) - v(IndexId::GMean2)).abs() <= VALUE_TOLERANCE);
    assert!((v(IndexId::Acsa) - v(IndexId::Auroc)).abs() <= VALUE_TOLERANCE);
    assert!((v(IndexId::AurocOvo) - v(IndexId::Auroc)).abs() <= VALUE_TOLERANCE);
    assert!((v(IndexId::AurocOva) - v(IndexId::Auroc)).abs() <= VALUE_TOLERANCE);
    assert!((v(IndexId::NAurocOva) - v(IndexId::AurocOva)).abs() <= VALUE_TOLERANCE);
}

#[test]
fn worked_two_class_values() {
    let m = ConfusionMatrix::new(vec![vec![8, 2], vec![10, 90]]).unwrap();
    let expected = [
        (IndexId::GMean2, 0.72f64.sqrt()),
        (IndexId::Auroc, 0.85),
        (IndexId::Precision, 8.0 / 18.0),
        (IndexId::Recall, 0.8),
        (IndexId::Specificity, 0.9),
        (IndexId::Aurpc, (0.8 + 8.0 / 18.0) / 2.0),
        (IndexId::MPrecision, 0.8 / 0.9),
        (IndexId::MAurpc, (0.8 + 0.8 / 0.9) / 2.0),
    ];
    for (id, want) in expected {
        assert!((value(id, &m).unwrap() - want).abs() <= VALUE_TOLERANCE, "{id}");
    }
}

#[test]
fn worked_three_class_values() {
    let m = ConfusionMatrix::new(vec![vec![8, 1, 1], vec![1, 8, 1], vec![2, 2, 6]]).unwrap();
    for id in [IndexId::Acsa, IndexId::AurocOvo, IndexId::AurocOva, IndexId::AurpcOva, IndexId::MAurpcOva, IndexId::GMeanC] {
        assert!(close(value(id, &m), oracle(id, &m)), "{id}");
    }
    assert!((value(IndexId::GMeanC, &m).unwrap() - 0.384f64.cbrt()).abs() <= VALUE_TOLERANCE);
    assert!((value(IndexId::Acsa, &m).unwrap() - 22.0 / 30.0).abs() <= VALUE_TOLERANCE);
    // Equal row sums: rate-based and count-based precision coincide.
    let diff = value(IndexId::AurpcOva, &m).unwrap() - value(IndexId::MAurpcOva, &m).unwrap();
    assert!(diff.abs() <= VALUE_TOLERANCE);
}

#[test]
fn undefined_cases_are_reported() {
    let never = ConfusionMatrix::new(vec![vec![0, 5], vec![0, 7]]).unwrap();
    assert!(!IndexId::Precision.evaluate(&never).unwrap().is_defined());
    assert!(!IndexId::MPrecision.evaluate(&never).unwrap().is_defined());
    assert_eq!(value(IndexId::Recall, &never), Some(0.0));

    let column = ConfusionMatrix::new(vec![vec![3, 0, 1], vec![0, 0, 2], vec![1, 0, 4]]).unwrap();
    assert!(!IndexId::AurpcOva.evaluate(&column).unwrap().is_defined());
    assert!(!IndexId::MAurpcOva.evaluate(&column).unwrap().is_defined());
    assert!(IndexId::AurocOva.evaluate(&column).unwrap().is_defined());
}
