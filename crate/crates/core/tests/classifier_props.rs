mod common;

use emd_ser::classifiers::svm::smo_solve;
use emd_ser::classifiers::{
    mlp_loss_and_grad, svm_train_binary, train_model, ClassifierConfig, Dataset, ForestConfig, Kernel, MlpConfig,
    MlpModel, ModelKind,
};
use emd_ser::harness::{ConfusionMatrix, Emotion};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(seed: u64, per_class: usize, dim: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for e in Emotion::ALL {
        let centre: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
        for _ in 0..per_class {
            rows.push(centre.iter().map(|c| c + rng.random_range(-1.0..1.0)).collect());
            labels.push(e);
        }
    }
    Dataset::new(rows, labels)
}

fn small_config() -> ClassifierConfig {
    ClassifierConfig {
        mlp: MlpConfig { hidden: 16, max_epochs: 60, ..MlpConfig::default() },
        forest: ForestConfig { n_trees: 15, ..ForestConfig::default() },
        ..ClassifierConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn smo_objective_matches_reference(seed in any::<u64>(), sigma in 0.5f64..3.0, c in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let y: Vec<f64> = x.iter().map(|p| if p[0] * p[0] + p[1] > 1.0 { 1.0 } else { -1.0 }).collect();
        prop_assume!(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0));
        let kernel = Kernel::Rbf { sigma };
        let sol = smo_solve(&x, &y, kernel, c, 1e-4);
        let oracle = common::svm_dual_oracle(&x, &y, |a, b| kernel.eval(a, b), c, 20_000);
        // smo reports the minimised form, the negated dual
        let dual = -sol.objective;
        prop_assert!((dual - oracle.objective).abs() <= 0.01 * oracle.objective.abs().max(1e-9),
            "smo {} vs oracle {}", dual, oracle.objective);
        for a in &sol.alpha {
            prop_assert!(*a >= -1e-12 && *a <= c + 1e-12);
        }
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, yi)| a * yi).sum();
        prop_assert!(balance.abs() < 1e-8);
    }

    #[test]
    fn rbf_predictions_invariant_to_joint_scaling(seed in any::<u64>(), s in 0.1f64..10.0) {
        let (x, y) = common::separable_2d(seed, 30);
        let scaled: Vec<Vec<f64>> = x.iter().map(|p| p.iter().map(|v| v * s).collect()).collect();
        let a = svm_train_binary(&x, &y, Kernel::Rbf { sigma: 1.0 }, 1.0, 1e-4).unwrap();
        let b = svm_train_binary(&scaled, &y, Kernel::Rbf { sigma: s }, 1.0, 1e-4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..50 {
            let q = vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let qs: Vec<f64> = q.iter().map(|v| v * s).collect();
            let (da, db) = (a.decision(&q), b.decision(&qs));
            // identical kernel matrices up to rounding; only near-boundary points may flip
            prop_assert!(da.abs() < 1e-3 || da.signum() == db.signum(), "{} vs {}", da, db);
        }
    }

    #[test]
    fn cross_entropy_is_non_negative(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = MlpModel::init(5, 8, &mut rng);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..5).map(|_| rng.random_range(-50.0..50.0)).collect()).collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let targets: Vec<Emotion> = (0..n).map(|_| Emotion::ALL[rng.random_range(0..7)]).collect();
        let (loss, grads) = mlp_loss_and_grad(&model, &refs, &targets);
        prop_assert!(loss >= 0.0 && loss.is_finite());
        prop_assert!(grads.to_flat().iter().all(|g| g.is_finite()));
    }

    #[test]
    fn confusion_totals_and_accuracy(pairs in proptest::collection::vec((0usize..7, 0usize..7), 0..200)) {
        let m = ConfusionMatrix::from_pairs(pairs.iter().map(|&(a, b)| (Emotion::ALL[a], Emotion::ALL[b])));
        prop_assert_eq!(m.total(), pairs.len() as u64);
        prop_assert_eq!(m.trace(), pairs.iter().filter(|(a, b)| a == b).count() as u64);
        let acc = m.accuracy();
        prop_assert!((0.0..=1.0).contains(&acc));
        prop_assert_eq!(m.row_sums().iter().sum::<u64>(), m.total());
    }
}

#[test]
fn every_learner_is_deterministic_and_total() {
    let data = blobs(3, 12, 6);
    let cfg = small_config();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let queries: Vec<Vec<f64>> = (0..40)
        .map(|i| match i {
            0 => vec![1e12; 6],
            1 => vec![-1e12; 6],
            2 => vec![0.0; 6],
            _ => (0..6).map(|_| rng.random_range(-20.0..20.0)).collect(),
        })
        .collect();
    for kind in [ModelKind::Svm, ModelKind::Mlp, ModelKind::Knn, ModelKind::Forest] {
        let a = train_model(kind, &data, &cfg, 42).unwrap();
        let b = train_model(kind, &data, &cfg, 42).unwrap();
        assert_eq!(a, b, "{}", kind.name());
        let pa = a.predict_batch(&queries).unwrap();
        let pb = b.predict_batch(&queries).unwrap();
        assert_eq!(pa, pb);
        assert!(pa.iter().all(|e| Emotion::ALL.contains(e)));
        let train_acc = a
            .predict_batch(&data.rows)
            .unwrap()
            .iter()
            .zip(&data.labels)
            .filter(|(p, t)| p == t)
            .count() as f64
            / data.len() as f64;
        assert!(train_acc >= 0.9, "{} train accuracy {train_acc}", kind.name());
    }
}

#[test]
fn wrong_width_is_rejected() {
    let data = blobs(1, 4, 3);
    let m = train_model(ModelKind::Knn, &data, &ClassifierConfig::default(), 0).unwrap();
    assert!(m.predict(&[0.0; 4]).is_err());
}
