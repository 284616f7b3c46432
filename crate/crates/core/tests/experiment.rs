use sigmanet::config::RunConfig;
use sigmanet::tasks::{run_experiment, Metric};

fn small(task: &str) -> RunConfig {
    RunConfig {
        task: task.into(),
        dsbm_n: 150,
        folds: Some(2),
        max_epochs: 200,
        patience: 50,
        ..RunConfig::default()
    }
}

#[test]
fn identical_configs_give_identical_reports() {
    let cfg = small("link-exist");
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(a.report.to_csv(), b.report.to_csv());
    let parallel = run_experiment(&RunConfig {
        parallel_folds: 2,
        ..cfg
    })
    .unwrap();
    assert_eq!(parallel.report, a.report);
}

#[test]
fn early_stopping_respects_patience() {
    let cfg = small("node");
    for fold in run_experiment(&cfg).unwrap().folds {
        assert!(fold.curve.len() <= cfg.max_epochs);
        assert!(
            fold.curve.len() == cfg.max_epochs
                || fold.curve.len() - 1 - fold.best_epoch == cfg.patience
        );
        let best = fold.curve[fold.best_epoch].val_loss;
        assert!(fold.curve.iter().all(|e| e.val_loss >= best));
    }
}

#[test]
fn shuffled_labels_score_near_chance() {
    let cfg = RunConfig {
        shuffle_labels: true,
        folds: Some(3),
        ..RunConfig::default()
    };
    let acc = run_experiment(&cfg)
        .unwrap()
        .report
        .mean(Metric::Accuracy)
        .unwrap();
    assert!((acc - 0.2).abs() <= 0.1, "accuracy {acc}");
}

#[test]
fn sign_task_reports_all_metrics() {
    let cfg = RunConfig {
        sign_flip_frac: 0.15,
        ..small("link-sign")
    };
    let report = run_experiment(&cfg).unwrap().report;
    for m in [
        Metric::MicroF1,
        Metric::BinaryF1,
        Metric::MacroF1,
        Metric::Auc,
    ] {
        let v = report.mean(m).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn unknown_task_or_operator_is_rejected() {
    assert!(run_experiment(&small("graph-class")).is_err());
    let cfg = RunConfig {
        operator: "laplace".into(),
        ..small("node")
    };
    assert!(run_experiment(&cfg).is_err());
}
