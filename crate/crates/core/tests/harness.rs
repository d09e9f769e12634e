use triprod::harness::{
    resolve, run, ConfigPatch, Experiment, ExperimentConfig, Family, LambdaGrid, Op, Report, RowKind,
};

fn small_invariance() -> ExperimentConfig {
    let patch = ConfigPatch {
        k_list: Some(vec![2]),
        lambdas: Some(vec![2.0]),
        samples: Some(2),
        tol: Some(1e-8),
        seed: Some(42),
        ..Default::default()
    };
    resolve(Experiment::Invariance, None, &patch).unwrap()
}

fn assert_recomputable(report: &Report) {
    for r in &report.rows {
        assert_eq!(r.pass, r.verdict(), "{}: {:?}", r.label, r.values);
        if let Some(c) = &r.check {
            assert!(r.values.contains_key(&c.metric), "{} lacks {}", r.label, c.metric);
        }
    }
    assert_eq!(report.pass, report.rows.iter().all(|r| r.pass));
}

#[test]
fn precedence_flags_over_file_over_defaults() {
    let file: ConfigPatch = serde_json::from_str(r#"{"T": [3, 4], "k": [4], "tol": 1e-9, "seed": 9}"#).unwrap();
    let flags = ConfigPatch {
        t_list: Some(vec![7.0]),
        ..Default::default()
    };
    let c = resolve(Experiment::Norms, Some(&file), &flags).unwrap();
    assert_eq!(c.t_list, vec![7.0]);
    assert_eq!(c.k_list, vec![4]);
    assert_eq!(c.tol, 1e-9);
    assert_eq!(c.seed, 9);
    assert_eq!(c.z_points, ExperimentConfig::defaults(Experiment::Norms).z_points);
}

#[test]
fn config_file_rejects_unknown_keys() {
    assert!(serde_json::from_str::<ConfigPatch>(r#"{"temperature": 3}"#).is_err());
    let p: ConfigPatch = serde_json::from_str(r#"{"family": "maass", "lambda-count": 4, "M": [5]}"#).unwrap();
    assert_eq!(p.family, Some(Family::Maass));
    assert_eq!(p.lambda_count, Some(4));
    assert_eq!(p.m_list, Some(vec![5.0]));
}

#[test]
fn invalid_configs_are_refused() {
    let bad = [
        ConfigPatch { k_list: Some(vec![3]), ..Default::default() },
        ConfigPatch { t_list: Some(vec![0.5]), ..Default::default() },
        ConfigPatch { z_min: Some(1.0), z_max: Some(2.0), ..Default::default() },
        ConfigPatch { m_list: Some(vec![1.0]), ..Default::default() },
        ConfigPatch { tol: Some(0.0), ..Default::default() },
        ConfigPatch { eps: Some(2), ..Default::default() },
    ];
    for p in &bad {
        assert!(resolve(Experiment::Lowerbound, None, p).is_err(), "{p:?}");
    }
}

#[test]
fn maass_family_grid_starts_at_zero() {
    let p = ConfigPatch {
        family: Some(Family::Maass),
        ..Default::default()
    };
    let c = resolve(Experiment::Lowerbound, None, &p).unwrap();
    let pts = c.lambda_grid.points(100.0);
    assert_eq!(pts.len(), 16);
    assert!((pts[0] - 6.25).abs() < 1e-12 && (pts[15] - 100.0).abs() < 1e-12);
    let g = LambdaGrid { count: 16, lo: 0.5, hi: 1.0 };
    let pts = g.points(50.0);
    assert!((pts[0] - 25.0).abs() < 1e-12 && (pts[15] - 50.0).abs() < 1e-12);
}

#[test]
fn experiment_names_round_trip() {
    for e in Experiment::ALL {
        assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
    }
    assert!("bogus".parse::<Experiment>().is_err());
}

#[test]
fn moments_report_passes_and_is_recomputable() {
    let c = resolve(Experiment::Moments, None, &ConfigPatch::default()).unwrap();
    let r = run(&c).unwrap();
    assert!(r.pass);
    assert_recomputable(&r);
    let control = r.rows.iter().find(|x| x.kind == RowKind::Control).unwrap();
    assert_eq!(control.check.as_ref().unwrap().op, Op::Gt);
}

#[test]
fn reports_are_reproducible() {
    let c = small_invariance();
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.table(), b.table());
    assert_recomputable(&a);
    let other = run(&ExperimentConfig { seed: 43, ..c }).unwrap();
    assert_ne!(a.rows[1].params["g_a"], other.rows[1].params["g_a"]);
}

#[test]
fn table_has_uniform_width() {
    let c = resolve(Experiment::Norms, None, &ConfigPatch::default()).unwrap();
    let r = run(&c).unwrap();
    assert_recomputable(&r);
    let (header, rows) = r.table();
    assert!(header.iter().any(|h| h == "param:T"));
    assert!(rows.iter().all(|row| row.len() == header.len()));
    assert_eq!(rows.len(), r.rows.len());
}

#[test]
fn tampered_values_flip_the_verdict() {
    let c = resolve(Experiment::Moments, None, &ConfigPatch::default()).unwrap();
    let mut r = run(&c).unwrap();
    let row = r.rows.iter_mut().find(|x| x.kind == RowKind::Point).unwrap();
    let metric = row.check.as_ref().unwrap().metric.clone();
    row.values.insert(metric, 1.0);
    assert!(!row.verdict());
}
