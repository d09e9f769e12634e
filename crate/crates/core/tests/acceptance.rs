//! One PASS/FAIL line per acceptance criterion, written straight to stderr so
//! it shows up without `--nocapture`.
//!
//! Criteria that are known to be unattainable as stated are listed in
//! `EXPECTED_FAIL`; they are evaluated and reported like the others but do
//! not fail the test run.

use std::io::Write;
use std::time::{Duration, Instant};

use triprod::harness::{choose_m, resolve, run, ConfigPatch, Experiment, Family, Report, RowKind, M_SCAN};
use triprod::quadrature::{integrate_1d, integrate_endpoint_singular, reg_power_integral, QuadOptions, RegOptions};
use triprod::vector::Atom;
use triprod::{Complex64, Error, GroupElement, ModelVector, RepnParam};

/// The literal decay quantity `|v|²|λ|^{2k-2}e^{π|λ|/2}` grows like
/// `|λ|^{4k-4}`; only `|λ|^{2-2k}` makes it bounded.
const EXPECTED_FAIL: &[u32] = &[7];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn say(line: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{line}");
}

fn criterion(id: u32, budget_s: u64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t0 = Instant::now();
    let (pass, detail) = f();
    let elapsed = t0.elapsed();
    let budget = Duration::from_secs(budget_s);
    let o = Outcome {
        id,
        pass: pass && elapsed <= budget,
        detail,
        elapsed,
        budget,
    };
    say(&format!(
        "criterion {}: {} | {} | {:.1}s of {}s",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        o.elapsed.as_secs_f64(),
        o.budget.as_secs()
    ));
    o
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(e: Experiment, patch: ConfigPatch) -> Report {
    run(&resolve(e, None, &patch).unwrap()).unwrap()
}

fn summary_value(r: &Report, label: &str, metric: &str) -> Vec<f64> {
    r.rows
        .iter()
        .filter(|x| x.kind == RowKind::Summary && x.label == label)
        .map(|x| x.values[metric])
        .collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn max_metric(r: &Report, label: &str, metric: &str) -> f64 {
    r.rows
        .iter()
        .filter(|x| x.label == label)
        .filter_map(|x| x.values.get(metric).copied())
        .fold(0.0, f64::max)
}

// Criterion 1 helpers: circle-grid comparison of two vectors.
fn circle_gap(a: &ModelVector, b: &ModelVector) -> f64 {
    let n = 2000;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for i in 0..n {
        let th = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
        let (x, y) = (a.eval_circle(th), b.eval_circle(th));
        diff = diff.max((x - y).norm());
        scale = scale.max(y.norm());
    }
    diff / scale
}

fn criterion_1() -> (bool, String) {
    let gs = triprod::harness::random_group_elements(2024, 40);
    let models = [
        RepnParam::unitary(0.0, 0),
        RepnParam::unitary(5.0, 0),
        RepnParam::discrete_quot(2).unwrap(),
        RepnParam::discrete_sub(2).unwrap(),
        RepnParam::discrete_quot(6).unwrap(),
        RepnParam::discrete_sub(6).unwrap(),
    ];
    let o = QuadOptions::rel(1e-11);
    let (mut hom, mut uni) = (0.0f64, 0.0f64);
    for p in models {
        let v = ModelVector::from_atom(p, Atom::bump(0.2, 0.4, 0)).unwrap();
        let unitary = matches!(p, RepnParam::PrincipalSeries { .. });
        let n0 = if unitary { v.l2_norm(&o).unwrap() } else { 0.0 };
        for pair in gs.chunks(2) {
            let (g1, g2): (&GroupElement, &GroupElement) = (&pair[0], &pair[1]);
            let lhs = v.act(&p, &(*g1 * *g2)).unwrap();
            let rhs = v.act(&p, g2).unwrap().act(&p, g1).unwrap();
            hom = hom.max(circle_gap(&lhs, &rhs));
            if unitary {
                uni = uni.max((lhs.l2_norm(&o).unwrap() / n0 - 1.0).abs());
            }
        }
    }
    (
        hom <= 1e-9 && uni <= 1e-7,
        format!("homomorphism {hom:.2e} (<= 1e-9), norm drift {uni:.2e} (<= 1e-7)"),
    )
}

fn criterion_2() -> (bool, String) {
    let r = report(Experiment::Norms, ConfigPatch::default());
    let ident = max_metric(&r, "integral-w_T", "rel_error").max(max_metric(&r, "integral-alpha_T", "rel_error"));
    let mass = max_metric(&r, "mass-u_T", "deviation");
    let drift = summary_value(&r, "norm-constancy", "max_rel_drift");
    (
        r.pass,
        format!(
            "integral identities {ident:.2e} (<= 1e-8), |mass|-1 {mass:.2e}, norm/T² drift {} (<= 1e-6)",
            fmt_list(&drift)
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let r = report(Experiment::Moments, ConfigPatch::default());
    let worst = max_metric(&r, "moment-residual", "residual");
    let conds: Vec<f64> = r
        .rows
        .iter()
        .filter(|x| x.label == "condition")
        .map(|x| x.values["condition"])
        .collect();
    let controls: Vec<_> = r.rows.iter().filter(|x| x.kind == RowKind::Control).collect();
    let weakest = controls.iter().map(|x| x.values["max_residual"]).fold(f64::INFINITY, f64::min);
    (
        r.pass,
        format!(
            "max residual {worst:.2e} (<= 1e-10), condition numbers [{}], alpha alone: smallest residual {weakest:.2e} ({})",
            fmt_list(&conds),
            if controls.iter().all(|x| x.pass) { "fails as intended" } else { "did not fail" }
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let disc = report(
        Experiment::Invariance,
        ConfigPatch {
            k_list: Some(vec![2, 4]),
            lambdas: Some(vec![2.0, 10.0]),
            ..Default::default()
        },
    );
    let maass = report(
        Experiment::Invariance,
        ConfigPatch {
            family: Some(Family::Maass),
            tau: Some(0.0),
            tau_p: Some(0.0),
            lambdas: Some(vec![5.0]),
            ..Default::default()
        },
    );
    let dev = max_metric(&disc, "random-g", "deviation").max(max_metric(&maass, "random-g", "deviation"));
    let ctl = disc
        .rows
        .iter()
        .chain(&maass.rows)
        .filter(|x| x.kind == RowKind::Control)
        .map(|x| x.values["min_deviation"])
        .fold(f64::INFINITY, f64::min);
    (
        disc.pass && maass.pass,
        format!("max deviation {dev:.2e} (<= 1e-6), smallest control deviation {ctl:.2e} (>= 1e-3)"),
    )
}

fn criterion_5(m: f64) -> (bool, String) {
    let disc = report(
        Experiment::Lowerbound,
        ConfigPatch {
            m_list: Some(vec![m]),
            ..Default::default()
        },
    );
    let maass = report(
        Experiment::Lowerbound,
        ConfigPatch {
            family: Some(Family::Maass),
            ..Default::default()
        },
    );
    (
        disc.pass && maass.pass,
        format!(
            "M = {m}; k = 2 minima [{}] ratio {}; Maass minima [{}] ratio {} (<= 2)",
            fmt_list(&summary_value(&disc, "min-over-lambda", "min_max_abs_i")),
            fmt_list(&summary_value(&disc, "variation-across-T", "ratio")),
            fmt_list(&summary_value(&maass, "min-over-lambda", "min_max_abs_i")),
            fmt_list(&summary_value(&maass, "variation-across-T", "ratio")),
        ),
    )
}

fn criterion_6(m: f64) -> (bool, String) {
    let r = report(
        Experiment::Phase,
        ConfigPatch {
            m_list: Some(vec![m]),
            ..Default::default()
        },
    );
    let sep = r
        .rows
        .iter()
        .filter(|x| x.label == "grid-point")
        .map(|x| x.values["separation"])
        .fold(f64::INFINITY, f64::min);
    (
        r.pass,
        format!(
            "C = T·residual [{}], C drift [{}] (<= 0.5), min separation {sep:.3} (>= 0.3)",
            fmt_list(&summary_value(&r, "residual-constant", "c")),
            fmt_list(&summary_value(&r, "c-stability", "c_drift")),
        ),
    )
}

fn criterion_7() -> (bool, String) {
    let r = report(Experiment::KtypeDecay, ConfigPatch::default());
    (
        r.pass,
        format!(
            "literal ratio [{}] (<= 10); with |λ|^(2-2k): ratio [{}]",
            fmt_list(&summary_value(&r, "literal-ratio", "ratio")),
            fmt_list(&summary_value(&r, "normalized-ratio", "ratio")),
        ),
    )
}

fn criterion_8() -> (bool, String) {
    let pw = |t: f64, s: Complex64| (s * t.abs().ln()).exp();
    let phi = |t: f64| c((-(t - 0.3) * (t - 0.3)).exp(), 0.2 * t);
    let o = QuadOptions::abs(1e-13);
    let mut consistency = 0.0f64;
    for s in [c(-0.5, 0.0), c(-0.9, 2.0), c(0.4, -1.0), c(1.5, 0.0)] {
        let reg = reg_power_integral(s, phi, 6.0, &RegOptions::default().with_tol(1e-12)).unwrap().value;
        let direct = integrate_endpoint_singular(|p| pw(p.from_a, s) * phi(p.x), 0.0, 6.0, Some(s), None, &o).value
            + integrate_endpoint_singular(|p| pw(p.to_b, s) * phi(p.x), -6.0, 0.0, None, Some(s), &o).value;
        consistency = consistency.max((reg - direct).norm() / direct.norm());
    }
    // 1 on [-1, 1], smoothly down to 0 at |t| = 2
    let plateau = |t: f64| {
        let psi = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
        let x = 2.0 - t.abs();
        c(psi(x) / (psi(x) + psi(1.0 - x)), 0.0)
    };
    let s = c(-1.5, 0.0);
    let tail = integrate_1d(|t| pw(t, s) * plateau(t), 1.0, 2.0, &QuadOptions::abs(1e-14)).value * 2.0;
    let want = 2.0 / (s + 1.0) + tail;
    let got = reg_power_integral(s, plateau, 2.0, &RegOptions::default()).unwrap().value;
    let plateau_err = (got - want).norm() / want.norm();
    let pole = matches!(
        reg_power_integral(c(-1.0, 0.0), plateau, 2.0, &RegOptions::default()),
        Err(Error::RegularizationPole { .. })
    );
    (
        consistency <= 1e-8 && plateau_err <= 1e-8 && pole,
        format!(
            "direct vs regularized {consistency:.2e} (<= 1e-8), plateau -4 + tail {plateau_err:.2e}, pole at s = -1 {}",
            if pole { "raised" } else { "not raised" }
        ),
    )
}

#[test]
fn acceptance() {
    let m = {
        let cfg = resolve(Experiment::ChooseM, None, &ConfigPatch { m_list: Some(M_SCAN.to_vec()), ..Default::default() })
            .unwrap();
        choose_m(&cfg).unwrap().0
    };
    say(&format!("acceptance: harness-chosen M = {m}"));
    let outcomes = vec![
        criterion(1, 60, criterion_1),
        criterion(2, 60, criterion_2),
        criterion(3, 60, criterion_3),
        criterion(4, 600, criterion_4),
        criterion(5, 1800, || criterion_5(m)),
        criterion(6, 900, || criterion_6(m)),
        criterion(7, 1200, criterion_7),
        criterion(8, 60, criterion_8),
    ];
    let passed = outcomes.iter().filter(|o| o.pass).count();
    say(&format!("acceptance: {passed}/{} criteria pass", outcomes.len()));
    let unexpected: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.pass && !EXPECTED_FAIL.contains(&o.id))
        .map(|o| o.id)
        .collect();
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
