use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Family};
use super::report::{Check, Op, Report, ReportRow, RowKind};
use crate::error::{Error, Result};
use crate::functionals::{
    i_lambda, l_ind, literal_decay_quantity, normalized_ktype, split_kk_prime, ktype_value, KtypeOptions,
};
use crate::group::GroupElement;
use crate::kernels::{discrete_kernel_eps, eval_kernel, orientation, phase_model, KernelSpec};
use crate::quadrature::QuadOptions;
use crate::repn::RepnParam;
use crate::testvectors::{holo_pair, holo_wt, maass_pair_eps, moment_system, TestPair, ALPHA_NORM_SQ};
use crate::vector::{Atom, ModelVector};

/// Invariance threshold on the relative deviation.
pub const INVARIANCE_TOL: f64 = 1e-6;
/// Minimum deviation the perturbed-kernel control must show.
pub const CONTROL_MIN_DEVIATION: f64 = 1e-3;
pub const MOMENT_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const NORM_CONSTANCY_TOL: f64 = 1e-6;
pub const LOWER_BOUND_RATIO: f64 = 2.0;
/// Allowed drift of `C = T · residual` between consecutive `T`.
pub const PHASE_C_DRIFT: f64 = 0.5;
pub const MIN_SEPARATION: f64 = 0.3;
pub const DECAY_RATIO: f64 = 10.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn imag(mu: f64) -> Complex64 {
    c(0.0, mu)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    use super::config::Experiment::*;
    cfg.validate()?;
    let rows = match cfg.experiment {
        Invariance => invariance_rows(cfg)?,
        Lowerbound => lowerbound_rows(cfg)?,
        Phase => phase_rows(cfg)?,
        Moments => moment_rows(cfg)?,
        Norms => norm_rows(cfg)?,
        KtypeDecay => ktype_rows(cfg)?,
        ChooseM => choose_m(cfg)?.1,
    };
    Ok(Report::new(cfg, rows))
}

pub fn run_invariance(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, invariance_rows(cfg)?))
}

pub fn run_lowerbound(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, lowerbound_rows(cfg)?))
}

pub fn run_phase(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, phase_rows(cfg)?))
}

pub fn run_moments(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, moment_rows(cfg)?))
}

pub fn run_norms(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, norm_rows(cfg)?))
}

pub fn run_ktype_decay(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, ktype_rows(cfg)?))
}

pub fn run_choose_m(cfg: &ExperimentConfig) -> Result<Report> {
    Ok(Report::new(cfg, choose_m(cfg)?.1))
}

/// Entries uniform in `[-2, 2]`, redrawn until `|det| >= 0.5`.
pub fn random_group_element(rng: &mut ChaCha8Rng) -> GroupElement {
    loop {
        let e: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..=2.0));
        let det = e[0] * e[3] - e[1] * e[2];
        if det.abs() >= 0.5 {
            if let Ok(g) = GroupElement::new(e[0], e[1], e[2], e[3]) {
                return g;
            }
        }
    }
}

/// `count` seeded random group elements.
pub fn random_group_elements(seed: u64, count: usize) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_group_element(&mut rng)).collect()
}

/// Kernel for `I_λ`: the discrete one of weight `k`, or the all-principal one
/// with labels `(iτ, iτ', -iμ)`.
pub fn kernel_for(cfg: &ExperimentConfig, k: i64, mu: f64) -> Result<KernelSpec> {
    match cfg.family {
        Family::Discrete => discrete_kernel_eps(k, imag(mu), cfg.eps),
        Family::Maass => Ok(KernelSpec::solve(
            RepnParam::principal(imag(cfg.tau), 0),
            RepnParam::principal(imag(cfg.tau_p), 0),
            RepnParam::principal(imag(-mu), cfg.eps),
        )),
    }
}

pub fn pair_for(cfg: &ExperimentConfig, t: f64, k: i64, m: f64) -> Result<TestPair> {
    match cfg.family {
        Family::Discrete => holo_pair(t, k, m),
        Family::Maass => maass_pair_eps(t, imag(cfg.tau), 0, imag(cfg.tau_p), 0),
    }
}

// The weights to loop over: the Maass family has none.
fn weights(cfg: &ExperimentConfig) -> Vec<i64> {
    match cfg.family {
        Family::Discrete => cfg.k_list.clone(),
        Family::Maass => vec![0],
    }
}

/// Distance of an angle difference from `{0, π}` (mod 2π).
pub fn separation(diff: f64) -> f64 {
    let w = diff.rem_euclid(2.0 * PI);
    let d = w.min(2.0 * PI - w);
    d.min(PI - d)
}

fn wrap(x: f64) -> f64 {
    let w = x.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

fn bump(param: RepnParam, center: f64) -> Result<ModelVector> {
    ModelVector::from_atom(param, Atom::bump(center, 0.3, 0))
}

fn invariance_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let mut gs = vec![GroupElement::identity()];
    gs.extend(random_group_elements(cfg.seed, cfg.samples));
    let opts = QuadOptions::rel(cfg.tol);
    let mut cases: Vec<(i64, f64, KernelSpec)> = Vec::new();
    for k in weights(cfg) {
        for &mu in &cfg.lambdas {
            let spec = match cfg.family {
                Family::Discrete => discrete_kernel_eps(k, imag(mu), cfg.eps)?,
                Family::Maass => KernelSpec::solve(
                    RepnParam::principal(imag(cfg.tau), 0),
                    RepnParam::principal(imag(cfg.tau_p), 0),
                    RepnParam::principal(imag(mu), cfg.eps),
                ),
            };
            cases.push((k, mu, spec));
        }
    }
    let name = cfg.experiment.name();
    let mut rows = Vec::new();
    for (k, mu, spec) in cases {
        let eval = |spec: &KernelSpec, g: &GroupElement| -> Result<(Complex64, f64, bool)> {
            let p = spec.params;
            let f = bump(p[0], -1.0)?.act(&p[0], g)?;
            let h = bump(p[1], 0.5)?.act(&p[1], g)?;
            let u = bump(p[2], 2.0)?.act(&p[2], g)?;
            let v = l_ind(spec, &f, &h, &u, &opts)?;
            Ok((v.value, v.quad.err_estimate, v.quad.converged))
        };
        let vals: Vec<Result<(Complex64, f64, bool)>> = gs.par_iter().map(|g| eval(&spec, g)).collect();
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        let base = vals[0].0;
        for (i, (v, err, conv)) in vals.iter().enumerate() {
            let e = gs[i].entries();
            rows.push(
                ReportRow::new(name, RowKind::Point, if i == 0 { "identity" } else { "random-g" })
                    .param("k", k as f64)
                    .param("lambda_im", mu)
                    .param("g_index", i as f64)
                    .param("g_a", e[0])
                    .param("g_b", e[1])
                    .param("g_c", e[2])
                    .param("g_d", e[3])
                    .value("re", v.re)
                    .value("im", v.im)
                    .value("deviation", (v - base).norm() / base.norm())
                    .error((err + vals[0].1) / base.norm(), *conv)
                    .check(Check::new("deviation", Op::Le, INVARIANCE_TOL)),
            );
        }
        // negative control: a_xy shifted by 0.1 breaks the equivariance
        let bad = spec.perturbed(0, c(0.1, 0.0));
        let cvals: Vec<Result<(Complex64, f64, bool)>> = gs.par_iter().map(|g| eval(&bad, g)).collect();
        let cvals = cvals.into_iter().collect::<Result<Vec<_>>>()?;
        let cbase = cvals[0].0;
        let dev = cvals[1..]
            .iter()
            .map(|(v, _, _)| (v - cbase).norm() / cbase.norm())
            .fold(f64::INFINITY, f64::min);
        rows.push(
            ReportRow::new(name, RowKind::Control, "perturbed-exponent")
                .param("k", k as f64)
                .param("lambda_im", mu)
                .param("delta_a_xy", 0.1)
                .value("min_deviation", dev)
                .error(0.0, cvals.iter().all(|x| x.2))
                .check(Check::new("min_deviation", Op::Ge, CONTROL_MIN_DEVIATION)),
        );
    }
    Ok(rows)
}

/// The offset `M`: the single configured value, or the winner of the scan.
pub fn resolve_m(cfg: &ExperimentConfig) -> Result<f64> {
    if cfg.family == Family::Maass || cfg.m_list.len() == 1 {
        return Ok(cfg.m_list[0]);
    }
    Ok(choose_m(cfg)?.0)
}

struct GridPoint {
    k: i64,
    t: f64,
    mu: f64,
}

fn grid(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for k in weights(cfg) {
        for &t in &cfg.t_list {
            for mu in cfg.lambda_grid.points(t) {
                out.push(GridPoint { k, t, mu });
            }
        }
    }
    out
}

fn lowerbound_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = resolve_m(cfg)?;
    let zs = cfg.z_grid();
    let opts = QuadOptions::rel(cfg.tol);
    let pts = grid(cfg);
    let name = cfg.experiment.name();
    let measured: Vec<Result<ReportRow>> = pts
        .par_iter()
        .map(|p| {
            let spec = kernel_for(cfg, p.k, p.mu)?;
            let pair = pair_for(cfg, p.t, p.k, m)?;
            let (mut best, mut zbest, mut err, mut conv) = (0.0f64, zs[0], 0.0f64, true);
            for &z in &zs {
                let r = i_lambda(&spec, &pair, z, &opts)?;
                if r.value.norm() > best {
                    best = r.value.norm();
                    zbest = z;
                }
                err = err.max(r.err_estimate);
                conv &= r.converged;
            }
            let mut row = ReportRow::new(name, RowKind::Point, "max-over-z")
                .param("T", p.t)
                .param("lambda_im", p.mu)
                .value("max_abs_i", best)
                .value("z_at_max", zbest)
                .error(err, conv);
            if cfg.family == Family::Discrete {
                row = row.param("k", p.k as f64).param("M", m);
            }
            Ok(row)
        })
        .collect();
    let mut rows = measured.into_iter().collect::<Result<Vec<_>>>()?;
    let mut summary = Vec::new();
    let mut mins = Vec::new();
    for k in weights(cfg) {
        mins.clear();
        for &t in &cfg.t_list {
            let sel: Vec<&ReportRow> = rows
                .iter()
                .filter(|r| r.params["T"] == t && r.params.get("k").map_or(true, |&kk| kk == k as f64))
                .collect();
            let min = sel.iter().map(|r| r.values["max_abs_i"]).fold(f64::INFINITY, f64::min);
            mins.push(min);
            let mut row = ReportRow::new(name, RowKind::Summary, "min-over-lambda")
                .param("T", t)
                .value("min_max_abs_i", min)
                .error(sel.iter().map(|r| r.error).fold(0.0, f64::max), sel.iter().all(|r| r.converged))
                .check(Check::new("min_max_abs_i", Op::Gt, 0.0));
            if cfg.family == Family::Discrete {
                row = row.param("k", k as f64);
            }
            summary.push(row);
        }
        let hi = mins.iter().cloned().fold(0.0, f64::max);
        let lo = mins.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut row = ReportRow::new(name, RowKind::Summary, "variation-across-T")
            .value("ratio", hi / lo)
            .value("min", lo)
            .value("max", hi)
            .check(Check::new("ratio", Op::Le, LOWER_BOUND_RATIO));
        if cfg.family == Family::Discrete {
            row = row.param("k", k as f64).param("M", m);
        }
        summary.push(row);
    }
    rows.extend(summary);
    Ok(rows)
}

/// Largest `|arg K - model|` over a 5×5 grid of the support box
/// `t1 = T x, t2 = T (y - 1) ∈ [-0.1, 0.1]`.
pub fn phase_residual(spec: &KernelSpec, mu: f64, t: f64, z: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let t1 = -0.1 + 0.05 * i as f64;
            let t2 = -0.1 + 0.05 * j as f64;
            let (x, y) = (t1 / t, 1.0 + t2 / t);
            let measured = eval_kernel(spec, x, y, z)?.arg();
            let mut model = phase_model(imag(mu), t, t1, t2, z)?.im;
            if spec.parity == 1 && orientation(x, y, z) < 0.0 {
                model += PI;
            }
            worst = worst.max(wrap(measured - model).abs());
        }
    }
    Ok(worst)
}

/// Leading-order `arg K' - arg K`: the companion sits at `1 + M/T` with total
/// mass `-1`.
pub fn predicted_phase_difference(mu: f64, t: f64, m: f64, z: f64) -> f64 {
    PI - mu * m * z / (2.0 * t * (z - 1.0))
}

fn phase_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    if cfg.family != Family::Discrete {
        return Err(Error::InvalidArgument("the phase experiment needs the discrete family".into()));
    }
    let m = resolve_m(cfg)?;
    let zs = cfg.z_grid();
    let opts = QuadOptions::rel(cfg.tol);
    let name = cfg.experiment.name();
    let mut pts = Vec::new();
    for p in grid(cfg) {
        for &z in &zs {
            pts.push((p.k, p.t, p.mu, z));
        }
    }
    let rows: Vec<Result<ReportRow>> = pts
        .par_iter()
        .map(|&(k, t, mu, z)| {
            let spec = kernel_for(cfg, k, mu)?;
            let pair = pair_for(cfg, t, k, m)?;
            let (kr, kpr) = split_kk_prime(&spec, &pair, z, &opts)?;
            let diff = wrap(kpr.value.arg() - kr.value.arg());
            let res = phase_residual(&spec, mu, t, z)?;
            Ok(ReportRow::new(name, RowKind::Point, "grid-point")
                .param("k", k as f64)
                .param("T", t)
                .param("lambda_im", mu)
                .param("z", z)
                .param("M", m)
                .value("abs_k", kr.value.norm())
                .value("arg_k", kr.value.arg())
                .value("arg_k_prime", kpr.value.arg())
                .value("phase_difference", diff)
                .value("predicted_difference", wrap(predicted_phase_difference(mu, t, m, z)))
                .value("separation", separation(diff))
                .value("residual", res)
                .value("c_estimate", t * res)
                .error(kr.err_estimate + kpr.err_estimate, kr.converged && kpr.converged)
                .check(Check::new("separation", Op::Ge, MIN_SEPARATION)))
        })
        .collect();
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut summary = Vec::new();
    for k in weights(cfg) {
        let cs: Vec<(f64, f64)> = cfg
            .t_list
            .iter()
            .map(|&t| {
                let c = rows
                    .iter()
                    .filter(|r| r.params["T"] == t && r.params["k"] == k as f64)
                    .map(|r| r.values["c_estimate"])
                    .fold(0.0, f64::max);
                (t, c)
            })
            .collect();
        for &(t, cval) in &cs {
            summary.push(
                ReportRow::new(name, RowKind::Summary, "residual-constant")
                    .param("k", k as f64)
                    .param("T", t)
                    .value("c", cval)
                    .value("max_residual", cval / t),
            );
        }
        for w in cs.windows(2) {
            let ratio = w[1].1 / w[0].1;
            summary.push(
                ReportRow::new(name, RowKind::Summary, "c-stability")
                    .param("k", k as f64)
                    .param("T_from", w[0].0)
                    .param("T_to", w[1].0)
                    .value("c_ratio", ratio)
                    .value("c_drift", (ratio - 1.0).abs())
                    .check(Check::new("c_drift", Op::Le, PHASE_C_DRIFT)),
            );
        }
    }
    rows.extend(summary);
    Ok(rows)
}

fn moment_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let opts = QuadOptions::abs(cfg.tol).with_max_evals(400_000);
    let name = cfg.experiment.name();
    let mut rows = Vec::new();
    for &k in &cfg.k_list {
        let param = RepnParam::discrete_sub(k)?;
        let alpha = ModelVector::alpha(param);
        for &m in &cfg.m_list {
            let sys = moment_system(k, m)?;
            let v = alpha.add(&sys.alpha_prime)?;
            let res = v.moment_residuals(k, &opts)?;
            for (j, r) in res.iter().enumerate() {
                rows.push(
                    ReportRow::new(name, RowKind::Point, "moment-residual")
                        .param("k", k as f64)
                        .param("M", m)
                        .param("moment", j as f64)
                        .value("residual", *r)
                        .check(Check::new("residual", Op::Le, MOMENT_TOL)),
                );
            }
            rows.push(
                ReportRow::new(name, RowKind::Summary, "condition")
                    .param("k", k as f64)
                    .param("M", m)
                    .value("condition", sys.condition)
                    .value("max_residual", res.iter().cloned().fold(0.0, f64::max)),
            );
        }
        let res = alpha.moment_residuals(k, &opts)?;
        rows.push(
            ReportRow::new(name, RowKind::Control, "alpha-alone")
                .param("k", k as f64)
                .value("max_residual", res.iter().cloned().fold(0.0, f64::max))
                .check(Check::new("max_residual", Op::Gt, MOMENT_TOL)),
        );
    }
    Ok(rows)
}

fn rel_err(a: Complex64, b: f64) -> f64 {
    (a - b).norm() / b.abs()
}

fn norm_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let opts = QuadOptions::rel(cfg.tol).with_max_evals(400_000);
    let name = cfg.experiment.name();
    let m = cfg.m_list[0];
    let mut rows = Vec::new();
    for &k in &cfg.k_list {
        for &t in &cfg.t_list {
            let w = holo_wt(t, k)?;
            let want = t.powf(0.5 * (1.0 - k as f64));
            rows.push(
                ReportRow::new(name, RowKind::Point, "integral-w_T")
                    .param("k", k as f64)
                    .param("T", t)
                    .value("integral", w.moment(0, &opts)?.re)
                    .value("expected", want)
                    .value("rel_error", rel_err(w.moment(0, &opts)?, want))
                    .check(Check::new("rel_error", Op::Le, IDENTITY_TOL)),
            );
            let pair = holo_pair(t, k, m)?;
            let alpha_t = &pair.right_parts.as_ref().expect("discrete pair").0;
            let want = t.powf(0.5 * (k as f64 - 1.0));
            let got = alpha_t.moment(0, &opts)?;
            rows.push(
                ReportRow::new(name, RowKind::Point, "integral-alpha_T")
                    .param("k", k as f64)
                    .param("T", t)
                    .value("integral", got.re)
                    .value("expected", want)
                    .value("rel_error", rel_err(got, want))
                    .check(Check::new("rel_error", Op::Le, IDENTITY_TOL)),
            );
        }
    }
    let mut ratios = Vec::new();
    for &t in &cfg.t_list {
        let pair = maass_pair_eps(t, imag(cfg.tau), 0, imag(cfg.tau_p), 0)?;
        let mass = pair.mass(&opts)?.norm();
        rows.push(
            ReportRow::new(name, RowKind::Point, "mass-u_T")
                .param("T", t)
                .value("abs_mass", mass)
                .value("deviation", (mass - 1.0).abs())
                .check(Check::new("deviation", Op::Le, IDENTITY_TOL)),
        );
        let r = pair.tensor_norm_sq(&opts)? / (t * t);
        ratios.push(r);
        rows.push(
            ReportRow::new(name, RowKind::Point, "norm-u_T")
                .param("T", t)
                .value("norm_sq_over_t_sq", r)
                .value("rel_to_alpha_norm_4", r / (ALPHA_NORM_SQ * ALPHA_NORM_SQ) - 1.0),
        );
    }
    let drift = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    rows.push(
        ReportRow::new(name, RowKind::Summary, "norm-constancy")
            .value("max_rel_drift", drift)
            .check(Check::new("max_rel_drift", Op::Le, NORM_CONSTANCY_TOL)),
    );
    Ok(rows)
}

fn ktype_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let name = cfg.experiment.name();
    let opts = KtypeOptions {
        tol: cfg.tol,
        ..Default::default()
    };
    let lambdas = if cfg.lambdas.is_empty() {
        cfg.lambda_grid.points(cfg.t_list[0])
    } else {
        cfg.lambdas.clone()
    };
    let pts: Vec<(i64, f64)> = cfg
        .k_list
        .iter()
        .flat_map(|&k| lambdas.iter().map(move |&mu| (k, mu)))
        .collect();
    let vals: Vec<Result<ReportRow>> = pts
        .par_iter()
        .map(|&(k, mu)| {
            let v = ktype_value(k, imag(mu), cfg.eps, &opts)?;
            Ok(ReportRow::new(name, RowKind::Point, "ktype")
                .param("k", k as f64)
                .param("lambda_im", mu)
                .param("eps", cfg.eps as f64)
                .value("re", v.value.re)
                .value("im", v.value.im)
                .value("abs", v.value.norm())
                .value("literal", literal_decay_quantity(v.value, imag(mu), k))
                .value("normalized", normalized_ktype(v.value, imag(mu), k)?)
                .error(v.quad.err_estimate, v.quad.converged))
        })
        .collect();
    let mut rows = vals.into_iter().collect::<Result<Vec<_>>>()?;
    for &k in &cfg.k_list {
        let sel: Vec<&ReportRow> = rows.iter().filter(|r| r.params["k"] == k as f64).collect();
        let ratio = |key: &str| {
            let hi = sel.iter().map(|r| r.values[key]).fold(0.0, f64::max);
            let lo = sel.iter().map(|r| r.values[key]).fold(f64::INFINITY, f64::min);
            (hi, lo, hi / lo)
        };
        let (hi, lo, r) = ratio("literal");
        let lit = ReportRow::new(name, RowKind::Summary, "literal-ratio")
            .param("k", k as f64)
            .value("max", hi)
            .value("min", lo)
            .value("ratio", r)
            .check(Check::new("ratio", Op::Le, DECAY_RATIO));
        let (hi, lo, r) = ratio("normalized");
        // diagnostic: the same test in the weight-k normalization
        let norm = ReportRow::new(name, RowKind::Summary, "normalized-ratio")
            .param("k", k as f64)
            .value("max", hi)
            .value("min", lo)
            .value("ratio", r);
        rows.push(lit);
        rows.push(norm);
    }
    Ok(rows)
}

/// Scans `cfg.m_list` and returns the `M` maximizing the smallest phase
/// separation over the `(k, T, λ, z)` grid, with one row per `M`.
pub fn choose_m(cfg: &ExperimentConfig) -> Result<(f64, Vec<ReportRow>)> {
    if cfg.family != Family::Discrete {
        return Err(Error::InvalidArgument("choosing M needs the discrete family".into()));
    }
    let zs = cfg.z_grid();
    let opts = QuadOptions::rel(cfg.tol);
    let name = "choose-m";
    let mut pts = Vec::new();
    for &m in &cfg.m_list {
        for p in grid(cfg) {
            for &z in &zs {
                pts.push((m, p.k, p.t, p.mu, z));
            }
        }
    }
    let seps: Vec<Result<(f64, bool)>> = pts
        .par_iter()
        .map(|&(m, k, t, mu, z)| {
            let spec = kernel_for(cfg, k, mu)?;
            let pair = pair_for(cfg, t, k, m)?;
            let (kr, kpr) = split_kk_prime(&spec, &pair, z, &opts)?;
            Ok((separation(kpr.value.arg() - kr.value.arg()), kr.converged && kpr.converged))
        })
        .collect();
    let seps = seps.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let (mut best_m, mut best) = (cfg.m_list[0], f64::NEG_INFINITY);
    for &m in &cfg.m_list {
        let sel: Vec<&(f64, bool)> = pts.iter().zip(&seps).filter(|(p, _)| p.0 == m).map(|(_, s)| s).collect();
        let min = sel.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        if min > best {
            best = min;
            best_m = m;
        }
        rows.push(
            ReportRow::new(name, RowKind::Point, "scan")
                .param("M", m)
                .value("min_separation", min)
                .error(0.0, sel.iter().all(|s| s.1)),
        );
    }
    rows.push(
        ReportRow::new(name, RowKind::Summary, "chosen")
            .param("M", best_m)
            .value("min_separation", best)
            .check(Check::new("min_separation", Op::Ge, MIN_SEPARATION)),
    );
    Ok((best_m, rows))
}
