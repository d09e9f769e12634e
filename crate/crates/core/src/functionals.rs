//! The model trilinear functional and the quantities derived from it.
//!
//! `l_ind(f, h, u) = ∫ K(x, y, z) f(x) h(y) u(z)` is evaluated on the line
//! when all three vectors are compactly supported there, and otherwise in the
//! circle chart, where the same functional reads
//! `2^{-Σa-3} ∫ K_circ(θ) F1 F2 F3 dθ` with `K_circ` built on chordal
//! distances.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{circle_orientation, discrete_kernel_eps, eval_kernel_unchecked, KernelSpec};
use crate::quadrature::{
    integrate, integrate_1d, integrate_endpoint_singular_exact, power_moment, subtraction_order, window_integral, Domain, Locus,
    QuadOptions, QuadResult, SingularityPlan,
};
use crate::series::Series;
use crate::testvectors::TestPair;
use crate::vector::ModelVector;

/// A functional value with the quadrature that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalValue {
    pub value: Complex64,
    pub quad: QuadResult,
    pub spec: KernelSpec,
    pub inputs: Vec<String>,
}

/// Where to integrate the trilinear functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chart {
    /// Line when every vector is compactly supported on it, else circle.
    #[default]
    Auto,
    Line,
    Circle,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cpow(base: f64, s: Complex64) -> Complex64 {
    (s * base.ln()).exp()
}

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

// Exponent of the kernel on the diagonal x_i = x_j.
fn diagonal_exponent(spec: &KernelSpec, i: usize, j: usize) -> Complex64 {
    match (i.min(j), i.max(j)) {
        (0, 1) => spec.a_xy,
        (0, 2) => spec.a_xz,
        _ => spec.a_yz,
    }
}

// Sum over the product of the per-slot pieces; a diagonal is declared for
// every pair of pieces that meet.
fn integrate_product<F: Fn(&[f64]) -> Complex64>(
    f: F,
    pieces: &[Vec<(f64, f64)>],
    spec: &KernelSpec,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let mut boxes: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for p in pieces {
        let mut next = Vec::new();
        for b in &boxes {
            for &iv in p {
                let mut nb = b.clone();
                nb.push(iv);
                next.push(nb);
            }
        }
        boxes = next;
    }
    if boxes.is_empty() {
        return Ok(QuadResult::exact(zero()));
    }
    let n = boxes.len() as f64;
    let sub = QuadOptions {
        abs_tol: opts.abs_tol / n,
        max_evals: (opts.max_evals as f64 / n) as usize,
        ..*opts
    };
    let mut parts = Vec::with_capacity(boxes.len());
    for b in boxes {
        let mut plan = SingularityPlan::new();
        let mut any = false;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if overlaps(b[i], b[j]) {
                    let s = diagonal_exponent(spec, i, j);
                    if s.re <= -1.0 {
                        return Err(Error::InvalidArgument(format!(
                            "supports meet the non-integrable diagonal ({i}, {j}) with exponent {s}"
                        )));
                    }
                    plan = plan.with(Locus::Diagonal(i, j), s);
                    any = true;
                }
            }
        }
        let dom = Domain::new(b)?;
        parts.push(integrate(&f, &dom, if any { Some(&plan) } else { None }, &sub)?);
    }
    Ok(QuadResult::combine(&parts))
}

fn circle_kernel_unchecked(spec: &KernelSpec, t: &[f64]) -> Complex64 {
    let chord = |a: f64, b: f64| 2.0 * (0.5 * (a - b)).sin().abs();
    let l = spec.a_xy * chord(t[0], t[1]).ln() + spec.a_xz * chord(t[0], t[2]).ln() + spec.a_yz * chord(t[1], t[2]).ln();
    let v = l.exp();
    if spec.parity == 1 {
        v * circle_orientation(t[0], t[1], t[2])
    } else {
        v
    }
}

/// `l_ind(f ⊗ h ⊗ u)`, integrated in the chart picked by [`Chart::Auto`].
pub fn l_ind(spec: &KernelSpec, f: &ModelVector, h: &ModelVector, u: &ModelVector, opts: &QuadOptions) -> Result<FunctionalValue> {
    l_ind_in(spec, f, h, u, Chart::Auto, opts)
}

pub fn l_ind_in(
    spec: &KernelSpec,
    f: &ModelVector,
    h: &ModelVector,
    u: &ModelVector,
    chart: Chart,
    opts: &QuadOptions,
) -> Result<FunctionalValue> {
    let inputs = vec![f.describe(), h.describe(), u.describe()];
    let vs = [f, h, u];
    let line: Option<Vec<Vec<(f64, f64)>>> = vs.iter().map(|v| v.line_pieces()).collect();
    let use_line = match chart {
        Chart::Line => {
            if line.is_none() {
                return Err(Error::Divergent("a vector is not compactly supported on the line".into()));
            }
            true
        }
        Chart::Circle => false,
        Chart::Auto => line.is_some(),
    };
    let quad = if vs.iter().any(|v| v.terms.is_empty()) {
        QuadResult::exact(zero())
    } else if use_line {
        let pieces = line.expect("checked");
        integrate_product(
            |p| eval_kernel_unchecked(spec, p[0], p[1], p[2]) * f.eval_line(p[0]) * h.eval_line(p[1]) * u.eval_line(p[2]),
            &pieces,
            spec,
            opts,
        )?
    } else {
        let pieces: Vec<Vec<(f64, f64)>> = vs.iter().map(|v| v.circle_pieces()).collect();
        let c = cpow(2.0, -spec.exponent_sum() - 3.0);
        integrate_product(
            |p| circle_kernel_unchecked(spec, p) * f.eval_circle(p[0]) * h.eval_circle(p[1]) * u.eval_circle(p[2]),
            &pieces,
            spec,
            &QuadOptions {
                abs_tol: opts.abs_tol / c.norm(),
                ..*opts
            },
        )?
        .scaled(c)
    };
    Ok(FunctionalValue {
        value: quad.value,
        quad,
        spec: *spec,
        inputs,
    })
}

/// `I_λ(z) = ∫∫ K(x, y, z) left(x) right(y) dx dy` at a fixed `z` outside
/// both supports.
pub fn i_lambda(spec: &KernelSpec, pair: &TestPair, z: f64, opts: &QuadOptions) -> Result<QuadResult> {
    i_lambda_vectors(spec, &pair.left, &pair.right, z, opts)
}

pub fn i_lambda_vectors(spec: &KernelSpec, left: &ModelVector, right: &ModelVector, z: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if left.terms.is_empty() || right.terms.is_empty() {
        return Ok(QuadResult::exact(zero()));
    }
    let pl = left
        .line_pieces()
        .ok_or_else(|| Error::Divergent("left vector is not compactly supported".into()))?;
    let pr = right
        .line_pieces()
        .ok_or_else(|| Error::Divergent("right vector is not compactly supported".into()))?;
    for &(a, b) in pl.iter().chain(&pr) {
        if a <= z && z <= b {
            return Err(Error::Domain(format!("z = {z} lies in a support [{a}, {b}]")));
        }
    }
    integrate_product(
        |p| eval_kernel_unchecked(spec, p[0], p[1], z) * left.eval_line(p[0]) * right.eval_line(p[1]),
        &[pl, pr],
        spec,
        opts,
    )
}

/// `(K(z), K'(z))`: the contributions of `alpha_T` and `alpha'_T` to `I_λ(z)`.
pub fn split_kk_prime(spec: &KernelSpec, pair: &TestPair, z: f64, opts: &QuadOptions) -> Result<(QuadResult, QuadResult)> {
    let (a, ap) = pair
        .right_parts
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("K/K' split needs a discrete-series pair".into()))?;
    let half = QuadOptions {
        abs_tol: opts.abs_tol * 0.5,
        ..*opts
    };
    Ok((
        i_lambda_vectors(spec, &pair.left, a, z, &half)?,
        i_lambda_vectors(spec, &pair.left, ap, z, &half)?,
    ))
}

/// `|λ|^2 e^{π|λ|/2}` (no weight) or `|λ|^{2-2k} e^{π|λ|/2}` (weight `k`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationFactor {
    pub lambda: Complex64,
    pub k: Option<i64>,
    pub factor: f64,
}

impl NormalizationFactor {
    /// `|a|^2` from a measured `|c|^2`.
    pub fn apply(&self, c_sq: f64) -> f64 {
        self.factor * c_sq
    }
}

pub fn normalization(lambda: Complex64, k: Option<i64>) -> Result<NormalizationFactor> {
    let r = lambda.norm();
    if r == 0.0 {
        return Err(Error::InvalidArgument("normalization needs lambda != 0".into()));
    }
    let p = match k {
        None => 2.0,
        Some(k) => 2.0 - 2.0 * k as f64,
    };
    Ok(NormalizationFactor {
        lambda,
        k,
        factor: r.powf(p) * (0.5 * PI * r).exp(),
    })
}

// ∫_ρ^D g(r, D - r) dr with an algebraic singularity of exponent `s` at D:
// a logarithmic substitution up to D/2 (the integrand carries |r|^{a_xz} and ρ
// may be tiny), an endpoint substitution next to D.
fn graded(g: &dyn Fn(f64, f64) -> Complex64, rho: f64, d: f64, s: Complex64, opts: &QuadOptions) -> QuadResult {
    if rho >= d {
        return QuadResult::exact(zero());
    }
    let split = (0.5 * d).max(rho);
    let sub = QuadOptions {
        abs_tol: opts.abs_tol * 0.5,
        ..*opts
    };
    let mut parts: Vec<QuadResult> = Vec::with_capacity(2);
    if split > rho {
        // r = ρ e^u resolves the |r|^{a_xz} scale change in one sweep
        let umax = (split / rho).ln();
        parts.push(integrate_1d(
            |u| {
                let r = rho * u.exp();
                g(r, d - r) * r
            },
            0.0,
            umax,
            &sub,
        ));
    }
    parts.push(integrate_endpoint_singular_exact(|p| g(p.x, p.to_b), split, d, None, Some(s), &sub));
    QuadResult::combine(&parts)
}

/// Tuning of [`ktype_value`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtypeOptions {
    /// Absolute tolerance of the outer integral.
    pub tol: f64,
    /// Relative tolerance of the inner (regularized) integrals.
    pub inner_rel: f64,
    /// Window half-width as a fraction of the distance to the nearest other
    /// singularity.
    pub window: f64,
    /// Number of Taylor terms kept in the window.
    pub terms: usize,
    pub max_evals: usize,
}

impl Default for KtypeOptions {
    fn default() -> Self {
        KtypeOptions {
            tol: 1e-13,
            inner_rel: 1e-12,
            window: 0.3,
            terms: 48,
            max_evals: 4_000_000,
        }
    }
}

/// `l(e_k ⊗ e_{-k} ⊗ e_0)` for the kernel on `H_{k-2} × H_{-k} × V_{λ,ε}`,
/// with `e_n = e^{inθ/2}` and the normalized measure `dθ/2π` in each slot.
pub fn ktype_value(k: i64, lambda: Complex64, eps: u8, opts: &KtypeOptions) -> Result<FunctionalValue> {
    let spec = discrete_kernel_eps(k, lambda, eps)?;
    let quad = ktype_integral(&spec, k, opts)?;
    Ok(FunctionalValue {
        value: quad.value,
        quad,
        spec,
        inputs: vec![format!("e^(i{k}θ/2)"), format!("e^(-i{k}θ/2)"), "1".into()],
    })
}

/// `(2π)^{-3} ∫ K_circ(θ1, θ2, θ3) e^{inθ1/2} e^{-inθ2/2} dθ` for any kernel
/// whose `x`–`y` and `y`–`z` exponents are integrable.
///
/// In `ψ = θ/2` everything has period `π`; fixing `ψ3 = 0` leaves
/// `2^{Σa} π^{-2} ∫_0^π sin(ψ2)^{a_yz} e^{-inψ2} J(ψ2) dψ2` with
/// `J(ψ2) = ∫_{ψ2-π}^{ψ2} |sin t|^{a_xz} sgn(t)^ε sin(ψ2-t)^{a_xy} e^{int} dt`
/// continued analytically in `a_xz`. Near `t = 0` the smooth factor is
/// replaced by its exact Taylor series, whose power integrals are known in
/// closed form.
pub fn ktype_integral(spec: &KernelSpec, n: i64, opts: &KtypeOptions) -> Result<QuadResult> {
    let (a12, a13, a23) = (spec.a_xy, spec.a_xz, spec.a_yz);
    if a12.re <= -1.0 || a23.re <= -1.0 {
        return Err(Error::InvalidArgument(format!("{spec}: only the x-z diagonal is regularized")));
    }
    let delta = spec.parity;
    let nn = subtraction_order(a13);
    for j in 0..nn.max(1) {
        power_moment(a13, j, delta, 1.0)?;
    }
    let terms = opts.terms.max(nn + 4);
    let nf = n as f64;
    let log_sinc = Series::sinc(terms).log_unit().scale(a13);
    let (cos_s, sin_s) = Series::cos_sin(terms);
    let mut int_s = Series::zero(terms);
    if terms > 1 {
        int_s.coeffs[1] = Complex64::new(0.0, nf);
    }
    let base = log_sinc.add(&int_s);

    let inner_ok = Cell::new(true);
    let inner_err = Cell::new(0.0f64);
    let inner_evals = Cell::new(0usize);

    // J at ψ2 = d0, π - ψ2 = d1
    let j_of = |d0: f64, d1: f64| -> Complex64 {
        let dmin = d0.min(d1);
        let sin2 = dmin.sin();
        let cos2 = if d0 <= d1 { d0.cos() } else { -d1.cos() };
        let cot = cos2 / sin2;
        let rho = opts.window * dmin;
        // series in τ = t / dmin so that cot ~ 1/dmin does not blow up the
        // coefficients
        let u = cos_s.rescale(dmin).add(&sin_s.rescale(dmin).scale(Complex64::new(-cot, 0.0)));
        let phi = base.rescale(dmin).add(&u.log_unit().scale(a12)).exp();
        let pre = cpow(sin2, a12) * cpow(dmin, a13 + 1.0);
        let win = match window_integral(a13, delta, &phi, opts.window) {
            Ok(w) => w * pre,
            Err(_) => {
                inner_ok.set(false);
                return zero();
            }
        };
        let scale = cpow(dmin, a12 + a13 + 1.0).norm();
        let iopts = QuadOptions {
            abs_tol: 1e-3 * opts.inner_rel * scale,
            rel_tol: opts.inner_rel,
            max_evals: 20_000,
            freq_hint: 0.0,
        };
        let sgn = if delta == 1 { -1.0 } else { 1.0 };
        // t = r on [ρ, ψ2] and t = -r on [ψ2 - π, -ρ]; e is the distance to
        // the singular end, where sin(ψ2 - t) = sin(e). Sines of angles near
        // π are taken from the complementary angle.
        let right = graded(
            &|r: f64, e: f64| {
                let st = if r < 0.5 * PI { r.sin() } else { (d1 + e).sin() };
                let se = if e < 0.5 * PI { e.sin() } else { (d1 + r).sin() };
                cpow(st, a13) * cpow(se, a12) * Complex64::from_polar(1.0, nf * r)
            },
            rho,
            d0,
            a12,
            &iopts,
        );
        let left = graded(
            &|r: f64, e: f64| {
                let st = if r < 0.5 * PI { r.sin() } else { (d0 + e).sin() };
                let se = if e < 0.5 * PI { e.sin() } else { (d0 + r).sin() };
                cpow(st, a13) * cpow(se, a12) * Complex64::from_polar(sgn, -nf * r)
            },
            rho,
            d1,
            a12,
            &iopts,
        );
        if !(left.converged && right.converged) {
            inner_ok.set(false);
        }
        inner_err.set(inner_err.get().max((left.err_estimate + right.err_estimate) / scale.max(1e-300)));
        inner_evals.set(inner_evals.get() + left.evaluations + right.evaluations);
        if std::env::var("KDEBUG").is_ok() { eprintln!("d0={d0:.3e} d1={d1:.3e} L={} R={} conv={} {} err={:.2e} {:.2e} scale={scale:.2e}", left.evaluations, right.evaluations, left.converged, right.converged, left.err_estimate, right.err_estimate); }
        win + left.value + right.value
    };

    // J has a part ~ ψ2^{a_xy + a_xz + 1} and a smooth part, so the outer
    // integrand mixes two powers at each end; the cutoff follows the worse.
    let s_j = a12 + a13 + a23 + 1.0;
    let s_end = if s_j.re < a23.re { s_j } else { a23 };
    let oopts = QuadOptions {
        abs_tol: opts.tol,
        rel_tol: 0.0,
        max_evals: opts.max_evals,
        freq_hint: 0.0,
    };
    let outer = integrate_endpoint_singular_exact(
        |p| {
            let (d0, d1) = (p.from_a, p.to_b);
            let s = d0.min(d1).sin();
            cpow(s, a23) * Complex64::from_polar(1.0, -nf * p.x) * j_of(d0, d1)
        },
        0.0,
        PI,
        Some(s_end),
        Some(s_end),
        &oopts,
    );
    let c = cpow(2.0, spec.exponent_sum()) / (PI * PI);
    let mut res = outer.scaled(c);
    // inner errors enter linearly; bound by the largest relative inner error
    // times the integral of |sin ψ2^{a_yz}| × scale, which is O(1)
    res.err_estimate += inner_err.get() * c.norm() * PI;
    res.evaluations += inner_evals.get();
    res.converged = outer.converged && inner_ok.get();
    Ok(res)
}

/// `|v|^2 |λ|^{2-2k} e^{π|λ|/2}`: a K-type value in the normalization of the
/// weight-`k` coefficients. Bounded in `λ` when `|v|` decays at the rate
/// `|λ|^{k-1} e^{-π|λ|/4}`.
pub fn normalized_ktype(value: Complex64, lambda: Complex64, k: i64) -> Result<f64> {
    Ok(normalization(lambda, Some(k))?.apply(value.norm_sqr()))
}

/// `|v|^2 |λ|^{2k-2} e^{π|λ|/2}`: the same factors with the power of `|λ|`
/// inverted. Grows like `|λ|^{4k-4}` when `|v|` decays at the rate above.
pub fn literal_decay_quantity(value: Complex64, lambda: Complex64, k: i64) -> f64 {
    let r = lambda.norm();
    value.norm_sqr() * r.powf(2.0 * k as f64 - 2.0) * (0.5 * PI * r).exp()
}
