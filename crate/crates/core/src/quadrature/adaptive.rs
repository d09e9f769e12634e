//! Globally adaptive one-dimensional Gauss-Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::rules::GkRule;
use super::{pairwise_sum, QuadOptions, QuadResult};

struct Cell {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

// QUADPACK-style error rescaling: sharpens the raw |K - G| estimate for
// smooth integrands and floors it at roundoff level.
pub(crate) fn rescale(raw: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = raw;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gk_cell<F: Fn(f64) -> Complex64>(f: &F, rule: &GkRule, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut vk = Complex64::new(0.0, 0.0);
    let mut vg = Complex64::new(0.0, 0.0);
    let mut vals = [Complex64::new(0.0, 0.0); 31];
    let mut resabs = 0.0;
    for (i, &x) in rule.nodes.iter().enumerate() {
        let v = f(c + h * x);
        vals[i] = v;
        vk += v * rule.kronrod[i];
        vg += v * rule.gauss[i];
        resabs += rule.kronrod[i] * v.norm();
    }
    let mean = vk * 0.5;
    let resasc: f64 = rule
        .kronrod
        .iter()
        .zip(&vals)
        .map(|(w, v)| w * (v - mean).norm())
        .sum();
    let raw = ((vk - vg) * h).norm();
    let mut err = rescale(raw, resabs * h.abs(), resasc * h.abs());
    if !(vk.re.is_finite() && vk.im.is_finite()) {
        err = f64::INFINITY;
    }
    (vk * h, err)
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// The initial mesh has cells no wider than `min(b - a, 1/freq_hint) / 4`;
/// the cell with the largest error estimate is bisected until the summed
/// estimate meets the tolerance or the evaluation budget runs out.
pub fn integrate_1d<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult::exact(Complex64::new(0.0, 0.0));
    }
    if b < a {
        let r = integrate_1d(f, b, a, opts);
        return QuadResult {
            value: -r.value,
            ..r
        };
    }
    let rule = GkRule::g15k31();
    let n0 = opts.initial_cells(b - a);
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for i in 0..n0 {
        let lo = a + (b - a) * i as f64 / n0 as f64;
        let hi = if i + 1 == n0 { b } else { a + (b - a) * (i + 1) as f64 / n0 as f64 };
        let (v, e) = gk_cell(&f, &rule, lo, hi);
        evals += rule.len();
        total += v;
        total_err += e;
        heap.push(Cell { a: lo, b: hi, value: v, err: e });
    }
    let mut subdivisions = 0usize;
    let mut stuck = false;
    while total_err > opts.target(total) {
        if evals + 2 * rule.len() > opts.max_evals {
            break;
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
            // cannot split further
            stuck = true;
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk_cell(&f, &rule, worst.a, mid);
        let (v2, e2) = gk_cell(&f, &rule, mid, worst.b);
        evals += 2 * rule.len();
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Cell { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Cell { a: mid, b: worst.b, value: v2, err: e2 });
        if subdivisions % 64 == 0 {
            // refresh the running sums to avoid drift
            total_err = heap.iter().map(|c| c.err).sum();
        }
    }
    let mut cells = heap.into_vec();
    cells.sort_by(|x, y| x.a.total_cmp(&y.a));
    let vals: Vec<Complex64> = cells.iter().map(|c| c.value).collect();
    let value = pairwise_sum(&vals);
    let err: f64 = cells.iter().map(|c| c.err).sum();
    QuadResult {
        value,
        err_estimate: err,
        converged: !stuck && err <= opts.target(value) && err.is_finite(),
        subdivisions,
        evaluations: evals,
    }
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, splitting
/// the absolute tolerance evenly.
pub fn integrate_pieces<F: Fn(f64) -> Complex64>(f: F, points: &[f64], opts: &QuadOptions) -> QuadResult {
    let n = points.len().saturating_sub(1).max(1);
    let sub = QuadOptions {
        abs_tol: opts.abs_tol / n as f64,
        max_evals: opts.max_evals / n,
        ..*opts
    };
    let parts: Vec<QuadResult> = points
        .windows(2)
        .map(|w| integrate_1d(&f, w[0], w[1], &sub))
        .collect();
    QuadResult::combine(&parts)
}

/// A sample point together with its exact offsets from both ends.
#[derive(Debug, Clone, Copy)]
pub struct EndPt {
    pub x: f64,
    /// `x - a`, computed without cancellation.
    pub from_a: f64,
    /// `b - x`, computed without cancellation.
    pub to_b: f64,
}

/// Integrates `f` over `[a, b]` when it may have algebraic singularities at
/// either end.
///
/// Each half-interval next to a singular end is mapped by
/// `x = a + (m - a) e^{-u}`, which turns `|x - a|^s` into a damped
/// exponential (and a logarithmic phase into a linear one). `left` and
/// `right` give the exponent at each end; `None` means the end is regular.
/// The integrand receives exact offsets from the endpoints; integrands that
/// only use `x` lose the last `1e3 ε |end|` next to a nonzero end to rounding,
/// and that sliver is filled in from the power law.
pub fn integrate_endpoint_singular<F: Fn(EndPt) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    left: Option<Complex64>,
    right: Option<Complex64>,
    opts: &QuadOptions,
) -> QuadResult {
    endpoint_singular(f, a, b, left, right, opts, true)
}

/// As [`integrate_endpoint_singular`], for integrands that only use the
/// exact offsets `from_a` / `to_b` near the singular ends. The mapped
/// integral then runs all the way to the cutoff and no power-law sliver is
/// assumed, which matters when the integrand mixes several powers.
pub fn integrate_endpoint_singular_exact<F: Fn(EndPt) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    left: Option<Complex64>,
    right: Option<Complex64>,
    opts: &QuadOptions,
) -> QuadResult {
    endpoint_singular(f, a, b, left, right, opts, false)
}

fn endpoint_singular<F: Fn(EndPt) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    left: Option<Complex64>,
    right: Option<Complex64>,
    opts: &QuadOptions,
    sliver: bool,
) -> QuadResult {
    let len = b - a;
    if len <= 0.0 {
        return QuadResult::exact(Complex64::new(0.0, 0.0));
    }
    let half = 0.5 * len;
    let sub = QuadOptions {
        abs_tol: opts.abs_tol * 0.5,
        max_evals: opts.max_evals / 2,
        ..*opts
    };
    // The integrand decays like exp(-(Re s + 1) u); stop well below double
    // precision, or before x - end is dominated by rounding of x. In the
    // latter case the sliver next to the end is added assuming pure power
    // behaviour `d^s` there.
    let side = |s: Complex64, end: f64, at: &dyn Fn(f64) -> EndPt| -> QuadResult {
        let dmin = if sliver { 1e3 * f64::EPSILON * end.abs() } else { 0.0 };
        let p = (s.re + 1.0).max(1e-3);
        let mut umax = (40.0 / p).min(700.0);
        let mut tail = Complex64::new(0.0, 0.0);
        if dmin > 0.0 && half * (-umax).exp() < dmin {
            umax = (half / dmin).ln().max(0.0);
            let d = half * (-umax).exp();
            tail = f(at(d)) * d / (s + 1.0);
        }
        let g = |u: f64| {
            let d = half * (-u).exp();
            f(at(d)) * d
        };
        let mut r = integrate_1d(g, 0.0, umax.max(0.0), &sub);
        r.value += tail;
        r
    };
    let left = match left {
        Some(s) => side(s, a, &|d| EndPt { x: a + d, from_a: d, to_b: len - d }),
        None => integrate_1d(
            |x: f64| f(EndPt { x, from_a: x - a, to_b: b - x }),
            a,
            a + half,
            &sub,
        ),
    };
    let right = match right {
        Some(s) => side(s, b, &|d| EndPt { x: b - d, from_a: len - d, to_b: d }),
        None => integrate_1d(
            |x: f64| f(EndPt { x, from_a: x - a, to_b: b - x }),
            a + half,
            b,
            &sub,
        ),
    };
    QuadResult::combine(&[left, right])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zero_integrand_is_exact() {
        let r = integrate_1d(|_| c(0.0), -1.0, 1.0, &QuadOptions::default());
        assert_eq!(r.value, c(0.0));
        assert!(r.converged);
    }

    #[test]
    fn oscillatory_closed_form() {
        let opts = QuadOptions::abs(1e-10).with_freq(100.0);
        let r = integrate_1d(|x| c((100.0 * x).cos()), 0.0, PI, &opts);
        let exact = (100.0 * PI).sin() / 100.0;
        assert!(r.converged);
        assert!((r.value.re - exact).abs() <= 1e-10, "{} vs {}", r.value.re, exact);
    }

    #[test]
    fn reversed_interval() {
        let r = integrate_1d(|x| c(x * x), 1.0, 0.0, &QuadOptions::abs(1e-12));
        assert!((r.value.re + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularities() {
        // int_0^1 x^{-1/2} (1-x)^{-1/2} dx = pi
        let r = integrate_endpoint_singular(
            |p| c(p.from_a.powf(-0.5) * p.to_b.powf(-0.5)),
            0.0,
            1.0,
            Some(c(-0.5)),
            Some(c(-0.5)),
            &QuadOptions::abs(1e-12),
        );
        assert!(r.converged);
        assert!((r.value.re - PI).abs() < 1e-11, "{}", r.value.re);
    }

    #[test]
    fn log_oscillating_endpoint() {
        // int_0^1 x^{-1/2 + 5i} dx = 1 / (1/2 + 5i)
        let s = Complex64::new(-0.5, 5.0);
        let opts = QuadOptions::abs(1e-12).with_freq(5.0);
        let r = integrate_endpoint_singular(|p| (s * p.from_a.ln()).exp(), 0.0, 1.0, Some(s), None, &opts);
        let exact = 1.0 / (s + 1.0);
        assert!((r.value - exact).norm() < 1e-11, "{} vs {}", r.value, exact);
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let opts = QuadOptions::abs(1e-14).with_max_evals(200);
        let r = integrate_1d(|x| c(x.abs().powf(-0.9)), -1.0, 1.0, &opts);
        assert!(!r.converged);
        assert!(r.ok().is_err());
    }
}
