//! Vectors in the line and circle models, composed lazily from a few atoms.
//!
//! A [`ModelVector`] is a finite sum of terms `scale * pi(g) atom`, all in the
//! same representation. Evaluation goes through the even homogeneous function
//! `f` on `R^2 \ 0` behind each atom: the line chart is `v(x) = f(x, 1)` and
//! the circle chart is `F(theta) = f(cos(theta/2), sin(theta/2))`, so that
//!
//! ```text
//! pi(g) v(x) = sgn(det g)^eps |c'x + d'|^{lambda-1} v((a'x + b') / (c'x + d')),
//! ```
//!
//! with `g^{-1} = (a', b'; c', d')` normalized to `|det| = 1`. This reproduces
//! `pi(diag(a^{-1}, a)) v(x) = |a|^{1-lambda} v(a^2 x)` and
//! `pi((1,-1;0,1)) v(x) = v(x + 1)`, and is a homomorphism because it is the
//! pullback action on homogeneous functions.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{line_to_angle, mobius_angle, ExtReal, GroupElement};
use crate::quadrature::{integrate_pieces, QuadOptions, QuadResult};
use crate::repn::RepnParam;

/// `∫_{-1}^{1} exp(-1/(1-y^2)) dy`.
pub const MOLLIFIER_MASS: f64 = 0.443_993_816_168_079_437_8;
/// Normalizing constant of `alpha(t) = C exp(-1/(1-(10t)^2))`, so `∫ alpha = 1`.
pub const ALPHA_C: f64 = 22.522_836_210_435_810_10;
/// `‖alpha‖^2_{L^2}`.
pub const ALPHA_NORM_SQ: f64 = 6.751_168_130_096_975_290;
/// `∫ t^2 alpha(t) dt`.
pub const ALPHA_SECOND_MOMENT: f64 = 0.001_581_136_362_637_982_302;
/// Half-width of `supp(alpha)`.
pub const ALPHA_HALF_WIDTH: f64 = 0.1;

/// Coefficients (ascending) of the polynomials `P_j` with
/// `phi^{(j)}(y) = P_j(y) (1-y^2)^{-2j} phi(y)`, `phi(y) = exp(-1/(1-y^2))`.
pub fn mollifier_derivative_polys(n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for j in 0..n {
        let p = &out[j];
        // P' (1-y^2)^2 + 4 j y P (1-y^2) - 2 y P
        let mut next = vec![0.0; p.len() + 3];
        for (i, &c) in p.iter().enumerate() {
            if i > 0 {
                let d = c * i as f64;
                next[i - 1] += d;
                next[i + 1] -= 2.0 * d;
                next[i + 3] += d;
            }
            let m = 4.0 * j as f64;
            next[i + 1] += m * c - 2.0 * c;
            next[i + 3] -= m * c;
        }
        while next.len() > 1 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        out.push(next);
    }
    out
}

/// `phi^{(j)}(y)` for the standard mollifier `phi(y) = exp(-1/(1-y^2))` on `(-1, 1)`.
pub fn mollifier_derivative(poly: &[f64], j: usize, y: f64) -> f64 {
    if y.abs() >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - y * y;
    let p = poly.iter().rev().fold(0.0, |acc, &c| acc * y + c);
    if p == 0.0 {
        return 0.0;
    }
    let log_mag = -1.0 / u - 2.0 * j as f64 * u.ln() + p.abs().ln();
    p.signum() * log_mag.exp()
}

/// Building blocks of model vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// `phi^{(deriv)}((x - center) / half_width)` on the line, with `phi` the
    /// standard mollifier; `deriv = 0` gives a bump.
    Bump {
        center: f64,
        half_width: f64,
        deriv: usize,
        poly: Vec<f64>,
    },
    /// `x^m` on the line; needs an integer homogeneous degree `>= m`.
    Monomial { m: u32 },
    /// `e^{i n theta / 2}` in the circle chart (`e^{i n psi}` on the unit
    /// circle of `R^2`); `n` even. `n = 0` is the spherical vector.
    CircleExp { n: i64 },
}

impl Atom {
    pub fn bump(center: f64, half_width: f64, deriv: usize) -> Atom {
        let poly = mollifier_derivative_polys(deriv).pop().expect("nonempty");
        Atom::Bump {
            center,
            half_width,
            deriv,
            poly,
        }
    }

    /// Support on the line, if compact.
    pub fn line_support(&self) -> Option<(f64, f64)> {
        match *self {
            Atom::Bump {
                center, half_width, ..
            } => Some((center - half_width, center + half_width)),
            _ => None,
        }
    }

    fn eval_line(&self, x: f64) -> f64 {
        match self {
            Atom::Bump {
                center,
                half_width,
                deriv,
                poly,
            } => mollifier_derivative(poly, *deriv, (x - center) / half_width),
            Atom::Monomial { m } => x.powi(*m as i32),
            Atom::CircleExp { .. } => unreachable!("circle atoms evaluate homogeneously"),
        }
    }

    /// The homogeneous extension of degree `lambda - 1` at `p`.
    fn eval_hom(&self, p: [f64; 2], lambda: Complex64, degree: Option<i64>) -> Complex64 {
        match self {
            Atom::CircleExp { n } => {
                let r2 = p[0] * p[0] + p[1] * p[1];
                let psi = p[1].atan2(p[0]);
                let mag = ((lambda - 1.0) * (0.5 * r2.ln())).exp();
                mag * Complex64::from_polar(1.0, *n as f64 * psi)
            }
            Atom::Monomial { m } => {
                let d = degree.expect("checked at construction");
                Complex64::new(p[0].powi(*m as i32) * p[1].powi((d - *m as i64) as i32), 0.0)
            }
            Atom::Bump { .. } => {
                if p[1] == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let x = p[0] / p[1];
                let v = self.eval_line(x);
                if v == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                ((lambda - 1.0) * p[1].abs().ln()).exp() * v
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            Atom::Bump {
                center,
                half_width,
                deriv,
                ..
            } => {
                if *deriv == 0 {
                    format!("bump({center}±{half_width})")
                } else {
                    format!("bump^({deriv})({center}±{half_width})")
                }
            }
            Atom::Monomial { m } => format!("x^{m}"),
            Atom::CircleExp { n } => format!("e^(i{n}θ/2)"),
        }
    }
}

/// An arc of the circle chart, `[start, start + len]` modulo `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

impl Arc {
    pub fn full() -> Arc {
        Arc { start: 0.0, len: TAU }
    }

    /// The image of a line interval `[a, b]`; `theta` decreases along the line.
    pub fn from_interval(a: f64, b: f64) -> Arc {
        let t0 = line_to_angle(ExtReal::Finite(b));
        let t1 = line_to_angle(ExtReal::Finite(a));
        Arc {
            start: t0,
            len: t1 - t0,
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        if self.len >= TAU {
            return true;
        }
        (theta - self.start).rem_euclid(TAU) <= self.len
    }

    /// Image under the Möbius action, widened by `pad` at both ends.
    pub fn transform(&self, g: &GroupElement, pad: f64) -> Arc {
        if self.len >= TAU {
            return *self;
        }
        let s = mobius_angle(g, self.start);
        let e = mobius_angle(g, (self.start + self.len).rem_euclid(TAU));
        let (start, end) = if g.det() > 0.0 { (s, e) } else { (e, s) };
        let len = (end - start).rem_euclid(TAU);
        Arc {
            start: (start - pad).rem_euclid(TAU),
            len: (len + 2.0 * pad).min(TAU),
        }
    }

    /// The arc as a line interval, if it avoids `theta = 0` (the point at infinity).
    pub fn line_interval(&self) -> Option<(f64, f64)> {
        if self.len >= TAU || self.start == 0.0 || self.start + self.len >= TAU {
            return None;
        }
        let cot = |t: f64| (0.5 * t).cos() / (0.5 * t).sin();
        Some((cot(self.start + self.len), cot(self.start)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub atom: Atom,
    /// Accumulated group element; the term is `scale * pi(g) atom`.
    pub g: GroupElement,
    pub scale: Complex64,
}

/// A vector in the line/circle model of `param`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelVector {
    pub param: RepnParam,
    pub terms: Vec<Term>,
}

impl ModelVector {
    pub fn zero(param: RepnParam) -> Self {
        ModelVector {
            param,
            terms: Vec::new(),
        }
    }

    pub fn from_atom(param: RepnParam, atom: Atom) -> Result<Self> {
        if let Atom::Monomial { m } = atom {
            match param.homogeneous_degree() {
                Some(d) if d >= m as i64 => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "x^{m} has no homogeneous extension in {param}"
                    )))
                }
            }
        }
        if let Atom::CircleExp { n } = atom {
            if n % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "e^(i{n}θ/2) is not even on R^2"
                )));
            }
        }
        Ok(ModelVector {
            param,
            terms: vec![Term {
                atom,
                g: GroupElement::identity(),
                scale: Complex64::new(1.0, 0.0),
            }],
        })
    }

    /// The mollifier `alpha`, supported in `[-0.1, 0.1]` with unit mass.
    pub fn alpha(param: RepnParam) -> Self {
        Self::from_atom(param, Atom::bump(0.0, ALPHA_HALF_WIDTH, 0))
            .expect("bumps live in every model")
            .scaled(Complex64::new(ALPHA_C, 0.0))
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for t in &mut self.terms {
            t.scale *= c;
        }
        self
    }

    pub fn add(&self, other: &ModelVector) -> Result<ModelVector> {
        self.check_model(&other.param)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    fn check_model(&self, param: &RepnParam) -> Result<()> {
        if self.param.same_action(param) {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                vector: self.param.to_string(),
                param: param.to_string(),
            })
        }
    }

    /// `pi(g) v`; the residual group elements are multiplied out eagerly.
    pub fn act(&self, param: &RepnParam, g: &GroupElement) -> Result<ModelVector> {
        self.check_model(param)?;
        let mut out = self.clone();
        for t in &mut out.terms {
            t.g = *g * t.g;
        }
        Ok(out)
    }

    /// Value of the homogeneous function at `p`.
    pub fn eval_hom(&self, p: [f64; 2]) -> Complex64 {
        let lambda = self.param.weight();
        let degree = self.param.homogeneous_degree();
        let eps = self.param.parity();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let h = t.g.inverse();
            let q = h.apply_vec(p);
            let mut v = t.atom.eval_hom(q, lambda, degree) * t.scale;
            if eps == 1 && t.g.det() < 0.0 {
                v = -v;
            }
            acc += v;
        }
        acc
    }

    /// Line-model value `v(x)`.
    pub fn eval_line(&self, x: f64) -> Complex64 {
        self.eval_hom([x, 1.0])
    }

    /// Circle-model value `F(theta)`.
    pub fn eval_circle(&self, theta: f64) -> Complex64 {
        let psi = 0.5 * theta;
        self.eval_hom([psi.cos(), psi.sin()])
    }

    /// Tracked support of each term as an arc of the circle chart.
    pub fn support_arcs(&self) -> Vec<Arc> {
        self.terms
            .iter()
            .map(|t| match t.atom.line_support() {
                Some((a, b)) => Arc::from_interval(a, b).transform(&t.g, 1e-12),
                None => Arc::full(),
            })
            .collect()
    }

    /// Hull of the support on the line, if every term is compactly supported
    /// away from infinity.
    pub fn line_support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for arc in self.support_arcs() {
            let (a, b) = arc.line_interval()?;
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if lo > hi {
            // no terms
            return Some((0.0, 0.0));
        }
        Some((lo, hi))
    }

    /// Breakpoints on the line: ends of each term's support, sorted.
    pub fn line_breakpoints(&self) -> Option<Vec<f64>> {
        let mut pts = Vec::new();
        for arc in self.support_arcs() {
            let (a, b) = arc.line_interval()?;
            pts.push(a);
            pts.push(b);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Some(pts)
    }

    /// Intervals between consecutive line breakpoints on which the vector
    /// can be nonzero.
    pub fn line_pieces(&self) -> Option<Vec<(f64, f64)>> {
        let pts = self.line_breakpoints()?;
        let arcs = self.support_arcs();
        let hulls: Vec<(f64, f64)> = arcs.iter().filter_map(|a| a.line_interval()).collect();
        Some(
            pts.windows(2)
                .map(|w| (w[0], w[1]))
                .filter(|&(a, b)| {
                    let mid = 0.5 * (a + b);
                    b > a && hulls.iter().any(|&(lo, hi)| lo <= mid && mid <= hi)
                })
                .collect(),
        )
    }

    /// As [`Self::line_pieces`], in the circle chart on `[0, 2 pi]`.
    pub fn circle_pieces(&self) -> Vec<(f64, f64)> {
        let pts = self.circle_breakpoints();
        let arcs = self.support_arcs();
        pts.windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|&(a, b)| {
                let mid = 0.5 * (a + b);
                b > a && arcs.iter().any(|arc| arc.contains(mid))
            })
            .collect()
    }

    fn circle_breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![0.0, TAU];
        for arc in self.support_arcs() {
            if arc.len < TAU {
                pts.push(arc.start);
                pts.push((arc.start + arc.len).rem_euclid(TAU));
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫ |v(x)|^2 dx`, integrated on the line when the support is compact and
    /// otherwise in the circle chart, where it reads
    /// `(1/2) ∫ |F|^2 |sin(theta/2)|^{-2 Re lambda} dtheta`.
    pub fn l2_norm_sq(&self, opts: &QuadOptions) -> QuadResult {
        if let Some(pts) = self.line_breakpoints() {
            if pts.len() < 2 {
                return QuadResult::exact(Complex64::new(0.0, 0.0));
            }
            return integrate_pieces(|x| Complex64::new(self.eval_line(x).norm_sqr(), 0.0), &pts, opts);
        }
        let re = self.param.weight().re;
        let pts = self.circle_breakpoints();
        let r = integrate_pieces(
            |t| {
                let s = (0.5 * t).sin().abs();
                Complex64::new(self.eval_circle(t).norm_sqr() * s.powf(-2.0 * re), 0.0)
            },
            &pts,
            opts,
        );
        r.scaled(Complex64::new(0.5, 0.0))
    }

    /// `(∫ |v|^2 dx)^{1/2}`.
    pub fn l2_norm(&self, opts: &QuadOptions) -> Result<f64> {
        let r = self.l2_norm_sq(opts).ok()?;
        Ok(r.value.re.max(0.0).sqrt())
    }

    /// `∫ x^m v(x) dx`: on the line when the support is compact there, else
    /// in the circle chart, where with `ψ = θ/2` it reads
    /// `(1/2) ∫ cos^m ψ sin^{-m-1-λ} ψ F(θ) dθ`.
    pub fn moment_result(&self, m: u32, opts: &QuadOptions) -> Result<QuadResult> {
        self.weighted_moment(m, opts, |z| z)
    }

    fn weighted_moment(&self, m: u32, opts: &QuadOptions, post: impl Fn(Complex64) -> Complex64) -> Result<QuadResult> {
        if let Some(pts) = self.line_breakpoints() {
            if pts.len() < 2 {
                return Ok(QuadResult::exact(Complex64::new(0.0, 0.0)));
            }
            return Ok(integrate_pieces(|x| post(self.eval_line(x) * x.powi(m as i32)), &pts, opts));
        }
        let e = -self.param.weight() - (m as f64 + 1.0);
        if e.re < 0.0 {
            return Err(Error::Divergent(format!(
                "moment {m} diverges at infinity for a vector in {}",
                self.param
            )));
        }
        let pts = self.circle_breakpoints();
        let r = integrate_pieces(
            |t| {
                let (c, s) = ((0.5 * t).cos(), (0.5 * t).sin());
                if s <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                post((e * s.ln()).exp() * c.powi(m as i32) * self.eval_circle(t) * 0.5)
            },
            &pts,
            opts,
        );
        Ok(r)
    }

    pub fn moment(&self, m: u32, opts: &QuadOptions) -> Result<Complex64> {
        Ok(self.moment_result(m, opts)?.ok()?.value)
    }

    /// `∫ |x^m v(x)| dx`, the natural scale for a moment residual.
    pub fn abs_moment(&self, m: u32, opts: &QuadOptions) -> Result<f64> {
        let r = self.weighted_moment(m, opts, |z| Complex64::new(z.norm(), 0.0))?;
        Ok(r.ok()?.value.re)
    }

    /// Moments `0..=k-2` as residuals relative to `∫ |x^m v|`:
    /// `|∫ x^m v| / max(∫ |x^m v|, 1)`.
    pub fn moment_residuals(&self, k: i64, opts: &QuadOptions) -> Result<Vec<f64>> {
        (0..=(k - 2).max(0) as u32)
            .map(|m| {
                let scale = self.abs_moment(m, &QuadOptions { abs_tol: 0.0, rel_tol: 1e-6, ..*opts })?.max(1.0);
                // the absolute tolerance is relative to the same scale
                // Cancellation between terms puts a roundoff floor of order
                // 1e-11 * scale under the estimate for large k; the value is
                // still accurate to that floor, so the convergence flag is not
                // required here.
                let v = self.moment_result(m, &QuadOptions { abs_tol: opts.abs_tol * scale, ..*opts })?;
                Ok(v.value.norm() / scale)
            })
            .collect()
    }

    /// Whether the moments `0..=k-2` vanish to within `tol` (relative to
    /// `max(1, ∫ |x^m v|)`), i.e. `v` lies in `D_k^*`.
    pub fn in_dk_star(&self, k: i64, tol: f64) -> bool {
        let opts = QuadOptions::abs(tol * 1e-3).with_max_evals(200_000);
        match self.moment_residuals(k, &opts) {
            Ok(r) => r.iter().all(|&x| x <= tol),
            Err(_) => false,
        }
    }

    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return format!("0 in {}", self.param);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let g = if t.g == GroupElement::identity() {
                    String::new()
                } else {
                    format!("·π{}", t.g)
                };
                format!("({:.6}){}{}", t.scale, g, t.atom.describe())
            })
            .collect();
        format!("{} in {}", parts.join(" + "), self.param)
    }
}

impl fmt::Display for ModelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The invariant pairing between `H_{k-2}` and `H_{-k}` (more generally
/// between weights `lambda` and `-lambda`): `∫ f h dx` on the line when
/// either factor is compactly supported, otherwise `(1/2) ∫ F H dtheta`.
pub fn pairing(f: &ModelVector, h: &ModelVector, opts: &QuadOptions) -> Result<QuadResult> {
    let s = f.param.weight() + h.param.weight();
    if s.norm() > 1e-12 {
        return Err(Error::Divergent(format!(
            "pairing needs opposite weights, got {} and {}",
            f.param, h.param
        )));
    }
    let pts = match (f.line_breakpoints(), h.line_breakpoints()) {
        (Some(a), Some(b)) => {
            // overlap of the two hulls only
            let lo = a.first().copied().unwrap_or(0.0).max(b.first().copied().unwrap_or(0.0));
            let hi = a.last().copied().unwrap_or(0.0).min(b.last().copied().unwrap_or(0.0));
            if lo >= hi {
                return Ok(QuadResult::exact(Complex64::new(0.0, 0.0)));
            }
            let mut pts: Vec<f64> = a.into_iter().chain(b).filter(|&x| x > lo && x < hi).collect();
            pts.push(lo);
            pts.push(hi);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            Some(pts)
        }
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    };
    match pts {
        Some(p) if p.len() < 2 => Ok(QuadResult::exact(Complex64::new(0.0, 0.0))),
        Some(p) => Ok(integrate_pieces(|x| f.eval_line(x) * h.eval_line(x), &p, opts)),
        None => {
            let mut p = f.circle_breakpoints();
            p.extend(h.circle_breakpoints());
            p.sort_by(f64::total_cmp);
            p.dedup();
            let r = integrate_pieces(|t| f.eval_circle(t) * h.eval_circle(t), &p, opts);
            Ok(r.scaled(Complex64::new(0.5, 0.0)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::mobius;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn derivative_polys_match_finite_differences() {
        let polys = mollifier_derivative_polys(4);
        let y = 0.37;
        let h = 1e-4;
        for j in 1..=4 {
            let fd = (mollifier_derivative(&polys[j - 1], j - 1, y + h)
                - mollifier_derivative(&polys[j - 1], j - 1, y - h))
                / (2.0 * h);
            let exact = mollifier_derivative(&polys[j], j, y);
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "j={j}: {fd} vs {exact}");
        }
    }

    #[test]
    fn alpha_constants() {
        let a = ModelVector::alpha(RepnParam::unitary(0.0, 0));
        let o = QuadOptions::abs(1e-13);
        assert!((a.moment(0, &o).unwrap().re - 1.0).abs() < 1e-12);
        assert!(a.moment(1, &o).unwrap().norm() < 1e-14);
        assert!((a.moment(2, &o).unwrap().re - ALPHA_SECOND_MOMENT).abs() < 1e-13);
        assert!((a.l2_norm(&o).unwrap().powi(2) - ALPHA_NORM_SQ).abs() < 1e-11);
        assert!((ALPHA_C - 10.0 / MOLLIFIER_MASS).abs() < 1e-13);
    }

    #[test]
    fn diagonal_and_translation_formulas() {
        let tau = Complex64::new(0.0, 3.0);
        let p = RepnParam::principal(tau, 0);
        let a = ModelVector::alpha(p);
        let t = 4.0;
        let v = a.act(&p, &GroupElement::a_t(t).unwrap()).unwrap();
        for &x in &[0.0, 0.01, -0.02] {
            let want = ((1.0 - tau) / 2.0 * t.ln()).exp() * a.eval_line(t * x);
            assert!((v.eval_line(x) - want).norm() < 1e-12);
        }
        let w = a.act(&p, &GroupElement::unipotent_shift()).unwrap();
        assert!((w.eval_line(-1.0) - a.eval_line(0.0)).norm() < 1e-13);
        let hk = RepnParam::homogeneous(2).unwrap(); // k = 4
        let b = ModelVector::alpha(hk);
        let v = b.act(&hk, &GroupElement::a_t(t).unwrap()).unwrap();
        assert!((v.eval_line(0.01) - b.eval_line(0.04) * t.powf(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn mismatch_is_rejected() {
        let a = ModelVector::alpha(RepnParam::unitary(1.0, 0));
        let r = a.act(&RepnParam::unitary(2.0, 0), &GroupElement::identity());
        assert!(matches!(r, Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn chart_consistency() {
        // F(theta) = v(cot(theta/2)) |sin(theta/2)|^{lambda-1}
        let lam = Complex64::new(0.0, 2.5);
        let p = RepnParam::principal(lam, 1);
        let g = GroupElement::new(0.3, 1.2, -0.7, 0.9).unwrap();
        let v = ModelVector::alpha(p).act(&p, &g).unwrap();
        for th in [0.4f64, 1.3, 2.9, 4.4, 6.0] {
            let x = (0.5 * th).cos() / (0.5 * th).sin();
            let s = (0.5 * th).sin().abs();
            let want = v.eval_line(x) * ((lam - 1.0) * s.ln()).exp();
            assert!((v.eval_circle(th) - want).norm() < 1e-9 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn support_transport() {
        let p = RepnParam::unitary(0.0, 0);
        let g = GroupElement::new(1.0, 2.0, -1.0, 1.5).unwrap();
        let v = ModelVector::alpha(p).act(&p, &g).unwrap();
        let arc = v.support_arcs()[0];
        for i in 0..=20 {
            let x = -0.1 + 0.01 * i as f64;
            let y = mobius(&g, ExtReal::Finite(x));
            assert!(arc.contains(line_to_angle(y)));
        }
    }

    #[test]
    fn monomial_pairs_to_zero_off_dk_star_complement() {
        // alpha(x) - alpha(x - 1) has zero mass, so pairs to 0 with 1 in H_0 (k = 2)
        let hk = RepnParam::homogeneous(-2).unwrap();
        let a = ModelVector::alpha(hk);
        let b = a.act(&hk, &GroupElement::translation(1.0)).unwrap().scaled(c(-1.0));
        let w = a.add(&b).unwrap();
        assert!(w.in_dk_star(2, 1e-10));
        assert!(!a.in_dk_star(2, 1e-10));
        let one = ModelVector::from_atom(RepnParam::homogeneous(0).unwrap(), Atom::Monomial { m: 0 }).unwrap();
        let r = pairing(&one, &w, &QuadOptions::abs(1e-12)).unwrap();
        assert!(r.value.norm() < 1e-12);
    }
}
