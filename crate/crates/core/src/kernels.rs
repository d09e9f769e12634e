//! Invariant trilinear kernels `|x-y|^{a_xy} |x-z|^{a_xz} |y-z|^{a_yz} sgn^eps`.
//!
//! Exponents are kept as exact linear expressions in the three weights so the
//! scaling constraint `a_xy + a_xz + a_yz = (-3 - λ1 - λ2 - λ3)/2` can be
//! checked without tolerance.

use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::repn::{ExactWeight, RepnParam};

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qf(r: Q) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `c + Σ_i q_i Λ_i`, where `Λ_i` is the weight of slot `i` when it is not
/// rational (rational weights are folded into `c`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearExpr {
    pub c: Q,
    pub q: [Q; 3],
}

impl LinearExpr {
    fn zero() -> Self {
        LinearExpr {
            c: q(0, 1),
            q: [q(0, 1); 3],
        }
    }

    fn add(self, o: LinearExpr) -> LinearExpr {
        LinearExpr {
            c: self.c + o.c,
            q: [self.q[0] + o.q[0], self.q[1] + o.q[1], self.q[2] + o.q[2]],
        }
    }

    /// `coef * weight(slot)`.
    fn weight(slot: usize, w: &ExactWeight, coef: Q) -> LinearExpr {
        let mut e = LinearExpr::zero();
        match w {
            ExactWeight::Rational(r) => e.c = coef * r,
            ExactWeight::Symbolic(_) => e.q[slot] = coef,
        }
        e
    }

    pub fn value(&self, symbols: &[Complex64; 3]) -> Complex64 {
        let mut v = Complex64::new(qf(self.c), 0.0);
        for i in 0..3 {
            if self.q[i] != q(0, 1) {
                v += symbols[i] * qf(self.q[i]);
            }
        }
        v
    }
}

/// Exponents and sign parity of an invariant kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub a_xy: Complex64,
    pub a_xz: Complex64,
    pub a_yz: Complex64,
    pub parity: u8,
    pub params: [RepnParam; 3],
    exact: Option<[LinearExpr; 3]>,
}

impl KernelSpec {
    /// Exponents solving the equivariance constraints for the three labels:
    /// `a_ij = (-1 + λ_k - λ_i - λ_j)/2`; parity `ε1 + ε2 + ε3 mod 2`.
    pub fn solve(p1: RepnParam, p2: RepnParam, p3: RepnParam) -> KernelSpec {
        let params = [p1, p2, p3];
        let w: Vec<ExactWeight> = params.iter().map(|p| p.exact_weight()).collect();
        let half = q(1, 2);
        let expr = |i: usize, j: usize, k: usize| {
            let mut e = LinearExpr::zero();
            e.c = -half;
            e.add(LinearExpr::weight(k, &w[k], half))
                .add(LinearExpr::weight(i, &w[i], -half))
                .add(LinearExpr::weight(j, &w[j], -half))
        };
        let exact = [expr(0, 1, 2), expr(0, 2, 1), expr(1, 2, 0)];
        let symbols = Self::symbols_of(&params);
        let parity = params.iter().map(|p| p.parity()).sum::<u8>() % 2;
        let spec = KernelSpec {
            a_xy: exact[0].value(&symbols),
            a_xz: exact[1].value(&symbols),
            a_yz: exact[2].value(&symbols),
            parity,
            params,
            exact: Some(exact),
        };
        debug_assert!(spec.scaling_sum_holds());
        spec
    }

    fn symbols_of(params: &[RepnParam; 3]) -> [Complex64; 3] {
        [params[0].weight(), params[1].weight(), params[2].weight()]
    }

    pub fn exponents(&self) -> [Complex64; 3] {
        [self.a_xy, self.a_xz, self.a_yz]
    }

    /// Exact check of `Σ a = (-3 - Σ λ)/2`.
    pub fn scaling_sum_holds(&self) -> bool {
        let Some(e) = self.exact else {
            return false;
        };
        let sum = e[0].add(e[1]).add(e[2]);
        let mut want = LinearExpr::zero();
        want.c = q(-3, 2);
        for (i, p) in self.params.iter().enumerate() {
            want = want.add(LinearExpr::weight(i, &p.exact_weight(), q(-1, 2)));
        }
        sum == want
    }

    /// Exact exponent expressions, absent for perturbed kernels.
    pub fn exact(&self) -> Option<[LinearExpr; 3]> {
        self.exact
    }

    /// Sum of the three exponents.
    pub fn exponent_sum(&self) -> Complex64 {
        self.a_xy + self.a_xz + self.a_yz
    }

    /// A kernel with one exponent shifted by `delta`, no longer invariant.
    /// Only meant as a negative control.
    pub fn perturbed(&self, which: usize, delta: Complex64) -> KernelSpec {
        let mut k = *self;
        match which {
            0 => k.a_xy += delta,
            1 => k.a_xz += delta,
            _ => k.a_yz += delta,
        }
        k.exact = None;
        k
    }

    pub fn with_parity(mut self, parity: u8) -> KernelSpec {
        self.parity = parity % 2;
        self
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K[a_xy={:.6}, a_xz={:.6}, a_yz={:.6}, eps={}]",
            self.a_xy, self.a_xz, self.a_yz, self.parity
        )
    }
}

/// Exponent solver for three labels (same as [`KernelSpec::solve`]).
pub fn solve_exponents(p1: RepnParam, p2: RepnParam, p3: RepnParam) -> KernelSpec {
    KernelSpec::solve(p1, p2, p3)
}

/// Kernel on `H_{k-2} × H_{-k} × V_{-λ, ε}`:
/// `a_xy = (-1-λ)/2`, `a_xz = (-1+λ)/2 - k + 1`, `a_yz = (-1+λ)/2 + k - 1`.
pub fn discrete_kernel(k: i64, lambda: Complex64) -> Result<KernelSpec> {
    discrete_kernel_eps(k, lambda, 0)
}

pub fn discrete_kernel_eps(k: i64, lambda: Complex64, eps: u8) -> Result<KernelSpec> {
    let spec = KernelSpec::solve(
        RepnParam::discrete_quot(k)?,
        RepnParam::discrete_sub(k)?,
        RepnParam::principal(-lambda, eps),
    );
    // regression gate: the generic solver must reproduce the closed form
    let half = Complex64::new(0.5, 0.0);
    let kk = k as f64;
    let want = [
        (-1.0 - lambda) * half,
        (lambda - 1.0) * half - kk + 1.0,
        (lambda - 1.0) * half + kk - 1.0,
    ];
    for (a, b) in spec.exponents().iter().zip(want) {
        if (a - b).norm() > 1e-12 * (1.0 + b.norm()) {
            return Err(Error::InvalidArgument(format!(
                "exponent solver disagrees with the closed form: {a} vs {b}"
            )));
        }
    }
    Ok(spec)
}

fn pow_abs(base: f64, s: Complex64) -> Complex64 {
    (s * base.ln()).exp()
}

/// Orientation `∏_{i<j} sgn(x_i - x_j)`; ascending triples give `-1`.
pub fn orientation(x: f64, y: f64, z: f64) -> f64 {
    (x - y).signum() * (x - z).signum() * (y - z).signum()
}

/// Kernel value at pairwise distinct `(x, y, z)`.
pub fn eval_kernel(spec: &KernelSpec, x: f64, y: f64, z: f64) -> Result<Complex64> {
    let (dxy, dxz, dyz) = ((x - y).abs(), (x - z).abs(), (y - z).abs());
    if dxy == 0.0 || dxz == 0.0 || dyz == 0.0 {
        return Err(Error::SingularPoint(format!("({x}, {y}, {z})")));
    }
    let mut v = pow_abs(dxy, spec.a_xy) * pow_abs(dxz, spec.a_xz) * pow_abs(dyz, spec.a_yz);
    if spec.parity == 1 {
        v *= orientation(x, y, z);
    }
    Ok(v)
}

/// Kernel evaluation without the coincidence check (returns non-finite
/// values on diagonals); for inner quadrature loops.
#[inline]
pub(crate) fn eval_kernel_unchecked(spec: &KernelSpec, x: f64, y: f64, z: f64) -> Complex64 {
    let l = spec.a_xy * (x - y).abs().ln() + spec.a_xz * (x - z).abs().ln() + spec.a_yz * (y - z).abs().ln();
    let v = l.exp();
    if spec.parity == 1 {
        v * orientation(x, y, z)
    } else {
        v
    }
}

/// Orientation of three points of the circle chart, compatible with
/// [`orientation`] under `x = cot(theta/2)`.
pub fn circle_orientation(t1: f64, t2: f64, t3: f64) -> f64 {
    let s = (0.5 * (t2 - t1)).sin() * (0.5 * (t3 - t2)).sin() * (0.5 * (t1 - t3)).sin();
    -s.signum()
}

/// The kernel on chordal distances `2|sin((θ_i - θ_j)/2)|`.
pub fn circle_kernel(spec: &KernelSpec, t1: f64, t2: f64, t3: f64) -> Result<Complex64> {
    let chord = |a: f64, b: f64| 2.0 * (0.5 * (a - b)).sin().abs();
    let (c12, c13, c23) = (chord(t1, t2), chord(t1, t3), chord(t2, t3));
    if c12 < 1e-300 || c13 < 1e-300 || c23 < 1e-300 {
        return Err(Error::SingularPoint(format!("angles ({t1}, {t2}, {t3})")));
    }
    let mut v = pow_abs(c12, spec.a_xy) * pow_abs(c13, spec.a_xz) * pow_abs(c23, spec.a_yz);
    if spec.parity == 1 {
        v *= circle_orientation(t1, t2, t3);
    }
    Ok(v)
}

/// Leading-order argument of the kernel on the test-vector support,
/// `λ/(2T) (t1 (1 - 1/z) - t2 (1 + 1/(z-1))) + λ/2 (ln|z| + ln|z-1|)`.
pub fn phase_model(lambda: Complex64, t: f64, t1: f64, t2: f64, z: f64) -> Result<Complex64> {
    if z == 0.0 || z == 1.0 {
        return Err(Error::Domain(format!("phase model undefined at z = {z}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("T = {t} must be positive")));
    }
    let lin = t1 * (1.0 - 1.0 / z) - t2 * (1.0 + 1.0 / (z - 1.0));
    Ok(lambda / (2.0 * t) * lin + lambda / 2.0 * (z.abs().ln() + (z - 1.0).abs().ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn discrete_exponents() {
        let k = discrete_kernel(2, c(0.0, 0.0)).unwrap();
        assert_eq!(k.exponents(), [c(-0.5, 0.0), c(-1.5, 0.0), c(0.5, 0.0)]);
        let k = discrete_kernel(4, c(0.0, 2.0)).unwrap();
        let want = [c(-0.5, -1.0), c(-3.5, 1.0), c(2.5, 1.0)];
        for (a, b) in k.exponents().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(k.scaling_sum_holds());
        assert!((k.exponent_sum() - (c(-3.0, 0.0) + c(0.0, 2.0)) / 2.0).norm() < 1e-15);
        assert!(k.exact().unwrap()[0].q[2] == q(1, 2));
    }

    #[test]
    fn symmetric_principal() {
        let p = RepnParam::principal(c(0.0, 0.0), 0);
        let k = solve_exponents(p, p, p);
        assert_eq!(k.exponents(), [c(-0.5, 0.0); 3]);
        let k = solve_exponents(
            RepnParam::unitary(1.0, 0),
            RepnParam::unitary(2.0, 1),
            RepnParam::unitary(-5.0, 0),
        );
        assert!(k.exponents().iter().all(|a| (a.re + 0.5).abs() < 1e-15));
        assert_eq!(k.parity, 1);
        assert!(k.scaling_sum_holds());
        assert!(!k.perturbed(0, c(0.1, 0.0)).scaling_sum_holds());
    }

    #[test]
    fn kernel_values() {
        let k = discrete_kernel(2, c(0.0, 0.0)).unwrap();
        let v = eval_kernel(&k, 0.0, 1.0, 3.0).unwrap();
        assert!((v.re - 0.272_165_526_975_908_7).abs() < 1e-12);
        let v = eval_kernel(&k, 0.0, 1.0, 2.0).unwrap();
        assert!((v.re - 2f64.powf(-1.5)).abs() < 1e-15);
        let v = eval_kernel(&k.with_parity(1), 0.0, 1.0, 3.0).unwrap();
        assert!((v.re + 0.272_165_526_975_908_7).abs() < 1e-12);
        assert!(matches!(eval_kernel(&k, 1.0, 1.0, 3.0), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn circle_values() {
        let p = RepnParam::principal(c(0.0, 0.0), 0);
        let k = solve_exponents(p, p, p);
        let tau = std::f64::consts::TAU;
        let v = circle_kernel(&k, 0.0, tau / 3.0, 2.0 * tau / 3.0).unwrap();
        assert!((v.re - 3f64.powf(-0.75)).abs() < 1e-14);
        assert!(circle_kernel(&k, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn circle_orientation_matches_line() {
        let cot = |t: f64| (0.5 * t).cos() / (0.5 * t).sin();
        for (a, b, cc) in [(0.3, 1.9, 4.0), (5.0, 0.2, 2.2), (2.0, 6.1, 3.3)] {
            assert_eq!(circle_orientation(a, b, cc), orientation(cot(a), cot(b), cot(cc)));
        }
    }

    #[test]
    fn phase_examples() {
        let t = 50.0;
        let lam = c(0.0, t);
        let v = phase_model(lam, t, 0.0, 0.0, 10.0).unwrap();
        assert!((v - lam / 2.0 * 90f64.ln()).norm() < 1e-12);
        let v = phase_model(lam, t, 0.1, 1.0, 10.0).unwrap();
        let want = c(0.0, 0.5 * (0.1 * 0.9 - 10.0 / 9.0)) + lam / 2.0 * 90f64.ln();
        assert!((v - want).norm() < 1e-12);
        assert!((want.im - t / 2.0 * 90f64.ln() + 0.510_555_555_555_555_6).abs() < 1e-12);
        assert_eq!(phase_model(c(0.0, 0.0), 3.0, 0.4, 0.2, 7.0).unwrap(), c(0.0, 0.0));
        assert!(phase_model(lam, t, 0.0, 0.0, 1.0).is_err());
    }
}
