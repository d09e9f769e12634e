//! Bump test vectors concentrated near `(0, 1)` at scale `1/T`.
//!
//! The left vector is a rescaled mollifier at `0`; the right one is the same
//! bump moved to `1` (plus, for discrete series, a companion at `1 + M/T`
//! that cancels the low moments).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::quadrature::{integrate_1d, QuadOptions};
use crate::repn::RepnParam;
use crate::vector::{mollifier_derivative, Atom, ModelVector, ALPHA_HALF_WIDTH};

pub use crate::vector::{ALPHA_C, ALPHA_NORM_SQ, ALPHA_SECOND_MOMENT, MOLLIFIER_MASS};

/// Default offset of the moment-matched companion. See [`crate::harness`] for
/// the scan that justifies it.
pub const DEFAULT_M: f64 = 4.0;

/// Condition number above which [`moment_system`] refuses to answer.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct TestPair {
    pub left: ModelVector,
    pub right: ModelVector,
    pub t: f64,
    pub params: [RepnParam; 2],
    /// Offset of the companion bump; discrete-series pairs only.
    pub m: Option<f64>,
    /// The two components `alpha_T` and `alpha'_T` of `right`, discrete-series
    /// pairs only.
    pub right_parts: Option<(ModelVector, ModelVector)>,
}

impl TestPair {
    /// `‖left‖^2 ‖right‖^2`, the squared norm of `left ⊗ right`.
    pub fn tensor_norm_sq(&self, opts: &QuadOptions) -> Result<f64> {
        let a = self.left.l2_norm_sq(opts).ok()?.value.re;
        let b = self.right.l2_norm_sq(opts).ok()?.value.re;
        Ok(a * b)
    }

    /// `∫∫ left(x) right(y) dx dy`.
    pub fn mass(&self, opts: &QuadOptions) -> Result<Complex64> {
        Ok(self.left.moment(0, opts)? * self.right.moment(0, opts)?)
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// T^z for real T > 0 and complex z.
fn tpow(t: f64, z: Complex64) -> Complex64 {
    (z * t.ln()).exp()
}

/// The element moving a bump at `0` of width `0.1` to `1` with width `0.1/T`.
fn to_one(t: f64) -> Result<GroupElement> {
    Ok(GroupElement::translation(1.0) * GroupElement::a_t(t)?)
}

/// Principal-series pair with `eps = 0` in both slots.
pub fn maass_pair(t: f64, tau: Complex64, tau_p: Complex64) -> Result<TestPair> {
    maass_pair_eps(t, tau, 0, tau_p, 0)
}

/// `left = T^{1/2+τ} π_τ(a_T) α` in `V_τ`, `right` the same construction in
/// `V_{τ'}` moved to `1`.
pub fn maass_pair_eps(t: f64, tau: Complex64, eps: u8, tau_p: Complex64, eps_p: u8) -> Result<TestPair> {
    if !(t >= 1.0) {
        return Err(Error::InvalidArgument(format!("T must be >= 1, got {t}")));
    }
    let p = RepnParam::principal(tau, eps);
    let pp = RepnParam::principal(tau_p, eps_p);
    let left = ModelVector::alpha(p)
        .act(&p, &GroupElement::a_t(t)?)?
        .scaled(tpow(t, tau + 0.5));
    let right = ModelVector::alpha(pp)
        .act(&pp, &to_one(t)?)?
        .scaled(tpow(t, tau_p + 0.5));
    Ok(TestPair {
        left,
        right,
        t,
        params: [p, pp],
        m: None,
        right_parts: None,
    })
}

/// `w_T = T^{1/2} π_{k-2}(a_T) α = T^{(3-k)/2} α(T ·)`, as a representative in
/// `H_{k-2}` of a vector of `D_k`.
pub fn holo_wt(t: f64, k: i64) -> Result<ModelVector> {
    let p = RepnParam::discrete_quot(k)?;
    Ok(ModelVector::alpha(p)
        .act(&p, &GroupElement::a_t(t)?)?
        .scaled(real(t.sqrt())))
}

/// `∫_{-1}^{1} y^n exp(-1/(1-y^2)) dy` for `n = 0..=n_max`.
pub fn mollifier_moments(n_max: usize) -> Vec<f64> {
    let opts = QuadOptions::abs(1e-17).with_max_evals(200_000);
    let poly = [1.0];
    (0..=n_max)
        .map(|n| {
            if n % 2 == 1 {
                return 0.0;
            }
            // symmetric: twice the half-interval
            let r = integrate_1d(
                |y| real(y.powi(n as i32) * mollifier_derivative(&poly, 0, y)),
                0.0,
                1.0,
                &opts,
            );
            2.0 * r.value.re
        })
        .collect()
}

fn binom(n: usize, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// The solved moment system for the companion `alpha'`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    pub k: i64,
    pub m: f64,
    /// Coefficients of `psi_j((x - M)/0.1)`, `psi_j` the `j`-th derivative of
    /// the standard mollifier.
    pub coeffs: Vec<f64>,
    /// 1-norm condition number of the (lower triangular) system matrix in the
    /// centred, rescaled moment basis.
    pub condition: f64,
    pub alpha_prime: ModelVector,
}

fn cond_lower_triangular(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    // invert column by column by forward substitution
    let mut inv = vec![vec![0.0; n]; n];
    for col in 0..n {
        for row in 0..n {
            let mut acc = if row == col { 1.0 } else { 0.0 };
            for j in 0..row {
                acc -= a[row][j] * inv[j][col];
            }
            inv[row][col] = acc / a[row][row];
        }
    }
    let norm1 = |m: &Vec<Vec<f64>>| (0..n).map(|c| (0..n).map(|r| m[r][c].abs()).sum::<f64>()).fold(0.0, f64::max);
    norm1(&a.to_vec()) * norm1(&inv)
}

/// Solves `∫ x^m alpha' = -∫ x^m alpha` for `0 <= m <= k-2` with
/// `alpha' = Σ_j c_j psi_j((x - M)/0.1)`, `j = 0..=k-2`.
///
/// The conditions are imposed in the equivalent basis `((x - M)/0.1)^n`, where
/// the matrix `A_{nj} = 0.1 ∫ y^n psi_j(y) dy = 0.1 (-1)^j n!/(n-j)! mu_{n-j}`
/// is lower triangular.
pub fn moment_system(k: i64, m: f64) -> Result<MomentSystem> {
    let param = RepnParam::discrete_sub(k)?;
    if !(m >= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "M = {m} would let alpha' overlap alpha; need M >= 2"
        )));
    }
    let n = (k - 1) as usize;
    let h = ALPHA_HALF_WIDTH;
    let mu = mollifier_moments(n);
    let mut a = vec![vec![0.0; n]; n];
    for (row, a_row) in a.iter_mut().enumerate() {
        for (j, a_nj) in a_row.iter_mut().enumerate().take(row + 1) {
            let falling = ((row - j + 1)..=row).fold(1.0, |acc, i| acc * i as f64);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *a_nj = h * sign * falling * mu[row - j];
        }
    }
    let condition = cond_lower_triangular(&a);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    // b_n = -∫ ((x-M)/h)^n alpha(x) dx = -C h Σ_i binom(n,i) (-M/h)^{n-i} mu_i
    let shift = -m / h;
    let b: Vec<f64> = (0..n)
        .map(|row| {
            let s: f64 = (0..=row)
                .map(|i| binom(row, i) * shift.powi((row - i) as i32) * mu[i])
                .sum();
            -ALPHA_C * h * s
        })
        .collect();
    let mut coeffs = vec![0.0; n];
    for row in 0..n {
        let mut acc = b[row];
        for j in 0..row {
            acc -= a[row][j] * coeffs[j];
        }
        coeffs[row] = acc / a[row][row];
    }
    let mut alpha_prime = ModelVector::zero(param);
    for (j, &c) in coeffs.iter().enumerate() {
        let term = ModelVector::from_atom(param, Atom::bump(m, h, j))?.scaled(real(c));
        alpha_prime = alpha_prime.add(&term)?;
    }
    Ok(MomentSystem {
        k,
        m,
        coeffs,
        condition,
        alpha_prime,
    })
}

/// The companion `alpha'` supported in `[M - 0.1, M + 0.1]`.
pub fn moment_matched(k: i64, m: f64) -> Result<ModelVector> {
    Ok(moment_system(k, m)?.alpha_prime)
}

/// `left = w_T`, `right = T^{1/2} π_{-k}(n a_T)(alpha + alpha') = alpha_T + alpha'_T`,
/// with `n` moving `0` to `1`.
pub fn holo_pair(t: f64, k: i64, m: f64) -> Result<TestPair> {
    let left = holo_wt(t, k)?;
    let p = RepnParam::discrete_sub(k)?;
    let g = to_one(t)?;
    let s = real(t.sqrt());
    let alpha_t = ModelVector::alpha(p).act(&p, &g)?.scaled(s);
    let alpha_pt = moment_matched(k, m)?.act(&p, &g)?.scaled(s);
    let right = alpha_t.add(&alpha_pt)?;
    Ok(TestPair {
        left,
        right,
        t,
        params: [RepnParam::discrete_quot(k)?, p],
        m: Some(m),
        right_parts: Some((alpha_t, alpha_pt)),
    })
}
