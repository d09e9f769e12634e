//! Analytic continuation of `∫ |t|^s sgn(t)^δ φ(t) dt` past `Re s = -1`.
//!
//! Near zero φ is replaced by a polynomial whose power integrals are known in
//! closed form; the rest is ordinary quadrature. The closed forms
//! `(1 + (-1)^{j+δ}) ρ^{s+j+1} / (s+j+1)` are the continuation, so the result
//! is analytic in `s` except at the poles `s + j + 1 = 0`.

use num_complex::Complex64;

use super::{integrate_pieces, QuadOptions, QuadResult};
use crate::error::{Error, Result};
use crate::series::Series;

/// Smallest `n >= 0` with `Re s + n > -1`: the number of Taylor terms that
/// must be subtracted for the remainder to be integrable.
pub fn subtraction_order(s: Complex64) -> usize {
    let mut n = 0usize;
    while s.re + n as f64 <= -1.0 {
        n += 1;
    }
    n
}

const POLE_TOL: f64 = 1e-12;

/// `∫_{-ρ}^{ρ} |t|^s sgn(t)^parity t^j dt`, continued analytically in `s`.
///
/// Errors with [`Error::RegularizationPole`] when `s + j + 1 = 0` and the
/// moment does not vanish by symmetry.
pub fn power_moment(s: Complex64, j: usize, parity: u8, rho: f64) -> Result<Complex64> {
    if (j + parity as usize) % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let e = s + (j as f64 + 1.0);
    if e.norm() < POLE_TOL {
        return Err(Error::RegularizationPole {
            s_re: s.re,
            s_im: s.im,
            j,
        });
    }
    Ok((e * rho.ln()).exp() * 2.0 / e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegOptions {
    /// Parity δ of the `sgn(t)^δ` factor.
    pub parity: u8,
    /// Target accuracy; also sets the finite-difference step.
    pub tol: f64,
    /// Half-width of the window in which φ is replaced by its polynomial.
    /// `None` picks `tol^{1/(n+2)}` clipped to the interval.
    pub window: Option<f64>,
    pub max_evals: usize,
}

impl Default for RegOptions {
    fn default() -> Self {
        RegOptions {
            parity: 0,
            tol: 1e-10,
            window: None,
            max_evals: super::DEFAULT_MAX_EVALS,
        }
    }
}

impl RegOptions {
    pub fn with_parity(mut self, parity: u8) -> Self {
        self.parity = parity % 2;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_window(mut self, rho: f64) -> Self {
        self.window = Some(rho);
        self
    }
}

fn check_poles(s: Complex64, n: usize, parity: u8) -> Result<()> {
    for j in 0..n {
        power_moment(s, j, parity, 1.0)?;
    }
    Ok(())
}

// Solves the small Vandermonde system in `u = t²` for the coefficients of the
// even interpolant through `(t_i, e_i)`. Gaussian elimination with partial
// pivoting; m is at most a dozen.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            let bc = b[col];
            b[row] -= bc * f;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= x[c] * a[row][c];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Taylor coefficients of φ at zero up to degree `2m`, from central
/// differences on `m` symmetric node pairs `± h i / m`.
///
/// Splitting φ into even and odd parts gives two Vandermonde systems in `t²`
/// of size `m + 1` and `m`; the interpolant agrees with the Taylor polynomial
/// up to `O(h^{2m+1-j})` in the `j`-th coefficient.
pub fn taylor_fd<F: Fn(f64) -> Complex64>(phi: &F, h: f64, m: usize) -> Series {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
    let f0 = phi(0.0);
    let nodes: Vec<f64> = (1..=m).map(|i| h * i as f64 / m as f64).collect();
    let vals: Vec<(Complex64, Complex64)> = nodes.iter().map(|&t| (phi(t), phi(-t))).collect();
    // even part: E(t) - f0 = sum_{i=1}^{m} c_{2i} t^{2i}
    let a_even: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&t| (1..=m).map(|i| (t / h).powi(2 * i as i32)).collect())
        .collect();
    let b_even: Vec<Complex64> = vals.iter().map(|(p, q)| (p + q) * 0.5 - f0).collect();
    let ce = solve_dense(a_even, b_even);
    // odd part: O(t) = sum_{i=0}^{m-1} c_{2i+1} t^{2i+1}
    let a_odd: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&t| (0..m).map(|i| (t / h).powi(2 * i as i32 + 1)).collect())
        .collect();
    let b_odd: Vec<Complex64> = vals.iter().map(|(p, q)| (p - q) * 0.5).collect();
    let co = solve_dense(a_odd, b_odd);
    coeffs[0] = f0;
    for i in 1..=m {
        coeffs[2 * i] = ce[i - 1] / h.powi(2 * i as i32);
    }
    for i in 0..m {
        coeffs[2 * i + 1] = co[i] / h.powi(2 * i as i32 + 1);
    }
    Series { coeffs }
}

/// `Σ_j p_j ∫_{-ρ}^{ρ} |t|^s sgn^δ t^j dt` for a polynomial `p`.
pub fn window_integral(s: Complex64, parity: u8, p: &Series, rho: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &c) in p.coeffs.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc += c * power_moment(s, j, parity, rho)?;
    }
    Ok(acc)
}

// ∫_{ρ ≤ |t| ≤ R} |t|^s sgn^δ φ(t) dt, folded onto t > 0 with geometric
// breakpoints so the |t|^s scale change is resolved.
fn outer_integral<F: Fn(f64) -> Complex64>(
    s: Complex64,
    parity: u8,
    phi: &F,
    rho: f64,
    r: f64,
    tol: f64,
    max_evals: usize,
) -> QuadResult {
    if rho >= r {
        return QuadResult::exact(Complex64::new(0.0, 0.0));
    }
    let mut pts = vec![rho];
    let mut x = rho;
    while x * 2.0 < r {
        x *= 2.0;
        pts.push(x);
    }
    pts.push(r);
    let sign = if parity == 1 { -1.0 } else { 1.0 };
    let g = |t: f64| (s * t.ln()).exp() * (phi(t) + phi(-t) * sign);
    let opts = QuadOptions::abs(tol).with_max_evals(max_evals);
    integrate_pieces(g, &pts, &opts)
}

/// Regularized `∫_{-R}^{R} |t|^s sgn(t)^δ φ(t) dt` with Taylor coefficients
/// of φ at zero taken by central finite differences.
///
/// The window half-width defaults to `h = tol^{1/(n+2)}` with `n` the
/// subtraction order; inside it φ is replaced by its degree-`2(n+3)`
/// interpolant, whose power integrals are added in closed form.
pub fn reg_power_integral<F: Fn(f64) -> Complex64>(
    s: Complex64,
    phi: F,
    r: f64,
    opts: &RegOptions,
) -> Result<QuadResult> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("interval half-width {r} must be positive")));
    }
    let n = subtraction_order(s);
    check_poles(s, n, opts.parity)?;
    let rho = opts
        .window
        .unwrap_or_else(|| opts.tol.powf(1.0 / (n as f64 + 2.0)))
        .min(r);
    let m = n + 3;
    let p = taylor_fd(&phi, rho, m);
    reg_with_poly(s, &phi, &p, rho, r, opts)
}

/// As [`reg_power_integral`], with the Taylor series of φ at zero supplied
/// exactly. The series must converge on `[-ρ, ρ]`, `ρ` being the window.
pub fn reg_power_integral_with<F: Fn(f64) -> Complex64>(
    s: Complex64,
    phi: F,
    series: &Series,
    r: f64,
    opts: &RegOptions,
) -> Result<QuadResult> {
    let n = subtraction_order(s);
    check_poles(s, n, opts.parity)?;
    let rho = opts.window.unwrap_or(0.5 * r).min(r);
    reg_with_poly(s, &phi, series, rho, r, opts)
}

fn reg_with_poly<F: Fn(f64) -> Complex64>(
    s: Complex64,
    phi: &F,
    p: &Series,
    rho: f64,
    r: f64,
    opts: &RegOptions,
) -> Result<QuadResult> {
    let inner = window_integral(s, opts.parity, p, rho)?;
    let outer = outer_integral(s, opts.parity, phi, rho, r, opts.tol, opts.max_evals);
    let mut res = outer;
    res.value += inner;
    // the window term carries the truncation error of the polynomial; bound it
    // by the last retained coefficient's contribution
    if let Some(last) = p.coeffs.last() {
        let j = p.order() - 1;
        let e = (s + (j as f64 + 1.0)).norm().max(1.0);
        res.err_estimate += last.norm() * rho.powf(s.re + j as f64 + 1.0) / e * f64::EPSILON.sqrt();
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn orders() {
        assert_eq!(subtraction_order(c(0.0)), 0);
        assert_eq!(subtraction_order(c(-0.5)), 0);
        assert_eq!(subtraction_order(c(-1.0)), 1);
        assert_eq!(subtraction_order(c(-1.5)), 1);
        assert_eq!(subtraction_order(Complex64::new(-3.5, 7.0)), 3);
    }

    #[test]
    fn pole_at_minus_one() {
        let r = reg_power_integral(c(-1.0), |_| c(1.0), 1.0, &RegOptions::default());
        assert!(matches!(r, Err(Error::RegularizationPole { j: 0, .. })));
        // odd parity kills the j = 0 moment, so s = -1 is regular there
        let r = reg_power_integral(c(-1.0), |t| c(t.cos()), 1.0, &RegOptions::default().with_parity(1));
        assert!(r.is_ok());
    }

    #[test]
    fn fd_taylor_of_exp() {
        let p = taylor_fd(&|t: f64| c(t.exp()), 0.2, 5);
        let mut fact = 1.0;
        for j in 0..6 {
            if j > 0 {
                fact *= j as f64;
            }
            assert!((p.coeffs[j].re - 1.0 / fact).abs() < 1e-6 * 10f64.powi(j as i32), "j={j}");
        }
    }

    #[test]
    fn polynomial_closed_form() {
        // φ = 1 + t²: ∫_{-1}^{1} |t|^s (1 + t²) = 2/(s+1) + 2/(s+3), continued
        for s in [c(-1.5), Complex64::new(-2.5, 3.0), Complex64::new(0.3, -1.0)] {
            let r = reg_power_integral(s, |t| c(1.0 + t * t), 1.0, &RegOptions::default()).unwrap();
            let exact = 2.0 / (s + 1.0) + 2.0 / (s + 3.0);
            assert!((r.value - exact).norm() < 1e-8 * exact.norm(), "{s}: {} vs {exact}", r.value);
        }
    }
}
