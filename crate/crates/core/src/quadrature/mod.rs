//! Adaptive integration of piecewise-smooth, oscillatory and power-singular
//! integrands in one to three dimensions.

mod adaptive;
mod cubature;
mod regularize;
pub mod rules;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use adaptive::{integrate_1d, integrate_endpoint_singular, integrate_endpoint_singular_exact, integrate_pieces, EndPt};
pub use cubature::{integrate, integrate_boxes, Domain};
pub use regularize::{
    power_moment, reg_power_integral, reg_power_integral_with, subtraction_order, taylor_fd,
    window_integral, RegOptions,
};

/// Default absolute tolerance for unit-scale integrands.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default cap on integrand evaluations per call.
pub const DEFAULT_MAX_EVALS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub converged: bool,
    pub subdivisions: usize,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn exact(value: Complex64) -> Self {
        QuadResult {
            value,
            err_estimate: 0.0,
            converged: true,
            subdivisions: 0,
            evaluations: 0,
        }
    }

    /// Turns an unconverged result into [`Error::NonConvergence`].
    pub fn ok(self) -> Result<QuadResult> {
        if self.converged && self.value.re.is_finite() && self.value.im.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                value: self.value.norm(),
                err: self.err_estimate,
                subdivisions: self.subdivisions,
            })
        }
    }

    /// Sum of independent pieces; converged only if every piece is.
    pub fn combine(parts: &[QuadResult]) -> QuadResult {
        let mut out = QuadResult::exact(Complex64::new(0.0, 0.0));
        for p in parts {
            out.value += p.value;
            out.err_estimate += p.err_estimate;
            out.converged &= p.converged;
            out.subdivisions += p.subdivisions;
            out.evaluations += p.evaluations;
        }
        out
    }

    pub fn scaled(mut self, c: Complex64) -> QuadResult {
        self.value *= c;
        self.err_estimate *= c.norm();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Upper bound on the oscillation frequency; sets the initial mesh.
    pub freq_hint: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: DEFAULT_TOL,
            rel_tol: 0.0,
            max_evals: DEFAULT_MAX_EVALS,
            freq_hint: 0.0,
        }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            ..Default::default()
        }
    }

    pub fn rel(tol: f64) -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Default::default()
        }
    }

    pub fn with_freq(mut self, freq: f64) -> Self {
        self.freq_hint = freq;
        self
    }

    pub fn with_abs_floor(mut self, floor: f64) -> Self {
        self.abs_tol = floor;
        self
    }

    pub fn with_max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }

    pub(crate) fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }

    /// Initial cell width: at most a quarter of `min(len, 1/freq)`.
    pub(crate) fn initial_cells(&self, len: f64) -> usize {
        let mut h = len;
        if self.freq_hint > 0.0 {
            h = h.min(1.0 / self.freq_hint);
        }
        let h = h / 4.0;
        ((len / h).ceil() as usize).clamp(1, 1 << 16)
    }
}

/// A singular locus of the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Locus {
    /// A point on the real line (1D integrands).
    Point(f64),
    /// The hyperplane `x_i = x_j`.
    Diagonal(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub locus: Locus,
    /// Exponent `s` of `|distance|^s` near the locus.
    pub exponent: Complex64,
    /// Number of Taylor terms subtracted before integrating.
    pub order: usize,
}

/// Declared singular loci of an integrand, each with its exponent and the
/// subtraction order used to regularize it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SingularityPlan {
    pub loci: Vec<Singularity>,
}

impl SingularityPlan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a locus with the minimal subtraction order making the remainder
    /// integrable.
    pub fn with(mut self, locus: Locus, exponent: Complex64) -> Self {
        self.loci.push(Singularity {
            locus,
            exponent,
            order: subtraction_order(exponent),
        });
        self
    }

    pub fn with_order(mut self, locus: Locus, exponent: Complex64, order: usize) -> Result<Self> {
        if exponent.re + order as f64 <= -1.0 {
            return Err(Error::InvalidArgument(format!(
                "subtraction order {order} leaves exponent {exponent} non-integrable"
            )));
        }
        self.loci.push(Singularity {
            locus,
            exponent,
            order,
        });
        Ok(self)
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (usize, usize, &Singularity)> {
        self.loci.iter().filter_map(|s| match s.locus {
            Locus::Diagonal(i, j) => Some((i, j, s)),
            Locus::Point(_) => None,
        })
    }

    /// Whether every locus is integrable without subtraction.
    pub fn all_integrable(&self) -> bool {
        self.loci.iter().all(|s| s.exponent.re > -1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.loci {
            if s.exponent.re + s.order as f64 <= -1.0 {
                return Err(Error::InvalidArgument(format!(
                    "locus {:?}: order {} too small for exponent {}",
                    s.locus, s.order, s.exponent
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic pairwise summation.
pub(crate) fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}
