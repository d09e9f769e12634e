//! Projective 2x2 real matrices and their fractional-linear action on the
//! projective line.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Entries closer than this after normalization are considered equal.
pub const CANONICAL_TOL: f64 = 1e-12;

/// A point of the projective line: a real number or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinity)
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            ExtReal::Finite(x)
        } else {
            ExtReal::Infinity
        }
    }
}

/// An element of PGL2(R), stored in canonical form: `|det| = 1` and the first
/// nonzero entry (row-major) positive.
#[derive(Debug, Clone, Copy)]
pub struct GroupElement {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl GroupElement {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if !det.is_finite() || scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return Err(Error::SingularMatrix(det));
        }
        let mut s = 1.0 / det.abs().sqrt();
        let lead = [a, b, c, d]
            .into_iter()
            .find(|v| v.abs() > CANONICAL_TOL * scale)
            .unwrap_or(a);
        if lead < 0.0 {
            s = -s;
        }
        Ok(GroupElement {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    pub fn identity() -> Self {
        GroupElement {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// `diag(p, q)`.
    pub fn diag(p: f64, q: f64) -> Result<Self> {
        Self::new(p, 0.0, 0.0, q)
    }

    /// `a_T = diag(T^{-1/2}, T^{1/2})`, acting on the line by `x -> x / T`.
    pub fn a_t(t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("a_T needs T > 0, got {t}")));
        }
        Self::diag(t.powf(-0.5), t.sqrt())
    }

    /// The unipotent `(1, -1; 0, 1)`; its action on line-model vectors is
    /// `v(x) -> v(x + 1)`.
    pub fn unipotent_shift() -> Self {
        GroupElement {
            a: 1.0,
            b: -1.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// `(1, b; 0, 1)`, the Möbius translation `x -> x + b`.
    pub fn translation(b: f64) -> Self {
        GroupElement {
            a: 1.0,
            b,
            c: 0.0,
            d: 1.0,
        }
    }

    /// `delta = diag(1, -1)`.
    pub fn delta() -> Self {
        GroupElement {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: -1.0,
        }
    }

    /// Rotation of R^2 by angle `psi`.
    pub fn rotation(psi: f64) -> Self {
        let (s, c) = psi.sin_cos();
        GroupElement::new(c, -s, s, c).expect("rotations are nonsingular")
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Determinant of the canonical representative, always `+1` or `-1`.
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn det_sign(&self) -> f64 {
        self.det().signum()
    }

    pub fn inverse(&self) -> Self {
        // adjugate has the same |det|; canonicalize for the sign convention
        GroupElement::new(self.d, -self.b, -self.c, self.a).expect("inverse of a canonical element")
    }

    /// Linear action on a vector of R^2.
    pub fn apply_vec(&self, p: [f64; 2]) -> [f64; 2] {
        [self.a * p[0] + self.b * p[1], self.c * p[0] + self.d * p[1]]
    }

    /// The point `g^{-1}(infinity)` sent to infinity by `g`, if finite.
    pub fn pole(&self) -> ExtReal {
        if self.c == 0.0 {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(-self.d / self.c)
        }
    }

    pub fn approx_eq(&self, other: &GroupElement) -> bool {
        self.entries()
            .iter()
            .zip(other.entries())
            .all(|(x, y)| (x - y).abs() <= CANONICAL_TOL)
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, r: GroupElement) -> GroupElement {
        GroupElement::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
        .expect("product of nonsingular elements")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// Fractional-linear action `x -> (a x + b) / (c x + d)` on the projective line.
pub fn mobius(g: &GroupElement, x: ExtReal) -> ExtReal {
    let [a, b, c, d] = g.entries();
    match x {
        ExtReal::Infinity => {
            if c == 0.0 {
                ExtReal::Infinity
            } else {
                ExtReal::Finite(a / c)
            }
        }
        ExtReal::Finite(x) => {
            let den = c * x + d;
            if den == 0.0 {
                ExtReal::Infinity
            } else {
                ExtReal::Finite((a * x + b) / den)
            }
        }
    }
}

/// Möbius action in the circle chart `x = cot(theta / 2)`, `theta` in `[0, 2 pi)`.
///
/// The point at infinity sits at `theta = 0`.
pub fn mobius_angle(g: &GroupElement, theta: f64) -> f64 {
    let psi = 0.5 * theta;
    let [p, q] = g.apply_vec([psi.cos(), psi.sin()]);
    let mut out = 2.0 * q.atan2(p);
    if out < 0.0 {
        out += std::f64::consts::TAU;
    }
    if out >= std::f64::consts::TAU {
        out -= std::f64::consts::TAU;
    }
    out
}

/// Chart map from the line to the circle: `theta = 2 arccot(x)` in `(0, 2 pi)`.
pub fn line_to_angle(x: ExtReal) -> f64 {
    match x {
        ExtReal::Infinity => 0.0,
        ExtReal::Finite(x) => 2.0 * (1.0f64).atan2(x),
    }
}

/// Inverse chart map, `x = cot(theta / 2)`.
pub fn angle_to_line(theta: f64) -> ExtReal {
    let psi = 0.5 * theta;
    let s = psi.sin();
    if s.abs() < 1e-300 {
        ExtReal::Infinity
    } else {
        ExtReal::Finite(psi.cos() / s)
    }
}
