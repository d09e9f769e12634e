//! Representation labels and the weight/parity data that drive the action.
//!
//! Every label is realized on even homogeneous functions `f` on `R^2 \ 0` of
//! degree `lambda - 1`, with
//!
//! ```text
//! pi(g) f(p) = |det g|^{(lambda-1)/2} sgn(det g)^eps f(g^{-1} p).
//! ```
//!
//! In the line chart `v(x) = f(x, 1)` this gives
//! `pi(diag(a^{-1}, a)) v(x) = |a|^{1-lambda} v(a^2 x)` and
//! `pi((1,-1;0,1)) v(x) = v(x + 1)`.

use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RepnParam {
    /// Principal series `V_{lambda, eps}`.
    PrincipalSeries { lambda: Complex64, eps: u8 },
    /// Even homogeneous functions of the given integer degree, `H_degree`.
    Homogeneous { degree: i64 },
    /// A vector constrained to `D_k^* ⊂ H_{-k}`.
    DiscreteSub { k: i64 },
    /// A representative in `H_{k-2}` of a vector of the quotient `D_k`.
    DiscreteQuot { k: i64 },
}

/// The weight of a label, kept exact when it is rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactWeight {
    Rational(Ratio<i64>),
    Symbolic(Complex64),
}

impl ExactWeight {
    pub fn value(&self) -> Complex64 {
        match *self {
            ExactWeight::Rational(r) => Complex64::new(*r.numer() as f64 / *r.denom() as f64, 0.0),
            ExactWeight::Symbolic(z) => z,
        }
    }
}

fn check_k(k: i64) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "discrete series weight must be an even integer >= 2, got {k}"
        )));
    }
    Ok(())
}

impl RepnParam {
    pub fn principal(lambda: Complex64, eps: u8) -> Self {
        RepnParam::PrincipalSeries {
            lambda,
            eps: eps % 2,
        }
    }

    /// Unitary principal series `V_{i t, eps}`.
    pub fn unitary(t: f64, eps: u8) -> Self {
        Self::principal(Complex64::new(0.0, t), eps)
    }

    pub fn homogeneous(degree: i64) -> Result<Self> {
        if degree % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "homogeneous degree must be even, got {degree}"
            )));
        }
        Ok(RepnParam::Homogeneous { degree })
    }

    pub fn discrete_sub(k: i64) -> Result<Self> {
        check_k(k)?;
        Ok(RepnParam::DiscreteSub { k })
    }

    pub fn discrete_quot(k: i64) -> Result<Self> {
        check_k(k)?;
        Ok(RepnParam::DiscreteQuot { k })
    }

    /// Degree of the underlying homogeneous space, if it is an integer.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        match *self {
            RepnParam::PrincipalSeries { .. } => None,
            RepnParam::Homogeneous { degree } => Some(degree),
            RepnParam::DiscreteSub { k } => Some(-k),
            RepnParam::DiscreteQuot { k } => Some(k - 2),
        }
    }

    /// Weight `lambda` in the convention "`diag(a^{-1}, a)` acts with `|a|^{1-lambda}`".
    pub fn exact_weight(&self) -> ExactWeight {
        match *self {
            RepnParam::PrincipalSeries { lambda, .. } => ExactWeight::Symbolic(lambda),
            _ => {
                let d = self.homogeneous_degree().expect("integer degree");
                ExactWeight::Rational(Ratio::from_integer(d + 1))
            }
        }
    }

    pub fn weight(&self) -> Complex64 {
        self.exact_weight().value()
    }

    /// Sign character on `det g < 0`.
    ///
    /// For homogeneous spaces this is `det(g)^{(k-2)/2}` on both `H_{k-2}` and
    /// `H_{-k}`, which makes the circle pairing between them invariant.
    pub fn parity(&self) -> u8 {
        match *self {
            RepnParam::PrincipalSeries { eps, .. } => eps % 2,
            _ => {
                let d = self.homogeneous_degree().expect("integer degree");
                let half = if d >= 0 { d / 2 } else { (-d - 2) / 2 };
                (half.rem_euclid(2)) as u8
            }
        }
    }

    /// Two labels act by the same formula.
    pub fn same_action(&self, other: &RepnParam) -> bool {
        let (a, b) = (self.weight(), other.weight());
        (a - b).norm() <= 1e-14 * (1.0 + a.norm()) && self.parity() == other.parity()
    }

    pub fn is_unitary_principal(&self) -> bool {
        matches!(self, RepnParam::PrincipalSeries { lambda, .. } if lambda.re.abs() < 1e-15)
    }
}

impl fmt::Display for RepnParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepnParam::PrincipalSeries { lambda, eps } => {
                write!(f, "V(lambda={}{:+}i, eps={})", lambda.re, lambda.im, eps)
            }
            RepnParam::Homogeneous { degree } => write!(f, "H_{degree}"),
            RepnParam::DiscreteSub { k } => write!(f, "D*_{k} in H_-{k}"),
            RepnParam::DiscreteQuot { k } => write!(f, "D_{k} via H_{}", k - 2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_of_homogeneous_spaces() {
        let k = 6;
        assert_eq!(RepnParam::discrete_quot(k).unwrap().weight(), Complex64::new(5.0, 0.0));
        assert_eq!(RepnParam::discrete_sub(k).unwrap().weight(), Complex64::new(-5.0, 0.0));
        assert!(RepnParam::discrete_sub(3).is_err());
        assert!(RepnParam::homogeneous(3).is_err());
    }

    #[test]
    fn parity_matches_between_dual_spaces() {
        for k in (2..=14).step_by(2) {
            let q = RepnParam::discrete_quot(k).unwrap();
            let s = RepnParam::discrete_sub(k).unwrap();
            assert_eq!(q.parity(), s.parity());
            assert_eq!(q.parity() as i64, ((k - 2) / 2) % 2);
        }
    }

    #[test]
    fn same_action_classes() {
        let a = RepnParam::discrete_sub(4).unwrap();
        let b = RepnParam::homogeneous(-4).unwrap();
        assert!(a.same_action(&b));
        assert!(!a.same_action(&RepnParam::discrete_quot(4).unwrap()));
    }
}
