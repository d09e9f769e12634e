//! Truncated complex power series around zero.
//!
//! Used to get exact Taylor coefficients of smooth factors for the
//! analytically continued power integrals.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub coeffs: Vec<Complex64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![Complex64::new(0.0, 0.0); order],
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Series {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `sum_j c_j t^j`, truncated to `order` terms.
    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        let mut out = Series::zero(n);
        for i in 0..n {
            if self.coeffs[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n - i {
                out.coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|&x| x * c).collect(),
        }
    }

    /// The series of `f(h t)` given that of `f(t)`.
    pub fn rescale(&self, h: f64) -> Series {
        let mut p = 1.0;
        Series {
            coeffs: self
                .coeffs
                .iter()
                .map(|&x| {
                    let y = x * p;
                    p *= h;
                    y
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        Series {
            coeffs: (0..n).map(|i| self.coeffs[i] + other.coeffs[i]).collect(),
        }
    }

    /// `exp` of a series; the constant term is exponentiated directly.
    pub fn exp(&self) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        if n == 0 {
            return out;
        }
        out.coeffs[0] = self.coeffs[0].exp();
        // E' = a' E  =>  m e_m = sum_{j=1}^m j a_j e_{m-j}
        for m in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=m {
                acc += self.coeffs[j] * out.coeffs[m - j] * j as f64;
            }
            out.coeffs[m] = acc / m as f64;
        }
        out
    }

    /// `log` of a series whose constant term is exactly one.
    pub fn log_unit(&self) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        // L' = u' / u  =>  m l_m = m u_m - sum_{j=1}^{m-1} j l_j u_{m-j}
        for m in 1..n {
            let mut acc = self.coeffs[m] * m as f64;
            for j in 1..m {
                acc -= out.coeffs[j] * self.coeffs[m - j] * j as f64;
            }
            out.coeffs[m] = acc / m as f64;
        }
        out
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Series of `sin(t)/t`.
    pub fn sinc(order: usize) -> Series {
        let mut s = Series::zero(order);
        let mut fact = 1.0;
        for m in 0..order {
            if m > 0 {
                fact *= m as f64;
            }
            if m % 2 == 0 {
                // coefficient of t^m is (-1)^{m/2} / (m+1)!
                let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
                s.coeffs[m] = Complex64::new(sign / (fact * (m as f64 + 1.0)), 0.0);
            }
        }
        s
    }

    /// Series of `cos(t)` and `sin(t)`.
    pub fn cos_sin(order: usize) -> (Series, Series) {
        let mut c = Series::zero(order);
        let mut s = Series::zero(order);
        let mut fact = 1.0;
        for m in 0..order {
            if m > 0 {
                fact *= m as f64;
            }
            let v = 1.0 / fact;
            match m % 4 {
                0 => c.coeffs[m] = Complex64::new(v, 0.0),
                1 => s.coeffs[m] = Complex64::new(v, 0.0),
                2 => c.coeffs[m] = Complex64::new(-v, 0.0),
                _ => s.coeffs[m] = Complex64::new(-v, 0.0),
            }
        }
        (c, s)
    }
}
