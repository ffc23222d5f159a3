//! Truncated Taylor series `c_0 + c_1 ε + … + c_K ε^K` with complex
//! coefficients. Used to differentiate closed forms (ζ, kernel products)
//! with respect to a real shift of the Dirichlet variable.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// `c + ε`.
    pub fn variable(c: f64, order: usize) -> Self {
        let mut j = Self::constant(Complex64::new(c, 0.0), order);
        if order > 0 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// `scale · exp(rate · ε)`.
    pub fn exp_linear(scale: Complex64, rate: f64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = scale;
        for i in 0..=order {
            coeffs.push(term);
            term = term * rate / (i as f64 + 1.0);
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Self {
        let k = self.order();
        let a0 = self.coeffs[0];
        let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
        out[0] = 1.0 / a0;
        for n in 1..=k {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 1..=n {
                s += self.coeffs[i] * out[n - i];
            }
            out[n] = -s / a0;
        }
        Self { coeffs: out }
    }

    /// `d^k/dε^k` at `ε = 0`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs[k] * fact
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let k = self.order().min(rhs.order());
        let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            for (j, b) in rhs.coeffs.iter().enumerate().take(k + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}
