//! The Riemann zeta function on `(1, ∞)` by Euler–Maclaurin summation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::Jet;

const HEAD: usize = 16;

/// `B_{2k} / (2k)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
];

/// `ζ(x) = Σ n^{-x}` for `x > 1`.
pub fn zeta(x: f64) -> Result<f64> {
    Ok(zeta_jet(x, 0)?.coeffs[0].re)
}

/// Taylor coefficients of `ε ↦ ζ(x + ε)` up to `order`.
pub fn zeta_jet(x: f64, order: usize) -> Result<Jet> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("zeta requires x > 1, got {x}")));
    }
    let c = |v: f64| Complex64::new(v, 0.0);
    let power = |n: f64, shift: f64| {
        // n^{-(x + shift + ε)}
        Jet::exp_linear(c((-(x + shift) * n.ln()).exp()), -n.ln(), order)
    };
    let mut sum = Jet::constant(c(0.0), order);
    for n in 1..HEAD {
        sum = &sum + &power(n as f64, 0.0);
    }
    let big_n = HEAD as f64;
    // N^{1-x} / (x - 1)
    let pole = &power(big_n, -1.0) * &Jet::variable(x - 1.0, order).recip();
    sum = &sum + &pole;
    sum = &sum + &power(big_n, 0.0).scale(c(0.5));
    // rising factorial x (x+1) ⋯ (x+2k-2)
    let mut rising = Jet::variable(x, order);
    for (k, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let k = k + 1;
        let term = &rising * &power(big_n, 2.0 * k as f64 - 1.0);
        sum = &sum + &term.scale(c(*b));
        let a = Jet::variable(x + 2.0 * k as f64 - 1.0, order);
        let b2 = Jet::variable(x + 2.0 * k as f64, order);
        rising = &(&rising * &a) * &b2;
    }
    Ok(sum)
}
