//! Gauss–Legendre panels for integrals of `n^{-s} ρ(s)` over half-lines.

use std::sync::OnceLock;

const NODES: usize = 16;

/// Nodes and weights of the 16-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            // Chebyshev-like initial guess, refined by Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule.push((x, w));
        }
        rule.sort_by(|a, b| a.0.total_cmp(&b.0));
        rule
    })
}

/// `∫_a^b f` by `panels` equal Gauss–Legendre panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in rule {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = gauss_legendre().iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // degree 31 is the exactness limit of a 16-point rule
        let v = integrate(|x| x.powi(30), 0.0, 1.0, 1);
        assert!((v - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn exponential() {
        let v = integrate(|x| (-x).exp(), 0.0, 40.0, 40);
        assert!((v - (1.0 - (-40f64).exp())).abs() < 1e-14);
    }
}
