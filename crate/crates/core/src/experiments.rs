//! Scripted studies: the multiplicative Hilbert matrix, and a measure whose
//! reproducing-kernel test norm stays at 1 while the norms of its Helson
//! matrices grow like `(π/2)^N`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{build_hankel_1d, build_hankel_multi, HelsonOperator};
use crate::moments::{ClosedForm, Coeff1d, MomentSequence};
use crate::spectral::{eig_dense, hankel_norm_schedule, lanczos_smallest, LanczosOptions, NormSchedule};

/// Dimensions up to this use the dense solver for the full spectrum.
pub const STUDY_DENSE_LIMIT: usize = 1024;
/// Lower tolerance for eigenvalues of nonnegative truncations.
pub const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyPoint {
    /// Dimension; the indices are `2, …, size + 1`.
    pub size: usize,
    pub method: &'static str,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub max_residual: f64,
    pub converged: bool,
    /// Full spectrum, ascending, in the dense range.
    pub eigenvalues: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultHilbertReport {
    pub points: Vec<StudyPoint>,
    pub upper_target: f64,
    pub all_below_pi: bool,
    pub all_nonnegative: bool,
    pub monotone: bool,
}

/// Spectra of the multiplicative Hilbert matrix `1 / (sqrt(nm) ln(nm))`
/// on `n, m = 2, …, size + 1` for each size.
pub fn mult_hilbert_study(sizes: &[usize]) -> Result<MultHilbertReport> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("sizes must be positive and strictly ascending".into()));
    }
    let seq = MomentSequence::closed(ClosedForm::MultiplicativeHilbert);
    let mut points = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let op = HelsonOperator::new(&seq, size as u64 + 1, 2)?;
        let point = match &op {
            HelsonOperator::Dense(m) if size <= STUDY_DENSE_LIMIT => {
                let r = eig_dense(size, &m.data)?;
                StudyPoint {
                    size,
                    method: "dense",
                    lambda_max: r.max().expect("nonempty"),
                    lambda_min: r.min().expect("nonempty"),
                    max_residual: r.residuals.iter().fold(0.0, |a, b| a.max(*b)),
                    converged: true,
                    eigenvalues: Some(r.eigenvalues),
                }
            }
            _ => {
                let top = op.top_eigenvalues(1)?;
                let bottom = lanczos_smallest(|x: &[f64], y: &mut [f64]| op.apply(x, y), size, LanczosOptions::top(1))?;
                StudyPoint {
                    size,
                    method: "lanczos",
                    lambda_max: top.eigenvalues[0],
                    lambda_min: bottom.eigenvalues[0],
                    max_residual: top.residuals[0].max(bottom.residuals[0]),
                    converged: top.converged && bottom.converged,
                    eigenvalues: None,
                }
            }
        };
        points.push(point);
    }
    let all_below_pi = points.iter().all(|p| p.lambda_max < PI);
    let all_nonnegative = points.iter().all(|p| p.lambda_min >= -NEGATIVITY_TOL);
    let monotone = points.windows(2).all(|w| w[1].lambda_max >= w[0].lambda_max);
    Ok(MultHilbertReport { points, upper_target: PI, all_below_pi, all_nonnegative, monotone })
}

/// `(1 - s²) ∫_0^1 (1 - s t)^{-2} dν(t)` for `dν = (t/2) dt`, given
/// `s ∈ [0, 1)` through both `s` and `ε = 1 - s` to keep accuracy at
/// either end.
fn kernel_factor_parts(s: f64, eps: f64) -> f64 {
    if s < 0.05 {
        // (1 - s²) Σ_k (k + 1) s^k / (2(k + 2))
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 0..60 {
            sum += (k as f64 + 1.0) * pow / (2.0 * (k as f64 + 2.0));
            pow *= s;
        }
        (1.0 - s * s) * sum
    } else {
        // (1 + s) (s + (1 - s) ln(1 - s)) / (2 s²)
        (1.0 + s) * (s + eps * eps.ln()) / (2.0 * s * s)
    }
}

/// The per-coordinate factor of the kernel test for `ν` at `s ∈ (-1, 1)`.
pub fn kernel_factor(s: f64) -> Result<f64> {
    if !(s.abs() < 1.0) {
        return Err(Error::Domain(format!("kernel test point {s} outside (-1, 1)")));
    }
    if s >= 0.0 {
        return Ok(kernel_factor_parts(s, 1.0 - s));
    }
    // negative s: the integrand (1 + |s| t)^{-2} has closed form
    // ∫_0^1 t / 2 (1 + a t)^{-2} dt = (ln(1 + a) - a / (1 + a)) / (2 a²)
    let a = -s;
    let integral = if a < 1e-4 {
        0.25 - a / 3.0 + 3.0 * a * a / 8.0
    } else {
        (a.ln_1p() - a / (1.0 + a)) / (2.0 * a * a)
    };
    Ok((1.0 - s * s) * integral)
}

/// `s = 1 - 10^{-k/40}`, `k = 0 … 40·decades`, and a uniform grid on `[0, 1)`.
pub fn xnorm_grid(decades: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..40).map(|i| i as f64 / 40.0).collect();
    g.extend((0..=40 * decades).map(|k| 1.0 - 10f64.powf(-(k as f64) / 40.0)));
    g.retain(|s| *s < 1.0);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XNormReport {
    pub n: usize,
    /// `sup_{s, d} Π_{j ≤ d} (1 - s_j²) ∫ |K_d(t, s)|² dμ_N(t)` over the grid.
    pub sup: f64,
    /// Largest per-coordinate factor and where it occurs.
    pub factor_max: f64,
    pub witness_s: f64,
    /// Supremum with the kernel truncated at `d`, for `d = 1 … N + 1`.
    pub by_dimension: Vec<(usize, f64)>,
    pub grid_size: usize,
    /// The exact value of the norm.
    pub target: f64,
}

/// The kernel test norm of `μ_N = ν^N × δ_0 × δ_0 × ⋯` over a grid of `s`.
///
/// The integral factorizes over coordinates. A ν-coordinate contributes
/// the factor `F(s_j)` when `j ≤ d` and its mass `1/4` otherwise; a
/// δ_0-coordinate contributes `1 - s_j² ≤ 1`, maximal at `s_j = 0`. Each
/// coordinate is maximized independently.
pub fn counterexample_xnorm(n: usize, grid: &[f64]) -> Result<XNormReport> {
    if n == 0 {
        return Err(Error::Contract("N must be at least 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::Contract("empty s-grid".into()));
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &s in grid {
        let f = kernel_factor(s)?;
        if f > best.0 {
            best = (f, s);
        }
    }
    let (fmax, witness_s) = best;
    let mass = 0.25f64;
    let by_dimension: Vec<(usize, f64)> = (1..=n + 1)
        .map(|d| {
            let active = d.min(n);
            (d, fmax.powi(active as i32) * mass.powi((n - active) as i32))
        })
        .collect();
    let sup = by_dimension.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(XNormReport { n, sup, factor_max: fmax, witness_s, by_dimension, grid_size: grid.len(), target: 1.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub n: usize,
    /// Largest computed norm of a section of `H_1(β)`, `β(κ) = 1/(2(κ+2))`.
    pub lambda_hat: f64,
    pub schedule: NormSchedule,
    /// `λ̂^N`, a lower bound for the Helson matrix norm.
    pub norm_lower_bound: f64,
    pub xnorm: f64,
    /// `λ̂^N / xnorm`.
    pub ratio_estimate: f64,
    /// `(π/2)^N`, the exact norm of the Helson matrix.
    pub target: f64,
    /// `(π/2)^N / 1`.
    pub target_ratio: f64,
}

/// Estimate of `‖M(α_N)‖ / ‖μ_N‖_X` from sections of the one-variable
/// factor.
pub fn counterexample_ratio(n: usize, sizes: &[usize], grid: &[f64]) -> Result<RatioReport> {
    let schedule = hankel_norm_schedule(&Coeff1d::Appendix, sizes)?;
    let lambda_hat = schedule.points.iter().map(|p| p.lambda_max).fold(f64::NEG_INFINITY, f64::max);
    let x = counterexample_xnorm(n, grid)?;
    let lower = lambda_hat.powi(n as i32);
    let target = (PI / 2.0).powi(n as i32);
    Ok(RatioReport {
        n,
        lambda_hat,
        schedule,
        norm_lower_bound: lower,
        xnorm: x.sup,
        ratio_estimate: lower / x.sup,
        target,
        target_ratio: target / x.target,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorCheck {
    pub d: usize,
    pub cap: usize,
    pub lambda_1d: f64,
    pub lambda_tensor: f64,
    pub expected: f64,
    pub abs_error: f64,
}

/// `λ_max` of the `d`-variable section of the product sequence
/// `Π β(κ_j)` against the `d`-th power of the one-variable value.
pub fn tensor_check(d: usize, cap: usize) -> Result<TensorCheck> {
    let one = build_hankel_1d(&Coeff1d::Appendix, cap).eigenvalues()?.max().expect("cap >= 1");
    let multi = build_hankel_multi(|k| k.iter().map(|&x| Coeff1d::Appendix.eval(x)).product(), d, cap)?;
    let lambda_tensor = multi.eigenvalues()?.max().expect("nonempty");
    let expected = one.powi(d as i32);
    Ok(TensorCheck { d, cap, lambda_1d: one, lambda_tensor, expected, abs_error: (lambda_tensor - expected).abs() })
}
