//! Largest eigenvalues of growing truncations and a logarithmic
//! extrapolation of their limit.

use serde::Serialize;

use super::{eig_dense, lanczos_extreme, LanczosOptions, SpectralResult};
use crate::error::{Error, Result};
use crate::matrix::{build_hankel_1d, HelsonOperator};
use crate::moments::{Coeff1d, MomentSequence};

/// Dimensions up to this size use the dense solver.
const DENSE_SCHEDULE_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchedulePoint {
    pub size: usize,
    pub lambda_max: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSchedule {
    pub points: Vec<SchedulePoint>,
    /// `λ_∞` of the fit `λ(N) = λ_∞ - a / ln² N` on the last three points.
    pub extrapolated: Option<f64>,
    /// True when `λ_max` never decreases along the schedule.
    pub monotone: bool,
}

/// Largest eigenvalue of a dense symmetric matrix: the dense solver up to
/// `DENSE_SCHEDULE_LIMIT`, Lanczos beyond.
pub fn top_eigenvalue(n: usize, a: &[f64]) -> Result<SpectralResult> {
    if n <= DENSE_SCHEDULE_LIMIT {
        let r = eig_dense(n, a)?;
        let last = r.eigenvalues.len().saturating_sub(1);
        return Ok(SpectralResult {
            eigenvalues: r.eigenvalues[last..].to_vec(),
            residuals: r.residuals[last..].to_vec(),
            eigenvectors: None,
            converged: true,
        });
    }
    lanczos_extreme(|x: &[f64], y: &mut [f64]| crate::matrix::dense_matvec(n, a, x, y), n, LanczosOptions::top(1))
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Contract("empty size schedule".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("sizes must be strictly ascending".into()));
    }
    Ok(())
}

fn finish(points: Vec<SchedulePoint>) -> NormSchedule {
    let monotone = points.windows(2).all(|w| w[1].lambda_max >= w[0].lambda_max);
    let extrapolated = if points.len() >= 3 {
        let tail: Vec<(usize, f64)> = points[points.len() - 3..].iter().map(|p| (p.size, p.lambda_max)).collect();
        extrapolate_log_squared(&tail)
    } else {
        None
    };
    NormSchedule { points, extrapolated, monotone }
}

/// Least-squares fit of `λ = λ_∞ - a x` with `x = 1 / ln² N`; returns `λ_∞`.
pub fn extrapolate_log_squared(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|p| p.0 < 2) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / (p.0 as f64).ln().powi(2)).collect();
    let k = points.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(my - slope * mx)
}

/// `λ_max` of Helson sections on indices `offset..offset + N` for each
/// dimension `N` in `sizes`.
pub fn norm_schedule(seq: &MomentSequence, sizes: &[usize], offset: u64) -> Result<NormSchedule> {
    check_sizes(sizes)?;
    let mut points = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 {
            return Err(Error::Contract("sizes must be positive".into()));
        }
        let op = HelsonOperator::new(seq, offset + size as u64 - 1, offset)?;
        let r = match &op {
            HelsonOperator::Dense(m) => top_eigenvalue(size, &m.data)?,
            HelsonOperator::Streaming { .. } => op.top_eigenvalues(1)?,
        };
        points.push(SchedulePoint {
            size,
            lambda_max: r.eigenvalues[0],
            residual: r.residuals[0],
            converged: r.converged,
        });
    }
    Ok(finish(points))
}

/// `λ_max` of the one-variable Hankel sections `[β(j + k)]_{j,k < N}`.
pub fn hankel_norm_schedule(beta: &Coeff1d, sizes: &[usize]) -> Result<NormSchedule> {
    check_sizes(sizes)?;
    let mut points = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 || size > crate::matrix::DENSE_LIMIT {
            return Err(Error::Contract(format!("Hankel size {size} outside 1..={}", crate::matrix::DENSE_LIMIT)));
        }
        let h = build_hankel_1d(beta, size);
        let r = top_eigenvalue(size, &h.data)?;
        points.push(SchedulePoint {
            size,
            lambda_max: r.eigenvalues[0],
            residual: r.residuals[0],
            converged: r.converged,
        });
    }
    Ok(finish(points))
}
