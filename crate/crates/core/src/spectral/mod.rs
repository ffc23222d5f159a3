//! Symmetric eigensolvers and operator-norm estimates over truncation
//! schedules.

mod dense;
mod lanczos;
mod schedule;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::fmt_f64;

pub use dense::tridiagonal_eigen;
pub use lanczos::{lanczos_extreme, lanczos_smallest, LanczosOptions};
pub use schedule::{
    extrapolate_log_squared, hankel_norm_schedule, norm_schedule, top_eigenvalue, NormSchedule,
    SchedulePoint,
};

/// Relative threshold below which eigenvalues are reported as numerically zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Ascending eigenvalues with a residual bound per eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors, one per eigenvalue, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

impl SpectralResult {
    pub fn empty() -> Self {
        Self { eigenvalues: Vec::new(), eigenvectors: None, residuals: Vec::new(), converged: true }
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Flags for eigenvalues below [`ZERO_THRESHOLD`] relative to the largest.
    pub fn numerically_zero(&self) -> Vec<bool> {
        let scale = self.spectral_radius();
        self.eigenvalues.iter().map(|v| v.abs() < ZERO_THRESHOLD * scale).collect()
    }

    /// `eigenvalue,residual,numerically_zero` per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,residual,numerically_zero\n");
        for ((v, r), z) in self.eigenvalues.iter().zip(&self.residuals).zip(self.numerically_zero()) {
            out.push_str(&format!("{},{},{}\n", fmt_f64(*v), fmt_f64(*r), z));
        }
        out
    }
}

fn check_symmetric(n: usize, a: &[f64]) -> Result<f64> {
    if a.len() != n * n {
        return Err(Error::Contract(format!("expected {} entries for a {n}×{n} matrix, got {}", n * n, a.len())));
    }
    let mut scale = 0.0f64;
    let mut frob = 0.0;
    for &x in a {
        if !x.is_finite() {
            return Err(Error::Contract("matrix has non-finite entries".into()));
        }
        scale = scale.max(x.abs());
        frob += x * x;
    }
    for i in 0..n {
        for j in 0..i {
            if (a[i * n + j] - a[j * n + i]).abs() > 1e-12 * scale {
                return Err(Error::Contract(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(frob.sqrt())
}

/// All eigenvalues of the symmetric row-major matrix `a`. Residual bounds are
/// the a-priori backward error estimate `10 n ε ‖A‖_F`.
pub fn eig_dense(n: usize, a: &[f64]) -> Result<SpectralResult> {
    let frob = check_symmetric(n, a)?;
    let mut w = a.to_vec();
    let (mut d, mut e) = dense::tred2(n, &mut w, false);
    dense::tql2(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    let bound = 10.0 * n as f64 * f64::EPSILON * frob;
    Ok(SpectralResult { residuals: vec![bound; n], eigenvalues: d, eigenvectors: None, converged: true })
}

/// Eigenvalues and eigenvectors with explicit residuals `‖Av - λv‖`.
pub fn eig_dense_vectors(n: usize, a: &[f64]) -> Result<SpectralResult> {
    check_symmetric(n, a)?;
    let mut w = a.to_vec();
    let (mut d, mut e) = dense::tred2(n, &mut w, true);
    dense::tql2(&mut d, &mut e, Some(&mut w))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &i in &order {
        let v = &w[i * n..(i + 1) * n];
        let lambda = d[i];
        let mut r2 = 0.0;
        for row in 0..n {
            let av: f64 = a[row * n..(row + 1) * n].iter().zip(v).map(|(x, y)| x * y).sum();
            let diff = av - lambda * v[row];
            r2 += diff * diff;
        }
        values.push(lambda);
        vectors.push(v.to_vec());
        residuals.push(r2.sqrt());
    }
    Ok(SpectralResult { eigenvalues: values, eigenvectors: Some(vectors), residuals, converged: true })
}
