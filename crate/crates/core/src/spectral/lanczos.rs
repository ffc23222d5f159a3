//! Lanczos iteration with full reorthogonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tridiagonal_eigen, SpectralResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Number of top eigenvalues wanted.
    pub k: usize,
    pub max_iter: usize,
    /// Convergence when every residual is below `tol · ‖T‖`.
    pub tol: f64,
    pub seed: u64,
    /// Iterations between Ritz extractions.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { k: 1, max_iter: 400, tol: 1e-10, seed: 0x4845_4c53, check_every: 8 }
    }
}

impl LanczosOptions {
    pub fn top(k: usize) -> Self {
        Self { k, ..Self::default() }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let h = dot(q, w);
            axpy(-h, q, w);
        }
    }
}

/// Random unit vector orthogonal to `basis`, or `None` if the basis spans
/// the whole space.
fn fresh_direction(rng: &mut ChaCha8Rng, n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, basis);
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            return Some(v);
        }
    }
    None
}

/// Top `opts.k` eigenvalues of the symmetric operator `op` (`y ← A x`) of
/// dimension `n`, ascending. Residual bounds are `|β_m s_{m,i}|`. When the
/// iteration budget runs out the best Ritz pairs are returned with
/// `converged = false`.
pub fn lanczos_extreme<F>(op: F, n: usize, opts: LanczosOptions) -> Result<SpectralResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    if n == 0 {
        return Ok(SpectralResult::empty());
    }
    if opts.k == 0 || opts.k > n {
        return Err(Error::Contract(format!("cannot extract {} eigenvalues of a dimension-{n} operator", opts.k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = fresh_direction(&mut rng, n, &basis).expect("nonempty space");
    let mut w = vec![0.0; n];
    let mut best: Option<SpectralResult> = None;

    for iter in 0..opts.max_iter.min(n).max(1) {
        w.iter_mut().for_each(|x| *x = 0.0);
        op(&q, &mut w);
        let alpha = dot(&q, &w);
        basis.push(q.clone());
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        let beta = dot(&w, &w).sqrt();

        let m = basis.len();
        let scale = alphas.iter().chain(&betas).fold(0.0f64, |a, b| a.max(b.abs())).max(beta);
        let breakdown = beta <= 1e-13 * scale.max(f64::MIN_POSITIVE);
        let exhausted = m == n || iter + 1 == opts.max_iter.min(n);
        if m >= opts.k && (breakdown || exhausted || m % opts.check_every == 0) {
            let result = ritz(&alphas, &betas, beta, &basis, opts.k)?;
            let norm = result.spectral_radius().max(scale);
            let ok = result.residuals.iter().all(|r| *r <= opts.tol * norm);
            if ok || exhausted {
                return Ok(SpectralResult { converged: ok, ..result });
            }
            best = Some(result);
        }
        if breakdown {
            match fresh_direction(&mut rng, n, &basis) {
                Some(v) => {
                    betas.push(0.0);
                    q = v;
                }
                None => break,
            }
        } else {
            betas.push(beta);
            q = w.iter().map(|x| x / beta).collect();
        }
    }
    match best {
        Some(r) => Ok(SpectralResult { converged: false, ..r }),
        None => {
            let beta = betas.last().copied().unwrap_or(0.0);
            let r = ritz(&alphas, &betas, beta, &basis, opts.k.min(alphas.len()))?;
            Ok(SpectralResult { converged: false, ..r })
        }
    }
}

fn ritz(alphas: &[f64], betas: &[f64], beta: f64, basis: &[Vec<f64>], k: usize) -> Result<SpectralResult> {
    let m = alphas.len();
    let (theta, s) = tridiagonal_eigen(alphas, &betas[..m - 1])?;
    let n = basis[0].len();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for i in m - k..m {
        values.push(theta[i]);
        residuals.push((beta * s[i][m - 1]).abs());
        let mut v = vec![0.0; n];
        for (coef, q) in s[i].iter().zip(basis) {
            axpy(*coef, q, &mut v);
        }
        vectors.push(v);
    }
    Ok(SpectralResult { eigenvalues: values, eigenvectors: Some(vectors), residuals, converged: true })
}

/// Bottom `opts.k` eigenvalues, ascending, via the negated operator.
pub fn lanczos_smallest<F>(op: F, n: usize, opts: LanczosOptions) -> Result<SpectralResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    let r = lanczos_extreme(
        |x: &[f64], y: &mut [f64]| {
            op(x, y);
            y.iter_mut().for_each(|v| *v = -*v);
        },
        n,
        opts,
    )?;
    let mut values: Vec<f64> = r.eigenvalues.iter().map(|v| -v).collect();
    let mut residuals = r.residuals.clone();
    let mut vectors = r.eigenvectors;
    values.reverse();
    residuals.reverse();
    if let Some(v) = vectors.as_mut() {
        v.reverse();
    }
    Ok(SpectralResult { eigenvalues: values, eigenvectors: vectors, residuals, converged: r.converged })
}
