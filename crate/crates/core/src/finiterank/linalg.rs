//! Small complex dense routines for rank detection and tensor elimination.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::eig_dense;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Singular values above `rel · σ_max` of a complex symmetric `n × n`
/// matrix `A = X + iY`, read off the real symmetric matrix
/// `[[X, Y], [Y, -X]]` whose eigenvalues are `±σ_i`.
pub fn symmetric_rank(n: usize, a: &[Complex64], rel: f64) -> Result<(usize, Vec<f64>)> {
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let real = a.iter().all(|z| z.im == 0.0);
    let mut sigma: Vec<f64> = if real {
        let x: Vec<f64> = a.iter().map(|z| z.re).collect();
        eig_dense(n, &x)?.eigenvalues.iter().map(|v| v.abs()).collect()
    } else {
        let m = 2 * n;
        let mut b = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = a[i * n + j];
                b[i * m + j] = z.re;
                b[i * m + n + j] = z.im;
                b[(n + i) * m + j] = z.im;
                b[(n + i) * m + n + j] = -z.re;
            }
        }
        let ev = eig_dense(m, &b)?.eigenvalues;
        // the top half holds +σ_i
        ev[n..].to_vec()
    };
    sigma.sort_by(|a, b| b.total_cmp(a));
    let top = sigma.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 { 0 } else { sigma.iter().filter(|s| **s > rel * top).count() };
    Ok((rank, sigma))
}

/// Incremental orthonormal basis over `ℂ^d` with the triangular factor of
/// the accepted vectors, so that dependent vectors can be expressed in
/// terms of the accepted ones.
pub struct IncrementalBasis {
    q: Vec<Vec<Complex64>>,
    /// Column `k` of `R` holds the coordinates of accepted vector `k`.
    r: Vec<Vec<Complex64>>,
    tol: f64,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl IncrementalBasis {
    pub fn new(tol: f64) -> Self {
        Self { q: Vec::new(), r: Vec::new(), tol }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Accepts `v` and returns `None` if it is independent of the accepted
    /// vectors; otherwise returns `x` with `v ≈ Σ_k x_k v_k`.
    pub fn insert(&mut self, v: &[Complex64]) -> Option<Vec<Complex64>> {
        let vn = norm(v);
        let mut w = v.to_vec();
        let mut h = vec![ZERO; self.q.len()];
        for _ in 0..2 {
            for (k, q) in self.q.iter().enumerate() {
                let c = inner(q, &w);
                h[k] += c;
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let rn = norm(&w);
        if rn <= self.tol * vn || vn == 0.0 {
            return Some(self.solve_r(&h));
        }
        for wi in w.iter_mut() {
            *wi /= rn;
        }
        let mut col = h;
        col.push(Complex64::new(rn, 0.0));
        for existing in self.r.iter_mut() {
            existing.push(ZERO);
        }
        self.q.push(w);
        self.r.push(col);
        None
    }

    /// Back substitution with the upper triangular factor.
    fn solve_r(&self, h: &[Complex64]) -> Vec<Complex64> {
        let k = self.q.len();
        let mut x = vec![ZERO; k];
        for i in (0..k).rev() {
            let mut s = h[i];
            for j in i + 1..k {
                s -= self.r[j][i] * x[j];
            }
            x[i] = s / self.r[i][i];
        }
        x
    }
}

/// Solves `A X = B` for square `A` (`n × n`) and `B` (`n × m`), row-major,
/// by Gaussian elimination with partial pivoting. `None` if singular.
pub fn solve(n: usize, a: &[Complex64], m: usize, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    let scale = a.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))?;
        if a[piv * n + col].norm() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            for k in 0..m {
                x.swap(col * m + k, piv * m + k);
            }
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == ZERO {
                continue;
            }
            for k in col..n {
                let t = a[col * n + k];
                a[row * n + k] -= f * t;
            }
            for k in 0..m {
                let t = x[col * m + k];
                x[row * m + k] -= f * t;
            }
        }
    }
    for col in (0..n).rev() {
        let d = a[col * n + col];
        for k in 0..m {
            let mut s = x[col * m + k];
            for j in col + 1..n {
                s -= a[col * n + j] * x[j * m + k];
            }
            x[col * m + k] = s / d;
        }
    }
    Some(x)
}

/// Indices of `count` columns of the `rows × cols` matrix `v` (row-major)
/// forming an invertible submatrix, chosen by complete pivoting.
pub fn pivot_columns(rows: usize, cols: usize, v: &[Complex64]) -> Option<Vec<usize>> {
    let mut a = v.to_vec();
    let mut chosen = Vec::with_capacity(rows);
    let mut used_rows = vec![false; rows];
    let scale = a.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    for _ in 0..rows {
        let mut best = (0, 0, -1.0f64);
        for r in (0..rows).filter(|r| !used_rows[*r]) {
            for c in (0..cols).filter(|c| !chosen.contains(c)) {
                let mag = a[r * cols + c].norm();
                if mag > best.2 {
                    best = (r, c, mag);
                }
            }
        }
        let (pr, pc, mag) = best;
        if mag <= 1e-13 * scale || mag <= 0.0 {
            return None;
        }
        used_rows[pr] = true;
        chosen.push(pc);
        let p = a[pr * cols + pc];
        for r in (0..rows).filter(|r| !used_rows[*r]) {
            let f = a[r * cols + pc] / p;
            if f == ZERO {
                continue;
            }
            for c in 0..cols {
                let t = a[pr * cols + c];
                a[r * cols + c] -= f * t;
            }
        }
    }
    Some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_of_complex_symmetric() {
        // u uᵀ + v vᵀ with complex u, v: rank 2
        let u = [c(1.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)];
        let v = [c(0.3, 0.0), c(1.0, -1.0), c(0.0, 0.2)];
        let mut a = vec![c(0.0, 0.0); 9];
        for i in 0..3 {
            for j in 0..3 {
                a[i * 3 + j] = u[i] * u[j] + v[i] * v[j];
            }
        }
        let (rank, sigma) = symmetric_rank(3, &a, 1e-9).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(sigma.len(), 3);
    }

    #[test]
    fn dependency_coefficients() {
        let mut b = IncrementalBasis::new(1e-10);
        let v1 = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
        let v2 = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)];
        assert!(b.insert(&v1).is_none());
        assert!(b.insert(&v2).is_none());
        let v3: Vec<Complex64> = v1.iter().zip(&v2).map(|(a, b)| a * c(2.0, -1.0) + b * c(0.0, 3.0)).collect();
        let x = b.insert(&v3).unwrap();
        assert!((x[0] - c(2.0, -1.0)).norm() < 1e-14);
        assert!((x[1] - c(0.0, 3.0)).norm() < 1e-14);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn linear_solve() {
        let a = [c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)];
        let x_true = [c(1.0, 2.0), c(-1.0, 0.5)];
        let b = [a[0] * x_true[0] + a[1] * x_true[1], a[2] * x_true[0] + a[3] * x_true[1]];
        let x = solve(2, &a, 1, &b).unwrap();
        assert!((x[0] - x_true[0]).norm() < 1e-14);
        assert!((x[1] - x_true[1]).norm() < 1e-14);
        assert!(solve(2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], 1, &b).is_none());
    }

    #[test]
    fn pivots() {
        let v = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let cols = pivot_columns(2, 3, &v).unwrap();
        let mut sorted = cols.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2]);
        assert!(pivot_columns(2, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).is_none());
    }
}
