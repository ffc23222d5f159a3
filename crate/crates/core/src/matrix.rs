//! Truncated Helson matrices `[α(nm)]` and Hankel matrices `[β(κ + κ')]`.

use crate::error::{Error, Result};
use crate::io::rows_to_csv;
use crate::moments::{alpha, Coeff1d, MomentSequence};
use crate::spectral::{eig_dense, lanczos_extreme, LanczosOptions, SpectralResult};

/// Largest dimension stored densely; larger operators stream their entries.
pub const DENSE_LIMIT: usize = 8192;

/// The section `[α(nm)]_{offset ≤ n, m ≤ max_index}`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    pub max_index: u64,
    pub offset: u64,
    pub data: Vec<f64>,
}

impl TruncatedMatrix {
    pub fn dim(&self) -> usize {
        (self.max_index + 1 - self.offset) as usize
    }

    /// Entry for indices `n, m` (not positions).
    pub fn entry(&self, n: u64, m: u64) -> f64 {
        let d = self.dim();
        self.data[(n - self.offset) as usize * d + (m - self.offset) as usize]
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        dense_matvec(self.dim(), &self.data, x, y);
    }

    pub fn eigenvalues(&self) -> Result<SpectralResult> {
        eig_dense(self.dim(), &self.data)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(self.dim(), self.dim(), &self.data)
    }
}

pub(crate) fn dense_matvec(n: usize, a: &[f64], x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate().take(n) {
        let row = &a[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for (aij, xj) in row.iter().zip(x) {
            acc += aij * xj;
        }
        *yi = acc;
    }
}

fn check_range(max_index: u64, offset: u64) -> Result<()> {
    if !(offset == 1 || offset == 2) {
        return Err(Error::Contract(format!("offset must be 1 or 2, got {offset}")));
    }
    if max_index < offset {
        return Err(Error::Contract(format!("size {max_index} is below offset {offset}")));
    }
    if max_index.checked_mul(max_index).is_none() {
        return Err(Error::Overflow(format!("products up to {max_index}² exceed 64 bits")));
    }
    Ok(())
}

/// `α` evaluated once at every distinct product `nm` of the index range.
#[derive(Debug, Clone)]
pub struct ProductMemo {
    keys: Vec<u64>,
    values: Vec<f64>,
}

impl ProductMemo {
    pub fn new(seq: &MomentSequence, max_index: u64, offset: u64) -> Result<Self> {
        check_range(max_index, offset)?;
        let mut keys = Vec::new();
        for n in offset..=max_index {
            for m in n..=max_index {
                keys.push(n * m);
            }
        }
        keys.sort_unstable();
        keys.dedup();
        let values = keys.iter().map(|&k| alpha(seq, k)).collect::<Result<Vec<_>>>()?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("α({}) is not finite", keys[i])));
        }
        Ok(Self { keys, values })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn get(&self, product: u64) -> f64 {
        let i = self.keys.binary_search(&product).expect("product inside memoized range");
        self.values[i]
    }
}

/// Dense section of the Helson matrix of `seq` on indices `offset..=max_index`.
pub fn build_helson(seq: &MomentSequence, max_index: u64, offset: u64) -> Result<TruncatedMatrix> {
    let memo = ProductMemo::new(seq, max_index, offset)?;
    let d = (max_index + 1 - offset) as usize;
    if d > DENSE_LIMIT {
        return Err(Error::Unsupported(format!(
            "dimension {d} exceeds the dense limit {DENSE_LIMIT}; use HelsonOperator"
        )));
    }
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        let n = offset + i as u64;
        for j in i..d {
            let v = memo.get(n * (offset + j as u64));
            data[i * d + j] = v;
            data[j * d + i] = v;
        }
    }
    Ok(TruncatedMatrix { max_index, offset, data })
}

/// `y_n = Σ_m α(nm) x_m` over `offset ≤ n, m ≤ offset + x.len() - 1`, summed
/// in increasing `m`.
pub fn matvec(seq: &MomentSequence, x: &[f64], offset: u64) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Ok(Vec::new());
    }
    let max_index = offset + x.len() as u64 - 1;
    let memo = ProductMemo::new(seq, max_index, offset)?;
    let mut y = vec![0.0; x.len()];
    for (i, yi) in y.iter_mut().enumerate() {
        let n = offset + i as u64;
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            acc += memo.get(n * (offset + j as u64)) * xj;
        }
        *yi = acc;
    }
    Ok(y)
}

/// Matrix-free access to a Helson section: dense below [`DENSE_LIMIT`],
/// otherwise entries are recomputed from the sequence on every product.
pub enum HelsonOperator<'a> {
    Dense(TruncatedMatrix),
    Streaming { seq: &'a MomentSequence, max_index: u64, offset: u64 },
}

impl<'a> HelsonOperator<'a> {
    pub fn new(seq: &'a MomentSequence, max_index: u64, offset: u64) -> Result<Self> {
        check_range(max_index, offset)?;
        let d = (max_index + 1 - offset) as usize;
        if d <= DENSE_LIMIT {
            Ok(HelsonOperator::Dense(build_helson(seq, max_index, offset)?))
        } else {
            Ok(HelsonOperator::Streaming { seq, max_index, offset })
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HelsonOperator::Dense(m) => m.dim(),
            HelsonOperator::Streaming { max_index, offset, .. } => (max_index + 1 - offset) as usize,
        }
    }

    /// Streaming evaluation failures surface as NaN entries of `y`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        match self {
            HelsonOperator::Dense(m) => m.matvec(x, y),
            HelsonOperator::Streaming { seq, offset, .. } => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let n = offset + i as u64;
                    let mut acc = 0.0;
                    for (j, xj) in x.iter().enumerate() {
                        acc += alpha(seq, n * (offset + j as u64)).unwrap_or(f64::NAN) * xj;
                    }
                    *yi = acc;
                }
            }
        }
    }

    /// Top `k` eigenvalues by Lanczos.
    pub fn top_eigenvalues(&self, k: usize) -> Result<SpectralResult> {
        let r = lanczos_extreme(|x: &[f64], y: &mut [f64]| self.apply(x, y), self.dim(), LanczosOptions::top(k))?;
        if r.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("matrix entries could not be evaluated".into()));
        }
        Ok(r)
    }
}

/// A section of a Hankel matrix on `dim` variables over the cube `κ_j < cap`,
/// indexed lexicographically with the first coordinate most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelTruncation {
    pub dim: usize,
    pub cap: usize,
    pub data: Vec<f64>,
}

impl HankelTruncation {
    pub fn size(&self) -> usize {
        self.cap.pow(self.dim as u32)
    }

    pub fn eigenvalues(&self) -> Result<SpectralResult> {
        eig_dense(self.size(), &self.data)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        dense_matvec(self.size(), &self.data, x, y);
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(self.size(), self.size(), &self.data)
    }
}

/// `[β(j + k)]_{0 ≤ j, k < n}`.
pub fn build_hankel_1d(beta: &Coeff1d, n: usize) -> HankelTruncation {
    let values: Vec<f64> = (0..2 * n.max(1) - 1).map(|k| beta.eval(k)).collect();
    let mut data = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            data[j * n + k] = values[j + k];
        }
    }
    HankelTruncation { dim: 1, cap: n, data }
}

/// `[β(κ + κ')]` over `{κ ∈ ℕ₀^d : κ_j < cap}`.
pub fn build_hankel_multi<F>(beta: F, dim: usize, cap: usize) -> Result<HankelTruncation>
where
    F: Fn(&[usize]) -> f64,
{
    let size = cap
        .checked_pow(dim as u32)
        .filter(|s| *s <= DENSE_LIMIT)
        .ok_or_else(|| Error::Unsupported(format!("cube {cap}^{dim} exceeds the dense limit")))?;
    let digits = |mut t: usize| {
        let mut k = vec![0usize; dim];
        for slot in k.iter_mut().rev() {
            *slot = t % cap;
            t /= cap;
        }
        k
    };
    let indices: Vec<Vec<usize>> = (0..size).map(digits).collect();
    let mut data = vec![0.0; size * size];
    let mut sum = vec![0usize; dim];
    for a in 0..size {
        for b in a..size {
            for (s, (x, y)) in sum.iter_mut().zip(indices[a].iter().zip(&indices[b])) {
                *s = x + y;
            }
            let v = beta(&sum);
            data[a * size + b] = v;
            data[b * size + a] = v;
        }
    }
    Ok(HankelTruncation { dim, cap, data })
}

/// `‖A_1 ⊗ … ⊗ A_k‖ = Π ‖A_i‖`.
pub fn tensor_norm(norms: &[f64]) -> Result<f64> {
    if let Some(x) = norms.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::Contract(format!("operator norms must be non-negative, got {x}")));
    }
    Ok(norms.iter().product())
}
