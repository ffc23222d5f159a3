use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use super::form::HelsonFormSpec;
use super::linalg::symmetric_rank;
use crate::error::{Error, Result};
use crate::index::{multiindex_add, nth_prime, FactorSieve, MultiIndex};

/// Relative singular value threshold for numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Default monomial cap `n(κ) ≤ cap` for the first rank evaluation.
pub const DEFAULT_RANK_CAP: u64 = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormRank {
    /// Rank at the largest cap.
    pub rank: usize,
    /// The rank did not change over two cap doublings.
    pub stabilized: bool,
    /// `(cap, number of monomials, rank)` per evaluation.
    pub history: Vec<(u64, usize, usize)>,
}

/// Monomials `z^κ` with `n(κ) ≤ cap` in the given variables (all variables
/// when `None`), ordered by `n(κ)`.
pub fn rank_monomials(vars: Option<&BTreeSet<usize>>, cap: u64) -> Result<Vec<(u64, MultiIndex)>> {
    let limit = usize::try_from(cap).ok().filter(|c| *c <= 1 << 24).ok_or_else(|| {
        Error::Contract(format!("monomial cap {cap} is too large for dense rank computation"))
    })?;
    let allowed: Option<Vec<u64>> = vars.map(|v| v.iter().map(|&j| nth_prime(j)).collect());
    let sieve = FactorSieve::new(limit);
    let mut out = Vec::new();
    for n in 1..=limit {
        let ok = match &allowed {
            None => true,
            Some(ps) => sieve.prime_powers(n).iter().all(|(p, _)| ps.contains(p)),
        };
        if ok {
            out.push((n as u64, sieve.factorize(n)));
        }
    }
    Ok(out)
}

/// Numerical rank of `[z^κ, z^κ']` over the monomials with `n(κ) ≤ cap`.
pub fn rank_at_cap(spec: &HelsonFormSpec, cap: u64) -> Result<(usize, usize)> {
    let vars = spec.active_variables();
    let monos = rank_monomials(vars.as_ref(), cap)?;
    let d = monos.len();
    if d > 4096 {
        return Err(Error::Contract(format!("{d} monomials exceed the dense rank limit")));
    }
    let mut memo: HashMap<u64, Complex64> = HashMap::new();
    let mut a = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in i..d {
            let product = monos[i].0 * monos[j].0;
            let v = *memo
                .entry(product)
                .or_insert_with(|| spec.on_monomial(&multiindex_add(&monos[i].1, &monos[j].1)));
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical(format!("form value at n = {product} is not finite")));
            }
            a[i * d + j] = v;
            a[j * d + i] = v;
        }
    }
    let (rank, _) = symmetric_rank(d, &a, RANK_THRESHOLD)?;
    Ok((rank, d))
}

/// Rank at `cap`, `2 cap` and `4 cap`.
pub fn form_rank(spec: &HelsonFormSpec, cap: u64) -> Result<FormRank> {
    if cap < 1 {
        return Err(Error::Contract("degree cap must be at least 1".into()));
    }
    spec.validate()?;
    let mut history = Vec::with_capacity(3);
    for c in [cap, 2 * cap, 4 * cap] {
        let (r, d) = rank_at_cap(spec, c)?;
        history.push((c, d, r));
    }
    let rank = history[2].2;
    let stabilized = history.iter().all(|h| h.2 == rank);
    Ok(FormRank { rank, stabilized, history })
}
