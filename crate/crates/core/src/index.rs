//! Primes and the correspondence `n = p_1^{κ_1} p_2^{κ_2} ⋯` between positive
//! integers and finitely supported multi-indices.
//!
//! The prime table is process-wide and append-only. It is grown by a
//! segmented sieve whenever a caller asks for a prime beyond its current end,
//! up to [`TABLE_LIMIT`]. Primes above the limit can still be located (their
//! 1-based position is found by Lucy's prime-counting recursion) as long as
//! they do not exceed [`COUNT_LIMIT`].

use std::collections::HashMap;
use std::fmt;
use std::ops::Add;
use std::sync::{Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest value the sieve table will ever cover.
pub const TABLE_LIMIT: u64 = 1 << 26;
/// Largest prime whose position can be computed by counting.
pub const COUNT_LIMIT: u64 = 1 << 40;

const SEGMENT: u64 = 1 << 16;

struct PrimeTable {
    primes: Vec<u64>,
    /// Every prime `<= covered` is in `primes`.
    covered: u64,
}

fn table() -> &'static RwLock<PrimeTable> {
    static TABLE: OnceLock<RwLock<PrimeTable>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let covered = 1024;
        let mut composite = vec![false; covered as usize + 1];
        let mut primes = Vec::new();
        for i in 2..=covered as usize {
            if !composite[i] {
                primes.push(i as u64);
                let mut k = i * i;
                while k <= covered as usize {
                    composite[k] = true;
                    k += i;
                }
            }
        }
        RwLock::new(PrimeTable { primes, covered })
    })
}

/// Extends the table so that it covers every prime `<= bound` (capped at
/// [`TABLE_LIMIT`]). The new segment is sieved outside the lock and appended
/// in one step, so readers only ever see complete entries.
fn ensure_covered(bound: u64) {
    let bound = bound.min(TABLE_LIMIT);
    loop {
        let (lo, base) = {
            let t = table().read().expect("prime table poisoned");
            if t.covered >= bound {
                return;
            }
            (t.covered + 1, t.primes.clone())
        };
        let hi = (lo + SEGMENT - 1).max(bound.min(lo + 64 * SEGMENT)).min(TABLE_LIMIT);
        let segment = sieve_segment(lo, hi, &base);
        let mut t = table().write().expect("prime table poisoned");
        if t.covered + 1 == lo {
            t.primes.extend_from_slice(&segment);
            t.covered = hi;
        }
    }
}

/// Primes in `[lo, hi]`, given all primes up to at least `sqrt(hi)`.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut start = lo.div_ceil(p) * p;
        if start < p * p {
            start = p * p;
        }
        let mut k = start;
        while k <= hi {
            composite[(k - lo) as usize] = true;
            k += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + i as u64)
        .filter(|&v| v >= 2)
        .collect()
}

fn ensure_count(count: usize) {
    loop {
        let (len, covered) = {
            let t = table().read().expect("prime table poisoned");
            (t.primes.len(), t.covered)
        };
        if len >= count || covered >= TABLE_LIMIT {
            return;
        }
        // p_n < n (ln n + ln ln n) for n >= 6.
        let n = count as f64;
        let estimate = if count < 6 { 16.0 } else { n * (n.ln() + n.ln().ln()) + 16.0 };
        ensure_covered((estimate as u64).max(covered * 2));
    }
}

/// The first `count` primes in increasing order.
pub fn primes(count: usize) -> Vec<u64> {
    ensure_count(count);
    let t = table().read().expect("prime table poisoned");
    assert!(
        t.primes.len() >= count,
        "requested {count} primes, table limit holds {}",
        t.primes.len()
    );
    t.primes[..count].to_vec()
}

/// The `j`-th prime, 1-based (`nth_prime(1) == 2`).
///
/// Panics if the prime lies above `COUNT_LIMIT`; see [`try_nth_prime`].
pub fn nth_prime(j: usize) -> u64 {
    try_nth_prime(j).expect("prime position out of range")
}

/// The `j`-th prime, located by prime counting once it lies beyond the
/// sieve table.
pub fn try_nth_prime(j: usize) -> Result<u64> {
    if j == 0 {
        return Err(Error::Domain("prime positions are 1-based".into()));
    }
    {
        let t = table().read().expect("prime table poisoned");
        if let Some(&p) = t.primes.get(j - 1) {
            return Ok(p);
        }
    }
    ensure_count(j);
    {
        let t = table().read().expect("prime table poisoned");
        if let Some(&p) = t.primes.get(j - 1) {
            return Ok(p);
        }
    }
    static BEYOND: OnceLock<Mutex<HashMap<usize, u64>>> = OnceLock::new();
    let cache = BEYOND.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&p) = cache.lock().expect("prime cache poisoned").get(&j) {
        return Ok(p);
    }
    let n = j as f64;
    let (l, ll) = (n.ln(), n.ln().ln());
    let mut x = (n * (l + ll - 1.0 + (ll - 2.0) / l)) as u64;
    let mut c = prime_count(x)?;
    let p = if c < j {
        loop {
            x += 1;
            if is_prime(x) {
                c += 1;
                if c == j {
                    break x;
                }
            }
        }
    } else {
        loop {
            if is_prime(x) {
                if c == j {
                    break x;
                }
                c -= 1;
            }
            x -= 1;
        }
    };
    cache.lock().expect("prime cache poisoned").insert(j, p);
    Ok(p)
}

/// `ln p_j`.
pub fn log_prime(j: usize) -> f64 {
    (nth_prime(j) as f64).ln()
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// π(x), the number of primes `<= x`, by Lucy's recursion over the values
/// `floor(x / k)`. Cost is about `x^{3/4}`.
pub fn prime_count(x: u64) -> Result<usize> {
    if x > COUNT_LIMIT {
        return Err(Error::Unsupported(format!("prime counting above {COUNT_LIMIT}")));
    }
    if x < 2 {
        return Ok(0);
    }
    if x <= table().read().expect("prime table poisoned").covered {
        let t = table().read().expect("prime table poisoned");
        return Ok(t.primes.partition_point(|&p| p <= x));
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, usize>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&c) = cache.lock().expect("count cache poisoned").get(&x) {
        return Ok(c);
    }
    let r = isqrt(x);
    // small[v] = S(v) for v <= r, large[k] = S(x / k) for k <= r.
    let mut small: Vec<i64> = (0..=r).map(|v| v as i64 - 1).collect();
    let mut large: Vec<i64> = (0..=r).map(|k| if k == 0 { 0 } else { (x / k) as i64 - 1 }).collect();
    for p in 2..=r {
        if small[p as usize] == small[p as usize - 1] {
            continue;
        }
        let sp = small[p as usize - 1];
        let p2 = p * p;
        let kmax = r.min(x / p2);
        for k in 1..=kmax {
            let d = k * p;
            let s_xd = if d <= r { large[d as usize] } else { small[(x / d) as usize] };
            large[k as usize] -= s_xd - sp;
        }
        if p2 <= r {
            for v in (p2..=r).rev() {
                small[v as usize] -= small[(v / p) as usize] - sp;
            }
        }
    }
    let c = large[1] as usize;
    cache.lock().expect("count cache poisoned").insert(x, c);
    Ok(c)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// 1-based position of the prime `p`, or `None` if `p` is not prime.
pub fn prime_position(p: u64) -> Result<Option<usize>> {
    if p <= TABLE_LIMIT {
        ensure_covered(p);
        let t = table().read().expect("prime table poisoned");
        return Ok(t.primes.binary_search(&p).ok().map(|i| i + 1));
    }
    if !is_prime(p) {
        return Ok(None);
    }
    prime_count(p).map(Some)
}

/// Splits off the full power of `p` from `n`: returns `(e, n / p^e)`.
pub fn split_power(mut n: u64, p: u64) -> (u32, u64) {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    (e, n)
}

/// A finitely supported exponent vector, stored sparsely as
/// `(prime position, exponent)` pairs with strictly increasing positions and
/// positive exponents. The empty index corresponds to `n = 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, u32)>", into = "Vec<(usize, u32)>")]
pub struct MultiIndex {
    entries: Vec<(usize, u32)>,
}

impl MultiIndex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validating constructor.
    pub fn new(entries: Vec<(usize, u32)>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Contract("multi-index positions must increase strictly".into()));
            }
        }
        if entries.iter().any(|&(j, e)| j == 0 || e == 0) {
            return Err(Error::Contract(
                "multi-index positions are 1-based and exponents positive".into(),
            ));
        }
        Ok(Self { entries })
    }

    /// Builds from arbitrary `(position, exponent)` pairs, merging repeats and
    /// dropping zero exponents.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut v: Vec<(usize, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut entries: Vec<(usize, u32)> = Vec::with_capacity(v.len());
        for (j, e) in v {
            match entries.last_mut() {
                Some(last) if last.0 == j => last.1 += e,
                _ => entries.push((j, e)),
            }
        }
        Self { entries }
    }

    /// Dense exponent vector `κ_1, …, κ_d`; trailing zeros allowed.
    pub fn from_dense(exponents: &[u32]) -> Self {
        Self::from_pairs(exponents.iter().enumerate().map(|(i, &e)| (i + 1, e)))
    }

    /// The unit vector `e_j`.
    pub fn unit(j: usize) -> Self {
        Self { entries: vec![(j, 1)] }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `κ_j`.
    pub fn get(&self, j: usize) -> u32 {
        self.entries
            .binary_search_by_key(&j, |&(p, _)| p)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// `|κ| = Σ κ_j`.
    pub fn degree(&self) -> u32 {
        self.entries.iter().map(|&(_, e)| e).sum()
    }

    /// `κ! = Π κ_j!`.
    pub fn factorial(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, e)| (1..=e).map(f64::from).product::<f64>())
            .product()
    }

    /// Returns `κ - e_j` if `κ_j > 0`.
    pub fn decrement(&self, j: usize) -> Option<Self> {
        let i = self.entries.binary_search_by_key(&j, |&(p, _)| p).ok()?;
        let mut entries = self.entries.clone();
        if entries[i].1 == 1 {
            entries.remove(i);
        } else {
            entries[i].1 -= 1;
        }
        Some(Self { entries })
    }

    /// Largest prime position with a nonzero exponent.
    pub fn max_position(&self) -> usize {
        self.entries.last().map_or(0, |&(j, _)| j)
    }
}

impl TryFrom<Vec<(usize, u32)>> for MultiIndex {
    type Error = Error;
    fn try_from(v: Vec<(usize, u32)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MultiIndex> for Vec<(usize, u32)> {
    fn from(k: MultiIndex) -> Self {
        k.entries
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (j, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({j},{e})")?;
        }
        write!(f, "}}")
    }
}

/// Componentwise sum; corresponds to multiplying the integers.
pub fn multiindex_add(a: &MultiIndex, b: &MultiIndex) -> MultiIndex {
    let mut entries = Vec::with_capacity(a.entries.len() + b.entries.len());
    let (mut i, mut k) = (0, 0);
    while i < a.entries.len() || k < b.entries.len() {
        match (a.entries.get(i), b.entries.get(k)) {
            (Some(&x), Some(&y)) if x.0 == y.0 => {
                entries.push((x.0, x.1 + y.1));
                i += 1;
                k += 1;
            }
            (Some(&x), Some(&y)) if x.0 < y.0 => {
                entries.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                entries.push(y);
                k += 1;
            }
            (Some(&x), None) => {
                entries.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                entries.push(y);
                k += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    MultiIndex { entries }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        multiindex_add(self, rhs)
    }
}

/// The multi-index of `n`.
pub fn factorize(n: u64) -> Result<MultiIndex> {
    if n == 0 {
        return Err(Error::Domain("factorize: n must be positive".into()));
    }
    let mut rest = n;
    let mut entries = Vec::new();
    // Small factors first, so the table only grows to the square root of
    // whatever remains.
    let mut pos = 0usize;
    loop {
        if rest == 1 {
            break;
        }
        pos += 1;
        let p = {
            let t = table().read().expect("prime table poisoned");
            t.primes.get(pos - 1).copied()
        };
        let p = match p {
            Some(p) => p,
            None => {
                let covered = table().read().expect("prime table poisoned").covered;
                if covered >= TABLE_LIMIT {
                    break;
                }
                ensure_covered(covered * 2);
                pos -= 1;
                continue;
            }
        };
        if p.checked_mul(p).is_none_or(|sq| sq > rest) {
            break;
        }
        let (e, r) = split_power(rest, p);
        if e > 0 {
            entries.push((pos, e));
            rest = r;
        }
    }
    if rest > 1 {
        // `rest` has no prime factor below the last tried prime.
        let position = if is_prime(rest) {
            prime_position(rest)?
        } else {
            None
        };
        match position {
            Some(j) => entries.push((j, 1)),
            None => {
                return Err(Error::Unsupported(format!(
                    "{n} has a composite cofactor {rest} with all prime factors above {TABLE_LIMIT}"
                )))
            }
        }
    }
    Ok(MultiIndex { entries })
}

/// `p^κ`, with explicit overflow reporting.
pub fn compose(kappa: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    for &(j, e) in &kappa.entries {
        let p = try_nth_prime(j)?;
        for _ in 0..e {
            acc = acc
                .checked_mul(p)
                .ok_or_else(|| Error::Overflow(format!("p^κ for κ = {kappa} exceeds 64 bits")))?;
        }
    }
    Ok(acc)
}

/// Smallest-prime-factor table for bulk factorization of `1..=limit`.
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: usize) -> Self {
        assert!(limit < u32::MAX as usize, "factor sieve limit too large");
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut k = i;
                while k <= limit {
                    if spf[k] == 0 {
                        spf[k] = i as u32;
                    }
                    k += i;
                }
            }
        }
        ensure_covered(limit as u64);
        Self { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Prime factors of `n` with multiplicity, as `(prime, exponent)`.
    pub fn prime_powers(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            n /= p;
            match out.last_mut() {
                Some(last) if last.0 == p as u64 => last.1 += 1,
                _ => out.push((p as u64, 1)),
            }
        }
        out
    }

    /// Ω(n), the number of prime factors counted with multiplicity.
    pub fn big_omega(&self, mut n: usize) -> u32 {
        let mut c = 0;
        while n > 1 {
            n /= self.spf[n] as usize;
            c += 1;
        }
        c
    }

    pub fn factorize(&self, n: usize) -> MultiIndex {
        let t = table().read().expect("prime table poisoned");
        let entries = self
            .prime_powers(n)
            .into_iter()
            .map(|(p, e)| (t.primes.binary_search(&p).expect("sieve prime in table") + 1, e))
            .collect();
        MultiIndex { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(primes(1), vec![2]);
        assert_eq!(primes(5), vec![2, 3, 5, 7, 11]);
        assert_eq!(primes(8).iter().product::<u64>(), 9_699_690);
    }

    #[test]
    fn table_grows_on_demand() {
        assert_eq!(nth_prime(10_000), 104_729);
        assert_eq!(nth_prime(100_000), 1_299_709);
        let ps = primes(2000);
        assert!(ps.iter().all(|&p| is_prime(p)));
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12).unwrap().entries(), &[(1, 2), (2, 1)]);
        assert_eq!(factorize(360).unwrap().entries(), &[(1, 3), (2, 2), (3, 1)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&MultiIndex::empty()).unwrap(), 1);
        let k = MultiIndex::new(vec![(1, 1), (3, 2)]).unwrap();
        assert_eq!(compose(&k).unwrap(), 50);
        let big = MultiIndex::new(vec![(1, 64)]).unwrap();
        assert!(matches!(compose(&big), Err(Error::Overflow(_))));
        let edge = MultiIndex::new(vec![(1, 63)]).unwrap();
        assert_eq!(compose(&edge).unwrap(), 1 << 63);
    }

    #[test]
    fn add_examples() {
        let s = multiindex_add(&factorize(6).unwrap(), &factorize(10).unwrap());
        assert_eq!(s, factorize(60).unwrap());
        let k = factorize(84).unwrap();
        assert_eq!(&k + &MultiIndex::empty(), k);
        let s = multiindex_add(&factorize(8).unwrap(), &factorize(9).unwrap());
        assert_eq!(s.entries(), &[(1, 3), (2, 2)]);
    }

    #[test]
    fn invalid_multi_index_rejected() {
        assert!(MultiIndex::new(vec![(2, 1), (1, 1)]).is_err());
        assert!(MultiIndex::new(vec![(1, 0)]).is_err());
        assert!(MultiIndex::new(vec![(0, 1)]).is_err());
    }

    #[test]
    fn large_prime_factors() {
        // 2^61 - 1 is prime; its position comes from prime counting only if
        // small enough, so expect a clean error instead.
        let m61 = (1u64 << 61) - 1;
        assert!(is_prime(m61));
        assert!(factorize(m61).is_err());
        // A prime just above the sieve limit is located by counting.
        let mut p = TABLE_LIMIT + 1;
        while !is_prime(p) {
            p += 1;
        }
        let k = factorize(2 * p).unwrap();
        assert_eq!(compose(&k).unwrap(), 2 * p);
        assert_eq!(prime_count(TABLE_LIMIT).unwrap() + 1, k.entries()[1].0);
    }

    #[test]
    fn prime_count_matches_table() {
        for x in [2u64, 10, 100, 1000, 7919, 100_000] {
            let direct = primes(20_000).iter().filter(|&&p| p <= x).count();
            assert_eq!(prime_count(x).unwrap(), direct);
        }
        assert_eq!(prime_count(10_000_000_000).unwrap(), 455_052_511);
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        let s = FactorSieve::new(5000);
        for n in 1..=5000 {
            assert_eq!(s.factorize(n), factorize(n as u64).unwrap());
            assert_eq!(s.big_omega(n), factorize(n as u64).unwrap().degree());
        }
    }

    #[test]
    fn concurrent_readers_see_whole_entries() {
        let handles: Vec<_> = (0..4)
            .map(|t| {
                std::thread::spawn(move || {
                    for j in (1..40_000).step_by(997 + t) {
                        assert!(is_prime(nth_prime(j)));
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }
}
