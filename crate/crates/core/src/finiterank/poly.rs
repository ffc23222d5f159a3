use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{multiindex_add, nth_prime, MultiIndex};
use crate::moments::Point;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A polynomial in `z_1, z_2, …` with complex coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparsePolynomial {
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl SparsePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(MultiIndex::empty(), c)
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn monomial(kappa: MultiIndex, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != ZERO {
            terms.insert(kappa, c);
        }
        Self { terms }
    }

    /// `z_j`.
    pub fn variable(j: usize) -> Self {
        Self::monomial(MultiIndex::unit(j), Complex64::new(1.0, 0.0))
    }

    /// Sums coefficients of repeated multi-indices and drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Complex64)>>(terms: I) -> Self {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        Self { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, kappa: &MultiIndex) -> Complex64 {
        self.terms.get(kappa).copied().unwrap_or(ZERO)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    /// Variables that occur with a positive exponent.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flat_map(|k| k.entries().iter().map(|e| e.0)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms().chain(other.terms()).map(|(k, c)| (k.clone(), *c)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k.clone(), c * s)))
    }
}

fn value_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Product of two polynomials. Contributions to each coefficient are summed
/// in an order fixed by their values, so `f g` and `g f` agree bitwise.
pub fn poly_mul(f: &SparsePolynomial, g: &SparsePolynomial) -> SparsePolynomial {
    let mut parts: BTreeMap<MultiIndex, Vec<Complex64>> = BTreeMap::new();
    for (a, ca) in f.terms() {
        for (b, cb) in g.terms() {
            parts.entry(multiindex_add(a, b)).or_default().push(ca * cb);
        }
    }
    let terms = parts.into_iter().map(|(k, mut v)| {
        v.sort_by(value_order);
        (k, v.into_iter().fold(ZERO, |acc, x| acc + x))
    });
    SparsePolynomial::from_terms(terms)
}

/// A direction of differentiation `c` with finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, f64, f64)>", into = "Vec<(usize, f64, f64)>")]
pub struct Direction {
    entries: Vec<(usize, Complex64)>,
}

impl Direction {
    /// Entries may come in any order; zero values are dropped and repeated
    /// coordinates are rejected.
    pub fn new(mut entries: Vec<(usize, Complex64)>) -> Result<Self> {
        entries.retain(|e| e.1 != ZERO);
        entries.sort_by_key(|e| e.0);
        if entries.is_empty() {
            return Err(Error::Contract("a direction must have a nonzero entry".into()));
        }
        if entries.iter().any(|e| e.0 == 0) {
            return Err(Error::Contract("coordinate indices are 1-based".into()));
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Contract("repeated coordinate in direction".into()));
        }
        if entries.iter().any(|e| !(e.1.re.is_finite() && e.1.im.is_finite())) {
            return Err(Error::Contract("direction entries must be finite".into()));
        }
        Ok(Self { entries })
    }

    pub fn real(entries: &[(usize, f64)]) -> Result<Self> {
        Self::new(entries.iter().map(|&(j, v)| (j, Complex64::new(v, 0.0))).collect())
    }

    /// `e_j`.
    pub fn unit(j: usize) -> Self {
        Self::real(&[(j, 1.0)]).expect("unit vectors are valid directions")
    }

    pub fn entries(&self) -> &[(usize, Complex64)] {
        &self.entries
    }

    pub fn get(&self, j: usize) -> Complex64 {
        self.entries.binary_search_by_key(&j, |e| e.0).map(|i| self.entries[i].1).unwrap_or(ZERO)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn scaled(&self, s: Complex64) -> Option<Self> {
        Self::new(self.entries.iter().map(|&(j, c)| (j, c * s)).collect()).ok()
    }

    /// Total order on the exact bit patterns, used to group equal factors.
    pub fn bit_cmp(&self, other: &Self) -> Ordering {
        let key = |d: &Self| -> Vec<(usize, u64, u64)> {
            d.entries.iter().map(|(j, c)| (*j, c.re.to_bits(), c.im.to_bits())).collect()
        };
        key(self).cmp(&key(other))
    }
}

impl TryFrom<Vec<(usize, f64, f64)>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<(usize, f64, f64)>) -> Result<Self> {
        Self::new(v.into_iter().map(|(j, re, im)| (j, Complex64::new(re, im))).collect())
    }
}

impl From<Direction> for Vec<(usize, f64, f64)> {
    fn from(d: Direction) -> Self {
        d.entries.into_iter().map(|(j, c)| (j, c.re, c.im)).collect()
    }
}

/// `D(c) f = Σ_j c(j) ∂f/∂z_j`.
pub fn dir_derivative(f: &SparsePolynomial, c: &Direction) -> SparsePolynomial {
    let mut out = Vec::new();
    for (kappa, coef) in f.terms() {
        for &(j, cj) in c.entries() {
            let e = kappa.get(j);
            if e > 0 {
                let lowered = kappa.decrement(j).expect("positive exponent");
                out.push((lowered, coef * cj * e as f64));
            }
        }
    }
    SparsePolynomial::from_terms(out)
}

/// `λ^κ` for a real point, through logarithms for Bohr points.
pub(crate) fn point_monomial(point: &Point, kappa: &MultiIndex) -> f64 {
    point.monomial(kappa)
}

/// `ln n(κ) = Σ κ_j ln p_j`.
pub(crate) fn log_index(kappa: &MultiIndex) -> f64 {
    kappa.entries().iter().map(|&(j, e)| e as f64 * (nth_prime(j) as f64).ln()).sum()
}

/// `f(λ) = Σ_κ f_κ λ^κ`.
pub fn poly_eval(f: &SparsePolynomial, point: &Point) -> Complex64 {
    f.terms().fold(ZERO, |acc, (kappa, coef)| acc + coef * point_monomial(point, kappa))
}
