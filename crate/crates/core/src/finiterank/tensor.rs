//! Finite sums of elementary tensors `s · c_1 ⊗ ⋯ ⊗ c_m` over sparse
//! directions: symmetrization and elimination of dependent terms.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{pivot_columns, solve, IncrementalBasis};
use super::poly::Direction;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance for linear dependence of partial products.
pub const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTensorRep {
    pub order: usize,
    pub terms: Vec<(Complex64, Vec<Direction>)>,
}

impl SymmetricTensorRep {
    pub fn new(order: usize, terms: Vec<(Complex64, Vec<Direction>)>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.1.len() != order) {
            return Err(Error::Contract(format!("term with {} factors in an order-{order} tensor", t.1.len())));
        }
        Ok(Self { order, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `T(j_1, …, j_m)`.
    pub fn evaluate(&self, index: &[usize]) -> Complex64 {
        assert_eq!(index.len(), self.order, "index length must equal the tensor order");
        self.terms.iter().fold(ZERO, |acc, (s, factors)| {
            acc + factors.iter().zip(index).fold(*s, |p, (c, &j)| p * c.get(j))
        })
    }

    /// Sorted union of the factor supports.
    pub fn support(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().flat_map(|t| t.1.iter().flat_map(|c| c.support())).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// All values on `support^m`, row-major in the order of [`Self::support`].
    pub fn dense(&self) -> (Vec<usize>, Vec<Complex64>) {
        let supp = self.support();
        let values = tuples(supp.len(), self.order).map(|t| {
            let idx: Vec<usize> = t.iter().map(|&i| supp[i]).collect();
            self.evaluate(&idx)
        });
        let values = values.collect();
        (supp, values)
    }
}

/// All tuples in `{0, …, base-1}^len`, last position fastest.
fn tuples(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = if len == 0 { 1 } else { base.pow(len as u32) };
    (0..count).map(move |mut k| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = k % base.max(1);
            k /= base.max(1);
        }
        t
    })
}

/// Distinct orderings of `classes` (a sorted list of class labels), in
/// lexicographic order.
fn distinct_orderings(classes: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = classes.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn factor_key_cmp(a: &[Direction], b: &[Direction]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.bit_cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Factors sorted by bit pattern: the multiset of a term.
fn multiset(factors: &[Direction]) -> Vec<Direction> {
    let mut v = factors.to_vec();
    v.sort_by(|a, b| a.bit_cmp(b));
    v
}

fn same_bits(a: Complex64, b: Complex64) -> bool {
    a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
}

/// Expansion of `sym` of a multiset with total scalar `s`: one term per
/// distinct ordering, weighted by `Π mult! / m!`.
fn expand(s: Complex64, sorted: &[Direction]) -> Vec<(Complex64, Vec<Direction>)> {
    let m = sorted.len();
    let mut classes = Vec::with_capacity(m);
    let mut reps: Vec<&Direction> = Vec::new();
    for d in sorted {
        match reps.last() {
            Some(r) if r.bit_cmp(d) == Ordering::Equal => {}
            _ => reps.push(d),
        }
        classes.push(reps.len() - 1);
    }
    let mut weight: f64 = 1.0;
    let mut run = 1usize;
    for i in 1..=m {
        if i < m && classes[i] == classes[i - 1] {
            run += 1;
            weight *= run as f64;
        } else {
            run = 1;
        }
    }
    let m_fact: f64 = (1..=m).map(|i| i as f64).product();
    let scalar = s * (weight / m_fact);
    distinct_orderings(&classes)
        .into_iter()
        .map(|o| (scalar, o.into_iter().map(|c| reps[c].clone()).collect()))
        .collect()
}

/// Whether a group of terms sharing one multiset is already the symmetric
/// expansion: every distinct ordering exactly once, all scalars equal.
fn is_symmetric_group(group: &[&(Complex64, Vec<Direction>)], orderings: usize) -> bool {
    if group.len() != orderings {
        return false;
    }
    let s0 = group[0].0;
    if !group.iter().all(|t| same_bits(t.0, s0)) {
        return false;
    }
    let mut keys: Vec<&Vec<Direction>> = group.iter().map(|t| &t.1).collect();
    keys.sort_by(|a, b| factor_key_cmp(a, b));
    keys.windows(2).all(|w| factor_key_cmp(w[0], w[1]) != Ordering::Equal)
}

/// The projection `(1/m!) Σ_π c_π(1) ⊗ ⋯ ⊗ c_π(m)`, expanded into
/// elementary terms. Terms with the same factor multiset are combined;
/// groups that are already symmetric pass through unchanged, so applying
/// `sym` twice gives bitwise the same result.
pub fn sym(rep: &SymmetricTensorRep) -> SymmetricTensorRep {
    // groups keyed by multiset, in order of first appearance
    let mut groups: Vec<(Vec<Direction>, Vec<&(Complex64, Vec<Direction>)>)> = Vec::new();
    for t in &rep.terms {
        let key = multiset(&t.1);
        match groups.iter_mut().find(|g| factor_key_cmp(&g.0, &key) == Ordering::Equal) {
            Some(g) => g.1.push(t),
            None => groups.push((key, vec![t])),
        }
    }
    let mut terms = Vec::new();
    for (key, group) in groups {
        let orderings = expand(ONE, &key).len();
        if is_symmetric_group(&group, orderings) {
            terms.extend(group.into_iter().cloned());
            continue;
        }
        let total = group.iter().fold(ZERO, |acc, t| acc + t.0);
        if total == ZERO {
            continue;
        }
        terms.extend(expand(total, &key));
    }
    SymmetricTensorRep { order: rep.order, terms }
}

fn dense_direction(d: &Direction, supp: &[usize]) -> Vec<Complex64> {
    supp.iter().map(|&j| d.get(j)).collect()
}

/// Partial product `s · c_1 ⊗ ⋯ ⊗ c_{m-1}` on `supp^{m-1}`.
fn partial_product(s: Complex64, factors: &[Direction], supp: &[usize]) -> Vec<Complex64> {
    let dense: Vec<Vec<Complex64>> = factors.iter().map(|d| dense_direction(d, supp)).collect();
    tuples(supp.len(), factors.len())
        .map(|t| t.iter().zip(&dense).fold(s, |p, (&i, v)| p * v[i]))
        .collect()
}

fn sparse(values: &[Complex64], supp: &[usize]) -> Option<Direction> {
    Direction::new(supp.iter().zip(values).map(|(&j, &v)| (j, v)).collect()).ok()
}

/// If `b = t a` up to rounding, returns `t`.
fn parallel_factor(b: &[Complex64], a: &[Complex64]) -> Option<Complex64> {
    let (i, ai) = a.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if *ai == ZERO {
        return None;
    }
    let t = b[i] / ai;
    let err: f64 = b.iter().zip(a).map(|(x, y)| (x - t * y).norm_sqr()).sum::<f64>().sqrt();
    let size: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    (err <= 1e-13 * size).then_some(t)
}

/// Rewrites `rep` so that the partial products of the first `m - 1`
/// factors are linearly independent. A dependent partial product is
/// expressed through the retained ones and its last factor is merged into
/// theirs; the retained last factors are then recomputed from the tensor
/// values on a pivot set of index tuples. Tensor values are unchanged and
/// the number of terms never increases.
pub fn canonicalize(rep: &SymmetricTensorRep) -> SymmetricTensorRep {
    let m = rep.order;
    if m == 0 {
        let s = rep.terms.iter().fold(ZERO, |acc, t| acc + t.0);
        let terms = if s == ZERO { Vec::new() } else { vec![(s, Vec::new())] };
        return SymmetricTensorRep { order: 0, terms };
    }
    let supp = rep.support();
    let d = supp.len();
    let mut basis = IncrementalBasis::new(DEPENDENCE_TOL);
    // retained terms: (scalar, leading factors, partial product, last factor)
    let mut kept: Vec<(Complex64, Vec<Direction>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for (s, factors) in &rep.terms {
        if *s == ZERO {
            continue;
        }
        let lead = &factors[..m - 1];
        let last = dense_direction(&factors[m - 1], &supp);
        let p = partial_product(*s, lead, &supp);
        match basis.insert(&p) {
            None => kept.push((*s, lead.to_vec(), p, last.clone(), last)),
            Some(x) => {
                for (k, xk) in x.iter().enumerate() {
                    for (b, a) in kept[k].3.iter_mut().zip(&last) {
                        *b += xk * a;
                    }
                }
            }
        }
    }
    let r = kept.len();
    if r > 0 {
        let cols = d.pow((m - 1) as u32);
        let rows: Vec<Complex64> = kept.iter().flat_map(|k| k.2.iter().copied()).collect();
        if let Some(pivots) = pivot_columns(r, cols, &rows) {
            let (_, values) = rep.dense();
            let a: Vec<Complex64> = (0..r).flat_map(|i| kept.iter().map(move |k| (i, k))).map(|(i, k)| k.2[pivots[i]]).collect();
            let b: Vec<Complex64> = pivots.iter().flat_map(|&p| values[p * d..(p + 1) * d].iter().copied()).collect();
            if let Some(x) = solve(r, &a, d, &b) {
                for (k, term) in kept.iter_mut().enumerate() {
                    term.3 = x[k * d..(k + 1) * d].to_vec();
                }
            }
        }
    }
    let mut terms = Vec::with_capacity(r);
    for (s, mut lead, _, last, original) in kept {
        let (scalar, factor) = match parallel_factor(&last, &original) {
            Some(t) => (s * t, original),
            None => (s, last),
        };
        if scalar == ZERO {
            continue;
        }
        if let Some(c) = sparse(&factor, &supp) {
            lead.push(c);
            terms.push((scalar, lead));
        }
    }
    SymmetricTensorRep { order: m, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dir(v: &[(usize, f64)]) -> Direction {
        Direction::real(v).unwrap()
    }

    fn max_diff(a: &SymmetricTensorRep, b: &SymmetricTensorRep) -> f64 {
        let mut supp = a.support();
        supp.extend(b.support());
        supp.sort_unstable();
        supp.dedup();
        tuples(supp.len(), a.order)
            .map(|t| {
                let idx: Vec<usize> = t.iter().map(|&i| supp[i]).collect();
                (a.evaluate(&idx) - b.evaluate(&idx)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn sym_of_pair() {
        let a = dir(&[(1, 1.0)]);
        let b = dir(&[(2, 1.0), (3, 2.0)]);
        let rep = SymmetricTensorRep::new(2, vec![(ONE, vec![a.clone(), b.clone()])]).unwrap();
        let s = sym(&rep);
        assert_eq!(s.len(), 2);
        assert!(s.terms.iter().all(|t| t.0 == c(0.5, 0.0)));
        assert_eq!(s.evaluate(&[1, 3]), c(1.0, 0.0));
        assert_eq!(s.evaluate(&[3, 1]), c(1.0, 0.0));
        assert_eq!(sym(&s), s);
    }

    #[test]
    fn sym_with_repeated_factor() {
        let a = dir(&[(1, 1.0)]);
        let b = dir(&[(2, 1.0)]);
        let rep = SymmetricTensorRep::new(3, vec![(c(3.0, 0.0), vec![a.clone(), a.clone(), b])]).unwrap();
        let s = sym(&rep);
        // orderings aab, aba, baa with weight 2!/3!
        assert_eq!(s.len(), 3);
        for t in &s.terms {
            assert!((t.0 - c(1.0, 0.0)).norm() < 1e-15);
        }
        assert_eq!(sym(&s), s);
    }

    #[test]
    fn orderings_enumerated() {
        assert_eq!(distinct_orderings(&[0, 0, 1]), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(distinct_orderings(&[0, 1, 2]).len(), 6);
        assert_eq!(distinct_orderings(&[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn canonicalize_duplicates() {
        let c1 = dir(&[(1, 1.0), (2, -0.5)]);
        let c2 = dir(&[(2, 2.0), (4, 1.0)]);
        let rep = SymmetricTensorRep::new(2, vec![(ONE, vec![c1.clone(), c2.clone()]), (ONE, vec![c1.clone(), c2.clone()])]).unwrap();
        let out = canonicalize(&rep);
        assert_eq!(out.len(), 1);
        assert!((out.terms[0].0 - c(2.0, 0.0)).norm() < 1e-14);
        assert_eq!(out.terms[0].1[0], c1);
        assert!(max_diff(&rep, &out) < 1e-14);
    }

    #[test]
    fn canonicalize_merges_dependent_partials() {
        // a⊗x + (2a)⊗y + b⊗z: the second partial product is twice the first
        let a = dir(&[(1, 1.0), (2, 1.0)]);
        let b = dir(&[(2, 1.0)]);
        let rep = SymmetricTensorRep::new(
            2,
            vec![
                (ONE, vec![a.clone(), dir(&[(1, 1.0)])]),
                (c(0.0, 1.0), vec![a.scaled(c(2.0, 0.0)).unwrap(), dir(&[(3, 1.0)])]),
                (ONE, vec![b, dir(&[(2, 5.0)])]),
            ],
        )
        .unwrap();
        let out = canonicalize(&rep);
        assert_eq!(out.len(), 2);
        assert!(max_diff(&rep, &out) < 1e-14);
    }

    #[test]
    fn canonicalize_cancelling_terms() {
        let a = dir(&[(1, 1.0)]);
        let b = dir(&[(2, 1.0)]);
        let rep = SymmetricTensorRep::new(2, vec![(ONE, vec![a.clone(), b.clone()]), (c(-1.0, 0.0), vec![a, b])]).unwrap();
        let out = canonicalize(&rep);
        assert!(out.is_empty());
    }

    #[test]
    fn order_one_and_zero() {
        let rep = SymmetricTensorRep::new(1, vec![(ONE, vec![dir(&[(1, 1.0)])]), (c(2.0, 0.0), vec![dir(&[(2, 1.0)])])]).unwrap();
        let out = canonicalize(&rep);
        assert_eq!(out.len(), 1);
        assert!(max_diff(&rep, &out) < 1e-15);
        let scalars = SymmetricTensorRep::new(0, vec![(ONE, vec![]), (c(0.0, 2.0), vec![])]).unwrap();
        assert_eq!(canonicalize(&scalars).terms, vec![(c(1.0, 2.0), vec![])]);
        assert_eq!(sym(&scalars).evaluate(&[]), c(1.0, 2.0));
    }

    #[test]
    fn rejects_inconsistent_order() {
        assert!(SymmetricTensorRep::new(2, vec![(ONE, vec![dir(&[(1, 1.0)])])]).is_err());
    }
}
