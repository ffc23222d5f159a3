//! Sizes of a form functional on homogeneous pieces `H²_m`, that is
//! `Σ_{|κ| = m} |Λ(z^κ)|²`, and the boundedness test built from them.

use std::collections::BTreeSet;

use serde::Serialize;

use super::form::{FormTerm, HelsonFormSpec};
use crate::error::{Error, Result};
use crate::index::{FactorSieve, MultiIndex};
use crate::moments::{kernel, Point};

/// Series over all `n(κ)` stop at `2^GRADED_LOG_CUTOFF`.
pub const GRADED_LOG_CUTOFF: u32 = 18;
/// Dyadic block ratios at or above this are inconclusive.
const INCONCLUSIVE_RATIO: f64 = 0.8;
/// Maximum number of multi-indices enumerated for explicit specs.
const ENUMERATION_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesStatus {
    /// Finite sum, evaluated completely.
    Exact,
    /// Partial sums with a geometric tail estimate.
    Converged,
    /// Dyadic blocks do not decrease.
    Divergent,
    Inconclusive,
}

impl SeriesStatus {
    pub fn is_finite(self) -> bool {
        matches!(self, SeriesStatus::Exact | SeriesStatus::Converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedNorm {
    pub order: usize,
    pub status: SeriesStatus,
    pub partial_sum: f64,
    /// Partial sum plus tail estimate; absent unless finite.
    pub estimate: Option<f64>,
    /// Largest `n(κ)` included, for truncated series.
    pub cutoff: Option<u64>,
    /// Ratio of the last two dyadic blocks.
    pub block_ratio: Option<f64>,
}

fn abs2(spec: &HelsonFormSpec, kappa: &MultiIndex) -> f64 {
    spec.on_monomial(kappa).norm_sqr()
}

/// Multi-indices of total degree `m` in the given variables.
fn homogeneous(vars: &[usize], m: u32, out: &mut Vec<MultiIndex>, prefix: &mut Vec<(usize, u32)>) -> Result<()> {
    if m == 0 {
        if out.len() >= ENUMERATION_LIMIT {
            return Err(Error::Unsupported("too many multi-indices to enumerate".into()));
        }
        out.push(MultiIndex::from_pairs(prefix.iter().copied()));
        return Ok(());
    }
    let Some((&first, rest)) = vars.split_first() else {
        return Ok(());
    };
    for e in (0..=m).rev() {
        if e > 0 {
            prefix.push((first, e));
        }
        let r = homogeneous(rest, m - e, out, prefix);
        if e > 0 {
            prefix.pop();
        }
        r?;
    }
    Ok(())
}

fn exact_graded(spec: &HelsonFormSpec, vars: &BTreeSet<usize>, m: usize) -> Result<f64> {
    let vars: Vec<usize> = vars.iter().copied().collect();
    let mut kappas = Vec::new();
    homogeneous(&vars, m as u32, &mut kappas, &mut Vec::new())?;
    Ok(kappas.iter().map(|k| abs2(spec, k)).sum())
}

/// Dyadic blocks `B_k = Σ_{2^k ≤ n < 2^{k+1}} a_n` of a nonnegative series,
/// judged by the ratio of the last two blocks.
fn judge_blocks(blocks: &[f64], order: usize, cutoff: u64) -> GradedNorm {
    let partial: f64 = blocks.iter().sum();
    let k = blocks.len();
    let (status, ratio, estimate) = if k < 2 {
        (SeriesStatus::Inconclusive, None, None)
    } else {
        let (prev, last) = (blocks[k - 2], blocks[k - 1]);
        if prev == 0.0 && last == 0.0 {
            (SeriesStatus::Converged, Some(0.0), Some(partial))
        } else if prev == 0.0 {
            (SeriesStatus::Inconclusive, None, None)
        } else {
            let r = last / prev;
            if r >= 1.0 {
                (SeriesStatus::Divergent, Some(r), None)
            } else if r >= INCONCLUSIVE_RATIO {
                (SeriesStatus::Inconclusive, Some(r), None)
            } else {
                (SeriesStatus::Converged, Some(r), Some(partial + last * r / (1.0 - r)))
            }
        }
    };
    GradedNorm { order, status, partial_sum: partial, estimate, cutoff: Some(cutoff), block_ratio: ratio }
}

/// One pass over `n < 2^GRADED_LOG_CUTOFF`, accumulating dyadic blocks of
/// `|Λ(z^κ(n))|²` per total degree `Ω(n)` and overall.
struct BohrSweep {
    /// `per_degree[m][k]`.
    per_degree: Vec<Vec<f64>>,
    total: Vec<f64>,
    cutoff: u64,
}

fn bohr_sweep(spec: &HelsonFormSpec) -> BohrSweep {
    let limit = 1usize << GRADED_LOG_CUTOFF;
    let sieve = FactorSieve::new(limit);
    let blocks = GRADED_LOG_CUTOFF as usize;
    let mut per_degree = vec![vec![0.0; blocks]; blocks];
    let mut total = vec![0.0; blocks];
    for n in 1..limit {
        let kappa = sieve.factorize(n);
        let v = abs2(spec, &kappa);
        let block = (usize::BITS - 1 - n.leading_zeros()) as usize;
        per_degree[kappa.degree() as usize][block] += v;
        total[block] += v;
    }
    BohrSweep { per_degree, total, cutoff: limit as u64 - 1 }
}

fn bohr_graded(sweep: &BohrSweep, m: usize) -> GradedNorm {
    if m == 0 {
        let v = sweep.per_degree[0][0];
        return GradedNorm {
            order: 0,
            status: SeriesStatus::Exact,
            partial_sum: v,
            estimate: Some(v),
            cutoff: None,
            block_ratio: None,
        };
    }
    match sweep.per_degree.get(m) {
        // degree-m indices start at n = 2^m
        Some(blocks) => judge_blocks(&blocks[m..], m, sweep.cutoff),
        None => GradedNorm {
            order: m,
            status: SeriesStatus::Inconclusive,
            partial_sum: 0.0,
            estimate: None,
            cutoff: Some(sweep.cutoff),
            block_ratio: None,
        },
    }
}

/// `Σ_{|κ| = m} |Λ(z^κ)|²` for the full functional `Λ = [·, 1]`.
///
/// Exact when the form involves finitely many variables; otherwise a
/// partial sum over `n(κ) < 2^GRADED_LOG_CUTOFF` with a dyadic tail test.
pub fn graded_norm(spec: &HelsonFormSpec, m: usize) -> Result<GradedNorm> {
    spec.validate()?;
    Ok(graded_norms(spec, &[m])?.remove(0))
}

fn graded_norms(spec: &HelsonFormSpec, orders: &[usize]) -> Result<Vec<GradedNorm>> {
    match spec.active_variables() {
        Some(vars) => orders
            .iter()
            .map(|&m| {
                let v = exact_graded(spec, &vars, m)?;
                Ok(GradedNorm {
                    order: m,
                    status: SeriesStatus::Exact,
                    partial_sum: v,
                    estimate: Some(v),
                    cutoff: None,
                    block_ratio: None,
                })
            })
            .collect(),
        None => {
            let sweep = bohr_sweep(spec);
            Ok(orders.iter().map(|&m| bohr_graded(&sweep, m)).collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalMass {
    /// `Σ_κ |Λ(z^κ)|²` from partial sums, grouped by `n(κ)` or by degree.
    pub series: GradedNorm,
    /// `Σ_{ℓ,ℓ'} c_ℓ conj(c_ℓ') K(λ_ℓ, λ_ℓ')`, available for specs built from
    /// point evaluations only.
    pub kernel_value: Option<f64>,
}

/// `‖Λ‖² = Σ_κ |Λ(z^κ)|²` over all monomials.
pub fn total_mass(spec: &HelsonFormSpec) -> Result<TotalMass> {
    spec.validate()?;
    let series = match spec.active_variables() {
        Some(vars) => explicit_total(spec, &vars)?,
        None => {
            let sweep = bohr_sweep(spec);
            judge_blocks(&sweep.total, usize::MAX, sweep.cutoff)
        }
    };
    Ok(TotalMass { series, kernel_value: kernel_route(spec) })
}

/// Sums graded pieces degree by degree until they fall below `1e-18` of the
/// running total on three consecutive degrees.
fn explicit_total(spec: &HelsonFormSpec, vars: &BTreeSet<usize>) -> Result<GradedNorm> {
    let mut sum = 0.0;
    let mut small = 0;
    let mut degrees = Vec::new();
    for m in 0..2000usize {
        let g = match exact_graded(spec, vars, m) {
            Ok(g) => g,
            Err(_) => break,
        };
        sum += g;
        degrees.push(g);
        if vars.is_empty() {
            return Ok(GradedNorm {
                order: usize::MAX,
                status: SeriesStatus::Exact,
                partial_sum: sum,
                estimate: Some(sum),
                cutoff: None,
                block_ratio: None,
            });
        }
        if g <= 1e-18 * sum && m > spec.max_order() {
            small += 1;
            if small == 3 {
                return Ok(GradedNorm {
                    order: usize::MAX,
                    status: SeriesStatus::Converged,
                    partial_sum: sum,
                    estimate: Some(sum),
                    cutoff: None,
                    block_ratio: None,
                });
            }
        } else {
            small = 0;
        }
    }
    let ratio = match degrees.as_slice() {
        [.., a, b] if *a > 0.0 => Some(b / a),
        _ => None,
    };
    Ok(GradedNorm {
        order: usize::MAX,
        status: SeriesStatus::Inconclusive,
        partial_sum: sum,
        estimate: None,
        cutoff: None,
        block_ratio: ratio,
    })
}

fn kernel_route(spec: &HelsonFormSpec) -> Option<f64> {
    let mut atoms = Vec::new();
    for t in &spec.terms {
        match t {
            FormTerm::Op { op, point } if op.directions.is_empty() => atoms.push((op.scalar, point)),
            FormTerm::Dirichlet { scalar, order: 0, point } => atoms.push((*scalar, point)),
            _ => return None,
        }
    }
    let mut s = num_complex::Complex64::new(0.0, 0.0);
    for (ci, pi) in &atoms {
        for (cj, pj) in &atoms {
            s += ci * cj.conj() * kernel(pi, pj).ok()?;
        }
    }
    Some(s.re)
}

/// Whether a point lies in `𝔻^∞ ∩ ℓ²`.
pub fn point_in_l2(point: &Point) -> bool {
    match point {
        Point::Explicit(coords) => coords.iter().all(|c| c.1.abs() < 1.0),
        Point::Bohr(s) => *s > 0.5,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    /// Every point lies in `𝔻^∞ ∩ ℓ²`.
    pub bounded: bool,
    /// Points outside `𝔻^∞ ∩ ℓ²`.
    pub offending_points: Vec<Point>,
    /// Graded norms for `m = 0, …, M + 1`.
    pub graded: Vec<GradedNorm>,
    /// No graded norm contradicts the verdict.
    pub consistent: bool,
    /// The graded norms confirm the verdict: all finite when bounded, at
    /// least one divergent when unbounded.
    pub confirmed: bool,
}

pub fn boundedness_check(spec: &HelsonFormSpec) -> Result<BoundednessReport> {
    spec.validate()?;
    let offending_points: Vec<Point> =
        spec.terms.iter().map(|t| t.point()).filter(|p| !point_in_l2(p)).cloned().collect();
    let bounded = offending_points.is_empty();
    let orders: Vec<usize> = (0..=spec.max_order() + 1).collect();
    let graded = graded_norms(spec, &orders)?;
    let any_divergent = graded.iter().any(|g| g.status == SeriesStatus::Divergent);
    let all_finite = graded.iter().all(|g| g.status.is_finite());
    let consistent = if bounded { !any_divergent } else { !all_finite };
    let confirmed = if bounded { all_finite } else { any_divergent };
    Ok(BoundednessReport { bounded, offending_points, graded, consistent, confirmed })
}
