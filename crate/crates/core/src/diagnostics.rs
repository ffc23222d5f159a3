//! Finite checks of the boundedness criteria: coefficient decay for Hankel
//! and Helson matrices, Carleson windows for discrete measures and for
//! half-line densities, and the Gram matrix sharing the nonzero spectrum of
//! a Helson matrix generated by finitely many atoms.
//!
//! A finite computation never proves unboundedness. The verdict rule
//! compares running suprema `S_l` on a dyadic schedule of levels:
//! `unbounded` when `S_L >= 2 S_{L-3}` and the last three steps strictly
//! increase, `bounded` when `S_L <= 1.05 S_{L-3}`, `inconclusive` otherwise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{alpha, kernel, Coeff1d, DiscreteMeasure, HalfLineDensity, MomentSequence, Point};
use crate::spectral::{eig_dense, SpectralResult};

/// Growth factor over three levels that counts as divergence.
pub const DIVERGENCE_GROWTH: f64 = 2.0;
/// Growth factor over three levels that counts as bounded.
pub const BOUNDED_GROWTH: f64 = 1.05;
/// Grid points per decade for generated grids.
pub const POINTS_PER_DECADE: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    None,
    Index(u64),
    Multi(Vec<usize>),
    Grid(Vec<(usize, f64)>),
    Exponent(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub test: String,
    pub sup: f64,
    pub witness: Witness,
    pub verdict: Verdict,
    /// `(level, running supremum)` on the dyadic schedule.
    pub levels: Vec<(f64, f64)>,
    pub note: String,
}

/// Applies the three-level growth rule to running suprema.
pub fn growth_verdict(sups: &[f64]) -> Verdict {
    let l = sups.len();
    if l < 4 {
        return Verdict::Inconclusive;
    }
    let (last, back) = (sups[l - 1], sups[l - 4]);
    let increasing = sups[l - 4..].windows(2).all(|w| w[1] > w[0]);
    if increasing && last >= DIVERGENCE_GROWTH * back && last > 0.0 {
        Verdict::Unbounded
    } else if last <= BOUNDED_GROWTH * back {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    }
}

const GRID_NOTE: &str = "supremum over a finite grid, a lower bound for the true supremum";

/// Running maxima of `values` (ordered) recorded at the given cut points.
/// `cuts[l]` is the number of leading values included at level `l`.
fn running_levels<T: Clone>(values: &[(f64, T)], cuts: &[(f64, usize)]) -> (Vec<(f64, f64)>, f64, Option<T>) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    let mut levels = Vec::with_capacity(cuts.len());
    let mut i = 0;
    for &(label, upto) in cuts {
        while i < upto.min(values.len()) {
            if values[i].0 > best {
                best = values[i].0;
                arg = Some(values[i].1.clone());
            }
            i += 1;
        }
        levels.push((label, best.max(0.0)));
    }
    (levels, best.max(0.0), arg)
}

/// `sup_{n <= N} (1 + n) |β(n)|`, the `O(1/n)` decay test for Hankel
/// matrices.
pub fn coeff_decay_1d(beta: &Coeff1d, n_max: usize) -> DiagnosticReport {
    let values: Vec<(f64, u64)> = (0..=n_max).map(|n| ((1.0 + n as f64) * beta.eval(n).abs(), n as u64)).collect();
    let mut cuts = Vec::new();
    let mut k = 1usize;
    while k <= n_max {
        cuts.push((k as f64, k));
        k *= 2;
    }
    cuts.push(((n_max + 1) as f64, n_max + 1));
    let (levels, sup, arg) = running_levels(&values, &cuts);
    let sups: Vec<f64> = levels.iter().map(|l| l.1).collect();
    DiagnosticReport {
        test: "coeff_decay_1d".into(),
        sup,
        witness: arg.map_or(Witness::None, Witness::Index),
        verdict: growth_verdict(&sups),
        levels,
        note: format!("levels are n < 2^l up to N = {n_max}"),
    }
}

/// `sup_{κ_j < K} |β(κ)| Π (1 + κ_j)` over the cube in `d` variables.
pub fn tensor_coeff_decay<F>(beta: F, d: usize, cap: usize) -> Result<DiagnosticReport>
where
    F: Fn(&[usize]) -> f64,
{
    if d == 0 || cap == 0 {
        return Err(Error::Contract("tensor decay needs d >= 1 and K >= 1".into()));
    }
    let total = cap.checked_pow(d as u32).filter(|t| *t <= 1 << 26).ok_or_else(|| {
        Error::Contract(format!("cube of side {cap} in {d} variables is too large"))
    })?;
    let mut level_sup: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut level_caps = Vec::new();
    let mut c = 1usize;
    while c < cap {
        level_caps.push(c);
        c *= 2;
    }
    level_caps.push(cap);
    level_sup.resize(level_caps.len(), (f64::NEG_INFINITY, Vec::new()));
    let mut kappa = vec![0usize; d];
    for mut t in 0..total {
        for slot in kappa.iter_mut().rev() {
            *slot = t % cap;
            t /= cap;
        }
        let weight: f64 = kappa.iter().map(|&k| 1.0 + k as f64).product();
        let v = beta(&kappa).abs() * weight;
        let top = *kappa.iter().max().expect("d >= 1");
        // first level whose cube contains κ
        let l = level_caps.iter().position(|&c| top < c).expect("cap bounds κ");
        if v > level_sup[l].0 {
            level_sup[l] = (v, kappa.clone());
        }
    }
    let mut levels = Vec::new();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for (l, (v, k)) in level_sup.into_iter().enumerate() {
        if v > best.0 {
            best = (v, k);
        }
        levels.push((level_caps[l] as f64, best.0.max(0.0)));
    }
    let sups: Vec<f64> = levels.iter().map(|l| l.1).collect();
    Ok(DiagnosticReport {
        test: "tensor_coeff_decay".into(),
        sup: best.0.max(0.0),
        witness: Witness::Multi(best.1),
        verdict: growth_verdict(&sups),
        levels,
        note: format!("levels are cubes of side 2^l up to K = {cap} in {d} variables"),
    })
}

/// Whether `t` lies in the window `I_s`: `|t_j| >= |s_j|` and `t_j s_j >= 0`
/// for every `j`.
fn in_window(t: &Point, s: &[(usize, f64)]) -> bool {
    s.iter().all(|&(j, sj)| {
        let tj = t.coord(j);
        tj.abs() >= sj.abs() && tj * sj >= 0.0
    })
}

fn window_ratio(mu: &DiscreteMeasure, s: &[(usize, f64)]) -> f64 {
    let mass: f64 = mu.atoms.iter().filter(|a| in_window(&a.point, s)).map(|a| a.w).sum();
    let denom: f64 = s.iter().map(|&(_, sj)| 1.0 - sj * sj).product();
    mass / denom
}

/// Candidate windows: each coordinate of the joint support takes the value
/// 0 or an atom coordinate. The window ratio is piecewise increasing in
/// each `|s_j|` between these values, so the supremum over all `s` is
/// attained among them.
fn candidate_windows(mu: &DiscreteMeasure) -> Result<Vec<Vec<(usize, f64)>>> {
    let mut coords: Vec<usize> = Vec::new();
    for a in &mu.atoms {
        match &a.point {
            Point::Explicit(c) => coords.extend(c.iter().filter(|e| e.1 != 0.0).map(|e| e.0)),
            Point::Bohr(_) => {
                return Err(Error::Unsupported(
                    "window test needs explicit atoms; Bohr atoms belong to the half-line window test".into(),
                ))
            }
        }
    }
    coords.sort_unstable();
    coords.dedup();
    let choices: Vec<Vec<f64>> = coords
        .iter()
        .map(|&j| {
            let mut v: Vec<f64> = std::iter::once(0.0).chain(mu.atoms.iter().map(|a| a.point.coord(j))).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let count = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len())).filter(|c| *c <= 1 << 22);
    let count = count.ok_or_else(|| Error::Unsupported("too many candidate windows".into()))?;
    let mut out = Vec::with_capacity(count);
    for mut t in 0..count {
        let mut s = Vec::new();
        for (i, c) in choices.iter().enumerate().rev() {
            let v = c[t % c.len()];
            t /= c.len();
            if v != 0.0 {
                s.push((coords[i], v));
            }
        }
        s.reverse();
        out.push(s);
    }
    Ok(out)
}

/// `sup_s μ(I_s) / Π (1 - s_j²)` over the exact candidate windows and any
/// additional grid points.
pub fn window_multi(mu: &DiscreteMeasure, grid: &[Vec<(usize, f64)>]) -> Result<DiagnosticReport> {
    mu.validate()?;
    let mut points = candidate_windows(mu)?;
    for s in grid {
        if let Some(&(j, v)) = s.iter().find(|e| !(e.1.abs() < 1.0) || e.0 == 0) {
            return Err(Error::Contract(format!("grid coordinate {j} = {v} outside (-1, 1)")));
        }
        points.push(s.clone());
    }
    let mut best = (0.0, Vec::new());
    for s in &points {
        let r = window_ratio(mu, s);
        if r > best.0 {
            best = (r, s.clone());
        }
    }
    Ok(DiagnosticReport {
        test: "window_multi".into(),
        sup: best.0,
        witness: Witness::Grid(best.1),
        verdict: Verdict::Bounded,
        levels: Vec::new(),
        note: "exact supremum: candidate windows cover every change of the window mass".into(),
    })
}

/// `s = 1/2 + 10^{-k/40}`, `k = -40 … 40·decades`, descending in `s`.
pub fn halfline_grid(decades: usize) -> Vec<f64> {
    let per = POINTS_PER_DECADE as i64;
    (-per..=per * decades as i64).map(|k| 0.5 + 10f64.powf(-(k as f64) / per as f64)).collect()
}

/// `sup_s ν((1/2, s]) / (s - 1/2)` over a grid accumulating at `1/2`.
pub fn halfline_window(nu: &HalfLineDensity, grid: &[f64]) -> Result<DiagnosticReport> {
    nu.validate()?;
    match nu {
        HalfLineDensity::Appendix => {
            return Err(Error::Unsupported("the appendix density is not a density of Dirichlet exponents".into()))
        }
        HalfLineDensity::Poly(p) if p.interval.0 < 0.5 => {
            return Err(Error::Contract("half-line densities must live on (1/2, ∞)".into()))
        }
        _ => {}
    }
    if grid.iter().any(|s| !(*s > 0.5 && s.is_finite())) {
        return Err(Error::Contract("grid points must exceed 1/2".into()));
    }
    let mut pts: Vec<f64> = grid.to_vec();
    pts.sort_by(|a, b| b.total_cmp(a));
    let mut values = Vec::with_capacity(pts.len());
    for &s in &pts {
        values.push((nu.window_mass(s)? / (s - 0.5), s));
    }
    // level l covers δ = s - 1/2 >= 2^{-l}
    let mut cuts = Vec::new();
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        let mut l = -((first - 0.5).log2().floor() as i32);
        loop {
            let delta = 2f64.powi(-l);
            let upto = pts.iter().take_while(|s| *s - 0.5 >= delta).count();
            cuts.push((delta, upto));
            if delta <= last - 0.5 {
                break;
            }
            l += 1;
        }
        cuts.push((last - 0.5, pts.len()));
    }
    let (levels, sup, arg) = running_levels(&values, &cuts);
    let sups: Vec<f64> = levels.iter().map(|l| l.1).collect();
    Ok(DiagnosticReport {
        test: "halfline_window".into(),
        sup,
        witness: arg.map_or(Witness::None, Witness::Exponent),
        verdict: growth_verdict(&sups),
        levels,
        note: GRID_NOTE.into(),
    })
}

/// Exhaustive range of `helson_decay`; beyond it indices are sampled.
const HELSON_EXHAUSTIVE: u64 = 1 << 16;
const SAMPLES_PER_LEVEL: usize = 1024;

fn helson_indices(n_max: u64) -> (Vec<u64>, Vec<(f64, usize)>) {
    let mut idx: Vec<u64> = (2..=n_max.min(HELSON_EXHAUSTIVE)).collect();
    let mut caps = Vec::new();
    let mut k = 0u32;
    loop {
        let cap = if k < 6 { (1u64 << (1u32 << k)).min(n_max) } else { n_max };
        if cap > HELSON_EXHAUSTIVE {
            let lo = idx.last().copied().unwrap_or(1) as f64;
            let ratio = (cap as f64 / lo).ln() / SAMPLES_PER_LEVEL as f64;
            for i in 1..=SAMPLES_PER_LEVEL {
                let n = if i == SAMPLES_PER_LEVEL { cap } else { ((lo.ln() + ratio * i as f64).exp() as u64).min(cap) };
                if n > *idx.last().unwrap_or(&1) {
                    idx.push(n);
                }
            }
        }
        caps.push((cap as f64, idx.partition_point(|&n| n <= cap)));
        if cap >= n_max {
            break;
        }
        k += 1;
    }
    (idx, caps)
}

/// `sup_{2 <= n <= N} α(n) sqrt(n) ln n` on the levels `N = 2^{2^k}`;
/// exhaustive up to `2^16`, log-spaced samples beyond.
pub fn helson_decay(seq: &MomentSequence, n_max: u64) -> Result<DiagnosticReport> {
    if n_max < 2 {
        return Err(Error::Contract("helson_decay needs N >= 2".into()));
    }
    let n_max = n_max.min(1 << 63);
    let (idx, cuts) = helson_indices(n_max);
    let mut values = Vec::with_capacity(idx.len());
    for &n in &idx {
        let x = n as f64;
        values.push((alpha(seq, n)? * (x.sqrt() * x.ln()), n));
    }
    let (levels, sup, arg) = running_levels(&values, &cuts);
    let sups: Vec<f64> = levels.iter().map(|l| l.1).collect();
    let sampled = if n_max > HELSON_EXHAUSTIVE { "; sampled beyond 2^16, a lower bound" } else { "" };
    Ok(DiagnosticReport {
        test: "helson_decay".into(),
        sup,
        witness: arg.map_or(Witness::None, Witness::Index),
        verdict: growth_verdict(&sups),
        levels,
        note: format!("levels are N = 2^(2^k) up to {n_max}{sampled}"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramDual {
    pub size: usize,
    /// Row-major `G[i][j] = sqrt(w_i w_j) K(λ_i, λ_j)`.
    pub matrix: Vec<f64>,
    pub spectrum: SpectralResult,
}

/// The `k × k` Gram matrix of the atoms; its spectrum is the nonzero
/// spectrum of the Helson matrix of the measure's moments.
pub fn gram_dual(mu: &DiscreteMeasure) -> Result<GramDual> {
    mu.validate()?;
    let k = mu.atoms.len();
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let (a, b) = (&mu.atoms[i], &mu.atoms[j]);
            let v = (a.w * b.w).sqrt() * kernel(&a.point, &b.point)?;
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    let spectrum = if k == 0 { SpectralResult::empty() } else { eig_dense(k, &g)? };
    Ok(GramDual { size: k, matrix: g, spectrum })
}
