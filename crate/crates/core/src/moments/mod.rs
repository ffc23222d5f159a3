//! Measures on the infinite polydisc and the moment sequences they generate.
//!
//! A moment sequence assigns to every `n = p^κ` the value
//! `α(n) = ∫ t^κ dμ(t)`. For a point mass at a Bohr point `(p_j^{-s})_j`
//! this is `n^{-s}`, which is how half-line densities `ν(ds)` turn into
//! sequences `α(n) = ∫ n^{-s} dν(s)`.

pub mod quad;
pub mod zeta;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finiterank::HelsonFormSpec;
use crate::index::{nth_prime, split_power, MultiIndex};

pub use zeta::{zeta, zeta_jet};

/// A point of `𝔻^∞`, either with finitely many explicit real coordinates or
/// a Bohr point `λ_j = p_j^{-s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    /// `(coordinate index, value)` pairs; unlisted coordinates are zero.
    Explicit(Vec<(usize, f64)>),
    Bohr(f64),
}

impl Point {
    pub fn explicit(coords: Vec<(usize, f64)>) -> Result<Self> {
        let p = Point::Explicit(coords);
        p.validate()?;
        Ok(p)
    }

    pub fn origin() -> Self {
        Point::Explicit(Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Point::Explicit(coords) => {
                for w in coords.windows(2) {
                    if w[0].0 >= w[1].0 {
                        return Err(Error::Contract(
                            "explicit point coordinates must be listed in increasing order".into(),
                        ));
                    }
                }
                for &(j, v) in coords {
                    if j == 0 {
                        return Err(Error::Contract("coordinate indices are 1-based".into()));
                    }
                    if !(v.abs() < 1.0) {
                        return Err(Error::Contract(format!(
                            "coordinate {j} = {v} lies outside (-1, 1)"
                        )));
                    }
                }
                Ok(())
            }
            Point::Bohr(s) if s.is_finite() => Ok(()),
            Point::Bohr(s) => Err(Error::Contract(format!("Bohr parameter {s} is not finite"))),
        }
    }

    /// `λ_j`.
    pub fn coord(&self, j: usize) -> f64 {
        match self {
            Point::Explicit(coords) => coords
                .binary_search_by_key(&j, |&(i, _)| i)
                .map(|i| coords[i].1)
                .unwrap_or(0.0),
            Point::Bohr(s) => (-s * (nth_prime(j) as f64).ln()).exp(),
        }
    }

    /// Coordinates that may be nonzero; `None` means all of them.
    pub fn support(&self) -> Option<Vec<usize>> {
        match self {
            Point::Explicit(coords) => Some(coords.iter().filter(|c| c.1 != 0.0).map(|c| c.0).collect()),
            Point::Bohr(_) => None,
        }
    }

    /// `λ^{κ(n)}`, with `0^0 = 1`.
    pub fn monomial_at(&self, n: u64) -> f64 {
        assert!(n >= 1, "monomial index must be positive");
        match self {
            Point::Explicit(coords) => {
                let mut rest = n;
                let mut value = 1.0;
                for &(j, v) in coords {
                    if rest == 1 {
                        break;
                    }
                    let (e, r) = split_power(rest, nth_prime(j));
                    rest = r;
                    if e > 0 {
                        value *= v.powi(e as i32);
                    }
                }
                if rest == 1 {
                    value
                } else {
                    0.0
                }
            }
            Point::Bohr(s) => (-s * (n as f64).ln()).exp(),
        }
    }

    /// `λ^κ`.
    pub fn monomial(&self, kappa: &MultiIndex) -> f64 {
        match self {
            Point::Explicit(_) => kappa
                .entries()
                .iter()
                .map(|&(j, e)| self.coord(j).powi(e as i32))
                .product(),
            Point::Bohr(s) => {
                let log_n: f64 = kappa
                    .entries()
                    .iter()
                    .map(|&(j, e)| e as f64 * (nth_prime(j) as f64).ln())
                    .sum();
                (-s * log_n).exp()
            }
        }
    }
}

/// `K_∞(a, b) = Π_j 1 / (1 - a_j b_j)` for real points.
pub fn kernel(a: &Point, b: &Point) -> Result<f64> {
    let factor = |x: f64| -> Result<f64> {
        if x.abs() >= 1.0 {
            return Err(Error::Divergence(format!("kernel factor with a_j b_j = {x}")));
        }
        Ok(1.0 / (1.0 - x))
    };
    match (a, b) {
        (Point::Explicit(ca), Point::Explicit(_)) => {
            let mut k = 1.0;
            for &(j, v) in ca {
                k *= factor(v * b.coord(j))?;
            }
            Ok(k)
        }
        (Point::Bohr(s), Point::Bohr(t)) => {
            if s + t <= 1.0 {
                return Err(Error::Divergence(format!(
                    "kernel of Bohr points with s + t = {} <= 1",
                    s + t
                )));
            }
            zeta(s + t)
        }
        (Point::Explicit(ce), bohr) | (bohr, Point::Explicit(ce)) => {
            let mut k = 1.0;
            for &(j, v) in ce {
                k *= factor(v * bohr.coord(j))?;
            }
            Ok(k)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub w: f64,
    pub point: Point,
}

/// `μ = Σ w_ℓ δ_{λ^(ℓ)}` with positive weights.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(f64, Point)>) -> Result<Self> {
        let m = Self { atoms: atoms.into_iter().map(|(w, point)| Atom { w, point }).collect() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !(a.w > 0.0 && a.w.is_finite()) {
                return Err(Error::Contract(format!("atom weight {} must be positive", a.w)));
            }
            a.point.validate()?;
        }
        Ok(())
    }

    /// Every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| Atom { w: a.w * c, point: a.point.clone() }).collect(),
        }
    }

    pub fn alpha(&self, n: u64) -> f64 {
        self.atoms.iter().map(|a| a.w * a.point.monomial_at(n)).sum()
    }
}

/// `ρ(s) = Σ_k c_k s^{k + min_power}` on `(a, b)`; `b = None` is `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyDensity {
    pub interval: (f64, Option<f64>),
    pub coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub min_power: i32,
}

fn is_zero(v: &i32) -> bool {
    *v == 0
}

impl PolyDensity {
    pub fn eval(&self, s: f64) -> f64 {
        self.terms().map(|(c, q)| c * s.powi(q)).sum()
    }

    fn terms(&self) -> impl Iterator<Item = (f64, i32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(move |(k, &c)| (c, k as i32 + self.min_power))
    }

    fn max_power(&self) -> Option<i32> {
        self.terms().map(|(_, q)| q).max()
    }

    /// `∫_lo^hi ρ`, `hi = None` meaning `+∞`.
    pub fn mass(&self, lo: f64, hi: Option<f64>) -> Result<f64> {
        if let Some(h) = hi {
            if h <= lo {
                return Ok(0.0);
            }
        } else if self.max_power().is_some_and(|q| q >= -1) {
            return Err(Error::Divergence("density has infinite mass".into()));
        }
        let anti = |s: f64, q: i32| if q == -1 { s.ln() } else { s.powi(q + 1) / (q + 1) as f64 };
        let mut total = 0.0;
        for (c, q) in self.terms() {
            let upper = hi.map_or(0.0, |h| anti(h, q));
            total += c * (upper - anti(lo, q));
        }
        Ok(total)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.interval;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Contract(format!("density interval must start above 0, got {a}")));
        }
        if let Some(b) = b {
            if !(b > a) {
                return Err(Error::Contract(format!("empty density interval ({a}, {b})")));
            }
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Contract("density coefficients must be finite".into()));
        }
        let hi = b.unwrap_or(a + 100.0);
        let samples = 400;
        for i in 0..=samples {
            let s = a + (hi - a) * i as f64 / samples as f64;
            if self.eval(s) < -1e-12 * (1.0 + self.eval(s).abs()) {
                return Err(Error::Contract(format!("density is negative at s = {s}")));
            }
        }
        if b.is_none() {
            if let Some(q) = self.max_power() {
                let lead = self.terms().find(|&(_, p)| p == q).map(|(c, _)| c).unwrap_or(0.0);
                if lead < 0.0 {
                    return Err(Error::Contract("density is eventually negative".into()));
                }
            }
        }
        Ok(())
    }

    /// `∫ n^{-s} ρ(s) ds` over the interval, `n >= 2`.
    fn laplace(&self, n: u64) -> f64 {
        let (a, b) = self.interval;
        let l = (n as f64).ln();
        // s = a + u / l; the integral becomes n^{-a}/l ∫ e^{-u} ρ(a + u/l) du.
        let g = |u: f64| (-u).exp() * self.eval(a + u / l);
        let span = b.map(|b| (b - a) * l);
        let mut cut = 36.0f64;
        loop {
            let upper = span.map_or(cut, |s| s.min(cut));
            let panels = upper.ceil().max(1.0) as usize;
            let value = quad::integrate(g, 0.0, upper, panels);
            if span.is_some_and(|s| s <= cut) {
                return (-a * l).exp() / l * value;
            }
            let tail = self.tail_bound(a, l, cut);
            if tail <= 1e-14 * value.abs() || tail == 0.0 || cut > 4000.0 {
                return (-a * l).exp() / l * value;
            }
            cut *= 1.5;
        }
    }

    /// Bound for `∫_U^∞ e^{-u} |ρ|(a + u/l) du`.
    fn tail_bound(&self, a: f64, l: f64, cut: f64) -> f64 {
        let s_t = a + cut / l;
        let mut bound = 0.0;
        for (c, q) in self.terms() {
            let c = c.abs();
            if q <= 0 {
                bound += c * s_t.powi(q);
            } else {
                // ∫_U^∞ e^{-u} (a + u/l)^q du = e^{-U} Σ_i q!/(q-i)! s_T^{q-i} / l^i
                let mut term = s_t.powi(q);
                let mut sum = term;
                for i in 1..=q {
                    term *= (q - i + 1) as f64 / (s_t * l);
                    sum += term;
                }
                bound += c * sum;
            }
        }
        bound * (-cut).exp()
    }
}

/// A density on the half-line of Dirichlet exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfLineDensity {
    /// `dν = ds` on `(1/2, ∞)`.
    Lebesgue,
    Poly(PolyDensity),
    /// `dν(t) = (t/2) dt` on `(0, 1)`, placed on the first coordinate.
    Appendix,
}

impl HalfLineDensity {
    /// `dν = 2(s - 1/2) ds` on `(1/2, ∞)`.
    pub fn linear_from_half() -> Self {
        HalfLineDensity::Poly(PolyDensity {
            interval: (0.5, None),
            coeffs: vec![-1.0, 2.0],
            min_power: 0,
        })
    }

    /// `dν = s^{-2} ds` on `(1, ∞)`.
    pub fn inverse_square_above_one() -> Self {
        HalfLineDensity::Poly(PolyDensity { interval: (1.0, None), coeffs: vec![1.0], min_power: -2 })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HalfLineDensity::Poly(p) => p.validate(),
            _ => Ok(()),
        }
    }

    /// `ν((1/2, s])`.
    pub fn window_mass(&self, s: f64) -> Result<f64> {
        match self {
            HalfLineDensity::Lebesgue => Ok((s - 0.5).max(0.0)),
            HalfLineDensity::Poly(p) => {
                let lo = p.interval.0.max(0.5);
                let hi = p.interval.1.map_or(s, |b| b.min(s));
                p.mass(lo, Some(hi))
            }
            HalfLineDensity::Appendix => Err(Error::Unsupported(
                "the appendix density lives on the polydisc coordinate, not on Dirichlet exponents"
                    .into(),
            )),
        }
    }

    pub fn alpha(&self, n: u64) -> Result<f64> {
        match self {
            HalfLineDensity::Lebesgue => {
                if n == 1 {
                    return Err(Error::Divergence("∫ ds over (1/2, ∞) is infinite (n = 1)".into()));
                }
                Ok(PolyDensity { interval: (0.5, None), coeffs: vec![1.0], min_power: 0 }.laplace(n))
            }
            HalfLineDensity::Poly(p) => {
                if n == 1 {
                    p.mass(p.interval.0, p.interval.1)
                } else {
                    Ok(p.laplace(n))
                }
            }
            HalfLineDensity::Appendix => {
                let (k, rest) = split_power(n, 2);
                Ok(if rest == 1 { Coeff1d::Appendix.eval(k as usize) } else { 0.0 })
            }
        }
    }
}

/// A one-variable coefficient sequence `β(κ)`, `κ >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coeff1d {
    /// `δ(κ)`.
    Kronecker,
    /// `1 / (1 + κ)`.
    Hilbert,
    /// `1 / (2(κ + 2))`, the moments of `(t/2) dt` on `(0, 1)`.
    Appendix,
    /// `1 / sqrt(1 + κ)`.
    InvSqrt,
    Constant(f64),
    /// `r^κ`.
    Geometric(f64),
    /// Listed values, zero beyond the end.
    Table(Vec<f64>),
}

impl Coeff1d {
    pub fn eval(&self, k: usize) -> f64 {
        match self {
            Coeff1d::Kronecker => (k == 0) as u8 as f64,
            Coeff1d::Hilbert => 1.0 / (1.0 + k as f64),
            Coeff1d::Appendix => 1.0 / (2.0 * (k as f64 + 2.0)),
            Coeff1d::InvSqrt => 1.0 / (1.0 + k as f64).sqrt(),
            Coeff1d::Constant(c) => *c,
            Coeff1d::Geometric(r) => r.powi(k as i32),
            Coeff1d::Table(t) => t.get(k).copied().unwrap_or(0.0),
        }
    }
}

/// Named sequences with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// `1 / (sqrt(n) ln n)`, `n >= 2`.
    MultiplicativeHilbert,
    /// `1 / (1 + k)` at `n = 2^k`, zero elsewhere.
    PowerOfTwoHilbert,
    /// `1 / (sqrt(n) sqrt(ln n))`, `n >= 2`.
    SqrtLog,
}

impl ClosedForm {
    pub fn parse(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(name.to_string()))
            .map_err(|_| Error::Parse(format!("unknown closed-form sequence {name:?}")))
    }

    pub fn alpha(self, n: u64) -> Result<f64> {
        match self {
            ClosedForm::MultiplicativeHilbert | ClosedForm::SqrtLog if n < 2 => Err(Error::Divergence(
                format!("{self:?} is undefined at n = 1"),
            )),
            ClosedForm::MultiplicativeHilbert => {
                let x = n as f64;
                Ok(1.0 / (x.sqrt() * x.ln()))
            }
            ClosedForm::SqrtLog => {
                let x = n as f64;
                Ok(1.0 / (x.sqrt() * x.ln().sqrt()))
            }
            ClosedForm::PowerOfTwoHilbert => {
                let (k, rest) = split_power(n, 2);
                Ok(if rest == 1 { 1.0 / (1.0 + k as f64) } else { 0.0 })
            }
        }
    }
}

/// A producer of `α(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MomentSequence {
    Discrete(DiscreteMeasure),
    #[serde(rename = "halfline")]
    HalfLine { density: HalfLineDensity },
    /// `α(n) = Π_j β_j(κ_j)`; unlisted positions use the Kronecker sequence.
    Multiplicative {
        #[serde(with = "position_keys")]
        primes: BTreeMap<usize, Coeff1d>,
    },
    #[serde(rename = "closed")]
    ClosedForm { name: ClosedForm },
    /// `α(n) = [z^κ(n), 1]` for a finite-rank Helson form with real values.
    #[serde(rename = "form")]
    FormInduced { spec: HelsonFormSpec },
}

/// JSON object keys are strings; prime positions are parsed from them.
mod position_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Coeff1d;

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, Coeff1d>, ser: S) -> Result<S::Ok, S::Error> {
        let keyed: BTreeMap<String, &Coeff1d> = map.iter().map(|(k, v)| (k.to_string(), v)).collect();
        keyed.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BTreeMap<usize, Coeff1d>, D::Error> {
        let keyed = BTreeMap::<String, Coeff1d>::deserialize(de)?;
        keyed
            .into_iter()
            .map(|(k, v)| {
                let j: usize = k.parse().map_err(|_| D::Error::custom(format!("prime position `{k}` is not an integer")))?;
                if j == 0 {
                    return Err(D::Error::custom("prime positions are 1-based"));
                }
                Ok((j, v))
            })
            .collect()
    }
}

impl MomentSequence {
    pub fn closed(name: ClosedForm) -> Self {
        MomentSequence::ClosedForm { name }
    }

    pub fn half_line(density: HalfLineDensity) -> Self {
        MomentSequence::HalfLine { density }
    }

    pub fn kronecker() -> Self {
        MomentSequence::Multiplicative { primes: BTreeMap::new() }
    }

    /// Product of the appendix sequence over the first `n` coordinates.
    pub fn appendix_product(n: usize) -> Self {
        MomentSequence::Multiplicative { primes: (1..=n).map(|j| (j, Coeff1d::Appendix)).collect() }
    }

    /// Parses and validates the JSON schema used on the command line.
    pub fn from_json(text: &str) -> Result<Self> {
        let seq: MomentSequence = serde_json::from_str(text)?;
        seq.validate()?;
        Ok(seq)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("moment sequences serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MomentSequence::Discrete(m) => m.validate(),
            MomentSequence::HalfLine { density } => density.validate(),
            MomentSequence::Multiplicative { primes } => {
                if primes.keys().any(|&j| j == 0) {
                    return Err(Error::Contract("prime positions are 1-based".into()));
                }
                Ok(())
            }
            MomentSequence::ClosedForm { .. } => Ok(()),
            MomentSequence::FormInduced { spec } => spec.validate(),
        }
    }

    /// Smallest index at which the sequence is defined (1 or 2).
    pub fn first_index(&self) -> u64 {
        match self {
            MomentSequence::ClosedForm {
                name: ClosedForm::MultiplicativeHilbert | ClosedForm::SqrtLog,
            }
            | MomentSequence::HalfLine { density: HalfLineDensity::Lebesgue } => 2,
            MomentSequence::HalfLine { density: HalfLineDensity::Poly(p) }
                if p.mass(p.interval.0, p.interval.1).is_err() =>
            {
                2
            }
            _ => 1,
        }
    }

    /// True when the sequence is the moment sequence of a positive measure.
    pub fn is_nonnegative_moment(&self) -> bool {
        !matches!(self, MomentSequence::FormInduced { .. })
    }
}

/// `α(n)` for the given sequence.
pub fn alpha(seq: &MomentSequence, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("moment index must be positive".into()));
    }
    match seq {
        MomentSequence::Discrete(m) => Ok(m.alpha(n)),
        MomentSequence::HalfLine { density } => density.alpha(n),
        MomentSequence::Multiplicative { primes } => {
            let mut rest = n;
            let mut value = 1.0;
            for (&j, beta) in primes {
                let (e, r) = split_power(rest, nth_prime(j));
                rest = r;
                value *= beta.eval(e as usize);
            }
            Ok(if rest == 1 { value } else { 0.0 })
        }
        MomentSequence::ClosedForm { name } => name.alpha(n),
        MomentSequence::FormInduced { spec } => {
            let v = crate::finiterank::form_alpha(spec, n)?;
            if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
                return Err(Error::Unsupported(format!(
                    "form-induced moment α({n}) = {v} is not real"
                )));
            }
            Ok(v.re)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finiterank::{FactorizableOp, HelsonFormSpec};
    use std::f64::consts::PI;

    #[test]
    fn lebesgue_closed_form() {
        let seq = MomentSequence::half_line(HalfLineDensity::Lebesgue);
        let v = alpha(&seq, 4).unwrap();
        assert!((v - 0.360_673_760_222_240_9).abs() < 1e-14, "{v}");
        for n in [2u64, 3, 10, 97, 1000, 65_537, 999_983, 1_000_000] {
            let x = n as f64;
            let exact = 1.0 / (x.sqrt() * x.ln());
            assert!((alpha(&seq, n).unwrap() - exact).abs() < 1e-13 * exact.max(1e-3));
        }
        assert!(matches!(alpha(&seq, 1), Err(Error::Divergence(_))));
    }

    #[test]
    fn polynomial_density_against_closed_forms() {
        // 2(s - 1/2) on (1/2, ∞): α(n) = 2 n^{-1/2} / ln² n
        let lin = MomentSequence::half_line(HalfLineDensity::linear_from_half());
        for n in [2u64, 5, 100, 12_345] {
            let x = n as f64;
            let exact = 2.0 / (x.sqrt() * x.ln() * x.ln());
            assert!((alpha(&lin, n).unwrap() - exact).abs() < 1e-13 * exact);
        }
        // finite interval, constant density: ∫_a^b n^{-s} ds
        let box_ = HalfLineDensity::Poly(PolyDensity { interval: (1.0, Some(2.0)), coeffs: vec![3.0], min_power: 0 });
        let seq = MomentSequence::half_line(box_);
        for n in [2u64, 7, 1000] {
            let l = (n as f64).ln();
            let exact = 3.0 * ((-l).exp() - (-2.0 * l).exp()) / l;
            assert!((alpha(&seq, n).unwrap() - exact).abs() < 1e-14);
        }
        assert!((alpha(&seq, 1).unwrap() - 3.0).abs() < 1e-15);
        let inv = MomentSequence::half_line(HalfLineDensity::inverse_square_above_one());
        assert!((alpha(&inv, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_density_rejected() {
        let bad = HalfLineDensity::Poly(PolyDensity { interval: (0.5, Some(2.0)), coeffs: vec![1.0, -1.0], min_power: 0 });
        assert!(bad.validate().is_err());
        let eventually = HalfLineDensity::Poly(PolyDensity { interval: (0.5, None), coeffs: vec![1e6, 0.0, -1.0], min_power: 0 });
        assert!(eventually.validate().is_err());
    }

    #[test]
    fn discrete_examples() {
        let m = DiscreteMeasure::new(vec![(1.0, Point::explicit(vec![(1, 0.5), (2, 1.0 / 3.0)]).unwrap())]).unwrap();
        let seq = MomentSequence::Discrete(m);
        assert!((alpha(&seq, 6).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(alpha(&seq, 5).unwrap(), 0.0);
        assert_eq!(alpha(&seq, 1).unwrap(), 1.0);
    }

    #[test]
    fn zero_coordinate_uses_empty_product() {
        let p = Point::explicit(vec![(1, 0.0), (2, 0.5)]).unwrap();
        assert_eq!(p.monomial_at(3), 0.5);
        assert_eq!(p.monomial_at(2), 0.0);
        assert_eq!(p.monomial_at(1), 1.0);
    }

    #[test]
    fn appendix_moments() {
        let seq = MomentSequence::half_line(HalfLineDensity::Appendix);
        for k in 0..10u32 {
            let v = alpha(&seq, 1u64 << k).unwrap();
            assert!((v - 1.0 / (2.0 * (k as f64 + 2.0))).abs() < 1e-16);
        }
        assert_eq!(alpha(&seq, 3).unwrap(), 0.0);
        // oracle: ∫_0^1 t^k (t/2) dt by quadrature
        for k in 0..8 {
            let q = quad::integrate(|t| t.powi(k) * t / 2.0, 0.0, 1.0, 1);
            assert!((q - Coeff1d::Appendix.eval(k as usize)).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_examples() {
        let half = Point::explicit(vec![(1, 0.5)]).unwrap();
        assert!((kernel(&half, &half).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((kernel(&Point::Bohr(1.0), &Point::Bohr(1.0)).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((kernel(&half, &Point::Bohr(1.0)).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(kernel(&Point::Bohr(0.5), &Point::Bohr(0.4)), Err(Error::Divergence(_))));
    }

    #[test]
    fn multiplicative_sequence() {
        let seq = MomentSequence::appendix_product(2);
        // 12 = 2^2 3: β(2) β(1)
        let v = alpha(&seq, 12).unwrap();
        assert!((v - (1.0 / 8.0) * (1.0 / 6.0)).abs() < 1e-16);
        assert_eq!(alpha(&seq, 5).unwrap(), 0.0);
        assert_eq!(alpha(&MomentSequence::kronecker(), 1).unwrap(), 1.0);
        assert_eq!(alpha(&MomentSequence::kronecker(), 2).unwrap(), 0.0);
    }

    #[test]
    fn form_induced_matches_point_mass() {
        let p = Point::explicit(vec![(1, 0.5), (3, -0.25)]).unwrap();
        let spec = HelsonFormSpec::point_mass(2.0, p.clone());
        let a = MomentSequence::FormInduced { spec };
        let b = MomentSequence::Discrete(DiscreteMeasure::new(vec![(2.0, p)]).unwrap());
        for n in 1..500 {
            assert_eq!(alpha(&a, n).unwrap(), alpha(&b, n).unwrap());
        }
        let _ = FactorizableOp::scalar(1.0);
    }

    #[test]
    fn json_schema() {
        let text = r#"{"type":"discrete","atoms":[{"w":0.5,"point":{"explicit":[[1,0.5]]}},{"w":1.0,"point":{"bohr":1.5}}]}"#;
        let seq = MomentSequence::from_json(text).unwrap();
        assert_eq!(MomentSequence::from_json(&seq.to_json()).unwrap(), seq);
        let hl = MomentSequence::from_json(r#"{"type":"halfline","density":"lebesgue"}"#).unwrap();
        assert_eq!(hl, MomentSequence::half_line(HalfLineDensity::Lebesgue));
        let poly = MomentSequence::from_json(
            r#"{"type":"halfline","density":{"poly":{"interval":[0.5,null],"coeffs":[-1,2]}}}"#,
        )
        .unwrap();
        assert_eq!(poly, MomentSequence::half_line(HalfLineDensity::linear_from_half()));
        let mult = MomentSequence::from_json(
            r#"{"type":"multiplicative","primes":{"1":"appendix","2":{"geometric":0.5}}}"#,
        )
        .unwrap();
        assert_eq!(alpha(&mult, 6).unwrap(), 0.5 / 6.0);
        assert_eq!(alpha(&mult, 1).unwrap(), 0.25);
        let closed = MomentSequence::from_json(r#"{"type":"closed","name":"multiplicative-hilbert"}"#).unwrap();
        assert_eq!(closed, MomentSequence::closed(ClosedForm::MultiplicativeHilbert));
        assert!(MomentSequence::from_json(r#"{"type":"discrete","atoms":[{"w":-1,"point":{"bohr":1}}]}"#).is_err());
        assert!(MomentSequence::from_json(r#"{"type":"discrete","atoms":[{"w":1,"point":{"explicit":[[1,1.5]]}}]}"#).is_err());
    }
}
