//! The analytic symbol `B(w) = Σ_κ conj(Λ(z^κ)) w^κ` of a bounded form,
//! obtained by differentiating the reproducing kernel in closed form.

use num_complex::Complex64;

use super::form::{FactorizableOp, FormTerm, HelsonFormSpec};
use super::graded::point_in_l2;
use super::poly::log_index;
use crate::error::{Error, Result};
use crate::index::{nth_prime, MultiIndex};
use crate::jet::Jet;
use crate::moments::{zeta_jet, Point};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Argument of the symbol: finitely many complex coordinates, or a Bohr
/// point.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolArg {
    Coords(Vec<(usize, Complex64)>),
    Bohr(f64),
}

impl SymbolArg {
    fn coord(&self, j: usize) -> Complex64 {
        match self {
            SymbolArg::Coords(c) => c.iter().find(|e| e.0 == j).map(|e| e.1).unwrap_or(ZERO),
            SymbolArg::Bohr(t) => Complex64::new((-t * (nth_prime(j) as f64).ln()).exp(), 0.0),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            SymbolArg::Coords(c) => {
                for (i, &(j, v)) in c.iter().enumerate() {
                    if j == 0 {
                        return Err(Error::Contract("coordinate indices are 1-based".into()));
                    }
                    if c[..i].iter().any(|e| e.0 == j) {
                        return Err(Error::Contract(format!("coordinate {j} listed twice")));
                    }
                    if !(v.norm() < 1.0) {
                        return Err(Error::Contract(format!("symbol argument coordinate {j} outside the unit disc")));
                    }
                }
                Ok(())
            }
            SymbolArg::Bohr(t) if *t > 0.5 => Ok(()),
            SymbolArg::Bohr(t) => Err(Error::Contract(format!("Bohr argument s = {t} is not in ℓ²"))),
        }
    }
}

impl From<&Point> for SymbolArg {
    fn from(p: &Point) -> Self {
        match p {
            Point::Explicit(c) => SymbolArg::Coords(c.iter().map(|&(j, v)| (j, Complex64::new(v, 0.0))).collect()),
            Point::Bohr(s) => SymbolArg::Bohr(*s),
        }
    }
}

fn ensure_bounded(spec: &HelsonFormSpec) -> Result<()> {
    spec.validate()?;
    if let Some(t) = spec.terms.iter().find(|t| !point_in_l2(t.point())) {
        return Err(Error::Contract(format!("the form is unbounded: point {:?} is not in ℓ²", t.point())));
    }
    Ok(())
}

/// `Σ_κ λ^κ w^κ` restricted to the coordinates `j` where both may be
/// nonzero, as a jet in the Dirichlet shift `ε` (`w_j ↦ w_j p_j^{-ε}`).
fn kernel_jet(lambda: &Point, w: &SymbolArg, order: usize) -> Result<Jet> {
    match (lambda, w) {
        (Point::Bohr(s), SymbolArg::Bohr(t)) => {
            let jet = zeta_jet(s + t, order)?;
            Ok(jet)
        }
        (Point::Explicit(coords), _) => product_jet(coords.iter().map(|&(j, v)| (j, Complex64::new(v, 0.0) * w.coord(j))), order),
        (Point::Bohr(_), SymbolArg::Coords(c)) => {
            product_jet(c.iter().map(|&(j, v)| (j, v * lambda.coord(j))), order)
        }
    }
}

/// `Π_j 1 / (1 - a_j p_j^{-ε})`.
fn product_jet<I: Iterator<Item = (usize, Complex64)>>(factors: I, order: usize) -> Result<Jet> {
    let mut acc = Jet::constant(ONE, order);
    for (j, a) in factors {
        if a == ZERO {
            continue;
        }
        if a.norm() >= 1.0 {
            return Err(Error::Divergence(format!("kernel factor with λ_j w_j = {a}")));
        }
        let denom = &Jet::constant(ONE, order) - &Jet::exp_linear(a, -(nth_prime(j) as f64).ln(), order);
        acc = &acc * &denom.recip();
    }
    Ok(acc)
}

/// Every assignment `(j_1, …, j_M)` of a support coordinate to each
/// direction, with the product of conjugated direction entries.
fn direction_tuples(op: &FactorizableOp) -> Vec<(Vec<usize>, Complex64)> {
    let mut out = vec![(Vec::new(), ONE)];
    for c in &op.directions {
        let mut next = Vec::with_capacity(out.len() * c.entries().len());
        for (tuple, coef) in &out {
            for &(j, v) in c.entries() {
                let mut t = tuple.clone();
                t.push(j);
                next.push((t, coef * v.conj()));
            }
        }
        out = next;
    }
    out
}

/// `σ_j` = number of occurrences of `j` in the tuple.
fn tuple_exponents(tuple: &[usize]) -> MultiIndex {
    MultiIndex::from_pairs(tuple.iter().map(|&j| (j, 1)))
}

fn falling(k: u32, s: u32) -> f64 {
    (0..s).map(|i| (k - i) as f64).product()
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Symbol of one term at `w`.
fn term_symbol(term: &FormTerm, w: &SymbolArg) -> Result<Complex64> {
    match term {
        FormTerm::Op { op, point } => {
            let k = kernel_jet(point, w, 0)?.coeffs[0];
            let mut s = ZERO;
            for (tuple, coef) in direction_tuples(op) {
                let sigma = tuple_exponents(&tuple);
                let mut f = coef;
                for &(j, e) in sigma.entries() {
                    let wj = w.coord(j);
                    let d = ONE - wj * point.coord(j);
                    f *= factorial(e) * (wj / d).powu(e);
                }
                s += f;
            }
            Ok(op.scalar.conj() * k * s)
        }
        FormTerm::Dirichlet { scalar, order, point } => {
            let jet = kernel_jet(point, w, *order as usize)?;
            Ok(scalar.conj() * jet.derivative(*order as usize))
        }
    }
}

/// `B(w)` at a real point.
pub fn symbol_eval(spec: &HelsonFormSpec, w: &Point) -> Result<Complex64> {
    w.validate()?;
    symbol_eval_at(spec, &SymbolArg::from(w))
}

/// `B(w)` at finitely many complex coordinates or a Bohr point.
pub fn symbol_eval_at(spec: &HelsonFormSpec, w: &SymbolArg) -> Result<Complex64> {
    ensure_bounded(spec)?;
    w.check()?;
    let mut s = ZERO;
    for t in &spec.terms {
        s += term_symbol(t, w)?;
    }
    Ok(s)
}

/// The Taylor coefficient of `B` at `w^κ`, from the series expansion of
/// the differentiated kernel.
pub fn symbol_taylor(spec: &HelsonFormSpec, kappa: &MultiIndex) -> Result<Complex64> {
    ensure_bounded(spec)?;
    let mut s = ZERO;
    for t in &spec.terms {
        s += match t {
            FormTerm::Op { op, point } => {
                let mut acc = ZERO;
                for (tuple, coef) in direction_tuples(op) {
                    let sigma = tuple_exponents(&tuple);
                    if sigma.entries().iter().any(|&(j, e)| kappa.get(j) < e) {
                        continue;
                    }
                    // λ^{κ-σ} κ! / (κ-σ)!
                    let mut f = coef;
                    let mut rest = Vec::new();
                    for &(j, k) in kappa.entries() {
                        let e = sigma.get(j);
                        f *= falling(k, e);
                        if k > e {
                            rest.push((j, k - e));
                        }
                    }
                    acc += f * point.monomial(&MultiIndex::from_pairs(rest));
                }
                op.scalar.conj() * acc
            }
            FormTerm::Dirichlet { scalar, order, point } => {
                scalar.conj() * (-log_index(kappa)).powi(*order as i32) * point.monomial(kappa)
            }
        };
    }
    Ok(s)
}
