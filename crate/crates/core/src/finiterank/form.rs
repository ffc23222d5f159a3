use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{dir_derivative, log_index, point_monomial, poly_eval, poly_mul, Direction, SparsePolynomial};
use crate::error::{Error, Result};
use crate::index::{factorize, MultiIndex};
use crate::moments::Point;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `scalar · D(c_1) ⋯ D(c_M)`; no directions means multiplication by `scalar`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizableOp {
    pub scalar: Complex64,
    pub directions: Vec<Direction>,
}

impl FactorizableOp {
    pub fn new(scalar: Complex64, directions: Vec<Direction>) -> Self {
        Self { scalar, directions }
    }

    pub fn scalar(s: f64) -> Self {
        Self::new(Complex64::new(s, 0.0), Vec::new())
    }

    pub fn order(&self) -> usize {
        self.directions.len()
    }

    pub fn apply(&self, f: &SparsePolynomial) -> SparsePolynomial {
        let mut g = f.clone();
        for c in &self.directions {
            if g.is_zero() {
                break;
            }
            g = dir_derivative(&g, c);
        }
        g.scale(self.scalar)
    }
}

/// One summand of a Helson form, attached to a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub enum FormTerm {
    Op { op: FactorizableOp, point: Point },
    /// `scalar · D^k` for the Dirichlet derivative
    /// `D = -Σ_j (ln p_j) z_j ∂/∂z_j`, which acts on `z^κ` as `-ln n(κ)`.
    Dirichlet { scalar: Complex64, order: u32, point: Point },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    scalar: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    directions: Option<Vec<Direction>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dirichlet: Option<u32>,
    point: Point,
}

impl TryFrom<RawTerm> for FormTerm {
    type Error = Error;
    fn try_from(raw: RawTerm) -> Result<Self> {
        raw.point.validate()?;
        match (raw.directions, raw.dirichlet) {
            (Some(_), Some(_)) => Err(Error::Parse("a term has either directions or a dirichlet order".into())),
            (None, Some(order)) => Ok(FormTerm::Dirichlet { scalar: raw.scalar, order, point: raw.point }),
            (directions, None) => Ok(FormTerm::Op {
                op: FactorizableOp::new(raw.scalar, directions.unwrap_or_default()),
                point: raw.point,
            }),
        }
    }
}

impl From<FormTerm> for RawTerm {
    fn from(t: FormTerm) -> Self {
        match t {
            FormTerm::Op { op, point } => {
                RawTerm { scalar: op.scalar, directions: Some(op.directions), dirichlet: None, point }
            }
            FormTerm::Dirichlet { scalar, order, point } => {
                RawTerm { scalar, directions: None, dirichlet: Some(order), point }
            }
        }
    }
}

impl FormTerm {
    pub fn point(&self) -> &Point {
        match self {
            FormTerm::Op { point, .. } | FormTerm::Dirichlet { point, .. } => point,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            FormTerm::Op { op, .. } => op.order(),
            FormTerm::Dirichlet { order, .. } => *order as usize,
        }
    }

    /// The functional `f ↦ (term)(f)`.
    pub fn apply(&self, f: &SparsePolynomial) -> Complex64 {
        match self {
            FormTerm::Op { op, point } => poly_eval(&op.apply(f), point),
            FormTerm::Dirichlet { scalar, order, point } => {
                let s = f.terms().fold(ZERO, |acc, (kappa, c)| {
                    acc + c * (-log_index(kappa)).powi(*order as i32) * point_monomial(point, kappa)
                });
                s * scalar
            }
        }
    }

    /// The functional on the single monomial `z^κ`.
    pub fn on_monomial(&self, kappa: &MultiIndex) -> Complex64 {
        match self {
            FormTerm::Op { op, point } if op.directions.is_empty() => op.scalar * point_monomial(point, kappa),
            FormTerm::Op { .. } => self.apply(&SparsePolynomial::monomial(kappa.clone(), Complex64::new(1.0, 0.0))),
            FormTerm::Dirichlet { scalar, order, point } => {
                scalar * (-log_index(kappa)).powi(*order as i32) * point_monomial(point, kappa)
            }
        }
    }
}

/// `[f, g] = Σ_ℓ 𝐃(𝐜^(ℓ))(fg)(λ^(ℓ))`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelsonFormSpec {
    pub terms: Vec<FormTerm>,
}

impl HelsonFormSpec {
    pub fn new(terms: Vec<FormTerm>) -> Self {
        Self { terms }
    }

    /// `[f, g] = w f(λ) g(λ)`.
    pub fn point_mass(w: f64, point: Point) -> Self {
        Self::new(vec![FormTerm::Op { op: FactorizableOp::scalar(w), point }])
    }

    pub fn push_op(&mut self, scalar: Complex64, directions: Vec<Direction>, point: Point) {
        self.terms.push(FormTerm::Op { op: FactorizableOp::new(scalar, directions), point });
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("form specs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            t.point().validate()?;
        }
        Ok(())
    }

    /// Highest order among the terms.
    pub fn max_order(&self) -> usize {
        self.terms.iter().map(FormTerm::order).max().unwrap_or(0)
    }

    pub fn has_bohr_point(&self) -> bool {
        self.terms.iter().any(|t| matches!(t.point(), Point::Bohr(_)))
    }

    /// Variables on which the form depends; `None` when every variable does.
    pub fn active_variables(&self) -> Option<BTreeSet<usize>> {
        let mut vars = BTreeSet::new();
        for t in &self.terms {
            vars.extend(t.point().support()?);
            if let FormTerm::Op { op, .. } = t {
                for c in &op.directions {
                    vars.extend(c.support());
                }
            }
        }
        Some(vars)
    }

    /// `Λ(f) = [f, 1]`.
    pub fn functional(&self, f: &SparsePolynomial) -> Complex64 {
        self.terms.iter().fold(ZERO, |acc, t| acc + t.apply(f))
    }

    /// `Λ(z^κ)`.
    pub fn on_monomial(&self, kappa: &MultiIndex) -> Complex64 {
        self.terms.iter().fold(ZERO, |acc, t| acc + t.on_monomial(kappa))
    }
}

/// `[f, g]`, evaluated as `Λ(fg)`.
pub fn form_eval(spec: &HelsonFormSpec, f: &SparsePolynomial, g: &SparsePolynomial) -> Complex64 {
    spec.functional(&poly_mul(f, g))
}

/// `α(n) = [z^{κ(n)}, 1]`.
pub fn form_alpha(spec: &HelsonFormSpec, n: u64) -> Result<Complex64> {
    Ok(spec.on_monomial(&factorize(n)?))
}

/// The terms of order exactly `m`, i.e. the graded piece `Λ^m`.
pub fn order_piece(spec: &HelsonFormSpec, m: usize) -> Result<HelsonFormSpec> {
    let mut terms = Vec::new();
    for t in &spec.terms {
        match t {
            FormTerm::Op { op, .. } if op.order() == m => terms.push(t.clone()),
            FormTerm::Op { .. } => {}
            FormTerm::Dirichlet { order: 0, scalar, point } if m == 0 => terms.push(FormTerm::Op {
                op: FactorizableOp::new(*scalar, Vec::new()),
                point: point.clone(),
            }),
            FormTerm::Dirichlet { order: 0, .. } => {}
            FormTerm::Dirichlet { .. } => {
                return Err(Error::Unsupported(
                    "graded pieces of Dirichlet derivative terms are not factorizable".into(),
                ))
            }
        }
    }
    Ok(HelsonFormSpec::new(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::nth_prime;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn origin_derivative() -> HelsonFormSpec {
        let mut s = HelsonFormSpec::default();
        s.push_op(c(1.0), vec![Direction::unit(1)], Point::origin());
        s
    }

    #[test]
    fn point_evaluation() {
        let p = Point::explicit(vec![(1, 0.3), (2, -0.2)]).unwrap();
        let spec = HelsonFormSpec::point_mass(1.0, p);
        let one = SparsePolynomial::one();
        assert_eq!(form_eval(&spec, &one, &one), c(1.0));
    }

    #[test]
    fn derivative_at_origin() {
        let spec = origin_derivative();
        let z1 = SparsePolynomial::variable(1);
        assert_eq!(form_eval(&spec, &z1, &SparsePolynomial::one()), c(1.0));
        assert_eq!(form_eval(&spec, &z1, &z1), c(0.0));
        assert_eq!(form_alpha(&spec, 2).unwrap(), c(1.0));
        for n in 3..200 {
            assert_eq!(form_alpha(&spec, n).unwrap(), c(0.0), "n = {n}");
        }
        assert_eq!(form_alpha(&spec, 1).unwrap(), c(0.0));
    }

    #[test]
    fn evaluation_plus_derivative() {
        // f(1/2) + f'(1/2) in one variable
        let p = Point::explicit(vec![(1, 0.5)]).unwrap();
        let mut spec = HelsonFormSpec::default();
        spec.push_op(c(1.0), vec![], p.clone());
        spec.push_op(c(1.0), vec![Direction::unit(1)], p);
        let one = SparsePolynomial::one();
        let w = SparsePolynomial::variable(1);
        assert_eq!(form_eval(&spec, &one, &one), c(1.0));
        assert_eq!(form_eval(&spec, &w, &one), c(1.5));
    }

    #[test]
    fn point_mass_moments() {
        let spec = HelsonFormSpec::point_mass(1.0, Point::explicit(vec![(1, 0.5)]).unwrap());
        for k in 0..10u32 {
            assert_eq!(form_alpha(&spec, 1 << k).unwrap(), c(0.5f64.powi(k as i32)));
        }
        assert_eq!(form_alpha(&spec, 3).unwrap(), c(0.0));
    }

    #[test]
    fn dirichlet_operator_moments() {
        // single D at a Bohr point against the product-rule expansion of
        // -Σ ln p_j z_j ∂_j applied to z^κ
        let rho = 0.8;
        let spec = HelsonFormSpec::new(vec![FormTerm::Dirichlet { scalar: c(1.0), order: 1, point: Point::Bohr(rho) }]);
        for n in [1u64, 2, 6, 12, 360, 1001] {
            let kappa = factorize(n).unwrap();
            let mut oracle = 0.0;
            for &(j, e) in kappa.entries() {
                oracle -= (nth_prime(j) as f64).ln() * e as f64;
            }
            oracle *= (n as f64).powf(-rho);
            let got = form_alpha(&spec, n).unwrap();
            assert!((got.re - oracle).abs() < 1e-14, "{n}: {got} vs {oracle}");
            assert!((got.re + (n as f64).ln() * (n as f64).powf(-rho)).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"terms":[{"scalar":[1.0,0.0],"directions":[[[1,1.0,0.0],[2,0.0,-1.0]]],"point":{"explicit":[[1,0.5]]}},{"scalar":[2.0,0.5],"dirichlet":2,"point":{"bohr":1.0}}]}"#;
        let spec = HelsonFormSpec::from_json(text).unwrap();
        assert_eq!(spec.terms.len(), 2);
        assert_eq!(HelsonFormSpec::from_json(&spec.to_json()).unwrap(), spec);
        let scalar_only = HelsonFormSpec::from_json(r#"{"terms":[{"scalar":[1,0],"point":{"bohr":2}}]}"#).unwrap();
        assert_eq!(scalar_only.max_order(), 0);
        assert!(HelsonFormSpec::from_json(r#"{"terms":[{"scalar":[1,0],"directions":[],"dirichlet":1,"point":{"bohr":2}}]}"#).is_err());
        assert!(HelsonFormSpec::from_json(r#"{"terms":[{"scalar":[1,0],"point":{"explicit":[[1,2.0]]}}]}"#).is_err());
    }

    #[test]
    fn active_variable_sets() {
        let mut spec = origin_derivative();
        spec.push_op(c(1.0), vec![], Point::explicit(vec![(3, 0.5)]).unwrap());
        assert_eq!(spec.active_variables().unwrap().into_iter().collect::<Vec<_>>(), vec![1, 3]);
        spec.push_op(c(1.0), vec![], Point::Bohr(1.0));
        assert!(spec.active_variables().is_none());
    }

    #[test]
    fn graded_pieces_sum_to_functional() {
        let p = Point::explicit(vec![(1, 0.5), (2, -0.25)]).unwrap();
        let mut spec = HelsonFormSpec::default();
        spec.push_op(c(2.0), vec![], p.clone());
        spec.push_op(Complex64::new(0.5, 1.0), vec![Direction::unit(2)], p.clone());
        spec.push_op(c(-1.0), vec![Direction::unit(1), Direction::real(&[(1, 1.0), (2, 3.0)]).unwrap()], p);
        let f = SparsePolynomial::from_terms(vec![
            (MultiIndex::empty(), c(1.0)),
            (factorize(2).unwrap(), c(-2.0)),
            (factorize(12).unwrap(), Complex64::new(0.0, 1.0)),
            (factorize(9).unwrap(), c(0.5)),
        ]);
        let total = spec.functional(&f);
        let mut pieces = ZERO;
        for m in 0..=spec.max_order() {
            pieces += order_piece(&spec, m).unwrap().functional(&f);
        }
        assert!((total - pieces).norm() < 1e-15);
    }
}
