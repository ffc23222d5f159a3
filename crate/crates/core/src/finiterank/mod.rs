//! Finite-rank Helson forms: polynomials in countably many variables,
//! factorizable differential operators at points, and what can be computed
//! from them exactly.

mod form;
mod graded;
pub mod linalg;
mod poly;
mod rank;
mod symbol;
mod tensor;

pub use form::{form_alpha, form_eval, order_piece, FactorizableOp, FormTerm, HelsonFormSpec};
pub use graded::{
    boundedness_check, graded_norm, point_in_l2, total_mass, BoundednessReport, GradedNorm, SeriesStatus, TotalMass,
    GRADED_LOG_CUTOFF,
};
pub use linalg::symmetric_rank;
pub use poly::{dir_derivative, poly_eval, poly_mul, Direction, SparsePolynomial};
pub use rank::{form_rank, rank_at_cap, rank_monomials, FormRank, DEFAULT_RANK_CAP, RANK_THRESHOLD};
pub use symbol::{symbol_eval, symbol_eval_at, symbol_taylor, SymbolArg};
pub use tensor::{canonicalize, sym, SymmetricTensorRep, DEPENDENCE_TOL};
