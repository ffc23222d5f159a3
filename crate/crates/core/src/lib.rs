//! Numerics for Helson matrices: moment sequences, truncated spectra,
//! boundedness diagnostics and the finite-rank form calculus.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod finiterank;
pub mod index;
pub mod io;
pub mod jet;
pub mod matrix;
pub mod moments;
pub mod spectral;

pub use error::{Error, Result};
pub use index::{compose, factorize, multiindex_add, primes, MultiIndex};
pub use moments::{alpha, kernel, zeta, MomentSequence, Point};
pub use spectral::{eig_dense, SpectralResult};
