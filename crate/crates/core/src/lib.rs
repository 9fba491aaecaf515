//! Compact finite-difference schemes for the 1-D homogeneous Dirichlet
//! problem `-u'' = f`, `u(0) = u(1) = 0`.
//!
//! The library builds symmetric stencil pairs `(d, s)` of arbitrary even
//! order, closes them at the boundary by odd reflection, and analyzes the
//! resulting operators:
//!
//! * [`formula`] — exact convolution algebra of symmetric formulas; every
//!   formula is a polynomial in the base second-difference stencil.
//! * [`consistency`] — exact order computation (moment, Fourier-series and
//!   arcsin-series criteria) and the moment systems for interior weights and
//!   boundary corrections.
//! * [`pade`] — the most efficient pairs for given stencil widths, built two
//!   independent ways and normalized identically.
//! * [`sturm`] — exact real-root counting and isolation, used to certify
//!   that scheme polynomials keep clear of the operator spectrum `[0, 4]`.
//! * [`assembly`] — banded matrices, the odd-extension boundary closure and
//!   the rectangular source action.
//! * [`solver`] — banded LU, the sine-spectral solver, inverse sup norms and
//!   probe-based stability constants, plus the spectral-gap diagnostics that
//!   quantify resonances.
//! * [`experiments`] — manufactured-solution convergence studies, resonance
//!   comparisons, random-formula sampling and a quadratic-irrational
//!   stability demo, with CSV and gnuplot emission.

pub mod assembly;
pub mod consistency;
pub mod dd;
pub mod error;
pub mod experiments;
pub mod formula;
mod linalg;
pub mod pade;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod sturm;

pub use error::{Error, Result};
pub use formula::SymmetricFormula;
pub use poly::RationalPolynomial;
pub use scalar::Rational;
