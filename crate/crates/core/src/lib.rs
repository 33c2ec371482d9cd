//! Point counts of graph hypersurfaces over finite fields.
//!
//! The crate provides Kirchhoff graph polynomials, finite-field arithmetic,
//! exact and sharded point counting, a symbolic reduction engine that
//! expresses counts as polynomials in `q`, reconstruction of such polynomials
//! from sampled counts, and Feynman amplitudes over `F_q`.

pub mod count;
pub mod error;
pub mod fqft;
pub mod gf;
pub mod graph;
pub mod int;
pub mod interp;
pub mod poly;
pub mod qpoly;
pub mod reduction;

pub use error::{Error, Result};
pub use gf::{Field, FieldElement, FieldSpec};
pub use graph::{EdgeId, Multigraph};
pub use int::Int;
pub use poly::{Monomial, SparsePoly, Var};
pub use qpoly::QPolynomial;
