//! Exact symbolic computation in the q-deformed bracketing algebra of
//! noncommutative Planck constants.
//!
//! The generators are indexed by planar binary leaf-labelled trees; the
//! defining relation replaces each q-commutator of generators by the
//! generator of the concatenated tree. This crate implements, with exact
//! rational arithmetic throughout:
//!
//! - [`trees`]: the tree combinatorics — total order, ranking, positive
//!   generators, Catalan counts;
//! - [`coeffs`]: the coefficient ring of Laurent polynomials in the
//!   deformation variables `q[i,j]`, its fraction field, and the
//!   permutation statistics built from it;
//! - [`algebra`]: truncated bracketing algebra and classical shadow with
//!   the confluent normal-ordering rewriter;
//! - [`quantize`]: the normal quantization, the q-Weyl quantization with
//!   its triangular inverse, both star products (with an independent
//!   closed-form implementation of the normal one), and the three brackets;
//! - [`coequivariance`]: the quantum-matrix coefficient algebra, its
//!   defining relations, and coequivariance checks;
//! - [`distortions`]: projector-modified products, tree-indexed bracket
//!   families, twisted products, and their diagnostic residuals;
//! - [`parse`], [`verify`], [`cli`]: the element grammar, the property
//!   verification suites, and the command-line front end.
//!
//! The `book/` directory of the repository walks through the same material
//! chapter by chapter; its code snippets compile against this crate and run
//! as doc-tests (see [`guide`]).

pub mod algebra;
pub mod cli;
pub mod coeffs;
pub mod coequivariance;
pub mod distortions;
pub mod guide;
pub mod parse;
pub mod perm;
pub mod quantize;
pub mod trees;
pub mod verify;

pub use algebra::{Context, EnvelopeElement, Monomial, ShadowElement};
pub use coeffs::{LaurentPolynomial, RationalFunction, Specialization};
pub use perm::Permutation;
pub use trees::{LabelledTree, Shape};
