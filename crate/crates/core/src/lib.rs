//! Polynomial convolution equations over Dirichlet algebras.
//!
//! For a discrete additive semigroup `X ⊆ [0,∞)^k` the arithmetic functions
//! `g: X → ℂ` form an algebra under Dirichlet convolution
//! `(g∗h)(x) = Σ_{x′+x″=x} g(x′)h(x″)`. This crate solves
//!
//! ```text
//! a_d∗g^{∗d} + ⋯ + a_1∗g + a_0 = 0
//! ```
//!
//! on finite windows of `X`, certifies an `r` for which the solution's
//! Dirichlet series converges absolutely, and evaluates those series with
//! rigorous truncation bounds.
//!
//! Modules, bottom up:
//!
//! * [`semigroup`]: backends, the size/lex order, windows, decompositions.
//! * [`algebra`]: [`TruncatedFunction`] with convolution, powers, inverses
//!   and r-norm partial sums.
//! * [`solver`]: the anchored recursion, unsolvability evidence,
//!   factorization checks and square polynomial systems.
//! * [`certificate`]: convergence certificates `(r, t*, C)` and validation.
//! * [`series`]: generalized Dirichlet series evaluation and checks of the
//!   scalar equation on half-planes.
//! * [`cli`]: the JSON problem format and the `dirconv run` pipeline.

pub mod algebra;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod roots;
pub mod rounding;
pub mod scalar;
pub mod semigroup;
pub mod series;
pub mod solver;

pub use algebra::TruncatedFunction;
pub use certificate::{certify, validate, NormCertificate, NormInput, NormScope};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::{Exact, Scalar};
pub use semigroup::{Coords, Element, Semigroup, Size, Truncation, Window};
pub use solver::{ConvPolynomial, PolySystem};

