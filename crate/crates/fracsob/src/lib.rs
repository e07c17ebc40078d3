//! Desk-scale numerics for fractional Sobolev norms of slowly decaying
//! functions.
//!
//! The crate measures — on explicit 1D/2D grids — the quantities that
//! appear in embedding, density, and extension inequalities for
//! fractional-order spaces with polynomial weights:
//!
//! * difference-quotient (Gagliardo) seminorms with a classical or
//!   polynomially weighted integrand, punctured at the diagonal
//!   ([`quadrature`]);
//! * Fourier-side seminorms, spectral fractional derivatives, and the
//!   constant linking the two pictures at `p = 2` ([`spectral`]);
//! * rapid-decay and analytic-strip diagnostics that classify a closed
//!   form as a member or non-member of the test-function class, with
//!   divergence as a first-class verdict ([`schwartz`]);
//! * mollification, zero extension, and smooth-cutoff extension
//!   operators with measured operator norms ([`operators`]).
//!
//! Everything is deterministic: parallel reductions use a fixed
//! association tree, so results are bit-identical across worker counts.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so
// that NaN input is rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod function;
pub mod grid;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod reduce;
pub mod report;
pub mod schwartz;
pub mod spectral;

pub use corpus::{builtin_corpus, ClosedForm, CorpusKind, CorpusManifest};
pub use error::{Error, Result};
pub use function::{sample, SampledFunction};
pub use grid::{Axis, DomainSpec, Grid};
pub use operators::{ExtensionReport, Mollifier, ProductNormReport};
pub use params::{Exponent, NormParams, WeightMode};
pub use quadrature::QuadratureConfig;
pub use report::{NormReport, NormValue};
pub use spectral::SpectrumFunction;
