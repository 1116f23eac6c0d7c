//! Numerical toolkit for the family of multivalent q-starlike functions
//! subordinate to a Janowski function under the q-Ruscheweyh-type operator
//! `L_q^{μ+p-1}`.
//!
//! - [`qarith`]: q-numbers, q-factorials, q-Pochhammer symbols.
//! - [`series`]: truncated complex power series and normalized members.
//! - [`operators`]: q-derivative, `L_q^{μ+p-1}`, q-Bernardi operator.
//! - [`classify`]: sufficiency, boundary-sampling and convolution membership tests.
//! - [`bounds`]: coefficient and Fekete-Szegő bound calculators.
//! - [`oracle`]: class members built from Schwarz polynomials.
//! - [`grid`]: the default parameter grid used by sweeps.

// `!(x > c)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod classify;
pub mod error;
pub mod grid;
pub mod operators;
pub mod oracle;
pub mod qarith;
pub mod series;

pub use num_complex::Complex64;

pub use classify::{JanowskiParams, MembershipVerdict, VerdictKind};
pub use error::{Error, Result};
pub use operators::{BernardiParams, Branch, LambdaTable};
pub use oracle::{JanowskiExpansion, SchwarzPoly};
pub use qarith::{LambdaConvention, QContext};
pub use series::{NormalizedMember, TruncSeries};
pub use bounds::{BoundReport, PsiTable};
