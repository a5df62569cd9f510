//! Numerical geometry of the weight (+1, -1) projective space.
//!
//! Points are pairs of nonzero complex blocks `(v, w)` modulo the scaling
//! `(v, w) ~ (lambda v, lambda^-1 w)` for nonzero complex `lambda`. The crate
//! provides:
//!
//! - [`hvec`]: the quotient itself: points, scaling action, the rank-one
//!   invariant matrix, charts, and chart transitions.
//! - [`bundle`]: the two fibration structures over ordinary projective spaces
//!   and the tautological rank-one embedding.
//! - [`forms`]: a small Wirtinger-calculus engine for numerically evaluated
//!   differential forms: jacobians, pullbacks, interior products, exterior
//!   derivatives.
//! - [`symplectic`]: the flat Kaehler form upstairs, the moment map of the
//!   circle action, normalization onto a level set, and the reduced two-form
//!   both as a closed formula and as a finite-difference oracle.
//! - [`verify`]: a registry of randomized checks exercising the identities
//!   the other modules promise, with serializable reports and replayable
//!   witnesses.

pub mod bundle;
pub mod error;
pub mod forms;
pub mod hvec;
pub mod symplectic;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use hvec::{Atlas, ChartCoords, ChartId, ComplexVec, HomPoint};
