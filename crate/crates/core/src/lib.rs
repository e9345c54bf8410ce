//! Enveloping semigroupoids of finite groupoid actions.
//!
//! The crate models extensions of finite (or grid-discretized) dynamical
//! systems as groupoid actions on fibered spaces, computes the composition
//! closure of their fiber maps, and checks the structure that closure carries:
//! ergodicity, pseudoisometry, relatively invariant measures and the Fourier
//! decomposition along invariant sections of the isotropy duals.
//!
//! Module map:
//!
//! - [`groupoid`]: finite groupoid tables, validation, standard constructions.
//! - [`action`]: fibered spaces, groupoid actions, Koopman blocks, ergodicity.
//! - [`envelope`]: fiber maps, closure with the ε-limit rule, classification.
//! - [`measures`]: relatively invariant measures with exact rational weights.
//! - [`fourier`]: character tables, invariant sections, projections.
//! - [`discretize`]: registry of example systems compiled to finite data.
//! - [`report`] and [`io`]: the batch pipeline and its JSON formats.

pub mod action;
pub mod constructions;
pub mod discretize;
pub mod envelope;
pub mod error;
pub mod fourier;
pub mod group;
pub mod groupoid;
pub mod io;
pub mod measures;
pub mod report;
pub mod sample;
pub mod registry;
mod linalg;
mod unionfind;

pub use action::{FiberedFunction, FiberedSpace, GroupoidAction};
pub use envelope::{close, CloseOptions, Envelope, FiberMap};
pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use groupoid::FiniteGroupoid;
pub use unionfind::UnionFind;
