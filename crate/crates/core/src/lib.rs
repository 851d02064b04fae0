//! Reduced-order modelling of nonlinear, non-affinely parametrized elliptic problems.
//!
//! The crate couples an Empirical Interpolation Method (EIM) for the nonlinear terms with a
//! Galerkin reduced basis (RB) built from finite-element snapshots. Three build strategies are
//! provided by [`ser`]:
//!
//! * the standard sequential pipeline, where the EIM is trained on finite-element solutions
//!   at every training parameter before the RB space is assembled;
//! * the simultaneous strategy, where each EIM greedy sweep evaluates the nonlinearity on the
//!   current reduced solution, so that only `N + 1` finite-element solves are needed;
//! * grouped strategies in between, where the RB is refreshed every `r` EIM steps.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI, and thread pools live in
//! the companion `ser` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod benchmark;
pub mod eim;
mod error;
pub mod exec;
pub mod fem;
pub mod linalg;
pub mod nonlinear;
pub mod rb;
pub mod ser;
pub mod study;
pub mod truth;

pub use error::{Error, Result};
pub use nonlinear::{NonlinearTerm, Parameter};
