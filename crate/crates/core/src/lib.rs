//! Stochastic gravitational-background toolkit.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! core. File formats, parallel drivers and the command-line tool live in the
//! `polvar` crate.
//!
//! * [`background`] builds seeded ensembles of transverse-traceless plane
//!   waves on Minkowski space and evaluates the perturbed metric and the
//!   linearized curvature they produce.
//! * [`deviation`] integrates the relative oscillation of a particle pair
//!   driven by that curvature.
//! * [`probability`] holds the Gaussian interval-probability model, the
//!   amplitude built from it and finite-difference residuals for the
//!   Hamilton–Jacobi, continuity and Schrödinger equations.
//! * [`bell`] evaluates the metric-weighted polarization correlator, the
//!   half-CHSH observable and its maximizer.
//!
//! Units are geometrized (`c = G = 1`) unless a function takes `c` explicitly.

#![no_std]

extern crate alloc;

pub mod background;
pub mod bell;
pub mod deviation;
mod error;
pub(crate) mod math;
pub mod probability;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{FourVector, SymTensor2, ETA};
