//! Simulation and localized estimation for time-varying Lévy-driven
//! Ornstein–Uhlenbeck and state space processes.
//!
//! The crate provides three localized estimators of time-varying coefficient
//! functions (least squares for the OU coefficient, truncated quasi maximum
//! likelihood and Whittle for state space parameters), the simulators needed
//! to study them, and a Monte Carlo harness.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod harness;
pub mod kalman;
pub mod kernels;
pub mod levy;
pub mod optimize;
pub mod ou_lse;
pub mod rng;
pub mod simulate;
pub mod statespace;
pub mod whittle;

pub use error::{Error, Result};
