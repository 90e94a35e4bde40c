//! Mean field equilibria of the Bayesian sequential testing game.
//!
//! A continuum of agents each observe a noisy signal of an unknown binary state
//! and decide when to stop and classify it. The signal strength depends on how
//! many agents have already stopped. The crate solves the single-agent
//! stopping problem as an obstacle problem, computes the laws of the resulting
//! stopping times, and iterates the population map to a fixed point.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod equilibrium;
pub mod error;
pub mod filtering;
pub mod io;
pub mod model;
pub mod population;
pub mod rng;

pub use error::{Error, Result};
