//! The representative agent's stopping problem for a given volatility curve,
//! with independent solvers used to check it.

pub mod boundary;
pub mod infinite;
pub mod lattice;
mod lcp;
pub mod obstacle;
pub mod residual;
pub mod surface;
pub mod timechange;
pub mod tridiag;

pub use boundary::{extract_boundaries, stop_runs};
pub use infinite::{solve_infinite_horizon, InfiniteHorizonSolution};
pub use lattice::{brute_force_tree_value, solve_value_lattice, MAX_TREE_STEPS};
pub use obstacle::{solve_value, terminal_boundaries};
pub use residual::{integral_residual, IntegralResidual};
pub use surface::{default_eps_stop, Boundaries, ValueSurface};
pub use timechange::{solve_clock_surface, solve_value_timechanged, ClockSurface, L_MAX};
