//! Laws of the optimal stopping time given the state of nature: the map from
//! free boundaries to a [`StoppedMeasurePair`](crate::model::StoppedMeasurePair).

pub mod bounds;
pub mod montecarlo;
pub mod pde;

pub use bounds::TransformedBoundaries;
pub use montecarlo::{hitting_cdf_mc, hitting_times_mc, response_measure};
pub use pde::{hitting_cdf_pde, PdeHitting};
