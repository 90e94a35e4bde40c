//! Static problem data: penalties, signal, mollifier, population measures and
//! configuration.

pub mod assumptions;
pub mod config;
pub mod loss;
pub mod measure;
pub mod mollifier;
pub mod signal;

pub use assumptions::{check_assumptions, AssumptionReport};
pub use config::{apply_override, FixedPointConfig, GridConfig, McConfig, MollifierConfig, ProblemConfig};
pub use loss::{eval_loss, LossEval, LossModel};
pub use measure::StoppedMeasurePair;
pub use mollifier::{mollified_fraction, Mollifier};
pub use signal::{volatility, SignalModel, VOLATILITY_FLOOR};
