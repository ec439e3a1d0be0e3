//! Simulation and exact verification of the Móri preferential-attachment
//! process: sampling, clustering statistics, an exhaustive enumeration
//! oracle, closed-form predictions and Monte Carlo ensembles.

pub mod error;
pub mod exact;
pub mod forest;
pub mod montecarlo;
pub mod params;
pub mod process;
pub mod scalar;
pub mod seed;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use params::ModelParams;
