pub mod applications;
pub mod arrangement;
pub mod comonotone;
pub mod config;
pub mod error;
pub mod framework;
pub mod io;
pub mod numerics;
pub mod oracle;
pub mod scalar;

pub use config::{Budget, SolverConfig, Tolerances};
pub use error::{ComaxError, Result};
