//! Config-driven sweeps, calibration, fitting and CSV I/O on top of the
//! `swaptest` simulator. The `swaptest` binary is a thin wrapper over [`cli`].

pub mod bundled;
pub mod calibrate;
pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod sweep;

pub use calibrate::{fit_calibration, run_calibration, CalibrationRow};
pub use config::{load_config, parse_config, Experiment, ExperimentConfig};
pub use error::{Issue, Result, RunnerError};
pub use sweep::{run_sweep, SweepRow, SweepTable};
