//! Point-mass simulation of a gliding re-entry vehicle with terminal
//! guidance, and of the interceptors engaging it.

// Validation rejects NaN through negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aero;
pub mod atmosphere;
pub mod config;
pub mod dynamics;
pub mod engagement;
pub mod error;
pub mod guidance;
pub mod interceptor;
pub mod report;
pub mod rng;

pub use config::{dump_scenario, parse_scenario, parse_scenario_str, preset};
pub use dynamics::{InterceptorState, Sample, Termination, VehicleState};
pub use engagement::{
    monte_carlo_batch, BatchResult, BatchStatistics, RunOutcome, RunResult, Scenario,
};
pub use error::{Result, SimError};
pub use guidance::GuidancePhase;
pub use interceptor::{InterceptorSite, InterceptorSpec, InterceptorType};
pub use rng::{run_stream, SimRng};
