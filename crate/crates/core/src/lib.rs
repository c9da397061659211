//! Distribution of the maximum number in system during a busy period of an
//! `M^X/G/1` queue served last-come first-served with preemption.
//!
//! Three preemption rules are covered (see [`Discipline`]): resumed work,
//! restarts with a fresh service time, and restarts with the customer's
//! original service time. For each, [`analytic`] computes
//! `P(M <= b)` exactly, [`simulate`] estimates it by replaying busy periods,
//! and [`ordering`] checks how more variable service times shrink `M`.
//!
//! ```
//! use maxq::{analytic, BatchDistribution, Discipline, ModelConfig, ServiceDistribution};
//!
//! let config = ModelConfig::new(
//!     0.5,
//!     ServiceDistribution::deterministic(1.0)?,
//!     BatchDistribution::unit(),
//!     Discipline::Resume,
//! )?;
//! let table = analytic::max_cdf(&config, 2)?;
//! assert!((table.marginal(1) - (-0.5f64).exp()).abs() < 1e-15);
//! # Ok::<(), maxq::Error>(())
//! ```

pub mod analytic;
pub mod cli;
pub mod dist;
mod error;
pub mod ordering;
pub mod quad;
pub mod simulate;

pub use analytic::{max_cdf, stability, CdfTable, StabilityReport};
pub use dist::{BatchDistribution, Discipline, ModelConfig, ServiceDistribution, ServiceKind};
pub use error::{Error, Result};
pub use ordering::OrderVerdict;
pub use simulate::{estimate_cdf, SimulationEstimate};
