//! Exact distribution of the busy-period maximum `M` for the three
//! preemptive LCFS disciplines.
//!
//! All engines fill `P(k, b) = P(M(k) <= b)` for increasing `b`, where
//! `M(k)` is the maximum of a busy period started by `k` customers, and mix
//! rows over the batch law to get `P(b) = P(M <= b)`. Tables are returned
//! for unstable queues too, flagged as defective.

mod product;
mod stability;
mod table;
mod walk;

pub use stability::{stability, StabilityReport};
pub use table::{fmt_sig, round_sig, CdfTable};
pub use walk::{ruin_closed_form, walk_cdf};

use crate::dist::{Discipline, ModelConfig};
use crate::error::{Error, Result};

fn check(config: &ModelConfig, b_max: usize, want: Discipline) -> Result<()> {
    if b_max < 1 {
        return Err(Error::invalid("b_max must be at least 1"));
    }
    if config.discipline != want {
        return Err(Error::invalid(format!(
            "{want} engine called with a {} configuration",
            config.discipline
        )));
    }
    Ok(())
}

fn finish(config: &ModelConfig, (kb, marginal): (Vec<Vec<f64>>, Vec<f64>)) -> Result<CdfTable> {
    let defective = !stability(config)?.stable;
    Ok(CdfTable::assemble(config, kb, marginal, defective))
}

/// LCFS preempt-resume.
pub fn resume_cdf(config: &ModelConfig, b_max: usize) -> Result<CdfTable> {
    check(config, b_max, Discipline::Resume)?;
    finish(config, product::resume(config, b_max)?)
}

/// LCFS preempt-repeat with a fresh service time at every restart.
pub fn resample_cdf(config: &ModelConfig, b_max: usize) -> Result<CdfTable> {
    check(config, b_max, Discipline::RepeatResample)?;
    let q = config.service.laplace(config.lambda)?;
    finish(config, walk_cdf(q, &config.batch, b_max)?)
}

/// LCFS preempt-repeat reusing each customer's original service time.
pub fn noresample_cdf(config: &ModelConfig, b_max: usize) -> Result<CdfTable> {
    check(config, b_max, Discipline::RepeatNoResample)?;
    finish(config, product::no_resample(config, b_max)?)
}

/// Dispatches on `config.discipline`.
pub fn max_cdf(config: &ModelConfig, b_max: usize) -> Result<CdfTable> {
    match config.discipline {
        Discipline::Resume => resume_cdf(config, b_max),
        Discipline::RepeatResample => resample_cdf(config, b_max),
        Discipline::RepeatNoResample => noresample_cdf(config, b_max),
    }
}
