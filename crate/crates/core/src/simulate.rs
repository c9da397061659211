//! Event-by-event busy-period simulator, independent of the analytic
//! recursions.
//!
//! The in-system customers form a stack; only the top one is served. An
//! arriving batch is pushed in one epoch, so the running maximum counts the
//! whole batch. Interarrival times are redrawn at every service (re)start,
//! which is exact for Poisson arrivals.
//!
//! Replication `i` draws from ChaCha8 stream `i` under the root seed, so
//! estimates are bit-reproducible regardless of how rayon splits the work.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::analytic::fmt_sig;
use crate::dist::{Discipline, ModelConfig};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_EVENTS: u64 = 10_000_000;
pub const DEFAULT_MAX_QUEUE: u32 = 100_000;

/// How an arriving batch enters the stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchPush {
    /// All members at once.
    #[default]
    Atomic,
    /// One member at a time at the same instant, updating the maximum after each.
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub max_events: u64,
    pub max_queue: u32,
    /// End the period as soon as the maximum exceeds this level.
    pub stop_above: Option<u32>,
    pub batch_push: BatchPush,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_events: DEFAULT_MAX_EVENTS,
            max_queue: DEFAULT_MAX_QUEUE,
            stop_above: None,
            batch_push: BatchPush::Atomic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationCause {
    EventCap,
    QueueCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BusyPeriodOutcome {
    /// The system emptied; the payload is the maximum number in system.
    Completed(u32),
    /// The maximum passed `stop_above`; the period was not finished.
    Exceeded { max: u32 },
    /// A cap was hit before the system emptied.
    Truncated { max: u32, cause: TruncationCause },
}

#[derive(Debug, Clone)]
struct Customer {
    #[allow(dead_code)]
    order: u64,
    /// Remaining work (resume), the single drawn requirement (no resampling),
    /// or the current attempt's draw (resampling). `None` until first needed.
    service: Option<f64>,
}

/// State of one busy period.
#[derive(Debug, Clone, Default)]
pub struct BusyPeriodState {
    stack: Vec<Customer>,
    arrivals: u64,
    running_max: u32,
    clock: f64,
    events: u64,
}

impl BusyPeriodState {
    pub fn in_system(&self) -> u32 {
        self.stack.len() as u32
    }

    pub fn running_max(&self) -> u32 {
        self.running_max
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    fn push_one(&mut self) {
        self.stack.push(Customer { order: self.arrivals, service: None });
        self.arrivals += 1;
        self.running_max = self.running_max.max(self.in_system());
    }

    fn push_batch(&mut self, size: u32, mode: BatchPush) {
        match mode {
            BatchPush::Atomic => {
                self.stack.extend((0..size).map(|i| Customer { order: self.arrivals + u64::from(i), service: None }));
                self.arrivals += u64::from(size);
                self.running_max = self.running_max.max(self.in_system());
            }
            BatchPush::Sequential => (0..size).for_each(|_| self.push_one()),
        }
    }
}

fn check_caps(state: &BusyPeriodState, opts: &SimOptions) -> Option<BusyPeriodOutcome> {
    let max = state.running_max;
    if opts.stop_above.is_some_and(|level| max > level) {
        return Some(BusyPeriodOutcome::Exceeded { max });
    }
    if state.in_system() > opts.max_queue {
        return Some(BusyPeriodOutcome::Truncated { max, cause: TruncationCause::QueueCap });
    }
    None
}

/// Runs one busy period and returns its maximum number in system.
pub fn simulate_busy_period<R: Rng + ?Sized>(
    config: &ModelConfig,
    rng: &mut R,
    opts: &SimOptions,
) -> BusyPeriodOutcome {
    let interarrival = Exp::new(config.lambda).expect("lambda validated at construction");
    let mut state = BusyPeriodState::default();
    state.push_batch(config.batch.sample(rng), opts.batch_push);
    if let Some(out) = check_caps(&state, opts) {
        return out;
    }
    loop {
        if state.events >= opts.max_events {
            return BusyPeriodOutcome::Truncated {
                max: state.running_max,
                cause: TruncationCause::EventCap,
            };
        }
        state.events += 1;
        let top = state.stack.last_mut().expect("busy period has a customer in service");
        let work = *top.service.get_or_insert_with(|| config.service.sample(rng));
        let next_arrival = interarrival.sample(rng);
        if next_arrival < work {
            state.clock += next_arrival;
            match config.discipline {
                Discipline::Resume => top.service = Some(work - next_arrival),
                Discipline::RepeatResample => top.service = None,
                Discipline::RepeatNoResample => {}
            }
            state.push_batch(config.batch.sample(rng), opts.batch_push);
            if let Some(out) = check_caps(&state, opts) {
                return out;
            }
        } else {
            state.clock += work;
            state.stack.pop();
            if state.stack.is_empty() {
                return BusyPeriodOutcome::Completed(state.running_max);
            }
        }
    }
}

/// Random stream of replication `index` under `seed`.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Empirical distribution of the busy-period maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationEstimate {
    pub n_max: u32,
    /// `cdf_hat[n-1]` estimates `P(M <= n)`.
    pub cdf_hat: Vec<f64>,
    /// `counts[n-1]` busy periods had maximum exactly `n`.
    pub counts: Vec<u64>,
    /// Completed or stopped periods whose maximum exceeded `n_max`.
    pub above_n_max: u64,
    pub replications: u64,
    /// 95% normal-approximation half-widths, `1.96 sqrt(p(1-p)/R)`.
    pub ci_halfwidth: Vec<f64>,
    pub seed: u64,
    /// Periods cut off by the event or queue cap.
    pub overflow_count: u64,
    pub config: ModelConfig,
}

impl SimulationEstimate {
    /// Estimate of `P(M <= n)`, `1 <= n <= n_max`.
    pub fn cdf(&self, n: u32) -> f64 {
        self.cdf_hat[(n - 1) as usize]
    }

    pub fn standard_error(&self, n: u32) -> f64 {
        let p = self.cdf(n);
        (p * (1.0 - p) / self.replications as f64).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# config: {}", self.config);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# replications={}", self.replications);
        let _ = writeln!(out, "# overflow_count={}", self.overflow_count);
        let _ = writeln!(out, "# above_n_max={}", self.above_n_max);
        out.push_str("n,p_hat,ci_lo,ci_hi,count\n");
        for n in 1..=self.n_max {
            let i = (n - 1) as usize;
            let p = self.cdf_hat[i];
            let h = self.ci_halfwidth[i];
            let _ = writeln!(
                out,
                "{n},{},{},{},{}",
                fmt_sig(p),
                fmt_sig((p - h).max(0.0)),
                fmt_sig((p + h).min(1.0)),
                self.counts[i]
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Tally {
    counts: Vec<u64>,
    above: u64,
    overflow: u64,
}

impl Tally {
    fn new(n_max: u32) -> Self {
        Self { counts: vec![0; n_max as usize], above: 0, overflow: 0 }
    }

    fn record(mut self, outcome: BusyPeriodOutcome) -> Self {
        match outcome {
            BusyPeriodOutcome::Completed(m) if (m as usize) <= self.counts.len() => {
                self.counts[m as usize - 1] += 1;
            }
            BusyPeriodOutcome::Completed(_) | BusyPeriodOutcome::Exceeded { .. } => self.above += 1,
            BusyPeriodOutcome::Truncated { .. } => self.overflow += 1,
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.above += other.above;
        self.overflow += other.overflow;
        self
    }
}

/// [`estimate_cdf_with`] using default caps.
pub fn estimate_cdf(config: &ModelConfig, n_max: u32, replications: u64, seed: u64) -> Result<SimulationEstimate> {
    estimate_cdf_with(config, n_max, replications, seed, &SimOptions::default())
}

/// Estimates `P(M <= n)` for `n = 1..=n_max` from independent busy periods.
///
/// Periods are stopped as soon as their maximum exceeds `n_max`, which
/// does not change any estimate. Truncated periods are counted in
/// `overflow_count` and in no `counts` cell; the denominator is always
/// `replications`, so truncation can only lower `cdf_hat`.
pub fn estimate_cdf_with(
    config: &ModelConfig,
    n_max: u32,
    replications: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimulationEstimate> {
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let opts = SimOptions {
        stop_above: Some(opts.stop_above.map_or(n_max, |s| s.min(n_max))),
        ..opts.clone()
    };
    let tally = (0..replications)
        .into_par_iter()
        .fold(
            || Tally::new(n_max),
            |tally, i| {
                let mut rng = replication_rng(seed, i);
                tally.record(simulate_busy_period(config, &mut rng, &opts))
            },
        )
        .reduce(|| Tally::new(n_max), Tally::merge);

    let r = replications as f64;
    let mut cumulative = 0u64;
    let mut cdf_hat = Vec::with_capacity(n_max as usize);
    let mut ci_halfwidth = Vec::with_capacity(n_max as usize);
    for &c in &tally.counts {
        cumulative += c;
        let p = cumulative as f64 / r;
        cdf_hat.push(p);
        ci_halfwidth.push(1.96 * (p * (1.0 - p) / r).sqrt());
    }
    Ok(SimulationEstimate {
        n_max,
        cdf_hat,
        counts: tally.counts,
        above_n_max: tally.above,
        replications,
        ci_halfwidth,
        seed,
        overflow_count: tally.overflow,
        config: config.clone(),
    })
}
