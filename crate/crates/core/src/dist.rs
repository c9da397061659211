//! Service-time and batch-size laws.
//!
//! Every distribution is validated when it is built and is immutable
//! afterwards. Transforms use closed forms wherever they exist; the Pareto
//! family and general expectations over continuous laws go through
//! [`crate::quad`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::quad;

/// Tolerance on probability vectors summing to one.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Parametric law of the generic service time.
#[derive(Debug, Clone, PartialEq)]
pub enum ServiceKind {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Uniform { low: f64, high: f64 },
    /// Mean-one Pareto with `F(x) = 1 - ((alpha-1)/(alpha x))^alpha`, `x >= (alpha-1)/alpha`.
    Pareto { alpha: f64 },
    HyperExponential { probs: Vec<f64>, rates: Vec<f64> },
    DiscreteEmpirical { atoms: Vec<(f64, f64)> },
}

/// A validated service-time distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceDistribution {
    kind: ServiceKind,
}

fn check_probs(probs: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    let mut total = 0.0;
    for p in probs {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: probability {p} is not a nonnegative number"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: probabilities sum to {total}, not 1"
        )));
    }
    Ok(())
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("{what} must be positive and finite, got {x}")))
    }
}

impl ServiceDistribution {
    pub fn deterministic(value: f64) -> Result<Self> {
        positive(value, "deterministic value")?;
        Ok(Self { kind: ServiceKind::Deterministic { value } })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive(rate, "exponential rate")?;
        Ok(Self { kind: ServiceKind::Exponential { rate } })
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low >= 0.0 && low < high) {
            return Err(Error::InvalidDistribution(format!(
                "uniform needs 0 <= a < b, got a={low}, b={high}"
            )));
        }
        Ok(Self { kind: ServiceKind::Uniform { low, high } })
    }

    pub fn pareto(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::InvalidDistribution(format!("pareto needs alpha > 1, got {alpha}")));
        }
        Ok(Self { kind: ServiceKind::Pareto { alpha } })
    }

    pub fn hyperexponential(probs: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.len() != rates.len() {
            return Err(Error::InvalidDistribution(format!(
                "hyperexponential needs equal nonempty probs/rates, got {} and {}",
                probs.len(),
                rates.len()
            )));
        }
        check_probs(probs.iter().copied(), "hyperexponential")?;
        for &r in &rates {
            positive(r, "hyperexponential rate")?;
        }
        Ok(Self { kind: ServiceKind::HyperExponential { probs, rates } })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("discrete law needs at least one atom".into()));
        }
        for &(v, _) in &atoms {
            positive(v, "discrete atom value")?;
        }
        check_probs(atoms.iter().map(|a| a.1), "discrete")?;
        Ok(Self { kind: ServiceKind::DiscreteEmpirical { atoms } })
    }

    pub fn kind(&self) -> &ServiceKind {
        &self.kind
    }

    /// Left end of the Pareto support.
    fn pareto_scale(alpha: f64) -> f64 {
        (alpha - 1.0) / alpha
    }

    pub fn mean(&self) -> f64 {
        match &self.kind {
            ServiceKind::Deterministic { value } => *value,
            ServiceKind::Exponential { rate } => 1.0 / rate,
            ServiceKind::Uniform { low, high } => 0.5 * (low + high),
            ServiceKind::Pareto { .. } => 1.0,
            ServiceKind::HyperExponential { probs, rates } => {
                probs.iter().zip(rates).map(|(p, r)| p / r).sum()
            }
            ServiceKind::DiscreteEmpirical { atoms } => atoms.iter().map(|(v, p)| v * p).sum(),
        }
    }

    /// `E[exp(-theta S)]`.
    pub fn laplace(&self, theta: f64) -> Result<f64> {
        if !(theta >= 0.0) || theta.is_infinite() {
            return Err(Error::invalid(format!("laplace argument must be finite and >= 0, got {theta}")));
        }
        if theta == 0.0 {
            return Ok(1.0);
        }
        Ok(match &self.kind {
            ServiceKind::Deterministic { value } => (-theta * value).exp(),
            ServiceKind::Exponential { rate } => rate / (rate + theta),
            ServiceKind::Uniform { low, high } => {
                let w = theta * (high - low);
                (-theta * low).exp() * (-(-w).exp_m1()) / w
            }
            ServiceKind::Pareto { .. } => return self.expect(|s| (-theta * s).exp()),
            ServiceKind::HyperExponential { probs, rates } => {
                probs.iter().zip(rates).map(|(p, r)| p * r / (r + theta)).sum()
            }
            ServiceKind::DiscreteEmpirical { atoms } => {
                atoms.iter().map(|(v, p)| p * (-theta * v).exp()).sum()
            }
        })
    }

    /// `E[exp(lambda S)]`, or `f64::INFINITY` when the moment diverges.
    pub fn exp_moment(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) || lambda.is_infinite() {
            return Err(Error::invalid(format!("exp_moment needs lambda > 0, got {lambda}")));
        }
        Ok(match &self.kind {
            ServiceKind::Deterministic { value } => (lambda * value).exp(),
            ServiceKind::Exponential { rate } => {
                if *rate > lambda {
                    rate / (rate - lambda)
                } else {
                    f64::INFINITY
                }
            }
            ServiceKind::Uniform { low, high } => {
                let w = lambda * (high - low);
                (lambda * low).exp() * w.exp_m1() / w
            }
            ServiceKind::Pareto { .. } => f64::INFINITY,
            ServiceKind::HyperExponential { probs, rates } => {
                let mut total = 0.0;
                for (p, r) in probs.iter().zip(rates) {
                    if *p == 0.0 {
                        continue;
                    }
                    if *r <= lambda {
                        return Ok(f64::INFINITY);
                    }
                    total += p * r / (r - lambda);
                }
                total
            }
            ServiceKind::DiscreteEmpirical { atoms } => {
                atoms.iter().map(|(v, p)| p * (lambda * v).exp()).sum()
            }
        })
    }

    /// `E[f(S)]` for a bounded `f`: exact sums for atomic laws, adaptive
    /// quadrature (absolute tolerance 1e-10) for continuous ones.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        match &self.kind {
            ServiceKind::Deterministic { value } => Ok(f(*value)),
            ServiceKind::DiscreteEmpirical { atoms } => Ok(atoms.iter().map(|(v, p)| p * f(*v)).sum()),
            ServiceKind::Uniform { low, high } => {
                let w = high - low;
                Ok(quad::integrate_default(&f, *low, *high)? / w)
            }
            ServiceKind::Exponential { rate } => expect_exponential(&f, *rate),
            ServiceKind::HyperExponential { probs, rates } => {
                let mut total = 0.0;
                for (p, r) in probs.iter().zip(rates) {
                    if *p > 0.0 {
                        total += p * expect_exponential(&f, *r)?;
                    }
                }
                Ok(total)
            }
            ServiceKind::Pareto { alpha } => {
                // x = x_min / t maps the density onto alpha t^(alpha-1) dt on (0, 1].
                let a = *alpha;
                let scale = Self::pareto_scale(a);
                quad::integrate_default(|t| a * t.powf(a - 1.0) * f(scale / t), 0.0, 1.0)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            ServiceKind::Deterministic { value } => f64::from(u8::from(x >= *value)),
            ServiceKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            ServiceKind::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            ServiceKind::Pareto { alpha } => {
                let scale = Self::pareto_scale(*alpha);
                if x < scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(*alpha)
                }
            }
            ServiceKind::HyperExponential { probs, rates } => {
                if x <= 0.0 {
                    0.0
                } else {
                    probs.iter().zip(rates).map(|(p, r)| -p * (-r * x).exp_m1()).sum()
                }
            }
            ServiceKind::DiscreteEmpirical { atoms } => {
                atoms.iter().filter(|(v, _)| *v <= x).map(|(_, p)| p).sum()
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            ServiceKind::Deterministic { value } => *value,
            ServiceKind::Exponential { rate } => sample_exp(*rate, rng),
            ServiceKind::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
            ServiceKind::Pareto { alpha } => {
                let u = 1.0 - rng.random::<f64>();
                Self::pareto_scale(*alpha) * u.powf(-1.0 / alpha)
            }
            ServiceKind::HyperExponential { probs, rates } => {
                let i = pick(probs.iter().copied(), rng);
                sample_exp(rates[i], rng)
            }
            ServiceKind::DiscreteEmpirical { atoms } => {
                let i = pick(atoms.iter().map(|a| a.1), rng);
                atoms[i].0
            }
        }
    }
}

fn expect_exponential<F: Fn(f64) -> f64>(f: &F, rate: f64) -> Result<f64> {
    // u = exp(-rate x) turns E f(S) into the integral of f(-ln(u)/rate) over (0, 1).
    quad::integrate_default(|u| f(-u.ln() / rate), 0.0, 1.0)
}

fn sample_exp<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    Exp::new(rate).expect("rate validated at construction").sample(rng)
}

/// Inverse-CDF index selection over a probability vector.
fn pick<R: Rng + ?Sized>(probs: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = i;
        acc += p;
        if u < acc {
            return i;
        }
    }
    last
}

/// Finite-support law of the batch size.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchDistribution {
    pmf: Vec<(u32, f64)>,
    mean: f64,
}

impl BatchDistribution {
    pub fn new(mut pmf: Vec<(u32, f64)>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidDistribution("batch pmf is empty".into()));
        }
        pmf.sort_by_key(|&(k, _)| k);
        if pmf[0].0 == 0 {
            return Err(Error::InvalidDistribution("batch sizes must be >= 1".into()));
        }
        if pmf.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution("batch sizes must be distinct".into()));
        }
        check_probs(pmf.iter().map(|a| a.1), "batch")?;
        let mean = pmf.iter().map(|&(k, p)| f64::from(k) * p).sum();
        Ok(Self { pmf, mean })
    }

    /// Single arrivals.
    pub fn unit() -> Self {
        Self { pmf: vec![(1, 1.0)], mean: 1.0 }
    }

    pub fn pmf(&self) -> &[(u32, f64)] {
        &self.pmf
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn max_size(&self) -> u32 {
        self.pmf.last().map(|a| a.0).unwrap_or(1)
    }

    pub fn is_unit(&self) -> bool {
        self.pmf == [(1, 1.0)]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.pmf[pick(self.pmf.iter().map(|a| a.1), rng)].0
    }
}

/// Preemptive LCFS variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    /// Preempted work resumes where it stopped.
    Resume,
    /// Preempted service restarts with a freshly drawn service time.
    RepeatResample,
    /// Preempted service restarts with the customer's original service time.
    RepeatNoResample,
}

impl Discipline {
    pub const ALL: [Discipline; 3] =
        [Discipline::Resume, Discipline::RepeatResample, Discipline::RepeatNoResample];

    pub fn name(self) -> &'static str {
        match self {
            Discipline::Resume => "resume",
            Discipline::RepeatResample => "resample",
            Discipline::RepeatNoResample => "noresample",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Discipline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resume" => Ok(Discipline::Resume),
            "resample" | "repeat" => Ok(Discipline::RepeatResample),
            "noresample" => Ok(Discipline::RepeatNoResample),
            _ => Err(Error::Parse {
                token: s.into(),
                reason: "expected one of resume, resample, noresample".into(),
            }),
        }
    }
}

/// One queue: arrival rate, service law, batch law and discipline.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub lambda: f64,
    pub service: ServiceDistribution,
    pub batch: BatchDistribution,
    pub discipline: Discipline,
}

impl ModelConfig {
    pub fn new(
        lambda: f64,
        service: ServiceDistribution,
        batch: BatchDistribution,
        discipline: Discipline,
    ) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(format!("arrival rate must be positive, got {lambda}")));
        }
        Ok(Self { lambda, service, batch, discipline })
    }

    /// Same queue under another discipline.
    pub fn with_discipline(&self, discipline: Discipline) -> Self {
        Self { discipline, ..self.clone() }
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "discipline={} dist={} lambda={} batch={}",
            self.discipline, self.service, self.lambda, self.batch
        )
    }
}

// --- textual specifiers -------------------------------------------------

fn parse_err(token: &str, reason: impl Into<String>) -> Error {
    Error::Parse { token: token.into(), reason: reason.into() }
}

fn parse_f64(token: &str, field: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(token, format!("{field} is not a number")))
}

fn parse_numbers(token: &str, field: &str, expected: usize) -> Result<Vec<f64>> {
    let values = token
        .split(',')
        .map(|t| parse_f64(t, field))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(parse_err(token, format!("expected {expected} comma-separated values")));
    }
    Ok(values)
}

fn parse_pairs(token: &str, field: &str) -> Result<Vec<(f64, f64)>> {
    token
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|pair| parse_numbers(pair, field, 2).map(|v| (v[0], v[1])))
        .collect()
}

impl FromStr for ServiceDistribution {
    type Err = Error;

    /// Parses `det:d`, `exp:rate`, `unif:a,b`, `pareto:alpha`,
    /// `hyperexp:p1,r1;p2,r2;...` or `disc:v1,p1;v2,p2;...`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s
            .split_once(':')
            .ok_or_else(|| parse_err(s, "expected <family>:<parameters>"))?;
        let attach = |e: Error| match e {
            Error::InvalidDistribution(reason) => parse_err(s, reason),
            other => other,
        };
        match tag.trim() {
            "det" => Self::deterministic(parse_f64(body, "value")?).map_err(attach),
            "exp" => Self::exponential(parse_f64(body, "rate")?).map_err(attach),
            "unif" => {
                let v = parse_numbers(body, "bound", 2)?;
                Self::uniform(v[0], v[1]).map_err(attach)
            }
            "pareto" => Self::pareto(parse_f64(body, "alpha")?).map_err(attach),
            "hyperexp" => {
                let (probs, rates) = parse_pairs(body, "hyperexponential branch")?.into_iter().unzip();
                Self::hyperexponential(probs, rates).map_err(attach)
            }
            "disc" => Self::discrete(parse_pairs(body, "atom")?).map_err(attach),
            other => Err(parse_err(
                other,
                "unknown distribution family (det, exp, unif, pareto, hyperexp, disc)",
            )),
        }
    }
}

fn write_pairs<A: fmt::Display, B: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    pairs: impl Iterator<Item = (A, B)>,
) -> fmt::Result {
    for (i, (a, b)) in pairs.enumerate() {
        if i > 0 {
            f.write_str(";")?;
        }
        write!(f, "{a},{b}")?;
    }
    Ok(())
}

impl fmt::Display for ServiceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ServiceKind::Deterministic { value } => write!(f, "det:{value}"),
            ServiceKind::Exponential { rate } => write!(f, "exp:{rate}"),
            ServiceKind::Uniform { low, high } => write!(f, "unif:{low},{high}"),
            ServiceKind::Pareto { alpha } => write!(f, "pareto:{alpha}"),
            ServiceKind::HyperExponential { probs, rates } => {
                f.write_str("hyperexp:")?;
                write_pairs(f, probs.iter().zip(rates))
            }
            ServiceKind::DiscreteEmpirical { atoms } => {
                f.write_str("disc:")?;
                write_pairs(f, atoms.iter().map(|(v, p)| (v, p)))
            }
        }
    }
}

impl FromStr for BatchDistribution {
    type Err = Error;

    /// Parses `unit` or `disc:k1,p1;k2,p2;...`.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "unit" {
            return Ok(Self::unit());
        }
        let body = s
            .strip_prefix("disc:")
            .ok_or_else(|| parse_err(s, "expected `unit` or `disc:k1,p1;k2,p2;...`"))?;
        let mut pmf = Vec::new();
        for (k, p) in parse_pairs(body, "batch entry")? {
            if k.fract() != 0.0 || k < 1.0 || k > f64::from(u32::MAX) {
                return Err(parse_err(s, format!("batch size {k} is not a positive integer")));
            }
            pmf.push((k as u32, p));
        }
        Self::new(pmf).map_err(|e| match e {
            Error::InvalidDistribution(reason) => parse_err(s, reason),
            other => other,
        })
    }
}

impl fmt::Display for BatchDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("unit");
        }
        f.write_str("disc:")?;
        write_pairs(f, self.pmf.iter().map(|(k, p)| (k, p)))
    }
}
