//! Stochastic-order premises on service laws and the induced dominance of
//! the busy-period maximum.
//!
//! Order premises are checked as evidence: Laplace-transform order on a
//! finite θ grid, or a single transform value at the arrival rate. Convex
//! order inside the built-in equal-mean families is asserted from their
//! structure (every pair of members has single-crossing CDFs), never
//! estimated from samples.

use std::fmt;
use std::str::FromStr;

use crate::analytic::max_cdf;
use crate::dist::{BatchDistribution, Discipline, ModelConfig, ServiceDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `E[exp(-θ A)] >= E[exp(-θ B)]` on a θ grid.
    Lt,
    /// `E[exp(-λ A)] >= E[exp(-λ B)]` at one point.
    TransformAtLambda,
    IcvAssumed,
    CxAssumed,
    /// `P_A(M <= b) >= P_B(M <= b)` for every `b` checked.
    St,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "LT",
            Relation::TransformAtLambda => "transform_at_lambda",
            Relation::IcvAssumed => "icv_assumed",
            Relation::CxAssumed => "cx_assumed",
            Relation::St => "st",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Holds {
    Yes,
    No,
    Unknown,
}

impl Holds {
    fn from_bool(b: bool) -> Self {
        if b {
            Holds::Yes
        } else {
            Holds::No
        }
    }
}

impl fmt::Display for Holds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Holds::Yes => "true",
            Holds::No => "false",
            Holds::Unknown => "unknown",
        })
    }
}

/// Where a comparison was tightest (or first failed).
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Theta(f64),
    Lambda(f64),
    Level(usize),
    Family(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Theta(t) => write!(f, "theta={t}"),
            Witness::Lambda(l) => write!(f, "lambda={l}"),
            Witness::Level(b) => write!(f, "b={b}"),
            Witness::Family(s) => write!(f, "family={s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub holds: Holds,
    /// Smallest `A - B` margin observed; negative when the relation fails.
    pub min_margin: f64,
    pub witness: Option<Witness>,
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        self.holds == Holds::Yes
    }
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "relation={} holds={} min_margin={:.2e}", self.relation, self.holds, self.min_margin)?;
        if let Some(w) = &self.witness {
            write!(f, " at {w}")?;
        }
        Ok(())
    }
}

/// 64 log-spaced points in `[1e-3, 50]`.
pub fn default_theta_grid() -> Vec<f64> {
    log_grid(1e-3, 50.0, 64)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Tests `A <=_LT B` on `theta_grid`, i.e. `laplace(A) >= laplace(B)` at
/// every grid point (`A` plays the less variable-in-M role `S'`).
pub fn check_lt_order(a: &ServiceDistribution, b: &ServiceDistribution, theta_grid: &[f64]) -> Result<OrderVerdict> {
    if theta_grid.is_empty() || theta_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::invalid("theta grid must be nonempty, finite and positive"));
    }
    let mut min_margin = f64::INFINITY;
    let mut at = theta_grid[0];
    for &theta in theta_grid {
        let margin = a.laplace(theta)? - b.laplace(theta)?;
        if margin < min_margin {
            min_margin = margin;
            at = theta;
        }
    }
    Ok(OrderVerdict {
        relation: Relation::Lt,
        holds: Holds::from_bool(min_margin >= 0.0),
        min_margin,
        witness: Some(Witness::Theta(at)),
    })
}

/// Compares `E[exp(-λ A)]` with `E[exp(-λ B)]`.
pub fn check_transform_at_lambda(a: &ServiceDistribution, b: &ServiceDistribution, lambda: f64) -> Result<OrderVerdict> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    let margin = a.laplace(lambda)? - b.laplace(lambda)?;
    Ok(OrderVerdict {
        relation: Relation::TransformAtLambda,
        holds: Holds::from_bool(margin >= 0.0),
        min_margin: margin,
        witness: Some(Witness::Lambda(lambda)),
    })
}

/// Checks `P_A(M <= b) >= P_B(M <= b) - tolerance` for `1 <= b <= b_max`.
pub fn verify_dominance(a: &ModelConfig, b: &ModelConfig, b_max: usize, tolerance: f64) -> Result<OrderVerdict> {
    if a.lambda != b.lambda {
        return Err(Error::invalid(format!(
            "dominance needs the same arrival rate, got {} and {}",
            a.lambda, b.lambda
        )));
    }
    if a.batch != b.batch {
        return Err(Error::invalid("dominance needs the same batch-size law"));
    }
    if a.discipline != b.discipline {
        return Err(Error::invalid("dominance needs the same discipline"));
    }
    let ta = max_cdf(a, b_max)?;
    let tb = max_cdf(b, b_max)?;
    let (at, min_margin) = (1..=b_max)
        .map(|level| (level, ta.marginal(level) - tb.marginal(level)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("b_max >= 1");
    Ok(OrderVerdict {
        relation: Relation::St,
        holds: Holds::from_bool(min_margin >= -tolerance),
        min_margin,
        witness: Some(Witness::Level(at)),
    })
}

// --- equal-mean families ----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `Uniform(1-w, 1+w)`; `w = 0` is `Deterministic(1)`.
    UniformWidth,
    /// Mean-one Pareto(α).
    ParetoAlpha,
    /// Two-branch hyperexponential: weight `1 - 2^-k` on mean `1/(2(1-2^-k))`,
    /// weight `2^-k` on mean `2^k / 2`.
    HyperExpK,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::UniformWidth => "uniform",
            FamilyKind::ParetoAlpha => "pareto",
            FamilyKind::HyperExpK => "hyperexp",
        }
    }

    fn param_name(self) -> &'static str {
        match self {
            FamilyKind::UniformWidth => "w",
            FamilyKind::ParetoAlpha => "alpha",
            FamilyKind::HyperExpK => "k",
        }
    }

    pub fn default_params(self) -> Vec<f64> {
        match self {
            FamilyKind::UniformWidth => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            FamilyKind::ParetoAlpha => vec![5.0, 3.0, 2.0, 1.5],
            FamilyKind::HyperExpK => vec![1.0, 2.0, 3.0, 4.0],
        }
    }

    /// Default arrival rate for the family curves.
    pub fn figure_lambda(self) -> f64 {
        match self {
            FamilyKind::UniformWidth => 0.9,
            FamilyKind::ParetoAlpha | FamilyKind::HyperExpK => 0.95,
        }
    }

    /// Default largest `n` of the family curves.
    pub fn figure_n_max(self) -> usize {
        match self {
            FamilyKind::UniformWidth | FamilyKind::ParetoAlpha => 20,
            FamilyKind::HyperExpK => 10,
        }
    }

    /// Sort key that increases with variability.
    fn variability_key(self, param: f64) -> f64 {
        match self {
            FamilyKind::ParetoAlpha => -param,
            _ => param,
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(FamilyKind::UniformWidth),
            "pareto" => Ok(FamilyKind::ParetoAlpha),
            "hyperexp" => Ok(FamilyKind::HyperExpK),
            _ => Err(Error::Parse {
                token: s.into(),
                reason: "unknown family (uniform, pareto, hyperexp)".into(),
            }),
        }
    }
}

/// A family of mean-one service laws at a common arrival rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Sorted in increasing-variability order by [`FamilySpec::new`].
    pub params: Vec<f64>,
    pub lambda: f64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, mut params: Vec<f64>, lambda: f64) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::invalid("family needs at least one parameter"));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
        }
        params.sort_by(|a, b| kind.variability_key(*a).total_cmp(&kind.variability_key(*b)));
        Ok(Self { kind, params, lambda })
    }

    /// Default parameters at the default arrival rate.
    pub fn figure(kind: FamilyKind) -> Self {
        Self::new(kind, kind.default_params(), kind.figure_lambda()).expect("defaults are valid")
    }

    pub fn label(&self, i: usize) -> String {
        format!("{}={}", self.kind.param_name(), self.params[i])
    }
}

/// Members of the family, least variable first.
pub fn make_family(spec: &FamilySpec) -> Result<Vec<ServiceDistribution>> {
    spec.params
        .iter()
        .map(|&param| match spec.kind {
            FamilyKind::UniformWidth => {
                if !(0.0..=1.0).contains(&param) {
                    return Err(Error::invalid(format!("uniform width must lie in [0,1], got {param}")));
                }
                if param == 0.0 {
                    ServiceDistribution::deterministic(1.0)
                } else {
                    ServiceDistribution::uniform(1.0 - param, 1.0 + param)
                }
            }
            FamilyKind::ParetoAlpha => ServiceDistribution::pareto(param)
                .map_err(|_| Error::invalid(format!("pareto alpha must exceed 1, got {param}"))),
            FamilyKind::HyperExpK => {
                if !(param >= 1.0 && param.fract() == 0.0 && param <= 60.0) {
                    return Err(Error::invalid(format!("hyperexponential k must be an integer in 1..=60, got {param}")));
                }
                let tail = (-param).exp2();
                let head = 1.0 - tail;
                let head_rate = 2.0 * head;
                let tail_rate = 2.0 * tail;
                ServiceDistribution::hyperexponential(vec![head, tail], vec![head_rate, tail_rate])
            }
        })
        .collect()
}

/// Convex order between members `i <= j` of a built-in family, asserted
/// from its structure: member `j` is at least as variable as member `i`.
pub fn structural_order(spec: &FamilySpec, i: usize, j: usize) -> OrderVerdict {
    let holds = if i < spec.params.len() && j < spec.params.len() {
        Holds::from_bool(i <= j)
    } else {
        Holds::Unknown
    };
    OrderVerdict {
        relation: Relation::CxAssumed,
        holds,
        min_margin: 0.0,
        witness: Some(Witness::Family(format!("{} {} vs {}", spec.kind.name(), spec.label(i.min(spec.params.len() - 1)), spec.label(j.min(spec.params.len() - 1))))),
    }
}

/// One `P(M <= n)` curve per family member, `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct FamilyCurves {
    pub spec: FamilySpec,
    pub discipline: Discipline,
    pub labels: Vec<String>,
    pub curves: Vec<Vec<f64>>,
}

pub fn family_curves(
    spec: &FamilySpec,
    discipline: Discipline,
    batch: &BatchDistribution,
    n_max: usize,
) -> Result<FamilyCurves> {
    let members = make_family(spec)?;
    let mut curves = Vec::with_capacity(members.len());
    for service in members {
        let config = ModelConfig::new(spec.lambda, service, batch.clone(), discipline)?;
        curves.push(max_cdf(&config, n_max)?.marginals().to_vec());
    }
    Ok(FamilyCurves {
        labels: (0..spec.params.len()).map(|i| spec.label(i)).collect(),
        spec: spec.clone(),
        discipline,
        curves,
    })
}

impl FamilyCurves {
    /// Each curve nondecreasing in `n`, and curves nondecreasing in
    /// variability at every `n >= 1`, both up to `tolerance`.
    pub fn check_monotone(&self, tolerance: f64) -> OrderVerdict {
        let mut min_margin = f64::INFINITY;
        let mut witness = None;
        let mut note = |margin: f64, what: String| {
            if margin < min_margin {
                min_margin = margin;
                witness = Some(Witness::Family(what));
            }
        };
        for (label, curve) in self.labels.iter().zip(&self.curves) {
            for n in 1..curve.len() - 1 {
                note(curve[n + 1] - curve[n], format!("{label} n={n}"));
            }
        }
        for i in 1..self.curves.len() {
            for n in 1..self.curves[i].len() {
                note(
                    self.curves[i][n] - self.curves[i - 1][n],
                    format!("{} vs {} n={n}", self.labels[i], self.labels[i - 1]),
                );
            }
        }
        OrderVerdict {
            relation: Relation::St,
            holds: Holds::from_bool(min_margin >= -tolerance),
            min_margin,
            witness,
        }
    }

    /// Wide CSV: `n,<label1>,<label2>,...` for `n = 1..=n_max`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        let n_max = self.curves.first().map_or(0, |c| c.len() - 1);
        for n in 1..=n_max {
            out.push_str(&n.to_string());
            for c in &self.curves {
                out.push(',');
                out.push_str(&crate::analytic::fmt_sig(c[n]));
            }
            out.push('\n');
        }
        out
    }
}
