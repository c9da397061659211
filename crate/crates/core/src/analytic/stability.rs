use std::fmt;

use crate::dist::{Discipline, ModelConfig};
use crate::error::Result;

/// Offered load of a queue measured with the discipline's effective
/// service time.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub discipline: Discipline,
    /// Mean total server time per customer, restarts included. May be infinite.
    pub effective_mean_service: f64,
    pub offered_load: f64,
    pub stable: bool,
    pub margin: f64,
}

/// Effective mean service time and load `lambda * mu * E[S_e]`.
///
/// * resume: `E[S_e] = E[S]`;
/// * repeat with resampling: `E[S_e] = (1 - L) / (lambda L)` with `L = E[exp(-lambda S)]`;
/// * repeat without resampling: `E[S_e] = (E[exp(lambda S)] - 1) / lambda`.
pub fn stability(config: &ModelConfig) -> Result<StabilityReport> {
    let lambda = config.lambda;
    let effective = match config.discipline {
        Discipline::Resume => config.service.mean(),
        Discipline::RepeatResample => {
            let l = config.service.laplace(lambda)?;
            if l > 0.0 {
                (1.0 - l) / (lambda * l)
            } else {
                f64::INFINITY
            }
        }
        Discipline::RepeatNoResample => {
            let m = config.service.exp_moment(lambda)?;
            if m.is_finite() {
                (m - 1.0) / lambda
            } else {
                f64::INFINITY
            }
        }
    };
    let offered_load = lambda * config.batch.mean() * effective;
    Ok(StabilityReport {
        discipline: config.discipline,
        effective_mean_service: effective,
        offered_load,
        stable: offered_load < 1.0,
        margin: 1.0 - offered_load,
    })
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stability: discipline={} effective_mean_service={} offered_load={} stable={} margin={}",
            self.discipline,
            self.effective_mean_service,
            self.offered_load,
            self.stable,
            self.margin
        )?;
        if !self.effective_mean_service.is_finite() {
            let why = match self.discipline {
                Discipline::RepeatNoResample => "E[exp(lambda S)] is infinite",
                _ => "effective service time is infinite",
            };
            write!(f, " ({why})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{BatchDistribution, ServiceDistribution};

    fn cfg(d: &str, lambda: f64, disc: Discipline) -> ModelConfig {
        ModelConfig::new(lambda, d.parse().unwrap(), BatchDistribution::unit(), disc).unwrap()
    }

    #[test]
    fn resume_uses_plain_mean() {
        let r = stability(&cfg("unif:0,2", 0.9, Discipline::Resume)).unwrap();
        assert!((r.offered_load - 0.9).abs() < 1e-15);
        assert!(r.stable);
    }

    #[test]
    fn pareto_never_stable_without_resampling() {
        for lambda in [1e-6, 0.1, 0.95] {
            let r = stability(&cfg("pareto:2", lambda, Discipline::RepeatNoResample)).unwrap();
            assert!(!r.stable);
            assert_eq!(r.effective_mean_service, f64::INFINITY);
            assert!(r.to_string().contains("infinite"));
        }
    }

    #[test]
    fn exponential_resample_matches_resume() {
        // E[S_e] = E[S] for exponential service under repeat with resampling.
        let r = stability(&cfg("exp:1.7", 0.4, Discipline::RepeatResample)).unwrap();
        assert!((r.effective_mean_service - 1.0 / 1.7).abs() < 1e-14);
    }

    #[test]
    fn batch_mean_scales_load() {
        let c = ModelConfig::new(
            0.3,
            ServiceDistribution::deterministic(1.0).unwrap(),
            "disc:1,0.5;2,0.5".parse().unwrap(),
            Discipline::Resume,
        )
        .unwrap();
        assert!((stability(&c).unwrap().offered_load - 0.45).abs() < 1e-15);
    }
}
