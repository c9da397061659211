//! Engines whose rows factor as `P(k, b) = P(k-1, b) * phi(P(b-k))`.
//!
//! Under resume `phi(c) = E[exp(-lambda (1 - c) S)]`, which unrolls to the
//! product `P(k,b) = prod_{i=1..k} E[exp(-lambda (1 - P(b-i)) S)]`.
//!
//! Under repeat without resampling, conditioning on the first service
//! time `s` gives
//! `P(k,b,s) = exp(-lambda s) P(k-1,b) / (1 - (1 - exp(-lambda s)) P(b-k))`,
//! and `P(k-1,b)` does not depend on `s`, so
//! `phi(c) = E[exp(-lambda S) / (1 - (1 - exp(-lambda S)) c)]`.

use std::collections::HashMap;

use crate::dist::{BatchDistribution, ModelConfig};
use crate::error::Result;

/// Factors below this switch the running product to log space.
const LOG_SPACE_BELOW: f64 = 1e-12;

/// Running product that moves to log space once a factor is tiny.
struct Product {
    linear: f64,
    log: f64,
    in_log: bool,
}

impl Product {
    fn new() -> Self {
        Self { linear: 1.0, log: 0.0, in_log: false }
    }

    fn mul(&mut self, factor: f64) {
        if !self.in_log && factor >= LOG_SPACE_BELOW {
            self.linear *= factor;
            return;
        }
        if !self.in_log {
            self.log = self.linear.ln();
            self.in_log = true;
        }
        self.log += factor.ln();
    }

    fn value(&self) -> f64 {
        if self.in_log {
            self.log.exp()
        } else {
            self.linear
        }
    }
}

/// `P(b) = sum_x pi_x P(x, b)` with `P(x, b) = 0` for `x > b`.
pub(crate) fn mix(batch: &BatchDistribution, row: &[f64]) -> f64 {
    batch
        .pmf()
        .iter()
        .map(|&(x, p)| p * row.get(x as usize).copied().unwrap_or(0.0))
        .sum()
}

/// Builds the table for factor `phi`, evaluated once per distinct marginal
/// value.
pub(crate) fn build<F>(config: &ModelConfig, b_max: usize, mut phi: F) -> Result<(Vec<Vec<f64>>, Vec<f64>)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut kb: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut marginal = vec![0.0];
    let mut memo: HashMap<u64, f64> = HashMap::new();
    // factors[j] = phi(P(j))
    let mut factors: Vec<f64> = Vec::with_capacity(b_max);
    for b in 1..=b_max {
        let c: f64 = marginal[b - 1];
        let factor = match memo.get(&c.to_bits()) {
            Some(&v) => v,
            None => {
                let v = phi(c)?;
                memo.insert(c.to_bits(), v);
                v
            }
        };
        factors.push(factor);

        let mut row = Vec::with_capacity(b + 1);
        row.push(1.0);
        let mut acc = Product::new();
        for k in 1..=b {
            acc.mul(factors[b - k]);
            row.push(acc.value());
        }
        marginal.push(mix(&config.batch, &row));
        kb.push(row);
    }
    Ok((kb, marginal))
}

pub(crate) fn resume(config: &ModelConfig, b_max: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let lambda = config.lambda;
    build(config, b_max, |c| config.service.laplace(lambda * (1.0 - c)))
}

pub(crate) fn no_resample(config: &ModelConfig, b_max: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let lambda = config.lambda;
    build(config, b_max, |c| {
        config.service.expect(|s| {
            let survive = (-lambda * s).exp();
            survive / (1.0 - (1.0 - survive) * c)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_product_matches_direct() {
        let factors = [0.5, 1e-13, 0.25, 1e-200, 1e-200];
        let mut p = Product::new();
        let mut direct = 1.0f64;
        let mut log = 0.0f64;
        for f in factors {
            p.mul(f);
            direct *= f;
            log += f.ln();
        }
        assert_eq!(direct, 0.0);
        assert!(p.value() == 0.0 || (p.value().ln() - log).abs() < 1e-9);

        let mut q = Product::new();
        q.mul(0.5);
        q.mul(1e-13);
        q.mul(0.25);
        assert!((q.value() / (0.5 * 1e-13 * 0.25) - 1.0).abs() < 1e-12);
    }
}
