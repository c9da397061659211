use std::fmt::Write as _;

use crate::dist::{Discipline, ModelConfig};
use crate::error::{Error, Result};

/// Triangular table of `P(k, b) = P(M(k) <= b)` for `0 <= k <= b <= b_max`,
/// together with the batch-mixed marginal `P(b) = P(M <= b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    pub(crate) b_max: usize,
    /// `kb[b][k]` for `k = 0..=b`.
    pub(crate) kb: Vec<Vec<f64>>,
    pub(crate) marginal: Vec<f64>,
    pub(crate) config: ModelConfig,
    pub(crate) defective: bool,
}

impl CdfTable {
    pub(crate) fn assemble(config: &ModelConfig, kb: Vec<Vec<f64>>, marginal: Vec<f64>, defective: bool) -> Self {
        Self {
            b_max: marginal.len() - 1,
            kb,
            marginal,
            config: config.clone(),
            defective,
        }
    }

    pub fn b_max(&self) -> usize {
        self.b_max
    }

    pub fn discipline(&self) -> Discipline {
        self.config.discipline
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// True when the queue is unstable, so `P(b)` need not tend to one.
    pub fn is_defective(&self) -> bool {
        self.defective
    }

    /// `P(M(k) <= b)`; zero for `k > b`.
    ///
    /// Panics if `b > b_max`.
    pub fn p(&self, k: usize, b: usize) -> f64 {
        let row = &self.kb[b];
        row.get(k).copied().unwrap_or(0.0)
    }

    /// `P(M <= b)`.
    pub fn marginal(&self, b: usize) -> f64 {
        self.marginal[b]
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginal
    }

    pub fn row(&self, b: usize) -> &[f64] {
        &self.kb[b]
    }

    /// Largest absolute entry-wise difference over `P(k,b)` and `P(b)`.
    pub fn max_abs_diff(&self, other: &CdfTable) -> f64 {
        assert_eq!(self.b_max, other.b_max, "tables of different size");
        let mut worst: f64 = 0.0;
        for b in 0..=self.b_max {
            worst = worst.max((self.marginal[b] - other.marginal[b]).abs());
            for (x, y) in self.kb[b].iter().zip(&other.kb[b]) {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    }

    /// CSV with header `b,P_marginal,P_1_b,...,P_{b_max}_b`, one row per
    /// `b = 0..=b_max`. Entries with `k > b` are written as 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("b,P_marginal");
        for k in 1..=self.b_max {
            let _ = write!(out, ",P_{k}_b");
        }
        out.push('\n');
        for b in 0..=self.b_max {
            let _ = write!(out, "{b},{}", fmt_sig(self.marginal[b]));
            for k in 1..=self.b_max {
                out.push(',');
                out.push_str(&fmt_sig(self.p(k, b)));
            }
            out.push('\n');
        }
        out
    }

    /// Reads back a table written by [`CdfTable::to_csv`]. Lines starting
    /// with `#` are skipped. `config` is attached as the echo.
    pub fn from_csv(text: &str, config: &ModelConfig, defective: bool) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::invalid("empty table csv"))?;
        let columns = header.split(',').count();
        if columns < 2 || !header.starts_with("b,P_marginal") {
            return Err(Error::Parse { token: header.into(), reason: "not a table header".into() });
        }
        let b_max = columns - 2;
        let mut kb = Vec::with_capacity(b_max + 1);
        let mut marginal = Vec::with_capacity(b_max + 1);
        for (expect_b, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns {
                return Err(Error::Parse { token: line.into(), reason: format!("expected {columns} fields") });
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse { token: s.into(), reason: "not a number".into() })
            };
            let b: usize = fields[0]
                .parse()
                .map_err(|_| Error::Parse { token: fields[0].into(), reason: "bad row index".into() })?;
            if b != expect_b {
                return Err(Error::Parse { token: line.into(), reason: format!("expected row b={expect_b}") });
            }
            marginal.push(num(fields[1])?);
            let mut row = vec![1.0];
            for field in &fields[2..2 + b] {
                row.push(num(field)?);
            }
            kb.push(row);
        }
        if marginal.len() != b_max + 1 {
            return Err(Error::invalid(format!("expected {} rows, found {}", b_max + 1, marginal.len())));
        }
        Ok(Self::assemble(config, kb, marginal, defective))
    }
}

/// Formats with 12 significant digits, `%g` style.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to 12 significant digits, matching [`fmt_sig`].
pub fn round_sig(v: f64) -> f64 {
    fmt_sig(v).parse().expect("fmt_sig output parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.606530659712633), "0.606530659713");
        assert_eq!(fmt_sig(0.99999999999999), "1");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(-0.25), "-0.25");
    }
}
