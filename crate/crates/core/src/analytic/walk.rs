//! Repeat with resampling: the number in system at arrival and departure
//! epochs is a random walk absorbed at 0 that steps down by one with
//! probability `q = E[exp(-lambda S)]` and up by a batch otherwise.
//!
//! For each `b` the absorption probabilities before exceeding `b` satisfy
//! `Q(k) = q Q(k-1) + p sum_x pi_x Q(k+x)`, `Q(0) = 1`, `Q(j) = 0` for `j > b`.

use crate::dist::BatchDistribution;
use crate::error::{Error, Result};

use super::product::mix;

/// Diagonal entries below this abandon the unpivoted banded elimination.
const PIVOT_FLOOR: f64 = 1e-14;

/// Square band matrix with `lower` sub- and `upper` super-diagonals,
/// stored row-wise over the band.
#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub(crate) fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![0.0; n * (lower + upper + 1)] }
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower - i)
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i},{j}) outside band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// Unpivoted banded LU. Returns `None` when a pivot is too small.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut a = self.clone();
        let mut x = rhs.to_vec();
        for i in 0..n {
            let pivot = a.get(i, i);
            if pivot.abs() < PIVOT_FLOOR {
                return None;
            }
            let last_col = (i + a.upper).min(n - 1);
            for r in (i + 1)..=(i + a.lower).min(n - 1) {
                let factor = a.get(r, i) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for c in i..=last_col {
                    let v = a.get(i, c);
                    a.add(r, c, -factor * v);
                }
                x[r] -= factor * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for c in (i + 1)..=(i + a.upper).min(n - 1) {
                s -= a.get(i, c) * x[c];
            }
            x[i] = s / a.get(i, i);
        }
        Some(x)
    }

    pub(crate) fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn dense_solve(mut a: Vec<Vec<f64>>, mut x: Vec<f64>) -> Result<Vec<f64>> {
    let n = x.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("nonempty");
        let pivot = a[pivot_row][col];
        if pivot.abs() < f64::MIN_POSITIVE {
            return Err(Error::numeric(
                "walk absorption solve",
                format!("singular system of size {n}: no pivot in column {col}"),
            ));
        }
        a.swap(col, pivot_row);
        x.swap(col, pivot_row);
        for r in (col + 1)..n {
            let factor = a[r][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            x[r] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let s: f64 = x[i] - ((i + 1)..n).map(|c| a[i][c] * x[c]).sum::<f64>();
        x[i] = s / a[i][i];
    }
    Ok(x)
}

/// Absorption probabilities `Q(k, b)`, `k = 0..=b`, for one level `b`.
pub(crate) fn absorption_row(q: f64, batch: &BatchDistribution, b: usize) -> Result<Vec<f64>> {
    let p = 1.0 - q;
    let upper = (batch.max_size() as usize).min(b.saturating_sub(1));
    let mut m = BandMatrix::zeros(b, 1, upper);
    let mut rhs = vec![0.0; b];
    for i in 0..b {
        m.add(i, i, 1.0);
        if i == 0 {
            rhs[0] = q;
        } else {
            m.add(i, i - 1, -q);
        }
        for &(x, pi) in batch.pmf() {
            let j = i + x as usize;
            if j < b {
                m.add(i, j, -p * pi);
            }
        }
    }
    let solution = match m.solve(&rhs) {
        Some(s) => s,
        None => dense_solve(m.to_dense(), rhs)?,
    };
    let mut row = Vec::with_capacity(b + 1);
    row.push(1.0);
    row.extend(solution.into_iter().map(|v| v.clamp(0.0, 1.0)));
    Ok(row)
}

/// Whole table for the embedded walk with down-step probability `q`.
pub fn walk_cdf(q: f64, batch: &BatchDistribution, b_max: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("down-step probability must lie in [0,1], got {q}")));
    }
    let mut kb = vec![vec![1.0]];
    let mut marginal = vec![0.0];
    for b in 1..=b_max {
        let row = absorption_row(q, batch, b)?;
        marginal.push(mix(batch, &row));
        kb.push(row);
    }
    Ok((kb, marginal))
}

/// Gambler's-ruin probability that a walk stepping down with probability
/// `q` and up by one otherwise, started at `k`, hits 0 before `b + 1`:
/// `1 - (1 - r^k) / (1 - r^(b+1))` with `r = q / p`, or `1 - k/(b+1)` when
/// `q = 1/2`.
pub fn ruin_closed_form(q: f64, k: usize, b: usize) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("q must lie in (0,1), got {q}")));
    }
    if k == 0 || b < k {
        return Err(Error::invalid(format!("need 1 <= k <= b, got k={k}, b={b}")));
    }
    let n = (b + 1) as f64;
    let k = k as f64;
    if q == 0.5 {
        return Ok(1.0 - k / n);
    }
    let log_r = (q / (1.0 - q)).ln();
    // (1 - r^k) / (1 - r^n), rewritten with negative exponents when r > 1.
    let escape = if log_r < 0.0 {
        (k * log_r).exp_m1() / (n * log_r).exp_m1()
    } else {
        ((k - n) * log_r).exp() * (-k * log_r).exp_m1() / (-n * log_r).exp_m1()
    };
    Ok(1.0 - escape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ruin_examples() {
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            assert!((ruin_closed_form(q, 1, 1).unwrap() - q).abs() < 1e-15);
        }
        assert_eq!(ruin_closed_form(0.5, 1, 3).unwrap(), 0.75);
        assert!(ruin_closed_form(0.0, 1, 1).is_err());
        assert!(ruin_closed_form(0.4, 3, 2).is_err());
        assert!(ruin_closed_form(0.4, 0, 2).is_err());
    }

    #[test]
    fn ruin_is_continuous_through_one_half() {
        let mid = ruin_closed_form(0.5, 3, 9).unwrap();
        for eps in [1e-6, 1e-9] {
            assert!((ruin_closed_form(0.5 + eps, 3, 9).unwrap() - mid).abs() < 1e-5);
            assert!((ruin_closed_form(0.5 - eps, 3, 9).unwrap() - mid).abs() < 1e-5);
        }
    }

    #[test]
    fn ruin_large_barrier_does_not_overflow() {
        let v = ruin_closed_form(0.9, 1, 5000).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let w = ruin_closed_form(0.1, 1, 5000).unwrap();
        // Upward drift: ruin from 1 is r = q/p = 1/9 in the limit.
        assert!((w - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn banded_matches_dense() {
        let mut m = BandMatrix::zeros(6, 1, 2);
        for i in 0..6 {
            m.add(i, i, 4.0 + i as f64);
            if i > 0 {
                m.add(i, i - 1, -1.0);
            }
            if i + 1 < 6 {
                m.add(i, i + 1, -0.5);
            }
            if i + 2 < 6 {
                m.add(i, i + 2, 0.25);
            }
        }
        let rhs = [1.0, -2.0, 3.0, 0.5, 0.0, 1.5];
        let band = m.solve(&rhs).unwrap();
        let dense = dense_solve(m.to_dense(), rhs.to_vec()).unwrap();
        for (a, b) in band.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tiny_pivot_falls_back_to_dense() {
        let mut m = BandMatrix::zeros(2, 1, 1);
        m.add(0, 1, 1.0);
        m.add(1, 0, 1.0);
        m.add(1, 1, 1.0);
        assert!(m.solve(&[1.0, 2.0]).is_none());
        let x = dense_solve(m.to_dense(), vec![1.0, 2.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
    }

    #[test]
    fn singular_system_is_reported() {
        let err = dense_solve(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Numeric { .. }));
    }

    #[test]
    fn unit_walk_first_level() {
        let (kb, marginal) = walk_cdf(0.37, &BatchDistribution::unit(), 3).unwrap();
        assert!((kb[1][1] - 0.37).abs() < 1e-15);
        assert_eq!(marginal[0], 0.0);
        assert!((marginal[1] - 0.37).abs() < 1e-15);
    }
}
