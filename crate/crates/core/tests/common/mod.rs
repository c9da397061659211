//! Test-only oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::HashMap;

use maxq::{BatchDistribution, ServiceDistribution};
use rand::Rng;

/// How a preempted customer's requirement behaves in [`enumerate_max_cdf`].
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Restart {
    /// Keep the drawn atom (repeat without resampling).
    Keep,
    /// Draw a fresh atom (repeat with resampling).
    Redraw,
}

/// Bounds on `P(M(k) <= b)` by propagating the exact law of the stack of
/// service atoms for `depth` events. Returns `(lower, upper)`: mass absorbed
/// at the empty state, plus mass still in flight.
///
/// Works for atomic service laws under the two repeat disciplines, where the
/// state is the list of atoms held by the customers in system.
pub fn enumerate_max_cdf(
    atoms: &[(f64, f64)],
    lambda: f64,
    batch: &[(u32, f64)],
    k: usize,
    b: usize,
    restart: Restart,
    depth: usize,
) -> (f64, f64) {
    if k > b {
        return (0.0, 0.0);
    }
    if k == 0 {
        return (1.0, 1.0);
    }
    // Joint law of `n` fresh atoms.
    let fresh = |n: usize| -> Vec<(Vec<u8>, f64)> {
        let mut out = vec![(Vec::new(), 1.0)];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|(v, p)| {
                    atoms.iter().enumerate().map(move |(i, a)| {
                        let mut w = v.clone();
                        w.push(i as u8);
                        (w, p * a.1)
                    })
                })
                .collect();
        }
        out
    };
    let mut states: HashMap<Vec<u8>, f64> = HashMap::new();
    for (s, p) in fresh(k) {
        *states.entry(s).or_default() += p;
    }
    let mut absorbed = 0.0;
    for _ in 0..depth {
        let mut next: HashMap<Vec<u8>, f64> = HashMap::new();
        for (stack, p) in states {
            let top = *stack.last().unwrap() as usize;
            let done = (-lambda * atoms[top].0).exp();
            // Completion before the next arrival.
            let mut popped = stack.clone();
            popped.pop();
            if popped.is_empty() {
                absorbed += p * done;
            } else {
                *next.entry(popped).or_default() += p * done;
            }
            // Arrival first: preempt, push a batch with fresh atoms.
            for &(x, px) in batch {
                if stack.len() + x as usize > b {
                    continue;
                }
                let bases: Vec<(Vec<u8>, f64)> = match restart {
                    Restart::Keep => vec![(stack.clone(), 1.0)],
                    Restart::Redraw => atoms
                        .iter()
                        .enumerate()
                        .map(|(i, a)| {
                            let mut s = stack.clone();
                            *s.last_mut().unwrap() = i as u8;
                            (s, a.1)
                        })
                        .collect(),
                };
                for (base, pb) in &bases {
                    for (tail, pt) in fresh(x as usize) {
                        let mut s = base.clone();
                        s.extend(tail);
                        *next.entry(s).or_default() += p * (1.0 - done) * px * pb * pt;
                    }
                }
            }
        }
        states = next;
    }
    let alive: f64 = states.values().sum();
    (absorbed, absorbed + alive)
}

pub fn batch_mix(batch: &[(u32, f64)], mut per_k: impl FnMut(usize) -> (f64, f64)) -> (f64, f64) {
    batch.iter().fold((0.0, 0.0), |(lo, hi), &(x, p)| {
        let (l, h) = per_k(x as usize);
        (lo + p * l, hi + p * h)
    })
}

/// Random discrete law with `n` atoms in `[lo, hi]`.
pub fn random_discrete<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> ServiceDistribution {
    let mut weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let sum_head: f64 = weights[..n - 1].iter().sum();
    weights[n - 1] = 1.0 - sum_head;
    let atoms = weights.into_iter().map(|w| (rng.random_range(lo..hi), w)).collect();
    ServiceDistribution::discrete(atoms).unwrap()
}

pub fn pair_batch() -> BatchDistribution {
    BatchDistribution::new(vec![(1, 0.5), (2, 0.5)]).unwrap()
}
