use maxq::analytic::max_cdf;
use maxq::simulate::{
    estimate_cdf_with, replication_rng, simulate_busy_period, BatchPush, BusyPeriodOutcome, SimOptions,
};
use maxq::{estimate_cdf, Discipline, ModelConfig};

fn cfg(d: &str, lambda: f64, batch: &str, disc: Discipline) -> ModelConfig {
    ModelConfig::new(lambda, d.parse().unwrap(), batch.parse().unwrap(), disc).unwrap()
}

fn assert_within_three_se(config: &ModelConfig, n_max: u32, replications: u64, seed: u64) {
    let exact = max_cdf(config, n_max as usize).unwrap();
    let est = estimate_cdf(config, n_max, replications, seed).unwrap();
    for n in 1..=n_max {
        let (p, p_hat) = (exact.marginal(n as usize), est.cdf(n));
        let se = est.standard_error(n);
        assert!((p - p_hat).abs() <= 3.0 * se, "{config} n={n}: {p} vs {p_hat} ± {se}");
    }
}

#[test]
fn deterministic_resume_first_level() {
    let c = cfg("det:1", 0.5, "unit", Discipline::Resume);
    let est = estimate_cdf(&c, 1, 1_000_000, 11).unwrap();
    let p = (-0.5f64).exp();
    assert!((est.cdf(1) - p).abs() <= 3.0 * est.standard_error(1));
    assert_eq!(est.counts[0] + est.above_n_max + est.overflow_count, 1_000_000);
}

#[test]
fn every_discipline_matches_its_engine() {
    for disc in Discipline::ALL {
        for d in ["det:1", "disc:0.5,0.5;1.5,0.5", "unif:0,2"] {
            assert_within_three_se(&cfg(d, 0.4, "unit", disc), 10, 200_000, 5);
        }
        assert_within_three_se(&cfg("exp:2", 0.5, "disc:1,0.5;2,0.5", disc), 10, 200_000, 6);
    }
}

#[test]
fn same_seed_same_estimate() {
    let c = cfg("exp:1", 0.6, "disc:1,0.7;3,0.3", Discipline::RepeatResample);
    let a = estimate_cdf(&c, 12, 50_000, 99).unwrap();
    let b = estimate_cdf(&c, 12, 50_000, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    let other = estimate_cdf(&c, 12, 50_000, 100).unwrap();
    assert_ne!(a.counts, other.counts);
}

#[test]
fn exponential_resume_and_resample_agree() {
    let resume = cfg("exp:1", 0.5, "unit", Discipline::Resume);
    let a = estimate_cdf(&resume, 10, 300_000, 1).unwrap();
    let b = estimate_cdf(&resume.with_discipline(Discipline::RepeatResample), 10, 300_000, 2).unwrap();
    for n in 1..=10 {
        let se = a.standard_error(n).hypot(b.standard_error(n));
        assert!((a.cdf(n) - b.cdf(n)).abs() <= 3.0 * se, "n={n}");
    }
}

#[test]
fn estimates_are_monotone_with_tallies_summing_to_replications() {
    let c = cfg("unif:0,2", 0.7, "disc:1,0.5;2,0.5", Discipline::RepeatNoResample);
    let est = estimate_cdf(&c, 15, 20_000, 3).unwrap();
    assert!(est.cdf_hat.windows(2).all(|w| w[0] <= w[1]));
    let total: u64 = est.counts.iter().sum::<u64>() + est.above_n_max + est.overflow_count;
    assert_eq!(total, est.replications);
}

#[test]
fn pareto_without_resampling_overflows_less_as_caps_grow() {
    let c = cfg("pareto:2", 0.5, "unit", Discipline::RepeatNoResample);
    let mut previous = u64::MAX;
    for cap in [100u64, 1_000, 10_000] {
        let opts = SimOptions { max_events: cap, max_queue: cap as u32, ..SimOptions::default() };
        let overflow = (0..1_000)
            .filter(|&i| {
                let mut rng = replication_rng(17, i);
                matches!(simulate_busy_period(&c, &mut rng, &opts), BusyPeriodOutcome::Truncated { .. })
            })
            .count() as u64;
        assert!(overflow > 0, "cap {cap}");
        assert!(overflow <= previous, "cap {cap}: {overflow} > {previous}");
        previous = overflow;
    }
}

#[test]
fn truncated_periods_stay_in_the_denominator() {
    let c = cfg("pareto:2", 0.5, "unit", Discipline::RepeatNoResample);
    let opts = SimOptions { max_events: 200, max_queue: 200, ..SimOptions::default() };
    let est = estimate_cdf_with(&c, 1_000, 2_000, 4, &opts).unwrap();
    assert!(est.overflow_count > 0);
    let counted: u64 = est.counts.iter().sum();
    assert_eq!(est.cdf(1_000), counted as f64 / 2_000.0);
}

#[test]
fn batch_push_order_does_not_change_the_maximum() {
    let c = cfg("exp:1", 0.6, "disc:1,0.3;2,0.3;4,0.4", Discipline::Resume);
    let atomic = SimOptions::default();
    let sequential = SimOptions { batch_push: BatchPush::Sequential, ..SimOptions::default() };
    for i in 0..5_000 {
        let a = simulate_busy_period(&c, &mut replication_rng(8, i), &atomic);
        let s = simulate_busy_period(&c, &mut replication_rng(8, i), &sequential);
        assert_eq!(a, s, "replication {i}");
    }
}

#[test]
fn zero_replications_is_rejected() {
    let c = cfg("det:1", 0.5, "unit", Discipline::Resume);
    assert!(estimate_cdf(&c, 5, 0, 1).is_err());
    assert!(estimate_cdf(&c, 0, 10, 1).is_err());
}
