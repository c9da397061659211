use maxq::quad::integrate_default;
use maxq::{BatchDistribution, ServiceDistribution, ServiceKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn laws() -> Vec<ServiceDistribution> {
    [
        "det:1",
        "exp:1",
        "exp:2.5",
        "unif:0,2",
        "unif:0.5,1.5",
        "pareto:1.5",
        "pareto:2",
        "pareto:5",
        "hyperexp:0.5,1;0.5,1",
        "hyperexp:0.875,1.75;0.125,0.25",
        "disc:0.5,0.5;1.5,0.5",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

#[test]
fn pareto_transform_matches_monte_carlo() {
    let d = ServiceDistribution::pareto(2.0).unwrap();
    let exact = d.laplace(0.95).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 10_000_000u32;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let v = (-0.95 * d.sample(&mut rng)).exp();
        s += v;
        s2 += v * v;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((exact - mean).abs() <= 3.0 * se, "{exact} vs {mean} ± {se}");
}

#[test]
fn uniform_transform_matches_direct_quadrature() {
    let d = ServiceDistribution::uniform(0.0, 2.0).unwrap();
    let direct = integrate_default(|x| 0.5 * (-x).exp(), 0.0, 2.0).unwrap();
    assert!((d.laplace(1.0).unwrap() - direct).abs() < 1e-10);
    assert!((d.laplace(1.0).unwrap() - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-14);
}

#[test]
fn transform_is_monotone_in_unit_interval() {
    for d in laws() {
        let mut prev = 1.0 + 1e-15;
        for i in 0..=50 {
            let theta = i as f64 * 0.1;
            let l = d.laplace(theta).unwrap();
            assert!(l > 0.0 && l <= 1.0, "{d} at {theta}: {l}");
            assert!(l <= prev + 1e-14, "{d} not monotone at {theta}");
            prev = l;
        }
        assert_eq!(d.laplace(0.0).unwrap(), 1.0);
    }
}

#[test]
fn jensen_bounds() {
    for d in laws() {
        let m = d.mean();
        for theta in [0.1, 0.5, 0.9, 2.0] {
            assert!(d.laplace(theta).unwrap() >= (-theta * m).exp() - 1e-12, "{d} at {theta}");
            let e = d.exp_moment(theta).unwrap();
            assert!(e >= (theta * m).exp() - 1e-12, "{d} at {theta}");
        }
    }
}

#[test]
fn exponential_moment_diverges_where_expected() {
    let exp1 = ServiceDistribution::exponential(1.0).unwrap();
    assert!((exp1.exp_moment(0.5).unwrap() - 2.0).abs() < 1e-12);
    assert!(exp1.exp_moment(1.0).unwrap().is_infinite());
    assert!(ServiceDistribution::pareto(3.0).unwrap().exp_moment(0.01).unwrap().is_infinite());
    assert!(ServiceDistribution::pareto(3.0).unwrap().exp_moment(0.0).is_err());
}

#[test]
fn quadrature_agrees_with_closed_forms() {
    let cases = ["unif:0,2", "unif:0.25,1.75", "hyperexp:0.875,1.75;0.125,0.25", "exp:0.7"];
    for s in cases {
        let d: ServiceDistribution = s.parse().unwrap();
        for theta in [0.05, 0.3, 0.95, 3.0] {
            let closed = d.laplace(theta).unwrap();
            let quad = d.expect(|x| (-theta * x).exp()).unwrap();
            assert!((closed - quad).abs() < 1e-9, "{s} at {theta}: {closed} vs {quad}");
        }
    }
}

#[test]
fn expectation_of_identity_is_the_mean() {
    for d in laws() {
        assert!((d.expect(|x| x).unwrap() - d.mean()).abs() < 1e-8, "{d}");
    }
    let p = ServiceDistribution::pareto(3.0).unwrap();
    assert!((p.expect(|x| x * x).unwrap() - 4.0 / 3.0).abs() < 1e-8);
}

fn sample_mean<F: FnMut(&mut ChaCha8Rng) -> f64>(n: usize, seed: u64, mut f: F) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let v = f(&mut rng);
        s += v;
        s2 += v * v;
    }
    let m = s / n as f64;
    (m, ((s2 / n as f64 - m * m) / n as f64).sqrt())
}

#[test]
fn sampling_moments() {
    let n = 1_000_000;
    let u = ServiceDistribution::uniform(0.0, 2.0).unwrap();
    let (m, se) = sample_mean(n, 1, |r| u.sample(r));
    assert!((m - 1.0).abs() <= 3.0 * se, "uniform mean {m}");

    let p = ServiceDistribution::pareto(2.0).unwrap();
    let (m, se) = sample_mean(n, 2, |r| if p.sample(r) <= 1.0 { 1.0 } else { 0.0 });
    assert!((m - 0.75).abs() <= 3.0 * se, "pareto ecdf at 1 {m}");

    let b = BatchDistribution::new(vec![(1, 0.5), (2, 0.5)]).unwrap();
    let (m, se) = sample_mean(n, 3, |r| b.sample(r) as f64);
    assert!((m - 1.5).abs() <= 3.0 * se, "batch mean {m}");
}

/// Kolmogorov–Smirnov statistic against `cdf`; for laws with atoms only the
/// right limits at sample points are compared.
fn ks_statistic(d: &ServiceDistribution, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let atomic = matches!(d.kind(), ServiceKind::Deterministic { .. } | ServiceKind::DiscreteEmpirical { .. });
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = d.cdf(xs[i]);
        sup = sup.max(((j + 1) as f64 / n as f64 - f).abs());
        if !atomic {
            sup = sup.max((f - i as f64 / n as f64).abs());
        }
        i = j + 1;
    }
    sup
}

#[test]
fn samplers_pass_kolmogorov_smirnov() {
    let n = 100_000;
    let critical = 1.9495 / (n as f64).sqrt();
    for (i, d) in laws().into_iter().enumerate() {
        let ks = ks_statistic(&d, n, 100 + i as u64);
        assert!(ks < critical, "{d}: KS {ks} >= {critical}");
    }
}

#[test]
fn repeated_atoms_act_as_one() {
    let split = ServiceDistribution::discrete(vec![(2.0, 0.25), (1.0, 0.5), (2.0, 0.25)]).unwrap();
    let merged = ServiceDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap();
    for theta in [0.1, 0.7, 2.0] {
        assert!((split.laplace(theta).unwrap() - merged.laplace(theta).unwrap()).abs() < 1e-15);
    }
    for x in [0.5, 1.0, 1.5, 2.0, 3.0] {
        assert!((split.cdf(x) - merged.cdf(x)).abs() < 1e-15);
    }
    let single = ServiceDistribution::discrete(vec![(1.5, 1.0)]).unwrap();
    assert!((single.laplace(0.4).unwrap() - (-0.6f64).exp()).abs() < 1e-15);
}

#[test]
fn invalid_laws_are_rejected() {
    for s in [
        "det:0",
        "exp:-1",
        "unif:2,1",
        "pareto:1",
        "hyperexp:0.5,1;0.4,2",
        "disc:1,0.5;2,0.6",
        "disc:-1,1",
        "weibull:2",
        "exp:abc",
    ] {
        assert!(s.parse::<ServiceDistribution>().is_err(), "{s} accepted");
    }
    for s in ["disc:0,1", "disc:1,0.5", "disc:1,x"] {
        assert!(s.parse::<BatchDistribution>().is_err(), "{s} accepted");
    }
}

proptest! {
    #[test]
    fn specifier_round_trip(
        rate in 0.01f64..100.0,
        lo in 0.0f64..5.0,
        width in 0.001f64..5.0,
        alpha in 1.01f64..10.0,
        p in 0.01f64..0.99,
    ) {
        let laws = [
            ServiceDistribution::exponential(rate).unwrap(),
            ServiceDistribution::deterministic(rate).unwrap(),
            ServiceDistribution::uniform(lo, lo + width).unwrap(),
            ServiceDistribution::pareto(alpha).unwrap(),
            ServiceDistribution::hyperexponential(vec![p, 1.0 - p], vec![rate, 1.0]).unwrap(),
            ServiceDistribution::discrete(vec![(lo + 0.1, p), (lo + 1.0, 1.0 - p)]).unwrap(),
        ];
        for d in laws {
            let back: ServiceDistribution = d.to_string().parse().unwrap();
            prop_assert_eq!(back, d);
        }
        let b = BatchDistribution::new(vec![(1, p), (3, 1.0 - p)]).unwrap();
        let back: BatchDistribution = b.to_string().parse().unwrap();
        prop_assert_eq!(back, b);
    }
}
