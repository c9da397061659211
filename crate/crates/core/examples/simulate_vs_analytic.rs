use maxq::{estimate_cdf, max_cdf, Discipline, ModelConfig};

fn main() -> maxq::Result<()> {
    let config = ModelConfig::new(0.4, "exp:1".parse()?, "unit".parse()?, Discipline::RepeatNoResample)?;
    let exact = max_cdf(&config, 10)?;
    let est = estimate_cdf(&config, 10, 200_000, 42)?;

    println!("{config}");
    println!(" n  analytic  simulated  ±95%");
    for n in 1..=10u32 {
        println!(
            "{n:2}  {:.5}   {:.5}    {:.5}",
            exact.marginal(n as usize),
            est.cdf(n),
            est.ci_halfwidth[n as usize - 1]
        );
    }
    println!("periods stopped above n=10: {}, truncated: {}", est.above_n_max, est.overflow_count);
    Ok(())
}
