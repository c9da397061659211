use maxq::{max_cdf, BatchDistribution, Discipline, ModelConfig, ServiceDistribution};

fn main() -> maxq::Result<()> {
    let config = ModelConfig::new(
        0.5,
        ServiceDistribution::deterministic(1.0)?,
        BatchDistribution::unit(),
        Discipline::Resume,
    )?;
    let table = max_cdf(&config, 10)?;
    println!("{config}");
    for b in 1..=10 {
        println!("P(M <= {b:2}) = {:.6}   P(M(2) <= {b:2}) = {:.6}", table.marginal(b), table.p(2, b));
    }
    Ok(())
}
