// Under repeat with resampling and unit batches the number in system is a
// simple random walk, so the table is a gambler's-ruin probability.
use maxq::analytic::{resample_cdf, ruin_closed_form};
use maxq::{BatchDistribution, Discipline, ModelConfig, ServiceDistribution};

fn main() -> maxq::Result<()> {
    let q: f64 = 0.6;
    let service = ServiceDistribution::deterministic(-q.ln())?;
    let config = ModelConfig::new(1.0, service, BatchDistribution::unit(), Discipline::RepeatResample)?;
    let table = resample_cdf(&config, 8)?;
    for k in 1..=4 {
        let exact = ruin_closed_form(q, k, 8)?;
        println!("P(M({k}) <= 8): walk {:.12}  closed form {exact:.12}", table.p(k, 8));
    }
    Ok(())
}
