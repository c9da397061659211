use maxq::ordering::{check_lt_order, check_transform_at_lambda, default_theta_grid, verify_dominance};
use maxq::{BatchDistribution, Discipline, ModelConfig, ServiceDistribution};

fn main() -> maxq::Result<()> {
    let wide: ServiceDistribution = "unif:0,2".parse()?;
    let point: ServiceDistribution = "det:1".parse()?;
    let batch: BatchDistribution = "unit".parse()?;

    println!("premise  {}", check_lt_order(&wide, &point, &default_theta_grid())?);
    for d in Discipline::ALL {
        let a = ModelConfig::new(0.5, wide.clone(), batch.clone(), d)?;
        let b = ModelConfig::new(0.5, point.clone(), batch.clone(), d)?;
        println!("{:<10} {}", d.name(), verify_dominance(&a, &b, 20, 1e-9)?);
    }

    // Two laws ordered at lambda only; the transforms cross elsewhere.
    let x: ServiceDistribution = "disc:0.2,0.5;2.4,0.5".parse()?;
    let y: ServiceDistribution = "disc:1.2,1".parse()?;
    println!("at 0.7   {}", check_transform_at_lambda(&x, &y, 0.7)?);
    println!("on grid  {}", check_lt_order(&x, &y, &default_theta_grid())?);
    let a = ModelConfig::new(0.7, x, batch.clone(), Discipline::RepeatResample)?;
    let b = ModelConfig::new(0.7, y, batch, Discipline::RepeatResample)?;
    println!("resample {}", verify_dominance(&a, &b, 30, 1e-9)?);
    Ok(())
}
