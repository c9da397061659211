use maxq::{stability, Discipline, ModelConfig};

fn main() -> maxq::Result<()> {
    for dist in ["det:1", "exp:1", "exp:2", "pareto:2"] {
        for d in Discipline::ALL {
            let config = ModelConfig::new(0.5, dist.parse()?, "disc:1,0.5;2,0.5".parse()?, d)?;
            println!("{dist:<9} {}", stability(&config)?);
        }
    }
    Ok(())
}
