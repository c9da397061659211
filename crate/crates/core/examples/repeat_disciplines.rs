use maxq::{max_cdf, Discipline, ModelConfig};

fn main() -> maxq::Result<()> {
    let service = "unif:0,2".parse()?;
    let batch = "disc:1,0.5;2,0.5".parse()?;
    let base = ModelConfig::new(0.3, service, batch, Discipline::Resume)?;

    println!("b  resume    resample  noresample");
    let tables: Vec<_> = Discipline::ALL
        .iter()
        .map(|&d| max_cdf(&base.with_discipline(d), 12))
        .collect::<Result<_, _>>()?;
    for b in 1..=12 {
        print!("{b:<2}");
        for t in &tables {
            print!(" {:.6}", t.marginal(b));
        }
        println!();
    }
    Ok(())
}
