use maxq::ordering::{family_curves, FamilyKind, FamilySpec};
use maxq::{BatchDistribution, Discipline};

fn main() -> maxq::Result<()> {
    for kind in [FamilyKind::UniformWidth, FamilyKind::ParetoAlpha, FamilyKind::HyperExpK] {
        let spec = FamilySpec::figure(kind);
        let curves = family_curves(&spec, Discipline::Resume, &BatchDistribution::unit(), kind.figure_n_max())?;
        println!("# {} lambda={} {}", kind.name(), spec.lambda, curves.check_monotone(1e-9));
        print!("{}", curves.to_csv());
    }
    Ok(())
}
