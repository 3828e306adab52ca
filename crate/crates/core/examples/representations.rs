//! Principal and canonical representations of an interior moment vector,
//! including a prescribed root for which no finite representation exists.

use kolmo::cone::{canonical_representation, measure_residual, principal_representation};
use kolmo::{AtomicMeasure, Error, ExponentVector, MomentVector, SolverConfig};

fn show(label: &str, m: &AtomicMeasure, c: &MomentVector) {
    println!("{label}: index {}, residual {:.1e}", m.index(), measure_residual(m, c));
    for a in m.atoms() {
        println!("    ({}, {})", a.position, a.mass);
    }
}

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let c = MomentVector::new(vec![2.0, 1.0, 1.0], ExponentVector::new(&[0, 1, 2], 2)?)?;

    show("principal", &principal_representation(&c, &config)?, &c);
    for t_star in [0.25, 2.0, 5.0] {
        show(&format!("canonical through {t_star}"), &canonical_representation(&c, t_star, &config)?, &c);
    }
    match canonical_representation(&c, 0.75, &config) {
        Err(Error::RootBeyondSupport { mass, .. }) => {
            println!("canonical through 0.75: mass {mass} escapes to infinity");
        }
        other => println!("canonical through 0.75: {other:?}"),
    }
    Ok(())
}
