//! The recursive admissibility criterion (top order equal to `r`) next to the
//! direct cone classification.

use kolmo::kolmogorov::{check_admissible, check_recursive};
use kolmo::{ExponentVector, MomentVector, SolverConfig, SplineClass};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let cases: [(&[u32], &[f64]); 4] = [
        (&[0, 1, 2], &[2.0, 1.0, 1.0]),
        (&[0, 1, 2], &[1.0, 1.0, 1.0]),
        (&[0, 1, 3, 4], &[3.0, 1.0, 1.0, 2.0]),
        (&[1, 2, 4, 5], &[1.0, 1.0, 2.0, 1.0]),
    ];
    for (orders, values) in cases {
        let r = *orders.last().unwrap();
        let m = MomentVector::new(values.to_vec(), ExponentVector::new(orders, r)?)?;
        let direct = check_admissible(SplineClass::Cm, &m, &config)?;
        let rec = check_recursive(SplineClass::Cm, &m, &config)?;
        println!("{orders:?} {values:?}: direct {:?}, recursive {:?}", direct.status, rec.status);
        for line in &rec.recursion_trace {
            println!("    {line}");
        }
    }
    Ok(())
}
