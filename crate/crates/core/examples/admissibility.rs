//! Kolmogorov's problem: which norm vectors are realized by CM/MM functions,
//! and the perfect spline that realizes them.

use kolmo::kolmogorov::{check_admissible, witness_spline};
use kolmo::{ExponentVector, MomentVector, SolverConfig, SplineClass};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let ex = ExponentVector::new(&[0, 1, 2], 2)?;
    for (class, values) in [
        (SplineClass::Cm, [2.0, 1.0, 1.0]),
        (SplineClass::Cm, [1.0, 1.0, 1.0]),
        (SplineClass::Cm, [1.0, 2.0, 1.0]),
        (SplineClass::Mm, [1.0, 1.0, 1.0]),
    ] {
        let m = MomentVector::new(values.to_vec(), ex.clone())?;
        let report = check_admissible(class, &m, &config)?;
        print!("{class} {values:?}: {:?}", report.status);
        match witness_spline(class, &m, &config) {
            Ok(s) => println!(", witness knots {:?} weights {:?} constant {}", s.knots(), s.weights(), s.constant()),
            Err(e) => println!(" ({e})"),
        }
    }
    Ok(())
}
