//! Seeded samples from the extremal family and their norm vectors.

use kolmo::kolmogorov::{check_admissible, extremal_family_sample};
use kolmo::splines::norms;
use kolmo::{ExponentVector, SolverConfig, SplineClass};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let ex = ExponentVector::new(&[0, 1, 3, 4], 4)?;
    for s in extremal_family_sample(SplineClass::Cm, &ex, 4, 7)? {
        let m = norms(&s, &ex)?;
        let status = check_admissible(SplineClass::Cm, &m, &config)?.status;
        println!("knots {:?} -> norms {:?} ({status:?})", s.knots(), m.values());
    }
    Ok(())
}
