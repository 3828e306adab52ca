//! Sharp bounds on an intermediate derivative norm given two others.

use kolmo::applications::intermediate_moment_bound;
use kolmo::{ExponentVector, MomentVector, SolverConfig, SplineClass};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let m = MomentVector::new(vec![1.0, 4.0], ExponentVector::new(&[0, 2], 4)?)?;
    for p in [1, 3, 4] {
        let b = intermediate_moment_bound(SplineClass::Cm, &m, p, &config)?;
        println!("|x^({p})| {:?} bound: {}", b.direction, b.bound);
    }
    Ok(())
}
