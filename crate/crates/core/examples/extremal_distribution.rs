//! Largest tail probability `P(xi > A)` for distribution functions of the MM
//! class with prescribed derivatives at the origin.

use kolmo::applications::extremal_distribution;
use kolmo::{ExponentVector, MomentVector, SolverConfig};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let m = MomentVector::new(vec![1.0, 1.5, 3.0, 7.0], ExponentVector::new(&[0, 1, 2, 3], 3)?)?;
    for a in [-0.1, -0.5, -1.0, -2.0] {
        let rep = extremal_distribution(&m, a, &config)?;
        println!("A = {a:>5}: max P(xi > A) = {:.6}", rep.max_prob);
    }
    Ok(())
}
