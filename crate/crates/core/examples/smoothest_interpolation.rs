//! Smoothest CM interpolation of derivative values at the origin.

use kolmo::applications::smoothest_interpolant;
use kolmo::{ExponentVector, MomentVector, SolverConfig, SplineClass};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let ex = ExponentVector::new(&[0, 1, 2, 3], 4)?;
    let m = MomentVector::new(vec![2.0, 1.0, 1.0, 2.0], ex)?;
    let rep = smoothest_interpolant(SplineClass::Cm, &m, &config)?;
    println!("minimal |x''''| = {}", rep.minimal_r_norm);
    println!("interpolant knots {:?}", rep.spline.knots());
    println!("interpolant weights {:?}", rep.spline.weights());
    Ok(())
}
