//! Perfect splines of the completely monotone (CM) and multiply monotone
//! (MM) classes built from one atomic measure.

use kolmo::splines::{class_transfer, eval, norms, spline_from_measure, TransferDirection};
use kolmo::{AtomicMeasure, ExponentVector, SplineClass};

fn main() -> kolmo::Result<()> {
    let mu = AtomicMeasure::from_pairs(&[(0.0, 0.5), (0.5, 2.0), (3.0, 0.25)])?;
    let ex = ExponentVector::new(&[0, 1, 2, 3], 3)?;
    for class in [SplineClass::Cm, SplineClass::Mm] {
        let s = spline_from_measure(class, 3, &mu)?;
        println!("{class}: knots {:?}, weights {:?}, constant {}", s.knots(), s.weights(), s.constant());
        for t in [0.0, -0.5, -2.0] {
            println!("    phi({t}) = {:.6}, phi'({t}) = {:.6}", eval(&s, t, 0)?, eval(&s, t, 1)?);
        }
        let n = norms(&s, &ex)?;
        println!("    norms at orders {}: {:?}", ex, n.values());
        if class == SplineClass::Mm {
            let cm = class_transfer(&n, TransferDirection::MmToCm)?;
            println!("    transferred to CM: {:?}", cm.values());
        }
    }
    Ok(())
}
