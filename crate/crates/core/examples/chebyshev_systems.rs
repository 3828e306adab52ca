//! Generalized Vandermonde determinants of power systems.

use kolmo::chebyshev::{generalized_vandermonde, is_chebyshev_on_points, PowerSystem};

fn main() -> kolmo::Result<()> {
    let systems: [&[u32]; 3] = [&[0, 1, 2], &[0, 2, 5], &[0, 3, 4, 9]];
    for exps in systems {
        let sys = PowerSystem::new(exps)?;
        let points: Vec<f64> = (0..exps.len()).map(|i| 0.5 * i as f64).collect();
        let det = generalized_vandermonde(&sys, &points)?;
        println!(
            "exponents {exps:?} at {points:?}: det = {det:.6e}, chebyshev: {}",
            is_chebyshev_on_points(&sys, &points)?
        );
    }
    Ok(())
}
