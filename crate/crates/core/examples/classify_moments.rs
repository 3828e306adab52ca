//! Classifies a few moment vectors against the power-moment cone on `[0, inf)`.
//!
//! `cargo run --example classify_moments`

use kolmo::cone::classify_with_diagnostics;
use kolmo::{ExponentVector, MomentVector, SolverConfig};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let cases: [(&[u32], &[f64]); 6] = [
        (&[0, 1, 2], &[2.0, 1.0, 1.0]),
        (&[0, 1, 2], &[1.0, 1.0, 1.0]),
        (&[0, 1, 2], &[1.0, 2.0, 1.0]),
        (&[0, 2, 5], &[3.0, 1.5, 7.0]),
        (&[1, 2, 3, 4], &[2.0, 1.0, 1.0, 1.0]),
        (&[0, 1, 2, 3], &[2.0, 1.0, 1.0, 1.0]),
    ];
    for (orders, values) in cases {
        let r = *orders.last().unwrap();
        let c = MomentVector::new(values.to_vec(), ExponentVector::new(orders, r)?)?;
        let (cl, diag) = classify_with_diagnostics(&c, &config)?;
        println!("orders {orders:?} values {values:?}");
        println!("  status {:?}, index {}", cl.status, cl.index.map_or("-".into(), |i| i.to_string()));
        if let Some(w) = &cl.witness {
            for a in w.atoms() {
                println!("  atom u = {:<22} w = {}", a.position, a.mass);
            }
        }
        println!("  {} Newton solves, {} LP solves", diag.newton_solves, diag.lp_solves);
    }
    Ok(())
}
