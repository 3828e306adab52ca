//! The grid LP oracle and the merge-and-prune step that turns its support
//! into a compact atomic measure.

use kolmo::cone::{grid_feasible, measure_residual, merge_and_prune};
use kolmo::{ExponentVector, MomentVector, SolverConfig};

fn main() -> kolmo::Result<()> {
    let config = SolverConfig::default();
    let ex = ExponentVector::new(&[0, 1, 2, 3], 3)?;
    for values in [vec![3.0, 2.0, 3.0, 6.0], vec![1.0, 3.0, 1.0, 1.0]] {
        let c = MomentVector::new(values.clone(), ex.clone())?;
        match grid_feasible(&c, &config)? {
            Some(raw) => {
                let merged = merge_and_prune(&raw, &c, &config)?;
                println!("{values:?}: grid support {} atoms, merged to {}", raw.len(), merged.len());
                for a in merged.atoms() {
                    println!("    ({:.6}, {:.6})", a.position, a.mass);
                }
                println!("    residual {:.1e}", measure_residual(&merged, &c));
            }
            None => println!("{values:?}: no nonnegative grid combination"),
        }
    }
    Ok(())
}
