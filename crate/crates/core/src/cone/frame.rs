//! Balanced solver frame.
//!
//! Orders are shifted by `k_1` so the first one is 0, positions are dilated by
//! `sigma` and masses normalized by `nu`:
//!
//! `c'_i = c_i / (sigma^{k_i - k_1} nu) = sum_s m_s v_s^{k_i - k_1}`
//!
//! with `v = u / sigma` and `m = w u^{k_1} / nu`. In this frame the first and
//! last targets both equal 1.

use crate::types::{Atom, AtomicMeasure, MomentVector};

use super::fit::Atoms;

#[derive(Debug, Clone)]
pub(crate) struct Frame {
    /// Shifted orders `k_i - k_1`.
    pub orders: Vec<u32>,
    pub shift: u32,
    pub sigma: f64,
    pub nu: f64,
    /// Scaled targets; all positive unless the input had zero entries.
    pub target: Vec<f64>,
}

impl Frame {
    pub fn new(c: &MomentVector) -> Self {
        let k = c.exponents().orders();
        let shift = k[0];
        let orders: Vec<u32> = k.iter().map(|&x| x - shift).collect();
        let vals = c.values();
        let d = vals.len();
        let (sigma, nu) = if d >= 2 && vals[0] > 0.0 && vals[d - 1] > 0.0 {
            let s = (vals[d - 1] / vals[0]).powf(1.0 / orders[d - 1] as f64);
            (s, vals[0])
        } else {
            (1.0, c.max_abs().max(f64::MIN_POSITIVE))
        };
        let target = vals.iter().zip(&orders).map(|(&v, &o)| v / (sigma.powi(o as i32) * nu)).collect();
        Self { orders, shift, sigma, nu, target }
    }

    /// Frame atoms back to a measure in original coordinates. Zero atoms are
    /// dropped when the original first order is positive (they carry no moment).
    pub fn to_measure(&self, atoms: &Atoms) -> Option<AtomicMeasure> {
        let mut out = Vec::new();
        if let Some(m0) = atoms.zero {
            if self.shift == 0 {
                out.push(Atom::new(0.0, m0 * self.nu));
            }
        }
        for &(v, m) in &atoms.positive {
            let u = v * self.sigma;
            let w = m * self.nu / u.powi(self.shift as i32);
            out.push(Atom::new(u, w));
        }
        out.sort_by(|a, b| a.position.total_cmp(&b.position));
        AtomicMeasure::new(out).ok()
    }

    pub fn to_atoms(&self, measure: &AtomicMeasure) -> Atoms {
        let mut atoms = Atoms::default();
        for a in measure.atoms() {
            if a.position == 0.0 {
                if self.shift == 0 {
                    atoms.zero = Some(a.mass / self.nu);
                }
            } else {
                let v = a.position / self.sigma;
                let m = a.mass * a.position.powi(self.shift as i32) / self.nu;
                atoms.positive.push((v, m));
            }
        }
        atoms
    }

    pub fn residual(&self, atoms: &Atoms) -> f64 {
        atoms.residual(&self.orders, &self.target)
    }
}

/// Max relative residual of `measure` against `c` in original coordinates.
/// Zero entries of `c` are compared against `max |c|`.
pub fn relative_residual(measure: &AtomicMeasure, c: &MomentVector) -> f64 {
    let scale = c.max_abs();
    c.exponents()
        .orders()
        .iter()
        .zip(c.values())
        .map(|(&k, &v)| {
            let denom = if v > 0.0 { v } else { scale.max(f64::MIN_POSITIVE) };
            (measure.moment(k) - v).abs() / denom
        })
        .fold(0.0, f64::max)
}
