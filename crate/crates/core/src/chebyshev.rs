//! Generalized Vandermonde determinants of power systems `u_i(t) = t^{k_i}`.

use crate::error::{Error, Result};
use crate::linalg::{determinant, Mat};

/// Determinants below this fraction of the row-scale product count as nonpositive.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Power system with strictly increasing nonnegative integer exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSystem {
    exponents: Vec<u32>,
}

impl PowerSystem {
    pub fn new(exponents: &[u32]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Empty);
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotStrictlyIncreasing(exponents.to_vec()));
        }
        Ok(Self { exponents: exponents.to_vec() })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// Row-scaled determinant: `(det of rows divided by their max, product of row maxima)`.
fn scaled_determinant(system: &PowerSystem, points: &[f64]) -> Result<(f64, f64)> {
    if points.len() != system.len() {
        return Err(Error::DimensionMismatch { expected: system.len(), got: points.len() });
    }
    if let Some(&p) = points.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::NegativePoint(p));
    }
    let n = system.len();
    // 0^0 = 1 via powi
    let mut m = Mat::from_fn(n, n, |i, j| points[i].powi(system.exponents[j] as i32));
    let mut scale = 1.0;
    for i in 0..n {
        let row_max = (0..n).map(|j| m[(i, j)].abs()).fold(0.0, f64::max);
        if row_max == 0.0 {
            return Ok((0.0, 0.0));
        }
        for j in 0..n {
            m[(i, j)] /= row_max;
        }
        scale *= row_max;
    }
    Ok((determinant(m), scale))
}

/// `det[ points[i]^exponents[j] ]` with rows in the given order.
pub fn generalized_vandermonde(system: &PowerSystem, points: &[f64]) -> Result<f64> {
    let (det, scale) = scaled_determinant(system, points)?;
    Ok(det * scale)
}

/// Whether the collocation determinant on `points` is positive beyond the scale-invariant tolerance.
pub fn is_chebyshev_on_points(system: &PowerSystem, points: &[f64]) -> Result<bool> {
    let (det, _) = scaled_determinant(system, points)?;
    Ok(det > POSITIVITY_TOL)
}
