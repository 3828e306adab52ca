//! CM- and MM-perfect splines: construction from atomic measures, evaluation,
//! derivative norms at the origin and the factorial class transfer.
//!
//! An atom `(u, w)` with `u > 0` becomes the knot `a = 1/u` with weight
//! `lambda = w u^r`. The CM spline then has `phi^{(k)}(0) = sum w u^k`; the MM
//! spline has `phi^{(k)}(0) = sum w u^k / (r-k)!`. An atom at `u = 0` becomes
//! the constant: `C = w_0` (CM) or `C = w_0 / r!` (MM).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Atom, AtomicMeasure, ExponentVector, MomentVector, PerfectSpline, SplineClass};

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn spline_from_measure(class: SplineClass, r: u32, measure: &AtomicMeasure) -> Result<PerfectSpline> {
    let mut knots = Vec::new();
    let mut weights = Vec::new();
    // decreasing knots = increasing positions
    for a in measure.positive_atoms() {
        knots.push(1.0 / a.position);
        weights.push(a.mass * a.position.powi(r as i32));
    }
    let w0 = measure.zero_mass();
    let constant = match class {
        SplineClass::Cm => w0,
        SplineClass::Mm => w0 / factorial(r),
    };
    PerfectSpline::new(class, r, knots, weights, constant)
}

pub fn measure_from_spline(spline: &PerfectSpline) -> Result<AtomicMeasure> {
    let r = spline.r() as i32;
    let mut atoms = Vec::with_capacity(spline.knots().len() + 1);
    if spline.constant() > 0.0 {
        let w0 = match spline.class() {
            SplineClass::Cm => spline.constant(),
            SplineClass::Mm => spline.constant() * factorial(spline.r()),
        };
        atoms.push(Atom::new(0.0, w0));
    }
    for (&a, &l) in spline.knots().iter().zip(spline.weights()) {
        atoms.push(Atom::new(1.0 / a, l * a.powi(r)));
    }
    AtomicMeasure::new(atoms)
}

/// `phi^{(derivative)}(t)` for `t <= 0`.
///
/// For MM splines the `r`-th derivative is piecewise constant; at a knot the
/// left limit is used, i.e. `(a + t)_+^0 = 1` iff `a + t > 0`.
pub fn eval(spline: &PerfectSpline, t: f64, derivative: u32) -> Result<f64> {
    if t > 0.0 || t.is_nan() {
        return Err(Error::PositiveT(t));
    }
    let r = spline.r();
    let constant = if derivative == 0 { spline.constant() } else { 0.0 };
    let terms = spline.knots().iter().zip(spline.weights());
    let sum: f64 = match spline.class() {
        SplineClass::Cm => {
            let p = r as i32 - derivative as i32;
            terms.map(|(&a, &l)| l * a.powi(p) * (t / a).exp()).sum()
        }
        SplineClass::Mm => {
            if derivative > r {
                return Err(Error::DerivativeExceedsOrder { derivative, r });
            }
            let p = r - derivative;
            let s: f64 = terms
                .map(|(&a, &l)| {
                    let x = a + t;
                    if x > 0.0 {
                        l * x.powi(p as i32)
                    } else {
                        0.0
                    }
                })
                .sum();
            s / factorial(p)
        }
    };
    Ok(sum + constant)
}

/// Uniform norms `|phi^{(k_i)}|`, attained at `t = 0`.
pub fn norms(spline: &PerfectSpline, exponents: &ExponentVector) -> Result<MomentVector> {
    if spline.r() != exponents.r() {
        return Err(Error::OrderMismatch { spline: spline.r(), exponents: exponents.r() });
    }
    let values = exponents.orders().iter().map(|&k| eval(spline, 0.0, k)).collect::<Result<Vec<_>>>()?;
    MomentVector::new(values, exponents.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferDirection {
    MmToCm,
    CmToMm,
}

/// Multiplies (MM to CM) or divides (CM to MM) entry `i` by `(r - k_i)!`.
pub fn class_transfer(m: &MomentVector, direction: TransferDirection) -> Result<MomentVector> {
    let ex = m.exponents();
    let values = ex
        .orders()
        .iter()
        .zip(m.values())
        .map(|(&k, &v)| {
            let f = factorial(ex.r() - k);
            match direction {
                TransferDirection::MmToCm => v * f,
                TransferDirection::CmToMm => v / f,
            }
        })
        .collect();
    MomentVector::new(values, ex.clone())
}
