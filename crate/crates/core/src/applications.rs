//! Smoothest interpolation at the origin, sharp bounds for intermediate
//! derivative norms, and extremal distribution functions.

use serde::{Deserialize, Serialize};

use crate::cone::SolverConfig;
use crate::error::{Error, Result};
use crate::kolmogorov::witness_spline;
use crate::splines::eval;
use crate::types::{MomentVector, PerfectSpline, SplineClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolantReport {
    pub minimal_r_norm: f64,
    pub spline: PerfectSpline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `|x^{(p)}| <= bound` for every admissible `x`.
    Upper,
    /// `|x^{(p)}| >= bound` for every admissible `x`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: f64,
    pub direction: Direction,
    pub spline: PerfectSpline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub max_prob: f64,
    pub spline: PerfectSpline,
}

fn require_even(m: &MomentVector) -> Result<()> {
    if m.len() % 2 == 1 {
        return Err(Error::OddOrderCount(m.len()));
    }
    Ok(())
}

/// Among all `x` in the class with `x^{(k_i)}(0) = M_i`, the witness spline has
/// the smallest `|x^{(r)}|`.
pub fn smoothest_interpolant(class: SplineClass, m: &MomentVector, config: &SolverConfig) -> Result<InterpolantReport> {
    require_even(m)?;
    let ex = m.exponents();
    if ex.last() >= ex.r() {
        return Err(Error::TopOrderMustBeBelowR);
    }
    let spline = witness_spline(class, m, config)?;
    let minimal_r_norm = eval(&spline, 0.0, ex.r())?;
    Ok(InterpolantReport { minimal_r_norm, spline })
}

/// Sharp one-sided bound on `|x^{(p)}|` over all `x` with the given norms.
///
/// With `s` the number of orders below `p`, the bound is an upper bound for
/// odd `s` and a lower bound for even `s`.
pub fn intermediate_moment_bound(
    class: SplineClass,
    m: &MomentVector,
    p: u32,
    config: &SolverConfig,
) -> Result<BoundReport> {
    require_even(m)?;
    let ex = m.exponents();
    if p > ex.r() || ex.orders().contains(&p) {
        return Err(Error::PNotIntermediate(p));
    }
    let s = ex.orders().iter().filter(|&&k| k < p).count();
    let direction = if s % 2 == 1 { Direction::Upper } else { Direction::Lower };
    let spline = witness_spline(class, m, config)?;
    let bound = eval(&spline, 0.0, p)?;
    Ok(BoundReport { bound, direction, spline })
}

/// Largest `P(xi > a)` over distribution functions `F` of the MM class with
/// `F^{(k_i)}(0) = M_i`; attained by the witness spline.
pub fn extremal_distribution(m: &MomentVector, a: f64, config: &SolverConfig) -> Result<DistributionReport> {
    let ex = m.exponents();
    if ex.first() != 0 {
        return Err(Error::InvalidDistribution("the first order must be 0".into()));
    }
    if (m.values()[0] - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("F(0) = {} must equal 1", m.values()[0])));
    }
    if !(a < 0.0 && a.is_finite()) {
        return Err(Error::InvalidDistribution(format!("A = {a} must be negative")));
    }
    require_even(m)?;
    let spline = witness_spline(SplineClass::Mm, m, config)?;
    // F(-inf) = 0 rules out a constant term
    if spline.constant() > 0.0 {
        return Err(Error::EmptyFamily);
    }
    let max_prob = 1.0 - eval(&spline, a, 0)?;
    Ok(DistributionReport { max_prob, spline })
}
