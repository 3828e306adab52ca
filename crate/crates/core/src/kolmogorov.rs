//! Kolmogorov's problem for the CM and MM classes on the negative half-line.
//!
//! A norm vector `M_k` is admissible exactly when (after the factorial transfer
//! for MM) it lies in the power-moment cone on the same orders; witnesses are
//! the perfect splines of the corresponding atomic representations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{self, SolverConfig};
use crate::error::{Error, Result};
use crate::splines::{class_transfer, spline_from_measure, TransferDirection};
use crate::types::{
    AtomicMeasure, Classification, ExponentVector, HalfIndex, MomentVector, PerfectSpline, SplineClass, Status,
};

/// Relative agreement required between two independent witness solves.
pub const UNIQUENESS_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    Interior,
    Boundary,
    NotAdmissible,
}

impl From<Status> for Admissibility {
    fn from(s: Status) -> Self {
        match s {
            Status::Interior => Admissibility::Interior,
            Status::Boundary => Admissibility::Boundary,
            Status::Outside => Admissibility::NotAdmissible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub status: Admissibility,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PerfectSpline>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knot_count: Option<HalfIndex>,
    pub recursion_trace: Vec<String>,
}

impl AdmissibilityReport {
    fn new(status: Admissibility, witness: Option<PerfectSpline>, recursion_trace: Vec<String>) -> Self {
        let knot_count = witness.as_ref().map(PerfectSpline::knot_count);
        Self { status, witness, knot_count, recursion_trace }
    }
}

/// Norm vector mapped into CM moment space.
fn to_cm(class: SplineClass, m: &MomentVector) -> Result<MomentVector> {
    match class {
        SplineClass::Cm => Ok(m.clone()),
        SplineClass::Mm => class_transfer(m, TransferDirection::MmToCm),
    }
}

fn witness_of(class: SplineClass, r: u32, cl: &Classification) -> Result<Option<PerfectSpline>> {
    cl.witness.as_ref().map(|w| spline_from_measure(class, r, w)).transpose()
}

/// Decides whether `m` (norms at the orders it carries) is attained in `class`.
pub fn check_admissible(class: SplineClass, m: &MomentVector, config: &SolverConfig) -> Result<AdmissibilityReport> {
    let cm = to_cm(class, m)?;
    let cl = cone::classify(&cm, config)?;
    let witness = witness_of(class, m.exponents().r(), &cl)?;
    Ok(AdmissibilityReport::new(cl.status.into(), witness, Vec::new()))
}

/// Witness measure (in CM moment space) with the prescribed knot count.
fn witness_measure(cm: &MomentVector, config: &SolverConfig) -> Result<AtomicMeasure> {
    let cl = cone::classify(cm, config)?;
    let d = cm.len();
    match cl.status {
        Status::Outside => Err(Error::NotAdmissible),
        Status::Interior if d % 2 == 1 && cm.exponents().first() > 0 => Err(Error::OddInteriorNeedsZeroOrder),
        _ => Ok(cl.witness.expect("witness present")),
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn same_measure(a: &AtomicMeasure, b: &AtomicMeasure, tol: f64) -> bool {
    a.len() == b.len()
        && a.atoms()
            .iter()
            .zip(b.atoms())
            .all(|(x, y)| relative_gap(x.position, y.position) <= tol && relative_gap(x.mass, y.mass) <= tol)
}

/// An independent discretization used to confirm witness uniqueness.
fn alternative_config(config: &SolverConfig) -> SolverConfig {
    let mut alt = config.clone();
    alt.grid.points = (config.grid.points * 3 / 4).max(3) | 1;
    alt.grid.u_min = config.grid.u_min * 0.7;
    alt.grid.u_max = config.grid.u_max * 1.3;
    alt
}

/// The unique perfect spline with the prescribed knot count reproducing `m`.
///
/// Interior points need an even number of orders or `k_1 = 0`; boundary points
/// give at most `(d-1)/2` knots.
pub fn witness_spline(class: SplineClass, m: &MomentVector, config: &SolverConfig) -> Result<PerfectSpline> {
    let cm = to_cm(class, m)?;
    let first = witness_measure(&cm, config)?;
    let second = witness_measure(&cm, &alternative_config(config))?;
    if !same_measure(&first, &second, UNIQUENESS_TOL) {
        return Err(Error::NonUniqueWithinTolerance);
    }
    spline_from_measure(class, m.exponents().r(), &first)
}

/// Sub-status used by the recursion; orders of length `>= 3` recurse.
fn sub_status(cm: &MomentVector, config: &SolverConfig, trace: &mut Vec<String>) -> Result<Status> {
    if cm.len() >= 3 {
        let report = recursive_cm(cm, config, trace)?;
        Ok(match report {
            Admissibility::Interior => Status::Interior,
            Admissibility::Boundary => Status::Boundary,
            Admissibility::NotAdmissible => Status::Outside,
        })
    } else {
        Ok(cone::classify(cm, config)?.status)
    }
}

/// `|phi^{(k)}|` of the witness spline of `cm`, computed in CM moment space.
fn witness_norm(cm: &MomentVector, k: u32, config: &SolverConfig) -> Result<Option<f64>> {
    let cl = cone::classify(cm, config)?;
    Ok(cl.witness.map(|w| w.moment(k)))
}

fn recursive_cm(cm: &MomentVector, config: &SolverConfig, trace: &mut Vec<String>) -> Result<Admissibility> {
    let d = cm.len();
    let k = cm.exponents().orders();
    let k1 = k[0];
    let m1 = cm.values()[0];
    let band = config.boundary_band;

    let tail = cm.slice(1..d)?;
    let depth = trace.len();
    let tail_status = sub_status(&tail, config, trace)?;
    let spline_source = if d % 2 == 1 { tail.clone() } else { cm.slice(1..d - 1)? };
    let label = |s: &str| format!("d={d}: {s}");

    if tail_status == Status::Outside {
        trace.insert(depth, label("tail not admissible"));
        return Ok(Admissibility::NotAdmissible);
    }
    let Some(phi) = witness_norm(&spline_source, k1, config)? else {
        trace.insert(depth, label("no witness for the tail"));
        return Ok(Admissibility::NotAdmissible);
    };
    let gap = (m1 - phi) / m1.abs().max(phi.abs()).max(f64::MIN_POSITIVE);
    let (status, case) = match (tail_status, d % 2 == 1) {
        (Status::Interior, odd) => {
            if gap > band {
                (Admissibility::Interior, "tail interior, strict inequality")
            } else if odd && gap >= -band {
                (Admissibility::Boundary, "tail interior, equality")
            } else {
                (Admissibility::NotAdmissible, "tail interior, inequality fails")
            }
        }
        (_, _) if k1 > 0 => {
            if gap.abs() <= band {
                (Admissibility::Boundary, "tail boundary, k_1 > 0, equality")
            } else {
                (Admissibility::NotAdmissible, "tail boundary, k_1 > 0, equality fails")
            }
        }
        _ => {
            if gap >= -band {
                (Admissibility::Boundary, "tail boundary, k_1 = 0, inequality")
            } else {
                (Admissibility::NotAdmissible, "tail boundary, k_1 = 0, inequality fails")
            }
        }
    };
    trace.insert(depth, label(case));
    Ok(status)
}

/// Admissibility through the recursive characterization: classify the norms
/// without the first order, then compare `M_{k_1}` against the witness spline
/// of the tail (odd `d`) or of the tail without its last order (even `d`).
pub fn check_recursive(class: SplineClass, m: &MomentVector, config: &SolverConfig) -> Result<AdmissibilityReport> {
    config.validate()?;
    let ex = m.exponents();
    if ex.len() < 3 {
        return Err(Error::DRequiresAtLeast3(ex.len()));
    }
    if ex.last() != ex.r() {
        return Err(Error::RequiresTopOrderR);
    }
    let cm = to_cm(class, m)?;
    let mut trace = Vec::new();
    let status = recursive_cm(&cm, config, &mut trace)?;
    let witness = if status == Admissibility::NotAdmissible {
        None
    } else {
        witness_of(class, ex.r(), &cone::classify(&cm, config)?)?
    };
    Ok(AdmissibilityReport::new(status, witness, trace))
}

/// Seeded random members of the extremal family: `floor(d/2)` knots with
/// log-uniform knots and weights in `[0.1, 10]`, plus a constant for odd `d`.
///
/// Member `i` depends only on `(seed, i)`.
pub fn extremal_family_sample(
    class: SplineClass,
    k: &ExponentVector,
    count: usize,
    seed: u64,
) -> Result<Vec<PerfectSpline>> {
    if k.first() != 0 {
        return Err(Error::FirstOrderNotZero);
    }
    let m = k.len() / 2;
    let odd = k.len() % 2 == 1;
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut knots: Vec<f64>;
            loop {
                knots = (0..m).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
                knots.sort_by(|a, b| b.total_cmp(a));
                if knots.windows(2).all(|w| w[0] > w[1] * (1.0 + 1e-6)) {
                    break;
                }
            }
            let weights = (0..m).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
            let constant = if odd { rng.gen_range(0.0..1.0) } else { 0.0 };
            PerfectSpline::new(class, k.r(), knots, weights, constant)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::norms;

    fn mv(values: &[f64], orders: &[u32], r: u32) -> MomentVector {
        MomentVector::new(values.to_vec(), ExponentVector::new(orders, r).unwrap()).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn admissibility_examples() {
        let b = check_admissible(SplineClass::Cm, &mv(&[1.0, 1.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(b.status, Admissibility::Boundary);
        let w = b.witness.unwrap();
        assert_eq!(w.knots().len(), 1);
        assert!((w.knots()[0] - 1.0).abs() < 1e-9 && (w.weights()[0] - 1.0).abs() < 1e-9);
        assert_eq!(b.knot_count.unwrap().twice_value, 2);

        let i = check_admissible(SplineClass::Cm, &mv(&[2.0, 1.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(i.status, Admissibility::Interior);
        assert_eq!(i.knot_count.unwrap().twice_value, 3);
        assert!((i.witness.unwrap().constant() - 1.0).abs() < 1e-9);

        let n = check_admissible(SplineClass::Mm, &mv(&[1.0, 2.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(n.status, Admissibility::NotAdmissible);
        assert!(n.witness.is_none() && n.knot_count.is_none());
    }

    #[test]
    fn witness_examples() {
        let s = witness_spline(SplineClass::Cm, &mv(&[1.0, 1.0], &[1, 2], 2), &cfg()).unwrap();
        assert!((s.knots()[0] - 1.0).abs() < 1e-9 && (s.weights()[0] - 1.0).abs() < 1e-9);

        let s = witness_spline(SplineClass::Cm, &mv(&[1.0, 2.0], &[0, 1], 2), &cfg()).unwrap();
        assert!((s.knots()[0] - 0.5).abs() < 1e-9 && (s.weights()[0] - 4.0).abs() < 1e-8);

        let s = witness_spline(SplineClass::Cm, &mv(&[1.0, 1.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(s.knots().len(), 1);

        let err = witness_spline(SplineClass::Cm, &mv(&[1.0, 2.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap_err();
        assert_eq!(err, Error::NotAdmissible);
        let odd = mv(&[1.0, 2.0, 5.0], &[1, 2, 3], 3);
        assert_eq!(witness_spline(SplineClass::Cm, &odd, &cfg()).unwrap_err(), Error::OddInteriorNeedsZeroOrder);
    }

    #[test]
    fn mm_witness_reproduces_norms() {
        let m = mv(&[2.0 / 6.0, 1.25, 4.25, 8.125], &[0, 1, 2, 3], 3);
        let s = witness_spline(SplineClass::Mm, &m, &cfg()).unwrap();
        let back = norms(&s, m.exponents()).unwrap();
        for (a, b) in back.values().iter().zip(m.values()) {
            assert!((a - b).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn recursive_examples() {
        let r = check_recursive(SplineClass::Cm, &mv(&[2.0, 1.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(r.status, Admissibility::Interior);
        assert!(!r.recursion_trace.is_empty());
        let r = check_recursive(SplineClass::Cm, &mv(&[1.0, 1.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(r.status, Admissibility::Boundary);
        let r = check_recursive(SplineClass::Cm, &mv(&[1.0, 2.0, 1.0], &[0, 1, 2], 2), &cfg()).unwrap();
        assert_eq!(r.status, Admissibility::NotAdmissible);

        let e = check_recursive(SplineClass::Cm, &mv(&[1.0, 1.0], &[1, 2], 2), &cfg()).unwrap_err();
        assert_eq!(e, Error::DRequiresAtLeast3(2));
        let e = check_recursive(SplineClass::Cm, &mv(&[2.0, 1.0, 1.0], &[0, 1, 2], 3), &cfg()).unwrap_err();
        assert_eq!(e, Error::RequiresTopOrderR);
    }

    #[test]
    fn family_sample_shapes() {
        let k2 = ExponentVector::new(&[0, 2], 3).unwrap();
        let s = extremal_family_sample(SplineClass::Cm, &k2, 3, 7).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| x.knots().len() == 1 && x.constant() == 0.0));

        let k3 = ExponentVector::new(&[0, 1, 2], 2).unwrap();
        let s = extremal_family_sample(SplineClass::Mm, &k3, 1, 7).unwrap();
        assert_eq!(s[0].knots().len(), 1);
        assert!(s[0].constant() >= 0.0);

        assert_eq!(
            extremal_family_sample(SplineClass::Cm, &k3, 5, 11).unwrap(),
            extremal_family_sample(SplineClass::Cm, &k3, 5, 11).unwrap()
        );
    }

    #[test]
    fn family_members_are_admissible() {
        let k = ExponentVector::new(&[0, 1, 3, 4], 4).unwrap();
        for class in [SplineClass::Cm, SplineClass::Mm] {
            for s in extremal_family_sample(class, &k, 10, 3).unwrap() {
                let m = norms(&s, &k).unwrap();
                let rep = check_admissible(class, &m, &cfg()).unwrap();
                assert_ne!(rep.status, Admissibility::NotAdmissible);
            }
        }
    }
}
