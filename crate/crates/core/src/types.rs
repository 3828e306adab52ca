//! Shared domain types.
//!
//! Atom positions live on the `u`-axis (the integration variable of the
//! Bernstein and Williamson representations). Spline knots live on the
//! `a`-axis with `a = 1/u`; the atom at `u = 0` becomes the spline constant.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two atoms closer than this (relative) are considered the same point.
pub const ATOM_SEPARATION: f64 = 1e-9;

/// Strictly increasing derivative orders `0 <= k_1 < ... < k_d <= r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentVector {
    orders: Vec<u32>,
    r: u32,
}

/// Validates derivative orders against the smoothness order `r`.
pub fn validate_exponents(orders: &[u32], r: u32) -> Result<ExponentVector> {
    if orders.is_empty() {
        return Err(Error::Empty);
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotStrictlyIncreasing(orders.to_vec()));
    }
    let top = *orders.last().unwrap();
    if top > r {
        return Err(Error::OrderExceedsR { order: top, r });
    }
    Ok(ExponentVector { orders: orders.to_vec(), r })
}

impl ExponentVector {
    pub fn new(orders: &[u32], r: u32) -> Result<Self> {
        validate_exponents(orders, r)
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of orders `d`.
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn first(&self) -> u32 {
        self.orders[0]
    }

    pub fn last(&self) -> u32 {
        self.orders[self.orders.len() - 1]
    }

    /// Orders restricted to `range`, keeping `r`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        validate_exponents(&self.orders[range], self.r)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "; r={})", self.r)
    }
}

/// Nonnegative moments (or derivative norms) paired with their orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    values: Vec<f64>,
    exponents: ExponentVector,
}

impl MomentVector {
    pub fn new(values: Vec<f64>, exponents: ExponentVector) -> Result<Self> {
        if values.len() != exponents.len() {
            return Err(Error::DimensionMismatch { expected: exponents.len(), got: values.len() });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidValue(bad));
        }
        Ok(Self { values, exponents })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exponents(&self) -> &ExponentVector {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entries `range` with the matching orders.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        let exponents = self.exponents.slice(range.clone())?;
        Self::new(self.values[range].to_vec(), exponents)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect(), self.exponents.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(position: f64, mass: f64) -> Self {
        Self { position, mass }
    }
}

/// A finitely atomic nonnegative measure on `[0, inf)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !a.position.is_finite() || a.position < 0.0 {
                return Err(Error::InvalidMeasure(format!("position {} outside [0, inf)", a.position)));
            }
            if !a.mass.is_finite() || a.mass <= 0.0 {
                return Err(Error::InvalidMeasure(format!("mass {} is not positive", a.mass)));
            }
        }
        for w in atoms.windows(2) {
            let (p, q) = (w[0].position, w[1].position);
            if p >= q {
                return Err(Error::InvalidMeasure(format!("positions {p} and {q} are not increasing")));
            }
            if q - p <= ATOM_SEPARATION * q {
                return Err(Error::InvalidMeasure(format!("atoms at {p} and {q} are not separated")));
            }
        }
        Ok(Self { atoms })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(u, w)| Atom::new(u, w)).collect())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn zero_mass(&self) -> f64 {
        match self.atoms.first() {
            Some(a) if a.position == 0.0 => a.mass,
            _ => 0.0,
        }
    }

    pub fn positive_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.position > 0.0)
    }

    pub fn contains_position(&self, position: f64) -> bool {
        self.atoms.iter().any(|a| a.position == position)
    }

    /// `sum_s w_s u_s^k` for one order, with `0^0 = 1`.
    pub fn moment(&self, order: u32) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.position.powi(order as i32)).sum()
    }

    pub fn moments(&self, exponents: &ExponentVector) -> MomentVector {
        let values = exponents.orders().iter().map(|&k| self.moment(k)).collect();
        MomentVector::new(values, exponents.clone()).expect("moments of a valid measure are nonnegative")
    }

    pub fn index(&self) -> HalfIndex {
        index_of(self)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|a| Atom::new(a.position, a.mass * factor)).collect())
    }
}

impl TryFrom<Vec<Atom>> for AtomicMeasure {
    type Error = Error;
    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<AtomicMeasure> for Vec<Atom> {
    fn from(m: AtomicMeasure) -> Self {
        m.atoms
    }
}

/// A half-integer index stored doubled, so `1/2` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HalfIndex {
    pub twice_value: u32,
}

impl HalfIndex {
    pub fn from_twice(twice_value: u32) -> Self {
        Self { twice_value }
    }

    pub fn value(self) -> f64 {
        self.twice_value as f64 / 2.0
    }
}

impl Add for HalfIndex {
    type Output = HalfIndex;
    fn add(self, rhs: Self) -> Self {
        HalfIndex { twice_value: self.twice_value + rhs.twice_value }
    }
}

impl fmt::Display for HalfIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_value.is_multiple_of(2) {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

/// Index of a given representation: positive atoms count 1, the atom at 0 counts 1/2.
pub fn index_of(measure: &AtomicMeasure) -> HalfIndex {
    let twice = measure.atoms().iter().map(|a| if a.position > 0.0 { 2 } else { 1 }).sum();
    HalfIndex::from_twice(twice)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplineClass {
    /// Completely monotone functions on the negative half-line.
    Cm,
    /// Multiply monotone functions of order `r`.
    Mm,
}

impl fmt::Display for SplineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplineClass::Cm => "cm",
            SplineClass::Mm => "mm",
        })
    }
}

impl std::str::FromStr for SplineClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cm" => Ok(SplineClass::Cm),
            "mm" => Ok(SplineClass::Mm),
            other => Err(Error::InvalidSpline(format!("unknown class {other:?}"))),
        }
    }
}

/// Perfect spline of order `r` with knots `-a_1 < ... < -a_m` (stored as `a_1 > ... > a_m > 0`).
///
/// CM: `C + sum_s lambda_s a_s^r exp(t / a_s)`.
/// MM: `C + (1/r!) sum_s lambda_s (a_s + t)_+^r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplineRecord", into = "SplineRecord")]
pub struct PerfectSpline {
    class: SplineClass,
    r: u32,
    knots: Vec<f64>,
    weights: Vec<f64>,
    constant: f64,
}

/// Stable serialized form of a [`PerfectSpline`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineRecord {
    pub class: SplineClass,
    pub r: u32,
    pub knots: Vec<f64>,
    pub weights: Vec<f64>,
    pub constant: f64,
}

impl PerfectSpline {
    pub fn new(class: SplineClass, r: u32, knots: Vec<f64>, weights: Vec<f64>, constant: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSpline("order r must be at least 1".into()));
        }
        if knots.len() != weights.len() {
            return Err(Error::InvalidSpline(format!("{} knots but {} weights", knots.len(), weights.len())));
        }
        if knots.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidSpline("knots must be positive".into()));
        }
        if weights.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(Error::InvalidSpline("weights must be positive".into()));
        }
        if knots.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidSpline("knots must be strictly decreasing".into()));
        }
        if !constant.is_finite() || constant < 0.0 {
            return Err(Error::InvalidSpline("constant must be nonnegative".into()));
        }
        Ok(Self { class, r, knots, weights, constant })
    }

    pub fn class(&self) -> SplineClass {
        self.class
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Knot count in half units: `2m`, plus one when a positive constant is present.
    pub fn knot_count(&self) -> HalfIndex {
        HalfIndex::from_twice(2 * self.knots.len() as u32 + u32::from(self.constant > 0.0))
    }
}

impl TryFrom<SplineRecord> for PerfectSpline {
    type Error = Error;
    fn try_from(r: SplineRecord) -> Result<Self> {
        PerfectSpline::new(r.class, r.r, r.knots, r.weights, r.constant)
    }
}

impl From<PerfectSpline> for SplineRecord {
    fn from(s: PerfectSpline) -> Self {
        SplineRecord { class: s.class, r: s.r, knots: s.knots, weights: s.weights, constant: s.constant }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Interior,
    Boundary,
    Outside,
}

/// Membership of a moment vector in the moment cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub status: Status,
    pub witness: Option<AtomicMeasure>,
    pub index: Option<HalfIndex>,
}

impl Classification {
    pub fn outside() -> Self {
        Self { status: Status::Outside, witness: None, index: None }
    }

    pub fn with_witness(status: Status, witness: AtomicMeasure) -> Self {
        let index = Some(witness.index());
        Self { status, witness: Some(witness), index }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_validation() {
        let k = validate_exponents(&[0, 1, 2], 2).unwrap();
        assert_eq!(k.orders(), &[0, 1, 2]);
        assert_eq!(validate_exponents(&[1, 1, 2], 2), Err(Error::NotStrictlyIncreasing(vec![1, 1, 2])));
        assert_eq!(validate_exponents(&[0, 3], 2), Err(Error::OrderExceedsR { order: 3, r: 2 }));
        assert_eq!(validate_exponents(&[], 2), Err(Error::Empty));
        // idempotent
        assert_eq!(validate_exponents(k.orders(), k.r()).unwrap(), k);
    }

    #[test]
    fn index_counts_zero_atom_as_half() {
        let m = AtomicMeasure::from_pairs(&[(0.0, 1.0)]).unwrap();
        assert_eq!(index_of(&m).twice_value, 1);
        assert_eq!(index_of(&m).to_string(), "1/2");
        let m = AtomicMeasure::from_pairs(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(index_of(&m).twice_value, 3);
        assert_eq!(index_of(&AtomicMeasure::empty()).twice_value, 0);
    }

    #[test]
    fn measure_rejects_close_atoms() {
        assert!(AtomicMeasure::from_pairs(&[(1.0, 1.0), (1.0 + 1e-12, 1.0)]).is_err());
        assert!(AtomicMeasure::from_pairs(&[(1.0, 1.0), (1.0 + 1e-6, 1.0)]).is_ok());
        assert!(AtomicMeasure::from_pairs(&[(2.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(AtomicMeasure::from_pairs(&[(1.0, 0.0)]).is_err());
        assert!(AtomicMeasure::from_pairs(&[(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn moment_vector_rejects_negative_entries() {
        let k = ExponentVector::new(&[0, 1], 2).unwrap();
        assert_eq!(MomentVector::new(vec![1.0, -1.0], k.clone()), Err(Error::InvalidValue(-1.0)));
        assert!(matches!(MomentVector::new(vec![1.0], k), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spline_record_roundtrip() {
        let s = PerfectSpline::new(SplineClass::Cm, 2, vec![2.0, 0.5], vec![1.0, 4.0], 0.25).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"class\":\"cm\""));
        let back: PerfectSpline = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.knot_count().to_string(), "5/2");
        assert!(PerfectSpline::new(SplineClass::Mm, 2, vec![0.5, 2.0], vec![1.0, 1.0], 0.0).is_err());
    }
}
