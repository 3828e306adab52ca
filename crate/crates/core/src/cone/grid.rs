//! Grid discretization of the moment curve and the LP built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::simplex;

use super::fit::Atoms;
use super::frame::Frame;

/// Geometric grid of candidate atom positions (in the balanced frame).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub u_min: f64,
    pub u_max: f64,
    pub points: usize,
    pub include_zero: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { u_min: 1e-3, u_max: 1e3, points: 2000, include_zero: true }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_min > 0.0 && self.u_min.is_finite()) {
            return Err(Error::InvalidConfig(format!("grid u_min = {} must be positive", self.u_min)));
        }
        if !(self.u_max > self.u_min && self.u_max.is_finite()) {
            return Err(Error::InvalidConfig(format!("grid u_max = {} must exceed u_min", self.u_max)));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig("grid needs at least 2 points".into()));
        }
        Ok(())
    }

    /// Positive grid nodes (the zero node is handled separately).
    pub fn nodes(&self) -> Vec<f64> {
        let ratio = self.u_max / self.u_min;
        let last = (self.points - 1) as f64;
        (0..self.points).map(|j| self.u_min * ratio.powf(j as f64 / last)).collect()
    }

    pub fn log_step(&self) -> f64 {
        (self.u_max / self.u_min).ln() / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Objective {
    Feasibility,
    /// Minimize `sum m_j v_j^p`.
    MinPower(u32),
    /// Maximize the mass placed at this extra node.
    MaxMassAt(f64),
}

#[derive(Debug, Clone)]
pub(crate) struct GridSolution {
    pub zero: f64,
    /// `(position, mass)` of the support, increasing positions.
    pub support: Vec<(f64, f64)>,
    /// Mass at the extra node of `MaxMassAt`.
    pub pinned: f64,
    /// L1 norm of the relative constraint violation.
    pub infeasibility: f64,
    pub pivots: usize,
}

pub(crate) fn solve_grid(frame: &Frame, grid: &GridConfig, include_zero: bool, objective: Objective) -> GridSolution {
    let mut positions = grid.nodes();
    let pinned_at = match objective {
        Objective::MaxMassAt(v) => {
            positions.push(v);
            Some(positions.len() - 1)
        }
        _ => None,
    };
    let zero_col = include_zero;
    let offset = usize::from(zero_col);
    let n = positions.len() + offset;
    let m = frame.orders.len();
    let row_scale: Vec<f64> = frame.target.iter().map(|&c| if c > 0.0 { c } else { 1.0 }).collect();

    let mut a = Mat::zeros(m, n);
    let mut col_scale = vec![1.0; n];
    for j in 0..n {
        let mut mx: f64 = 0.0;
        for i in 0..m {
            let k = frame.orders[i];
            let v = if zero_col && j == 0 {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                positions[j - offset].powi(k as i32)
            };
            a[(i, j)] = v / row_scale[i];
            mx = mx.max(a[(i, j)].abs());
        }
        if mx > 0.0 {
            col_scale[j] = mx;
            for i in 0..m {
                a[(i, j)] /= mx;
            }
        }
    }
    let b: Vec<f64> = frame.target.iter().zip(&row_scale).map(|(c, s)| c / s).collect();

    let mut cost = vec![0.0; n];
    match objective {
        Objective::Feasibility => {}
        Objective::MinPower(p) => {
            for j in offset..n {
                cost[j] = positions[j - offset].powi(p as i32) / col_scale[j];
            }
            let mx = cost.iter().fold(0.0_f64, |a, &c| a.max(c));
            if mx > 0.0 && mx.is_finite() {
                cost.iter_mut().for_each(|c| *c /= mx);
            }
        }
        Objective::MaxMassAt(_) => {
            let j = pinned_at.unwrap() + offset;
            cost[j] = -1.0;
        }
    }

    let sol = simplex::solve(&a, &b, &cost);
    let mut zero = 0.0;
    let mut pinned = 0.0;
    let mut support = Vec::new();
    for (j, &x) in sol.x.iter().enumerate() {
        if x <= 0.0 {
            continue;
        }
        let mass = x / col_scale[j];
        if zero_col && j == 0 {
            zero = mass;
        } else if Some(j - offset) == pinned_at {
            pinned = mass;
        } else {
            support.push((positions[j - offset], mass));
        }
    }
    support.sort_by(|x, y| x.0.total_cmp(&y.0));
    GridSolution { zero, support, pinned, infeasibility: sol.infeasibility, pivots: sol.pivots }
}

/// Groups grid support into clusters of nearby nodes, `(position, mass)`.
pub(crate) fn clusters(support: &[(f64, f64)], log_gap: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new(); // (sum w u, sum w, last u)
    for &(u, w) in support {
        match out.last_mut() {
            Some(c) if (u / c.2).ln() <= log_gap => {
                c.0 += w * u;
                c.1 += w;
                c.2 = u;
            }
            _ => out.push((w * u, w, u)),
        }
    }
    out.into_iter().map(|(wu, w, _)| (wu / w, w)).collect()
}

/// Forces a cluster list to exactly `count` atoms by merging closest neighbours
/// or splitting the heaviest cluster.
pub(crate) fn adjust_count(mut atoms: Vec<(f64, f64)>, count: usize) -> Vec<(f64, f64)> {
    while atoms.len() > count && atoms.len() >= 2 {
        let i = (0..atoms.len() - 1)
            .min_by(|&a, &b| {
                let ga = atoms[a + 1].0 / atoms[a].0;
                let gb = atoms[b + 1].0 / atoms[b].0;
                ga.total_cmp(&gb)
            })
            .unwrap();
        let (u1, w1) = atoms[i];
        let (u2, w2) = atoms.remove(i + 1);
        atoms[i] = ((u1 * w1 + u2 * w2) / (w1 + w2), w1 + w2);
    }
    if count == 0 {
        atoms.clear();
    }
    if atoms.is_empty() && count > 0 {
        atoms.push((1.0, 1.0));
    }
    while atoms.len() < count {
        let i = heaviest(&atoms);
        split_at(&mut atoms, i);
    }
    atoms
}

fn heaviest(atoms: &[(f64, f64)]) -> usize {
    (0..atoms.len()).max_by(|&a, &b| atoms[a].1.total_cmp(&atoms[b].1)).unwrap_or(0)
}

fn split_at(atoms: &mut Vec<(f64, f64)>, i: usize) {
    let (u, w) = atoms[i];
    atoms[i] = (u * 0.7, w / 2.0);
    atoms.insert(i + 1, (u / 0.7, w / 2.0));
}

fn grid_support(sol: &GridSolution, log_gap: f64, zero: bool) -> Vec<(f64, f64)> {
    let mut support = clusters(&sol.support, log_gap);
    if !zero && sol.zero > 0.0 {
        // fold a zero-node mass into a small positive atom
        let lowest = support.first().map_or(1.0, |a| a.0);
        support.insert(0, (lowest * 0.1, sol.zero));
    }
    support
}

fn with_structure(
    sol: &GridSolution,
    mut positive: Vec<(f64, f64)>,
    zero: bool,
    fixed: Option<f64>,
    target0: f64,
) -> Atoms {
    let mut fixed_index = None;
    if let Some(v) = fixed {
        let w = if sol.pinned > 0.0 { sol.pinned } else { 1e-2 * target0 };
        positive.push((v, w));
        positive.sort_by(|a, b| a.0.total_cmp(&b.0));
        // nudge free atoms off the pinned position
        for a in positive.iter_mut() {
            if a.0 != v && (a.0 / v - 1.0).abs() < 1e-3 {
                a.0 *= if a.0 < v { 0.9 } else { 1.1 };
            }
        }
        fixed_index = positive.iter().position(|a| a.0 == v);
    }
    let zero_mass = zero.then_some(if sol.zero > 0.0 { sol.zero } else { 1e-3 * target0 });
    Atoms { zero: zero_mass, positive, fixed: fixed_index }
}

/// Initial guess with the requested structure from a grid solution.
pub(crate) fn init_from_grid(
    sol: &GridSolution,
    log_gap: f64,
    zero: bool,
    free_positive: usize,
    fixed: Option<f64>,
    target0: f64,
) -> Atoms {
    let support = grid_support(sol, log_gap, zero);
    with_structure(sol, adjust_count(support, free_positive), zero, fixed, target0)
}

/// When the grid resolves too few clusters, guesses that split each of the
/// lighter clusters first (`init_from_grid` splits the heaviest).
pub(crate) fn split_inits(
    sol: &GridSolution,
    log_gap: f64,
    zero: bool,
    free_positive: usize,
    fixed: Option<f64>,
    target0: f64,
) -> Vec<Atoms> {
    let support = grid_support(sol, log_gap, zero);
    if support.is_empty() || support.len() >= free_positive {
        return Vec::new();
    }
    let top = heaviest(&support);
    (0..support.len())
        .filter(|&i| i != top)
        .map(|i| {
            let mut s = support.clone();
            split_at(&mut s, i);
            with_structure(sol, adjust_count(s, free_positive), zero, fixed, target0)
        })
        .collect()
}
