//! Membership in the power-moment cone `M(t^{k_1}, ..., t^{k_d})` on `[0, inf)`
//! and its principal / canonical atomic representations.
//!
//! The solver has two stages. A grid LP over nonnegative masses on a geometric
//! discretization of the moment curve acts as an independent feasibility
//! oracle and as the initializer; a damped Newton iteration in log coordinates
//! then solves `sum_s w_s u_s^{k_i} = c_i` for an atom structure of prescribed
//! index. Everything runs in a balanced frame (see [`frame`]).
//!
//! For `k_1 > 0` the orders are shifted to start at 0 and atoms at the origin
//! are disallowed in the final answer: the interior is unchanged, and boundary
//! points whose (unique) representation needs the origin are outside.

mod fit;
mod frame;
pub mod grid;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Mat};
use crate::types::{Atom, AtomicMeasure, Classification, MomentVector, Status, ATOM_SEPARATION};

use fit::{fit, fit_projected, masses_for_positions, Atoms, FitResult};
pub use frame::relative_residual as measure_residual;
use frame::Frame;
pub use grid::GridConfig;
use grid::{init_from_grid, solve_grid, split_inits, GridSolution, Objective};

/// Atoms closer than this (relative) are merged before reduction.
pub const MERGE_TOL: f64 = 1e-6;
/// Prescribed roots this close (relative) to a principal root are degenerate.
pub const ROOT_COINCIDENCE_TOL: f64 = 1e-6;
/// Iteration budget of the projected fallback, in units of `newton_max_iter`.
const PROJECTED_BUDGET: usize = 10;
const MULTISTARTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative residual accepted by the grid oracle and by atom reduction.
    pub feasibility_tol: f64,
    /// Relative residual at which Newton stops.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Relative band around the boundary.
    pub boundary_band: f64,
    pub grid: GridConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-8,
            newton_tol: 1e-11,
            newton_max_iter: 100,
            boundary_band: 1e-7,
            grid: GridConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("feasibility_tol", self.feasibility_tol),
            ("newton_tol", self.newton_tol),
            ("boundary_band", self.boundary_band),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {v} must be positive")));
            }
        }
        if self.newton_tol >= self.feasibility_tol {
            return Err(Error::InvalidConfig("newton_tol must be below feasibility_tol".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidConfig("newton_max_iter must be positive".into()));
        }
        self.grid.validate()
    }
}

/// Work counters of one solve.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub newton_solves: usize,
    pub newton_iterations: usize,
    pub lp_solves: usize,
    pub lp_pivots: usize,
    pub grid_nodes: usize,
}

struct Solver<'a> {
    cfg: &'a SolverConfig,
    diag: SolveDiagnostics,
    /// Smallest residual over the principal attempts of the last analysis.
    principal_residual: f64,
}

/// Full result of a classification, including frame-level data reused by
/// the representation routines.
pub(crate) struct Analysis {
    pub classification: Classification,
    frame: Option<Frame>,
    principal: Option<Atoms>,
    /// Interior status came from a converged principal representation.
    principal_found: bool,
    pub diagnostics: SolveDiagnostics,
}

impl<'a> Solver<'a> {
    fn new(cfg: &'a SolverConfig) -> Self {
        let diag = SolveDiagnostics { grid_nodes: cfg.grid.points, ..Default::default() };
        Self { cfg, diag, principal_residual: f64::INFINITY }
    }

    fn fit(&mut self, frame: &Frame, init: &Atoms) -> FitResult {
        let res = fit(&frame.orders, &frame.target, init, self.cfg.newton_tol, self.cfg.newton_max_iter);
        self.diag.newton_solves += 1;
        self.diag.newton_iterations += res.iterations;
        if res.converged || init.param_count() != frame.orders.len() {
            return res;
        }
        // square system that stalled: continue with the masses projected out
        let start = if well_formed(&res.atoms) { &res.atoms } else { init };
        let budget = PROJECTED_BUDGET * self.cfg.newton_max_iter;
        let alt = fit_projected(&frame.orders, &frame.target, start, self.cfg.newton_tol, budget);
        self.diag.newton_solves += 1;
        self.diag.newton_iterations += alt.iterations;
        if alt.converged && well_formed(&alt.atoms) {
            alt
        } else {
            res
        }
    }

    fn grid(&mut self, frame: &Frame, include_zero: bool, objective: Objective) -> GridSolution {
        let sol = solve_grid(frame, &self.cfg.grid, include_zero, objective);
        self.diag.lp_solves += 1;
        self.diag.lp_pivots += sol.pivots;
        sol
    }

    fn cluster_gap(&self) -> f64 {
        3.5 * self.cfg.grid.log_step()
    }

    /// Deterministic multistart guesses with `positive` atoms (one of them pinned at `fixed`).
    fn multistarts(&self, frame: &Frame, zero: bool, positive: usize, fixed: Option<f64>) -> Vec<Atoms> {
        let free = positive - usize::from(fixed.is_some());
        let mut rng = ChaCha8Rng::seed_from_u64(0x6b6f_6c6d ^ (positive as u64) << 8 ^ u64::from(zero));
        let mut out = Vec::new();
        for s in 0..MULTISTARTS {
            let mut pos: Vec<f64> = if s == 0 {
                // evenly spread in log space
                (0..free).map(|i| ((i as f64 + 0.5) / free as f64 * 4.0 - 2.0).exp()).collect()
            } else {
                (0..free).map(|_| rng.gen_range(-3.0f64..3.0).exp()).collect()
            };
            if let Some(v) = fixed {
                pos.push(v);
            }
            pos.sort_by(f64::total_cmp);
            if pos.windows(2).any(|w| w[1] - w[0] <= 1e-3 * w[1]) {
                continue;
            }
            let mut atoms = masses_for_positions(&frame.orders, &frame.target, zero, &pos);
            atoms.fixed = fixed.and_then(|v| atoms.positive.iter().position(|a| a.0 == v));
            out.push(atoms);
        }
        out
    }

    /// Solves a square system for the given structure; returns the first converged
    /// well-formed solution together with every attempt.
    fn solve_structure(
        &mut self,
        frame: &Frame,
        zero: bool,
        positive: usize,
        fixed: Option<f64>,
        extra_inits: Vec<Atoms>,
    ) -> (Option<FitResult>, Vec<FitResult>) {
        let objective = match fixed {
            Some(v) => Objective::MaxMassAt(v),
            None => Objective::MinPower(frame.orders[frame.orders.len() - 1] + 1),
        };
        let sol = self.grid(frame, zero, objective);
        let free = positive - usize::from(fixed.is_some());
        let mut inits = vec![init_from_grid(&sol, self.cluster_gap(), zero, free, fixed, frame.target[0])];
        inits.extend(split_inits(&sol, self.cluster_gap(), zero, free, fixed, frame.target[0]));
        inits.extend(extra_inits);
        inits.extend(self.multistarts(frame, zero, positive, fixed));

        let mut attempts = Vec::new();
        for init in inits {
            let res = self.fit(frame, &init);
            if res.converged && well_formed(&res.atoms) {
                return (Some(res), attempts);
            }
            attempts.push(res);
        }
        (None, attempts)
    }

    fn analyze(&mut self, c: &MomentVector) -> Result<Analysis> {
        self.cfg.validate()?;
        let k = c.exponents().orders();
        let vals = c.values();
        let d = k.len();
        let zero_allowed = k[0] == 0;
        let done = |classification, frame, principal, principal_found, diag: &SolveDiagnostics| Analysis {
            classification,
            frame,
            principal,
            principal_found,
            diagnostics: diag.clone(),
        };

        if c.is_zero() {
            let cl = Classification::with_witness(Status::Boundary, AtomicMeasure::empty());
            return Ok(done(cl, None, None, false, &self.diag));
        }
        if vals.contains(&0.0) {
            // a positive atom feeds every row, so zeros force all mass to the origin
            let higher_zero = k.iter().zip(vals).filter(|(o, _)| **o > 0).all(|(_, v)| *v == 0.0);
            if zero_allowed && higher_zero && vals[0] > 0.0 {
                let w = AtomicMeasure::new(vec![Atom::new(0.0, vals[0])])?;
                let status = if d == 1 { Status::Interior } else { Status::Boundary };
                return Ok(done(Classification::with_witness(status, w), None, None, d == 1, &self.diag));
            }
            return Ok(done(Classification::outside(), None, None, false, &self.diag));
        }

        let frame = Frame::new(c);
        if d == 1 {
            let atom = if zero_allowed { Atom::new(0.0, vals[0]) } else { Atom::new(1.0, vals[0]) };
            let cl = Classification::with_witness(Status::Interior, AtomicMeasure::new(vec![atom])?);
            return Ok(done(cl, Some(frame), None, true, &self.diag));
        }

        let band = self.cfg.boundary_band;
        if lyapunov_violation(k, vals) > 1e3 * band {
            return Ok(done(Classification::outside(), Some(frame), None, false, &self.diag));
        }
        let (principal, attempts) = self.solve_structure(&frame, d % 2 == 1, d / 2, None, Vec::new());
        self.principal_residual = attempts.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);

        if let Some(p) = &principal {
            if !degenerate(&frame, &p.atoms, band) {
                let witness_atoms = if zero_allowed || d.is_multiple_of(2) {
                    Some(p.atoms.clone())
                } else {
                    self.positive_interior_witness(&frame, &p.atoms)
                };
                if let Some(m) = witness_atoms.as_ref().and_then(|a| frame.to_measure(a)) {
                    let cl = Classification::with_witness(Status::Interior, polish_masses(m, c));
                    return Ok(done(cl, Some(frame), principal.map(|r| r.atoms), true, &self.diag));
                }
            }
        }

        // boundary: lowest-index structure that fits within the band
        let mut seeds: Vec<Atoms> = attempts.iter().map(|r| r.atoms.clone()).collect();
        if let Some(p) = &principal {
            seeds.insert(0, p.atoms.clone());
        }
        let feas = self.grid(&frame, true, Objective::Feasibility);
        let gap = self.cluster_gap();
        for twice in 1..d {
            let (z, p) = (twice % 2 == 1, twice / 2);
            let mut inits: Vec<Atoms> = seeds.iter().map(|s| reduce_to(&frame, s, z, p, band)).collect();
            inits.push(init_from_grid(&feas, gap, z, p, None, frame.target[0]));
            inits.extend(self.multistarts(&frame, z, p, None).into_iter().take(3));
            let mut best: Option<FitResult> = None;
            for init in inits {
                let res = self.fit(&frame, &init);
                if well_formed(&res.atoms) && best.as_ref().is_none_or(|b| res.residual < b.residual) {
                    best = Some(res);
                }
            }
            if let Some(b) = best.filter(|b| b.residual <= band) {
                let uses_origin = b.atoms.zero.is_some_and(|m| m > 0.0);
                if !zero_allowed && uses_origin {
                    return Ok(done(Classification::outside(), Some(frame), None, false, &self.diag));
                }
                if let Some(m) = frame.to_measure(&b.atoms) {
                    let cl = Classification::with_witness(Status::Boundary, polish_masses(m, c));
                    return Ok(done(cl, Some(frame), principal.map(|r| r.atoms), false, &self.diag));
                }
            }
        }
        if let Some(p) = principal {
            // degenerate principal representation: in the cone, within the band of its boundary
            if let Some(m) = frame.to_measure(&p.atoms) {
                let cl = Classification::with_witness(Status::Boundary, m);
                return Ok(done(cl, Some(frame), Some(p.atoms), false, &self.diag));
            }
        }
        if feas.infeasibility <= self.cfg.feasibility_tol {
            // grid certificate of membership without a Newton solution
            let grid_atoms = Atoms {
                zero: (feas.zero > 0.0 && zero_allowed).then_some(feas.zero),
                positive: feas.support.clone(),
                fixed: None,
            };
            if let Some(m) = frame.to_measure(&grid_atoms) {
                let m = carathéodory(m, c);
                let cl = Classification::with_witness(Status::Interior, m);
                return Ok(done(cl, Some(frame), None, false, &self.diag));
            }
        }
        Ok(done(Classification::outside(), Some(frame), None, false, &self.diag))
    }

    /// Interior witness without an atom at the origin for an odd number of
    /// orders: a canonical representation of the shifted system.
    fn positive_interior_witness(&mut self, frame: &Frame, principal: &Atoms) -> Option<Atoms> {
        let d = frame.orders.len();
        let roots: Vec<f64> = principal.positive.iter().map(|a| a.0).collect();
        let hi = roots.iter().copied().fold(f64::NAN, f64::max);
        let lo = roots.iter().copied().fold(f64::NAN, f64::min);
        let candidates = [if hi.is_nan() { 1.0 } else { 2.0 * hi }, if lo.is_nan() { 0.5 } else { 0.5 * lo }];
        for v in candidates {
            let (res, _) = self.solve_structure(frame, false, d.div_ceil(2), Some(v), Vec::new());
            if let Some(r) = res {
                return Some(r.atoms);
            }
        }
        None
    }
}

/// Largest violation of log-convexity `c_b^(k_c-k_a) <= c_a^(k_c-k_b) c_c^(k_b-k_a)`
/// over triples of orders, per unit of `k_c - k_a`. Positive entries assumed.
fn lyapunov_violation(orders: &[u32], vals: &[f64]) -> f64 {
    let d = orders.len();
    let logs: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let mut worst = f64::NEG_INFINITY;
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                let (ka, kb, kc) = (orders[a] as f64, orders[b] as f64, orders[c] as f64);
                let l = (kc - ka) * logs[b] - (kc - kb) * logs[a] - (kb - ka) * logs[c];
                worst = worst.max(l / (kc - ka));
            }
        }
    }
    worst
}

/// Positions finite, increasing and separated.
fn well_formed(atoms: &Atoms) -> bool {
    atoms.positive.iter().all(|a| a.0.is_finite() && a.0 > 0.0 && a.1.is_finite() && a.1 > 0.0)
        && atoms.positive.windows(2).all(|w| w[1].0 - w[0].0 > ATOM_SEPARATION * w[1].0)
        && atoms.zero.is_none_or(|m| m.is_finite() && m > 0.0)
}

fn contribution(frame: &Frame, v: f64, m: f64, skip_order_zero: bool) -> f64 {
    frame
        .orders
        .iter()
        .zip(&frame.target)
        .filter(|(k, _)| !(skip_order_zero && **k == 0))
        .map(|(&k, &c)| m * v.powi(k as i32) / c)
        .fold(0.0, f64::max)
}

/// Whether a representation sits within `band` of a lower-index one.
fn degenerate(frame: &Frame, atoms: &Atoms, band: f64) -> bool {
    if atoms.zero.is_some_and(|m0| m0 / frame.target[0] <= band) {
        return true;
    }
    for &(v, m) in &atoms.positive {
        if contribution(frame, v, m, false) <= band {
            return true;
        }
        if contribution(frame, v, m, true) <= band {
            return true;
        }
    }
    let merge = band.sqrt();
    atoms.positive.windows(2).any(|w| w[1].0 - w[0].0 <= merge * w[1].0)
}

/// Projects a representation onto `zero` + `positive` atoms as a starting point.
fn reduce_to(frame: &Frame, atoms: &Atoms, zero: bool, positive: usize, band: f64) -> Atoms {
    let mut pos: Vec<(f64, f64)> = Vec::new();
    let mut zero_mass = atoms.zero.unwrap_or(0.0);
    for &(v, m) in &atoms.positive {
        if contribution(frame, v, m, false) <= band {
            continue;
        }
        if contribution(frame, v, m, true) <= band.sqrt() {
            zero_mass += m;
            continue;
        }
        pos.push((v, m));
    }
    let mut positive_atoms = grid::adjust_count(pos, positive);
    if !zero && zero_mass > 0.0 {
        if let Some(first) = positive_atoms.first_mut() {
            first.1 += zero_mass * 1e-3;
        }
    }
    positive_atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zero_mass = zero.then(|| if zero_mass > 0.0 { zero_mass } else { 1e-3 * frame.target[0] });
    Atoms { zero: zero_mass, positive: positive_atoms, fixed: None }
}

/// One Gauss-Newton step on the masses only, in original coordinates; kept if it helps.
fn polish_masses(measure: AtomicMeasure, c: &MomentVector) -> AtomicMeasure {
    let before = frame::relative_residual(&measure, c);
    if before == 0.0 || measure.is_empty() {
        return measure;
    }
    let orders = c.exponents().orders();
    let vals = c.values();
    let atoms = measure.atoms();
    let jac = Mat::from_fn(orders.len(), atoms.len(), |i, j| {
        atoms[j].position.powi(orders[i] as i32) / vals[i].max(f64::MIN_POSITIVE)
    });
    let rhs: Vec<f64> =
        orders.iter().zip(vals).map(|(&k, &v)| (v - measure.moment(k)) / v.max(f64::MIN_POSITIVE)).collect();
    let Some(delta) = least_squares(&jac, &rhs, 0.0) else { return measure };
    let updated: Vec<Atom> = atoms.iter().zip(&delta).map(|(a, dw)| Atom::new(a.position, a.mass + dw)).collect();
    match AtomicMeasure::new(updated) {
        Ok(m) if frame::relative_residual(&m, c) < before => m,
        _ => measure,
    }
}

/// Null vector of the moment matrix of `atoms` restricted to the first `d + 1` columns.
fn null_direction(orders: &[u32], scale: &[f64], atoms: &[Atom]) -> Option<Vec<f64>> {
    let d = orders.len();
    let cols = d + 1;
    for pivot in (0..cols).rev() {
        let others: Vec<usize> = (0..cols).filter(|&j| j != pivot).collect();
        let a = Mat::from_fn(d, d, |i, j| atoms[others[j]].position.powi(orders[i] as i32) / scale[i]);
        let rhs: Vec<f64> = (0..d).map(|i| -atoms[pivot].position.powi(orders[i] as i32) / scale[i]).collect();
        if let Some(x) = least_squares(&a, &rhs, 0.0) {
            let mut z = vec![0.0; cols];
            for (j, &o) in others.iter().enumerate() {
                z[o] = x[j];
            }
            z[pivot] = 1.0;
            return Some(z);
        }
    }
    None
}

/// Caratheodory reduction to at most `d` atoms with the same moments.
fn carathéodory(measure: AtomicMeasure, c: &MomentVector) -> AtomicMeasure {
    let orders = c.exponents().orders();
    let d = orders.len();
    let scale: Vec<f64> = c.values().iter().map(|&v| if v > 0.0 { v } else { c.max_abs().max(1.0) }).collect();
    let mut atoms: Vec<Atom> = measure.atoms().to_vec();
    if orders[0] > 0 {
        atoms.retain(|a| a.position > 0.0);
    }
    while atoms.len() > d {
        let Some(mut z) = null_direction(orders, &scale, &atoms[..d + 1]) else { break };
        if !z.iter().any(|&x| x > 0.0) {
            z.iter_mut().for_each(|x| *x = -*x);
        }
        let (idx, alpha) = z
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(j, &x)| (j, atoms[j].mass / x))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        for (j, zj) in z.iter().enumerate() {
            atoms[j].mass -= alpha * zj;
        }
        atoms.remove(idx);
        atoms.retain(|a| a.mass > 0.0);
    }
    AtomicMeasure::new(atoms).unwrap_or(measure)
}

fn analyze(c: &MomentVector, config: &SolverConfig) -> Result<Analysis> {
    Solver::new(config).analyze(c)
}

/// Classifies `c` as interior, boundary or outside the moment cone.
pub fn classify(c: &MomentVector, config: &SolverConfig) -> Result<Classification> {
    analyze(c, config).map(|a| a.classification)
}

/// Classification together with solver work counters.
pub fn classify_with_diagnostics(
    c: &MomentVector,
    config: &SolverConfig,
) -> Result<(Classification, SolveDiagnostics)> {
    analyze(c, config).map(|a| (a.classification, a.diagnostics))
}

/// Grid LP oracle: a nonnegative combination of grid columns reproducing `c`
/// within `feasibility_tol` (relative per entry), or `None`.
pub fn grid_feasible(c: &MomentVector, config: &SolverConfig) -> Result<Option<AtomicMeasure>> {
    config.validate()?;
    if c.is_zero() {
        return Ok(Some(AtomicMeasure::empty()));
    }
    let frame = Frame::new(c);
    let include_zero = config.grid.include_zero && c.exponents().first() == 0;
    let sol = solve_grid(&frame, &config.grid, include_zero, Objective::Feasibility);
    let atoms = Atoms { zero: (sol.zero > 0.0).then_some(sol.zero), positive: sol.support, fixed: None };
    let Some(m) = frame.to_measure(&atoms) else { return Ok(None) };
    Ok((frame::relative_residual(&m, c) <= config.feasibility_tol).then_some(m))
}

/// Merges near-coincident atoms, reduces to at most `d` atoms and then greedily
/// to the fewest atoms that still reproduce `c`.
pub fn merge_and_prune(measure: &AtomicMeasure, c: &MomentVector, config: &SolverConfig) -> Result<AtomicMeasure> {
    config.validate()?;
    if c.is_zero() {
        return Ok(AtomicMeasure::empty());
    }
    let mut merged: Vec<Atom> = Vec::new();
    for a in measure.atoms() {
        match merged.last_mut() {
            Some(prev) if prev.position > 0.0 && a.position - prev.position <= MERGE_TOL * a.position => {
                let mass = prev.mass + a.mass;
                prev.position = (prev.position * prev.mass + a.position * a.mass) / mass;
                prev.mass = mass;
            }
            _ => merged.push(*a),
        }
    }
    let reduced = carathéodory(AtomicMeasure::new(merged)?, c);
    if c.values().contains(&0.0) {
        let res = frame::relative_residual(&reduced, c);
        return if res <= config.feasibility_tol { Ok(reduced) } else { Err(Error::ReductionFailed(res)) };
    }

    let frame = Frame::new(c);
    let mut solver = Solver::new(config);
    let mut current = solver.fit(&frame, &frame.to_atoms(&reduced));
    if current.residual > config.feasibility_tol || !well_formed(&current.atoms) {
        current = FitResult {
            atoms: frame.to_atoms(&reduced),
            residual: frame.residual(&frame.to_atoms(&reduced)),
            iterations: 0,
            converged: false,
        };
    }
    loop {
        let atoms = &current.atoms;
        let mut candidates = Vec::new();
        if atoms.zero.is_some() {
            candidates.push(Atoms { zero: None, ..atoms.clone() });
        }
        for i in 0..atoms.positive.len() {
            let mut drop = atoms.clone();
            drop.positive.remove(i);
            candidates.push(drop);
            if i + 1 < atoms.positive.len() {
                let mut merge = atoms.clone();
                let (u1, w1) = merge.positive[i];
                let (u2, w2) = merge.positive.remove(i + 1);
                merge.positive[i] = ((u1 * w1 + u2 * w2) / (w1 + w2), w1 + w2);
                candidates.push(merge);
            }
            if i == 0 && atoms.zero.is_none() && frame.shift == 0 {
                let mut collapse = atoms.clone();
                let (_, w) = collapse.positive.remove(0);
                collapse.zero = Some(w);
                candidates.push(collapse);
            }
        }
        let best = candidates
            .into_iter()
            .filter(|a| a.twice_index() > 0)
            .map(|a| solver.fit(&frame, &a))
            .filter(|r| well_formed(&r.atoms) && r.residual <= config.feasibility_tol)
            .min_by(|a, b| a.residual.total_cmp(&b.residual));
        match best {
            Some(b) => current = b,
            None => break,
        }
    }
    let out = frame.to_measure(&current.atoms).map(|m| polish_masses(m, c));
    match out {
        Some(m) => {
            let res = frame::relative_residual(&m, c);
            if res <= config.feasibility_tol {
                Ok(m)
            } else {
                Err(Error::ReductionFailed(res))
            }
        }
        None => Err(Error::ReductionFailed(f64::INFINITY)),
    }
}

/// Representation of an interior point with index exactly `d/2`.
pub fn principal_representation(c: &MomentVector, config: &SolverConfig) -> Result<AtomicMeasure> {
    if c.exponents().first() != 0 {
        return Err(Error::FirstOrderNotZero);
    }
    let mut solver = Solver::new(config);
    let a = solver.analyze(c)?;
    match (a.classification.status, a.principal_found) {
        (Status::Interior, true) => Ok(a.classification.witness.expect("interior witness")),
        (Status::Interior, false) => Err(Error::NewtonDiverged(solver.principal_residual)),
        _ => Err(Error::NotInterior),
    }
}

/// Representation of an interior point with index `(d+1)/2` having `t_star` as a root.
/// Top-order mass left over by the representation through `t_star` of the
/// first `d - 1` orders, when that representation exists and the remainder is
/// positive. The canonical representation then needs an atom at infinity.
fn escaping_mass(solver: &mut Solver, c: &MomentVector, t_star: f64) -> Option<f64> {
    let d = c.len();
    if d < 2 {
        return None;
    }
    let head = c.slice(0..d - 1).ok()?;
    let frame = Frame::new(&head);
    let (zero, positive) = if d % 2 == 1 { (true, (d - 1) / 2) } else { (false, d / 2) };
    let (res, _) = solver.solve_structure(&frame, zero, positive, Some(t_star / frame.sigma), Vec::new());
    let res = res.filter(|r| !degenerate(&frame, &r.atoms, solver.cfg.boundary_band))?;
    let top = c.values()[d - 1];
    let mass = top - frame.to_measure(&res.atoms)?.moment(c.exponents().last());
    (mass > solver.cfg.boundary_band * top).then_some(mass)
}

pub fn canonical_representation(c: &MomentVector, t_star: f64, config: &SolverConfig) -> Result<AtomicMeasure> {
    if c.exponents().first() != 0 {
        return Err(Error::FirstOrderNotZero);
    }
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(Error::InvalidValue(t_star));
    }
    let mut solver = Solver::new(config);
    let a = solver.analyze(c)?;
    if a.classification.status != Status::Interior {
        return Err(Error::NotInterior);
    }
    let (Some(frame), true) = (a.frame, a.principal_found) else {
        return Err(Error::NewtonDiverged(solver.principal_residual));
    };
    let d = frame.orders.len();
    let v_star = t_star / frame.sigma;
    let principal = a.principal.unwrap_or_default();
    if principal.positive.iter().any(|&(v, _)| (v_star / v - 1.0).abs() <= ROOT_COINCIDENCE_TOL) {
        return Err(Error::DegenerateRoot(t_star));
    }

    let (zero, positive) = if d % 2 == 1 { (false, d.div_ceil(2)) } else { (true, d / 2) };
    // principal atoms plus the prescribed root as an extra start
    let mut seed = principal.clone();
    if !zero {
        if let Some(m0) = seed.zero.take() {
            let lowest = seed.positive.first().map_or(1.0, |a| a.0);
            seed.positive.insert(0, ((0.1 * lowest).min(0.5 * v_star), m0));
        }
    } else if seed.zero.is_none() {
        seed.zero = Some(1e-3 * frame.target[0]);
    }
    seed.positive = grid::adjust_count(
        seed.positive.into_iter().filter(|a| (a.0 / v_star - 1.0).abs() > 1e-3).collect(),
        positive - 1,
    );
    seed.positive.push((v_star, 1e-2 * frame.target[0]));
    seed.sort();
    seed.fixed = seed.positive.iter().position(|a| a.0 == v_star);

    let (res, attempts) = solver.solve_structure(&frame, zero, positive, Some(v_star), vec![seed]);
    let collapsed = res.as_ref().is_some_and(|r| degenerate(&frame, &r.atoms, config.boundary_band));
    let Some(res) = res.filter(|_| !collapsed) else {
        if let Some(mass) = escaping_mass(&mut solver, c, t_star) {
            return Err(Error::RootBeyondSupport { t_star, mass });
        }
        if collapsed {
            return Err(Error::DegenerateRoot(t_star));
        }
        let best = attempts.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
        return Err(Error::NewtonDiverged(best));
    };
    let fixed = res.atoms.fixed.expect("pinned atom");
    let mut atoms: Vec<Atom> = Vec::new();
    if let Some(m0) = res.atoms.zero {
        atoms.push(Atom::new(0.0, m0 * frame.nu));
    }
    for (s, &(v, m)) in res.atoms.positive.iter().enumerate() {
        let u = if s == fixed { t_star } else { v * frame.sigma };
        atoms.push(Atom::new(u, m * frame.nu));
    }
    atoms.sort_by(|x, y| x.position.total_cmp(&y.position));
    let measure = AtomicMeasure::new(atoms).map_err(|_| Error::DegenerateRoot(t_star))?;
    Ok(polish_masses(measure, c))
}
