//! Damped Newton fitting of atomic measures in log coordinates.
//!
//! Unknowns are `log w` for every atom and `log u` for every free positive
//! atom, so positivity holds without constraints. Residuals are relative:
//! `R_i = (sum_s w_s u_s^{k_i} - c_i) / c_i`. Square systems reduce to plain
//! Newton; over- and under-determined ones are handled by Levenberg damping.

use crate::linalg::{least_squares, Mat};

const MAX_LOG_POSITION: f64 = 30.0;
const MIN_LOG_MASS: f64 = -300.0;
const MAX_LOG_MASS: f64 = 60.0;
const MAX_STEP: f64 = 3.0;
const HALVINGS: usize = 30;

/// Atoms in the solver frame: optional zero atom plus positive atoms.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct Atoms {
    pub zero: Option<f64>,
    /// `(position, mass)` pairs, positions > 0.
    pub positive: Vec<(f64, f64)>,
    /// Index into `positive` of an atom whose position is held fixed.
    pub fixed: Option<usize>,
}

impl Atoms {
    pub fn twice_index(&self) -> usize {
        2 * self.positive.len() + usize::from(self.zero.is_some())
    }

    pub fn moment(&self, k: u32) -> f64 {
        let z = if k == 0 { self.zero.unwrap_or(0.0) } else { 0.0 };
        z + self.positive.iter().map(|&(u, w)| w * u.powi(k as i32)).sum::<f64>()
    }

    /// Max relative residual against `target`.
    pub fn residual(&self, orders: &[u32], target: &[f64]) -> f64 {
        orders.iter().zip(target).map(|(&k, &c)| ((self.moment(k) - c) / c).abs()).fold(0.0, f64::max)
    }

    pub fn sort(&mut self) {
        let fixed_pos = self.fixed.map(|i| self.positive[i].0);
        self.positive.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(p) = fixed_pos {
            self.fixed = self.positive.iter().position(|a| a.0 == p);
        }
    }

    pub fn param_count(&self) -> usize {
        self.params().len()
    }

    fn params(&self) -> Vec<f64> {
        let mut theta = Vec::new();
        if let Some(w0) = self.zero {
            theta.push(w0.ln());
        }
        for (s, &(u, w)) in self.positive.iter().enumerate() {
            theta.push(w.ln());
            if self.fixed != Some(s) {
                theta.push(u.ln());
            }
        }
        theta
    }

    fn with_params(&self, theta: &[f64]) -> Atoms {
        let mut it = theta.iter();
        let mut out = self.clone();
        if out.zero.is_some() {
            out.zero = Some(it.next().unwrap().clamp(MIN_LOG_MASS, MAX_LOG_MASS).exp());
        }
        for (s, atom) in out.positive.iter_mut().enumerate() {
            atom.1 = it.next().unwrap().clamp(MIN_LOG_MASS, MAX_LOG_MASS).exp();
            if self.fixed != Some(s) {
                atom.0 = it.next().unwrap().clamp(-MAX_LOG_POSITION, MAX_LOG_POSITION).exp();
            }
        }
        out
    }

    fn residuals(&self, orders: &[u32], target: &[f64]) -> Vec<f64> {
        orders.iter().zip(target).map(|(&k, &c)| (self.moment(k) - c) / c).collect()
    }

    fn jacobian(&self, orders: &[u32], target: &[f64]) -> Mat {
        let n = self.params().len();
        let mut j = Mat::zeros(orders.len(), n);
        for (i, (&k, &c)) in orders.iter().zip(target).enumerate() {
            let mut col = 0;
            if let Some(w0) = self.zero {
                j[(i, col)] = if k == 0 { w0 / c } else { 0.0 };
                col += 1;
            }
            for (s, &(u, w)) in self.positive.iter().enumerate() {
                let term = w * u.powi(k as i32) / c;
                j[(i, col)] = term;
                col += 1;
                if self.fixed != Some(s) {
                    j[(i, col)] = k as f64 * term;
                    col += 1;
                }
            }
        }
        j
    }
}

#[derive(Debug, Clone)]
pub(crate) struct FitResult {
    pub atoms: Atoms,
    /// Max relative residual.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits the structure of `init` to `target` at `orders`.
pub(crate) fn fit(orders: &[u32], target: &[f64], init: &Atoms, tol: f64, max_iter: usize) -> FitResult {
    let mut atoms = init.clone();
    let mut theta = atoms.params();
    let mut r = atoms.residuals(orders, target);
    let mut f = sum_sq(&r);
    let mut mu = 0.0_f64;
    let mut iterations = 0;

    if theta.is_empty() {
        let residual = max_abs(&r);
        return FitResult { atoms, residual, iterations, converged: residual <= tol };
    }

    while iterations < max_iter {
        if max_abs(&r) <= tol || !f.is_finite() {
            break;
        }
        iterations += 1;
        let jac = atoms.jacobian(orders, target);
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let square = jac.rows() == jac.cols();
        let damping = if mu == 0.0 && !square && jac.rows() < jac.cols() { 1e-12 } else { mu };
        let Some(mut delta) = least_squares(&jac, &rhs, damping) else {
            mu = if mu == 0.0 { 1e-10 } else { mu * 100.0 };
            if mu > 1e12 {
                break;
            }
            continue;
        };
        let big = max_abs(&delta);
        if big > MAX_STEP {
            delta.iter_mut().for_each(|d| *d *= MAX_STEP / big);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..HALVINGS {
            let trial: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + alpha * d).collect();
            let cand = atoms.with_params(&trial);
            let rc = cand.residuals(orders, target);
            let fc = sum_sq(&rc);
            if fc.is_finite() && fc < f {
                accepted = Some((trial, cand, rc, fc));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((t, a, rc, fc)) => {
                let progress = f - fc;
                theta = t;
                atoms = a;
                r = rc;
                mu = if mu < 1e-14 { 0.0 } else { mu / 10.0 };
                if progress <= 1e-30 * f.max(1e-300) {
                    break;
                }
                f = fc;
            }
            None => {
                mu = if mu == 0.0 { 1e-8 } else { mu * 100.0 };
                if mu > 1e12 {
                    break;
                }
            }
        }
    }
    atoms.sort();
    let residual = max_abs(&r);
    FitResult { atoms, residual, iterations, converged: residual <= tol }
}

/// Masses solved exactly for `positions`, and the resulting relative residuals.
fn project(orders: &[u32], target: &[f64], zero: bool, positions: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let cols = usize::from(zero) + positions.len();
    let a = Mat::from_fn(orders.len(), cols, |i, j| {
        let k = orders[i] as i32;
        let v = match (zero, j) {
            (true, 0) => f64::from(u8::from(k == 0)),
            (true, _) => positions[j - 1].powi(k),
            (false, _) => positions[j].powi(k),
        };
        v / target[i]
    });
    let ones = vec![1.0; orders.len()];
    let masses = least_squares(&a, &ones, 0.0)?;
    let r: Vec<f64> = (0..orders.len()).map(|i| (0..cols).map(|j| a[(i, j)] * masses[j]).sum::<f64>() - 1.0).collect();
    masses.iter().all(|m| m.is_finite()).then_some((masses, r))
}

/// Variable projection: Levenberg-Marquardt on the log positions only, with
/// the masses eliminated by linear least squares. Robust where masses and
/// positions are badly scaled against each other; masses may come out
/// negative, which callers must check.
pub(crate) fn fit_projected(orders: &[u32], target: &[f64], init: &Atoms, tol: f64, max_iter: usize) -> FitResult {
    let zero = init.zero.is_some();
    let free: Vec<usize> = (0..init.positive.len()).filter(|&s| init.fixed != Some(s)).collect();
    let positions_of = |theta: &[f64]| {
        let mut p: Vec<f64> = init.positive.iter().map(|a| a.0).collect();
        for (&s, t) in free.iter().zip(theta) {
            p[s] = t.clamp(-MAX_LOG_POSITION, MAX_LOG_POSITION).exp();
        }
        p
    };
    let assemble = |theta: &[f64], masses: &[f64]| {
        let p = positions_of(theta);
        let mut out = init.clone();
        out.zero = zero.then(|| masses[0]);
        for (s, atom) in out.positive.iter_mut().enumerate() {
            *atom = (p[s], masses[usize::from(zero) + s]);
        }
        out
    };
    let evaluate = |theta: &[f64]| project(orders, target, zero, &positions_of(theta));

    let mut theta: Vec<f64> = free.iter().map(|&s| init.positive[s].0.ln()).collect();
    let Some((mut masses, mut r)) = evaluate(&theta) else {
        return FitResult { atoms: init.clone(), residual: f64::INFINITY, iterations: 0, converged: false };
    };
    let mut f = sum_sq(&r);
    let mut mu = -1.0_f64;
    let mut nu = 2.0;
    let mut iterations = 0;
    while iterations < max_iter && max_abs(&r) > tol && !theta.is_empty() {
        iterations += 1;
        let h = 1e-5;
        let mut jac = Mat::zeros(r.len(), theta.len());
        for j in 0..theta.len() {
            let (mut up, mut down) = (theta.clone(), theta.clone());
            up[j] += h;
            down[j] -= h;
            let (Some((_, ru)), Some((_, rd))) = (evaluate(&up), evaluate(&down)) else {
                break;
            };
            (0..r.len()).for_each(|i| jac[(i, j)] = (ru[i] - rd[i]) / (2.0 * h));
        }
        if mu < 0.0 {
            let diag = (0..theta.len()).map(|j| (0..r.len()).map(|i| jac[(i, j)].powi(2)).sum::<f64>());
            mu = 1e-3 * diag.fold(0.0, f64::max);
        }
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let Some(mut delta) = least_squares(&jac, &rhs, mu) else { break };
        let big = max_abs(&delta);
        if big > MAX_STEP {
            delta.iter_mut().for_each(|d| *d *= MAX_STEP / big);
        }
        let linear: Vec<f64> =
            (0..r.len()).map(|i| r[i] + (0..theta.len()).map(|j| jac[(i, j)] * delta[j]).sum::<f64>()).collect();
        let predicted = f - sum_sq(&linear);
        let trial: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + d).collect();
        let actual = evaluate(&trial).map(|(m, rc)| {
            let fc = sum_sq(&rc);
            (m, rc, fc)
        });
        match actual.filter(|a| a.2.is_finite() && a.2 < f) {
            Some((m, rc, fc)) if predicted > 0.0 => {
                let rho = (f - fc) / predicted;
                (theta, masses, r, f) = (trial, m, rc, fc);
                mu *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                nu = 2.0;
            }
            _ => {
                mu *= nu;
                nu *= 2.0;
                if !mu.is_finite() || mu > 1e30 {
                    break;
                }
            }
        }
    }
    let mut atoms = assemble(&theta, &masses);
    atoms.sort();
    let residual = max_abs(&r);
    FitResult { atoms, residual, iterations, converged: residual <= tol }
}

/// Nonnegative-clipped least-squares masses for fixed positions.
pub(crate) fn masses_for_positions(orders: &[u32], target: &[f64], zero: bool, positions: &[f64]) -> Atoms {
    let n = positions.len() + usize::from(zero);
    let a = Mat::from_fn(orders.len(), n, |i, j| {
        let k = orders[i];
        let v = if zero && j == 0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            positions[j - usize::from(zero)].powi(k as i32)
        };
        v / target[i]
    });
    let ones = vec![1.0; orders.len()];
    let sol = least_squares(&a, &ones, 1e-10).unwrap_or_else(|| vec![1.0 / n as f64; n]);
    let floor = 1e-3 / n as f64;
    let mut out = Atoms::default();
    let mut it = sol.into_iter();
    if zero {
        out.zero = Some(it.next().unwrap().max(floor * target[0]));
    }
    for &u in positions {
        let w = it.next().unwrap();
        // keep the initial guess in the scale of the lowest moment it feeds
        let fallback = floor * target[0] / u.powi(orders[0] as i32).max(1e-300);
        out.positive.push((u, if w > 0.0 { w } else { fallback }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_fit_recovers_principal() {
        // c = (2,1,1) on (0,1,2): zero atom 1 + atom (1,1)
        let init = Atoms { zero: Some(0.5), positive: vec![(2.0, 0.3)], fixed: None };
        let res = fit(&[0, 1, 2], &[2.0, 1.0, 1.0], &init, 1e-12, 100);
        assert!(res.converged, "{res:?}");
        assert!((res.atoms.zero.unwrap() - 1.0).abs() < 1e-10);
        assert!((res.atoms.positive[0].0 - 1.0).abs() < 1e-10);
        assert!((res.atoms.positive[0].1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fixed_position_stays_bit_exact() {
        let init = Atoms { zero: None, positive: vec![(0.5, 1.0), (2.0, 0.5)], fixed: Some(1) };
        let res = fit(&[0, 1, 2], &[2.0, 1.0, 1.0], &init, 1e-12, 100);
        assert!(res.converged);
        assert_eq!(res.atoms.positive[res.atoms.fixed.unwrap()].0, 2.0);
        assert!((res.atoms.positive[0].0 - 1.0 / 3.0).abs() < 1e-10);
        assert!((res.atoms.positive[0].1 - 1.8).abs() < 1e-10);
    }

    #[test]
    fn overdetermined_fit_reports_residual() {
        // (1,2,1) is not representable by a single atom
        let init = Atoms { zero: None, positive: vec![(1.0, 1.0)], fixed: None };
        let res = fit(&[0, 1, 2], &[1.0, 2.0, 1.0], &init, 1e-12, 100);
        assert!(!res.converged);
        assert!(res.residual > 0.1);
    }
}
