//! Dense two-phase tableau simplex for `min c^T x  s.t.  A x = b, x >= 0`.
//!
//! Sized for a handful of rows and a few thousand columns (grid discretizations
//! of the moment curve).

use crate::linalg::Mat;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Phase-one optimum: sum of artificial variables (L1 constraint violation).
    pub infeasibility: f64,
    pub objective: f64,
    pub unbounded: bool,
    pub pivots: usize,
}

struct Tableau {
    m: usize,
    n: usize,
    // m rows of [structural | artificial | rhs]
    t: Mat,
    // reduced costs for every column, plus -objective in the last slot
    z: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n + self.m + 1
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[(i, self.n + self.m)]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width();
        let p = self.t[(r, s)];
        for j in 0..w {
            self.t[(r, j)] /= p;
        }
        for i in 0..self.m {
            if i != r {
                let f = self.t[(i, s)];
                if f != 0.0 {
                    for j in 0..w {
                        let v = self.t[(r, j)];
                        self.t[(i, j)] -= f * v;
                    }
                }
            }
        }
        let f = self.z[s];
        if f != 0.0 {
            for j in 0..w {
                self.z[j] -= f * self.t[(r, j)];
            }
        }
        self.basis[r] = s;
        self.pivots += 1;
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width();
        self.z = vec![0.0; w];
        self.z[..cost.len()].copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.z[j] -= cb * self.t[(i, j)];
                }
            }
        }
    }

    /// Runs simplex iterations over the columns `eligible`; returns false when unbounded.
    fn optimize(&mut self, eligible: usize, max_pivots: usize) -> bool {
        let mut streak = 0;
        for _ in 0..max_pivots {
            let entering = if streak < DEGENERATE_STREAK {
                (0..eligible).filter(|&j| self.z[j] < -COST_TOL).min_by(|&a, &b| self.z[a].total_cmp(&self.z[b]))
            } else {
                (0..eligible).find(|&j| self.z[j] < -COST_TOL)
            };
            let Some(s) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.t[(i, s)];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    match leave {
                        Some((r, best)) if ratio > best || (ratio == best && self.basis[i] > self.basis[r]) => {}
                        _ => leave = Some((i, ratio)),
                    }
                }
            }
            let Some((r, ratio)) = leave else { return false };
            streak = if ratio <= 0.0 { streak + 1 } else { 0 };
            self.pivot(r, s);
        }
        true
    }
}

/// Solves the standard-form LP. Rows with negative right-hand side are negated internally.
pub fn solve(a: &Mat, b: &[f64], cost: &[f64]) -> LpSolution {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    assert_eq!(cost.len(), n);
    let w = n + m + 1;
    let mut t = Mat::zeros(m, w);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, n + m)] = sign * b[i];
    }
    let mut tab = Tableau { m, n, t, z: Vec::new(), basis: (n..n + m).collect(), pivots: 0 };
    let max_pivots = 50 * (n + m);

    let mut phase_one = vec![0.0; n + m];
    phase_one[n..].iter_mut().for_each(|c| *c = 1.0);
    tab.set_costs(&phase_one);
    tab.optimize(n + m, max_pivots);
    let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.rhs(i).max(0.0)).sum();

    // drive zero-level artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n && tab.rhs(i).abs() <= PIVOT_TOL {
            if let Some(j) = (0..n).find(|&j| tab.t[(i, j)].abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }

    let mut unbounded = false;
    let mut full_cost = cost.to_vec();
    full_cost.extend(std::iter::repeat_n(0.0, m));
    tab.set_costs(&full_cost);
    if infeasibility <= 1e-9 {
        unbounded = !tab.optimize(n, max_pivots);
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let objective = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpSolution { x, infeasibility, objective, unbounded, pivots: tab.pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = Mat::from_fn(2, 4, |i, j| [[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]][i][j]);
        let sol = solve(&a, &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0]);
        assert!(sol.infeasibility < 1e-12);
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);
        assert!((sol.objective + 2.8).abs() < 1e-12);
    }

    #[test]
    fn infeasible_lp() {
        // x + y = 1 and x + y = 2
        let a = Mat::from_fn(2, 2, |_, _| 1.0);
        let sol = solve(&a, &[1.0, 2.0], &[0.0, 0.0]);
        assert!((sol.infeasibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_lp() {
        // min -x s.t. x - y = 0
        let a = Mat::from_fn(1, 2, |_, j| [1.0, -1.0][j]);
        let sol = solve(&a, &[0.0], &[-1.0, 0.0]);
        assert!(sol.unbounded);
    }
}
