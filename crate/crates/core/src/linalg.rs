//! Small dense linear algebra for systems of size <= ~16.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(mut a: Mat) -> f64 {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs())).unwrap();
        if a[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap_rows(p, k);
            det = -det;
        }
        let pivot = a[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            if f != 0.0 {
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
    }
    det
}

/// Solves `min ||a x - b||^2 + damping ||x||^2` by Householder QR.
///
/// Returns `None` when the (damped) system is numerically rank deficient.
pub fn least_squares(a: &Mat, b: &[f64], damping: f64) -> Option<Vec<f64>> {
    let n = a.cols;
    let extra = if damping > 0.0 { n } else { 0 };
    let m = a.rows + extra;
    if m < n {
        return None;
    }
    let mut q = Mat::zeros(m, n);
    let mut rhs = vec![0.0; m];
    for i in 0..a.rows {
        for j in 0..n {
            q[(i, j)] = a[(i, j)];
        }
        rhs[i] = b[i];
    }
    let sd = damping.sqrt();
    for j in 0..extra {
        q[(a.rows + j, j)] = sd;
    }

    let scale = (0..n).map(|j| (0..m).map(|i| q[(i, j)] * q[(i, j)]).sum::<f64>().sqrt()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }

    for k in 0..n {
        let norm = (k..m).map(|i| q[(i, k)] * q[(i, k)]).sum::<f64>().sqrt();
        if norm <= 1e-14 * scale {
            return None;
        }
        let alpha = if q[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| q[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * q[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                q[(i, j)] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * rhs[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            rhs[i] -= f * v[i - k];
        }
    }

    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| q[(k, j)] * x[j]).sum();
        x[k] = (rhs[k] - s) / q[(k, k)];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
