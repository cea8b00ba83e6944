#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Cubic spline through `(x, y)` by solving the full `4(n-1)` coefficient
/// system; piece `i` is `a + b s + c s^2 + e s^3` with `s = t - x[i]`.
/// `not_a_knot` selects third-derivative continuity at the second and
/// second-to-last knots, otherwise zero second derivatives at the ends.
pub fn dense_spline(x: &[f64], y: &[f64], not_a_knot: bool) -> impl Fn(f64) -> f64 {
    let n = x.len();
    let m = n - 1;
    let size = 4 * m;
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    let mut row = 0;
    for i in 0..m {
        let h = x[i + 1] - x[i];
        a[(row, 4 * i)] = 1.0;
        rhs[row] = y[i];
        row += 1;
        for p in 0..4 {
            a[(row, 4 * i + p)] = h.powi(p as i32);
        }
        rhs[row] = y[i + 1];
        row += 1;
    }
    for i in 0..m - 1 {
        let h = x[i + 1] - x[i];
        // first and second derivative continuity at x[i+1]
        a[(row, 4 * i + 1)] = 1.0;
        a[(row, 4 * i + 2)] = 2.0 * h;
        a[(row, 4 * i + 3)] = 3.0 * h * h;
        a[(row, 4 * (i + 1) + 1)] = -1.0;
        row += 1;
        a[(row, 4 * i + 2)] = 2.0;
        a[(row, 4 * i + 3)] = 6.0 * h;
        a[(row, 4 * (i + 1) + 2)] = -2.0;
        row += 1;
    }
    if not_a_knot {
        a[(row, 3)] = 1.0;
        a[(row, 7)] = -1.0;
        row += 1;
        a[(row, 4 * (m - 2) + 3)] = 1.0;
        a[(row, 4 * (m - 1) + 3)] = -1.0;
    } else {
        a[(row, 2)] = 1.0;
        row += 1;
        let h = x[m] - x[m - 1];
        a[(row, 4 * (m - 1) + 2)] = 2.0;
        a[(row, 4 * (m - 1) + 3)] = 6.0 * h;
    }
    let coef = a.lu().solve(&rhs).expect("spline system is singular");
    let x = x.to_vec();
    move |t| {
        let i = x[1..x.len() - 1].partition_point(|&k| k <= t);
        let s = t - x[i];
        coef[4 * i] + s * (coef[4 * i + 1] + s * (coef[4 * i + 2] + s * coef[4 * i + 3]))
    }
}

/// Largest |det| over all `cols`-row subsets of `m`.
pub fn brute_max_det(m: &DMatrix<f64>) -> f64 {
    let (rows, cols) = m.shape();
    let mut best: f64 = 0.0;
    let mut idx: Vec<usize> = (0..cols).collect();
    loop {
        let sub = DMatrix::from_fn(cols, cols, |i, j| m[(idx[i], j)]);
        best = best.max(sub.determinant().abs());
        // next combination
        let mut k = cols;
        while k > 0 && idx[k - 1] == rows - cols + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return best;
        }
        idx[k - 1] += 1;
        for j in k..cols {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn det_of_rows(m: &DMatrix<f64>, rows: &[usize]) -> f64 {
    let cols = m.ncols();
    DMatrix::from_fn(cols, cols, |i, j| m[(rows[i], j)]).determinant()
}

/// Exhaustive grid argmin of `f` over the product of `grids`.
pub fn grid_argmin(grids: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let mut idx = vec![0usize; grids.len()];
    let mut best = (Vec::new(), f64::INFINITY);
    loop {
        let q: Vec<f64> = idx.iter().enumerate().map(|(k, &j)| grids[k][j]).collect();
        let v = f(&q);
        if v < best.1 {
            best = (q, v);
        }
        let mut k = 0;
        loop {
            if k == grids.len() {
                return best;
            }
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn rosenbrock(q: &[f64]) -> f64 {
    (1.0 - q[0]).powi(2) + 100.0 * (q[1] - q[0] * q[0]).powi(2)
}

/// Parameters and forcing for the manufactured solution
/// `u*(x, t) = 2 + cos(pi (x - l1) / L) exp(-t)`.
pub struct Manufactured {
    pub d: f64,
    pub k: f64,
    pub r: f64,
    pub l1: f64,
    pub l2: f64,
}

impl Manufactured {
    pub fn exact(&self, x: f64, t: f64) -> f64 {
        let w = std::f64::consts::PI / (self.l2 - self.l1);
        2.0 + (w * (x - self.l1)).cos() * (-t).exp()
    }

    /// `g = u*_t - D u*_xx - (1 - u*/K) r u*`
    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        let w = std::f64::consts::PI / (self.l2 - self.l1);
        let c = (w * (x - self.l1)).cos() * (-t).exp();
        let u = 2.0 + c;
        -c + self.d * w * w * c - (1.0 - u / self.k) * self.r * u
    }
}
