//! Piecewise-cubic interpolation through the source knots.
//!
//! The spline is stored in second-derivative ("moment") form: on each segment
//! `[x_i, x_{i+1}]` the interpolant is
//!
//! ```text
//! S(t) = a y_i + b y_{i+1} + ((a^3 - a) M_i + (b^3 - b) M_{i+1}) h_i^2 / 6
//! a = (x_{i+1} - t) / h_i,  b = (t - x_i) / h_i
//! ```
//!
//! Points outside the knot range are evaluated with the nearest boundary
//! polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// End condition closing the moment system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplineBoundary {
    /// Third derivative continuous across the second and second-to-last knots.
    #[default]
    NotAKnot,
    /// Zero second derivative at both end knots.
    Natural,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    moments: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64], boundary: SplineBoundary) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::InvalidParametrization(format!(
                "a spline needs at least 2 knots, got {}",
                x.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParametrization(
                "knots must be strictly increasing".into(),
            ));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParametrization(
                "knots and values must be finite".into(),
            ));
        }
        let moments = match (boundary, x.len()) {
            (_, 2) => vec![0.0; 2],
            (SplineBoundary::NotAKnot, 3) => {
                // A single parabola satisfies both end conditions.
                let h0 = x[1] - x[0];
                let h1 = x[2] - x[1];
                let c = 2.0 * ((y[2] - y[1]) / h1 - (y[1] - y[0]) / h0) / (h0 + h1);
                vec![c; 3]
            }
            (SplineBoundary::NotAKnot, _) => not_a_knot_moments(x, y),
            (SplineBoundary::Natural, _) => natural_moments(x, y),
        };
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            moments,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    /// Second derivatives at the knots.
    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.moments[i] + (b * b * b - b) * self.moments[i + 1]) * h * h
                / 6.0
    }

    pub fn eval_many(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    fn segment(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        // index of the first knot strictly greater than t, minus one
        let upper = self.x.partition_point(|&k| k <= t);
        upper.saturating_sub(1).min(last)
    }
}

fn rhs(x: &[f64], y: &[f64], i: usize) -> f64 {
    let h0 = x[i] - x[i - 1];
    let h1 = x[i + 1] - x[i];
    6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0)
}

fn natural_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = n - 2;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut r = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        sub[k] = x[i] - x[i - 1];
        diag[k] = 2.0 * (x[i + 1] - x[i - 1]);
        sup[k] = x[i + 1] - x[i];
        r[k] = rhs(x, y, i);
    }
    let inner = thomas(&sub, &diag, &sup, &r);
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    out.extend(inner);
    out.push(0.0);
    out
}

fn not_a_knot_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m = n - 2;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut r = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        sub[k] = h[i - 1];
        diag[k] = 2.0 * (h[i - 1] + h[i]);
        sup[k] = h[i];
        r[k] = rhs(x, y, i);
    }
    // Eliminate M_0 = ((h0 + h1) M_1 - h0 M_2) / h1 from the first row.
    diag[0] += h[0] * (h[0] + h[1]) / h[1];
    sup[0] -= h[0] * h[0] / h[1];
    // Eliminate M_{n-1} from the last row the same way.
    let (hl, hp) = (h[n - 2], h[n - 3]);
    diag[m - 1] += hl * (hp + hl) / hp;
    sub[m - 1] -= hl * hl / hp;

    let inner = thomas(&sub, &diag, &sup, &r);
    let first = ((h[0] + h[1]) * inner[0] - h[0] * inner[1]) / h[1];
    let last = ((hp + hl) * inner[m - 1] - hl * inner[m - 2]) / hp;
    let mut out = Vec::with_capacity(n);
    out.push(first);
    out.extend(inner);
    out.push(last);
    out
}

/// Tridiagonal solve; `sub[0]` and `sup[m-1]` are ignored.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; m];
    out[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_knots_are_linear() {
        let s = CubicSpline::new(&[1.0, 6.0], &[2.0, 7.0], SplineBoundary::NotAKnot).unwrap();
        assert!((s.eval(3.5) - 4.5).abs() < 1e-14);
        assert!((s.eval(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn three_knots_not_a_knot_is_the_parabola() {
        let f = |t: f64| 0.5 * t * t - t + 3.0;
        let x = [0.0, 1.5, 4.0];
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::new(&x, &y, SplineBoundary::NotAKnot).unwrap();
        for t in [-1.0, 0.3, 2.2, 3.9, 5.0] {
            assert!((s.eval(t) - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn not_a_knot_reproduces_cubics() {
        let f = |t: f64| t * t * t - 2.0 * t * t + 0.5;
        let x = [1.0, 1.3, 2.0, 2.2, 3.5, 4.0];
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::new(&x, &y, SplineBoundary::NotAKnot).unwrap();
        for t in [1.0, 1.1, 1.9, 2.7, 3.99] {
            assert!((s.eval(t) - f(t)).abs() < 1e-10, "{t}");
        }
    }

    #[test]
    fn natural_has_zero_end_curvature() {
        let s = CubicSpline::new(
            &[1.0, 2.0, 3.0, 4.0],
            &[0.0, 1.0, 0.0, 2.0],
            SplineBoundary::Natural,
        )
        .unwrap();
        assert_eq!(s.moments()[0], 0.0);
        assert_eq!(s.moments()[3], 0.0);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(matches!(
            CubicSpline::new(&[1.0], &[1.0], SplineBoundary::Natural),
            Err(Error::InvalidParametrization(_))
        ));
        assert!(matches!(
            CubicSpline::new(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0], SplineBoundary::Natural),
            Err(Error::InvalidParametrization(_))
        ));
        assert!(matches!(
            CubicSpline::new(&[1.0, 2.0], &[1.0], SplineBoundary::Natural),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
