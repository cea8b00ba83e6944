//! Domain types of the diffusion-logistic model and the source parametrization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::{CubicSpline, SplineBoundary};

/// Exact values of the d = 6 source used for the synthetic experiments.
pub const Q_EXACT_6: [f64; 6] = [5.8, 1.7, 1.9, 1.0, 0.95, 0.7];

/// Exact values of the refined d = 14 source.
pub const Q_EXACT_14: [f64; 14] = [
    5.8, 4.28, 3.17, 2.41, 1.94, 1.7, 1.64, 1.69, 1.79, 1.88, 1.9, 1.0, 0.95, 0.7,
];

/// Default lower and upper bounds of each source component.
pub const B_MIN: f64 = 0.0;
pub const B_MAX: f64 = 6.0;

/// Growth rate `r(t)` of the number of active users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthRate {
    Constant { r: f64 },
    /// `r(t) = r * exp(-b (t - 1))`
    ExpDecay { r: f64, b: f64 },
    /// Piecewise-linear through `(times, values)`, held constant outside.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl GrowthRate {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            GrowthRate::Constant { r } => *r,
            GrowthRate::ExpDecay { r, b } => r * (-b * (t - 1.0)).exp(),
            GrowthRate::Tabulated { times, values } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    values[0]
                } else if k == times.len() {
                    values[k - 1]
                } else {
                    let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                    values[k - 1] + w * (values[k] - values[k - 1])
                }
            }
        }
    }

    /// Supremum of `r` over `[t0, t1]`.
    pub fn sup(&self, t0: f64, t1: f64) -> f64 {
        match self {
            GrowthRate::Constant { r } => *r,
            GrowthRate::ExpDecay { .. } => self.at(t0).max(self.at(t1)),
            GrowthRate::Tabulated { times, .. } => times
                .iter()
                .copied()
                .filter(|&s| s > t0 && s < t1)
                .chain([t0, t1])
                .map(|s| self.at(s))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        match self {
            GrowthRate::Constant { r } if !(*r >= 0.0 && r.is_finite()) => bad("growth rate r must be >= 0"),
            GrowthRate::ExpDecay { r, b } if !(*r >= 0.0 && *b >= 0.0 && r.is_finite() && b.is_finite()) => {
                bad("exp-decay growth needs r >= 0 and b >= 0")
            }
            GrowthRate::Tabulated { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    bad("tabulated growth needs equally many (non-empty) times and values")
                } else if times.windows(2).any(|w| !(w[1] > w[0])) {
                    bad("tabulated growth times must be strictly increasing")
                } else if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    bad("tabulated growth values must be >= 0")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Coefficients of `u_t = D u_xx + (1 - u/K) r(t) u` on `[l1, l2] x [1, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub diffusivity: f64,
    pub capacity: f64,
    pub growth: GrowthRate,
    pub l1: f64,
    pub l2: f64,
    pub t_end: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            diffusivity: 0.01,
            capacity: 25.0,
            growth: GrowthRate::ExpDecay { r: 1.5, b: 0.5 },
            l1: 1.0,
            l2: 6.0,
            t_end: 24.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.diffusivity > 0.0 && self.diffusivity.is_finite()) {
            return Err(Error::InvalidParams("diffusivity D must be > 0".into()));
        }
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return Err(Error::InvalidParams("capacity K must be > 0".into()));
        }
        if !(self.l1 < self.l2) {
            return Err(Error::InvalidParams("need l1 < l2".into()));
        }
        if !(self.t_end > 1.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParams("need t_end > 1".into()));
        }
        self.growth.validate()
    }

    /// `sup r(t)` over the simulated window.
    pub fn max_growth(&self) -> f64 {
        self.growth.sup(1.0, self.t_end)
    }
}

/// Space-time mesh for the explicit scheme. Time starts at `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub h: f64,
    pub tau: f64,
    pub x_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
}

const NODE_TOL: f64 = 1e-9;

impl Grid {
    /// Builds a grid whose step sizes divide the domain and time window exactly.
    pub fn new(params: &ModelParams, h: f64, tau: f64) -> Result<Self> {
        params.validate()?;
        if !(h > 0.0 && tau > 0.0) {
            return Err(Error::InvalidParams("grid steps must be positive".into()));
        }
        let length = params.l2 - params.l1;
        let nx = divisions(length, h)
            .ok_or_else(|| Error::InvalidParams(format!("h = {h} does not divide [l1, l2]")))?;
        let span = params.t_end - 1.0;
        let nt = divisions(span, tau)
            .ok_or_else(|| Error::InvalidParams(format!("tau = {tau} does not divide [1, t_end]")))?;
        let h = length / nx as f64;
        let tau = span / nt as f64;
        let tau_max = crate::forward::stability_check(params, h);
        if tau > tau_max * (1.0 + 1e-12) {
            return Err(Error::Unstable { tau, tau_max });
        }
        let x_nodes = (0..=nx)
            .map(|i| params.l1 + length * i as f64 / nx as f64)
            .collect();
        let t_nodes = (0..=nt).map(|n| 1.0 + span * n as f64 / nt as f64).collect();
        Ok(Self {
            h,
            tau,
            x_nodes,
            t_nodes,
        })
    }

    /// Grid with spatial step `h` and the largest stable `tau = 1/m` for integer `m`,
    /// so that every integer time is a level.
    pub fn aligned(params: &ModelParams, h: f64) -> Result<Self> {
        params.validate()?;
        if !(h > 0.0) {
            return Err(Error::InvalidParams("grid steps must be positive".into()));
        }
        let tau_max = crate::forward::stability_check(params, h);
        let per_unit = (1.0 / tau_max).ceil().max(1.0);
        Self::new(params, h, 1.0 / per_unit)
    }

    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn nt(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn x_index(&self, x: f64) -> Result<usize> {
        node_index(&self.x_nodes, self.h, x).ok_or(Error::Alignment { axis: "x", value: x })
    }

    pub fn t_index(&self, t: f64) -> Result<usize> {
        node_index(&self.t_nodes, self.tau, t).ok_or(Error::Alignment { axis: "t", value: t })
    }
}

fn divisions(length: f64, step: f64) -> Option<usize> {
    let k = (length / step).round();
    if k >= 1.0 && (k * step - length).abs() <= NODE_TOL * length.max(1.0) {
        Some(k as usize)
    } else {
        None
    }
}

fn node_index(nodes: &[f64], step: f64, v: f64) -> Option<usize> {
    let k = ((v - nodes[0]) / step).round();
    if !(k >= 0.0) || k as usize >= nodes.len() {
        return None;
    }
    let k = k as usize;
    ((nodes[k] - v).abs() <= NODE_TOL * v.abs().max(1.0)).then_some(k)
}

/// Discretized source: `phi(knots[i]) = values[i]`, cubic in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceParam {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    /// Components fixed by a-priori information; empty means none.
    #[serde(default)]
    pub pinned: Vec<bool>,
    #[serde(default, skip_serializing_if = "is_default_boundary")]
    pub boundary: SplineBoundary,
}

fn is_default_boundary(b: &SplineBoundary) -> bool {
    *b == SplineBoundary::default()
}

impl SourceParam {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let src = Self {
            knots,
            values,
            pinned: Vec::new(),
            boundary: SplineBoundary::default(),
        };
        src.validate()?;
        Ok(src)
    }

    pub fn with_pinned(mut self, pinned: Vec<bool>) -> Result<Self> {
        self.pinned = pinned;
        self.validate()?;
        Ok(self)
    }

    pub fn with_boundary(mut self, boundary: SplineBoundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.len() < 2 {
            return Err(Error::InvalidParametrization(format!(
                "need at least 2 knots, got {}",
                self.knots.len()
            )));
        }
        if self.values.len() != self.knots.len() {
            return Err(Error::DimensionMismatch {
                expected: self.knots.len(),
                found: self.values.len(),
            });
        }
        if !self.pinned.is_empty() && self.pinned.len() != self.knots.len() {
            return Err(Error::DimensionMismatch {
                expected: self.knots.len(),
                found: self.pinned.len(),
            });
        }
        if self.knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParametrization(
                "knots must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.pinned.get(i).copied().unwrap_or(false)
    }

    /// Same knots and pins, new values.
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: values.len(),
            });
        }
        Ok(Self {
            values: values.to_vec(),
            ..self.clone()
        })
    }

    pub fn spline(&self) -> Result<CubicSpline> {
        CubicSpline::new(&self.knots, &self.values, self.boundary)
    }
}

/// Knot positions for a `d`-component source.
///
/// `d = 14` refines `[1, 3]` with step 0.2 and keeps the integer knots 4, 5, 6;
/// every other `d` is uniform on `[1, 6]`.
pub fn build_knots(d: usize) -> Result<Vec<f64>> {
    match d {
        0 | 1 => Err(Error::InvalidDimension(d)),
        14 => Ok((0..=10)
            .map(|i| 1.0 + i as f64 / 5.0)
            .chain([4.0, 5.0, 6.0])
            .collect()),
        _ => Ok((0..d)
            .map(|i| 1.0 + 5.0 * i as f64 / (d - 1) as f64)
            .collect()),
    }
}

/// Initial density `phi(x)` at the given positions.
pub fn spline_phi(src: &SourceParam, x: &[f64]) -> Result<Vec<f64>> {
    Ok(src.spline()?.eval_many(x))
}

/// Relative Euclidean error `|q_ex - q_m| / |q_ex|`.
pub fn err_metric(q_ex: &[f64], q_m: &[f64]) -> Result<f64> {
    if q_ex.len() != q_m.len() {
        return Err(Error::DimensionMismatch {
            expected: q_ex.len(),
            found: q_m.len(),
        });
    }
    let norm = q_ex.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let diff = q_ex
        .iter()
        .zip(q_m)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm)
}

/// `d` values decreasing uniformly from `B_MAX` to `B_MIN`.
pub fn linear_decrease(d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![B_MAX];
    }
    (0..d)
        .map(|i| B_MAX - (B_MAX - B_MIN) * i as f64 / (d - 1) as f64)
        .collect()
}
