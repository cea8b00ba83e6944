//! The regularizing functional
//!
//! ```text
//! T(q) = w * sum_k |sum_i u(x_i, t_k; q) - f_k^delta|^2 + alpha * sum_j |q_j - q0_j|^2
//! ```
//!
//! with `w = (t_last - 1) / N2`.

use std::sync::{Arc, Mutex};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::solve_observed;
use crate::model::{Grid, ModelParams, SourceParam};
use crate::observation::{column_sums, DataSet, ObservationSpec};
use crate::ttopt::Objective;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TikhonovConfig {
    pub alpha_reg: f64,
    pub q0: Vec<f64>,
    pub weight: f64,
}

impl TikhonovConfig {
    /// Default weight `(t_last - 1) / N2` taken from the dataset.
    pub fn new(alpha_reg: f64, q0: Vec<f64>, data: &DataSet) -> Self {
        let t_last = data.t.last().copied().unwrap_or(1.0);
        Self {
            alpha_reg,
            q0,
            weight: (t_last - 1.0) / data.len().max(1) as f64,
        }
    }
}

/// Misfit, penalty and their sum at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Terms {
    pub misfit: f64,
    pub penalty: f64,
    pub total: f64,
}

/// Misfit values keyed by the exact bit pattern of the substituted `q`.
pub type MisfitCache = DashMap<Vec<u64>, f64>;

/// Everything needed to evaluate `T(q)`: model, mesh, source template, data.
pub struct Functional {
    params: ModelParams,
    grid: Grid,
    template: SourceParam,
    spec: ObservationSpec,
    data: DataSet,
    config: TikhonovConfig,
    cache: Option<Arc<MisfitCache>>,
    trace: Option<Mutex<Vec<(Vec<f64>, Terms)>>>,
}

impl Functional {
    /// `template` supplies knots, pin mask and the values of pinned components.
    pub fn new(
        params: ModelParams,
        grid: Grid,
        template: SourceParam,
        spec: ObservationSpec,
        data: DataSet,
        config: TikhonovConfig,
    ) -> Result<Self> {
        template.validate()?;
        data.validate()?;
        if config.q0.len() != template.dim() {
            return Err(Error::DimensionMismatch {
                expected: template.dim(),
                found: config.q0.len(),
            });
        }
        if data.len() != spec.t_points.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.t_points.len(),
                found: data.len(),
            });
        }
        if !(config.alpha_reg >= 0.0) {
            return Err(Error::Config("alpha_reg must be >= 0".into()));
        }
        if !(config.weight > 0.0) {
            return Err(Error::Config("misfit weight must be > 0".into()));
        }
        Ok(Self {
            params,
            grid,
            template,
            spec,
            data,
            config,
            cache: None,
            trace: None,
        })
    }

    /// Memoizes misfits; the cache is shared by functionals derived with
    /// [`Functional::with_alpha`].
    pub fn memoized(mut self) -> Self {
        self.cache = Some(Arc::new(MisfitCache::new()));
        self
    }

    /// Records every evaluation for [`Functional::write_trace_csv`].
    pub fn traced(mut self) -> Self {
        self.trace = Some(Mutex::new(Vec::new()));
        self
    }

    /// Same model and data with another regularization weight. Shares the
    /// misfit cache, since the misfit does not depend on `alpha`.
    pub fn with_alpha(&self, alpha_reg: f64) -> Self {
        Self {
            params: self.params.clone(),
            grid: self.grid.clone(),
            template: self.template.clone(),
            spec: self.spec.clone(),
            data: self.data.clone(),
            config: TikhonovConfig {
                alpha_reg,
                ..self.config.clone()
            },
            cache: self.cache.clone(),
            trace: self.trace.as_ref().map(|_| Mutex::new(Vec::new())),
        }
    }

    pub fn config(&self) -> &TikhonovConfig {
        &self.config
    }

    pub fn data(&self) -> &DataSet {
        &self.data
    }

    pub fn template(&self) -> &SourceParam {
        &self.template
    }

    pub fn dim(&self) -> usize {
        self.template.dim()
    }

    /// `q` with pinned components replaced by their template values.
    pub fn substitute(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.len(),
            });
        }
        Ok(q.iter()
            .enumerate()
            .map(|(i, &v)| {
                if self.template.is_pinned(i) {
                    self.template.values[i]
                } else {
                    v
                }
            })
            .collect())
    }

    /// Model sums `sum_i u(x_i, t_k; q)` for every observation time.
    pub fn predict(&self, q: &[f64]) -> Result<Vec<f64>> {
        let q = self.substitute(q)?;
        let src = self.template.with_values(&q)?;
        let samples = solve_observed(
            &self.params,
            &src,
            &self.grid,
            &self.spec.x_points,
            &self.spec.t_points,
        )
        .map_err(|e| Error::Objective {
            q: q.clone(),
            source: Box::new(e),
        })?;
        Ok(column_sums(&samples, self.spec.t_points.len()))
    }

    pub fn misfit(&self, q: &[f64]) -> Result<f64> {
        let q = self.substitute(q)?;
        let key: Option<Vec<u64>> = self.cache.as_ref().map(|_| q.iter().map(|v| v.to_bits()).collect());
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(hit) = cache.get(key) {
                return Ok(*hit);
            }
        }
        let value = self.misfit_uncached(&q)?;
        if let (Some(cache), Some(key)) = (&self.cache, key) {
            cache.insert(key, value);
        }
        Ok(value)
    }

    fn misfit_uncached(&self, q: &[f64]) -> Result<f64> {
        let model = self.predict(q)?;
        let sum: f64 = model
            .iter()
            .zip(&self.data.f_delta)
            .map(|(m, f)| (m - f) * (m - f))
            .sum();
        Ok(self.config.weight * sum)
    }

    pub fn penalty(&self, q: &[f64]) -> Result<f64> {
        let q = self.substitute(q)?;
        let sq: f64 = q
            .iter()
            .zip(&self.config.q0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(self.config.alpha_reg * sq)
    }

    pub fn terms(&self, q: &[f64]) -> Result<Terms> {
        let misfit = self.misfit(q)?;
        let penalty = self.penalty(q)?;
        let terms = Terms {
            misfit,
            penalty,
            total: misfit + penalty,
        };
        if let Some(trace) = &self.trace {
            trace
                .lock()
                .expect("trace lock poisoned")
                .push((self.substitute(q)?, terms));
        }
        Ok(terms)
    }

    pub fn evaluate(&self, q: &[f64]) -> Result<f64> {
        Ok(self.terms(q)?.total)
    }

    /// CSV of recorded evaluations: `q0..q{d-1},misfit,penalty,total`.
    pub fn write_trace_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let Some(trace) = &self.trace else {
            return Err(Error::Config("tracing was not enabled".into()));
        };
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.dim()).map(|j| format!("q{j}")).collect();
        header.extend(["misfit", "penalty", "total"].map(String::from));
        w.write_record(&header)?;
        for (q, t) in trace.lock().expect("trace lock poisoned").iter() {
            let mut row: Vec<String> = q.iter().map(f64::to_string).collect();
            row.extend([t.misfit, t.penalty, t.total].map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Objective for Functional {
    fn value(&self, q: &[f64]) -> Result<f64> {
        self.evaluate(q)
    }
}
