//! Derivative-free global minimization on a product grid by tensor-train
//! cross sweeps.
//!
//! The objective is treated as a `d`-way tensor over `n` nodes per direction.
//! Each step of a sweep evaluates the fiber block `left prefixes x nodes x
//! right suffixes`, maps the values through a decreasing function of
//! `J - shift` (so that the smallest objective values have the largest
//! magnitude), and keeps the rows of the unfolded block picked by `maxvol` as
//! the next index set. The best point ever evaluated is tracked separately.

mod maxvol;

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use maxvol::{maxvol, maxvol_with, MAXVOL_MAX_ITERS, MAXVOL_TOL};

/// Function to minimize. Implementations must be pure; candidates of one
/// block are evaluated concurrently.
pub trait Objective: Sync {
    fn value(&self, q: &[f64]) -> Result<f64>;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, q: &[f64]) -> Result<f64> {
        Ok(self(q))
    }
}

/// Monotone decreasing map applied to `y = J - shift >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mapping {
    /// `pi/2 - atan(y)`
    #[default]
    Arctan,
    /// `exp(-y / scale)`
    Exp { scale: f64 },
}

impl Mapping {
    pub fn apply(&self, y: f64) -> f64 {
        match self {
            Mapping::Arctan => std::f64::consts::FRAC_PI_2 - y.atan(),
            Mapping::Exp { scale } => (-y / scale).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TTConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Nodes per direction.
    pub n: usize,
    pub r_max: usize,
    /// Number of sweeps (each one left-to-right and one right-to-left pass).
    pub sweeps: usize,
    pub seed: u64,
    pub mapping: Mapping,
    /// Pinned components; `Some(v)` collapses that direction to the node `v`.
    pub fixed: Vec<Option<f64>>,
    /// Failed evaluations count as `+inf` instead of aborting.
    pub skip_failures: bool,
    /// Keep every `(point, value)` evaluated, in evaluation order.
    pub record_evaluations: bool,
}

impl Default for TTConfig {
    fn default() -> Self {
        Self::uniform(6, crate::model::B_MIN, crate::model::B_MAX)
    }
}

impl TTConfig {
    pub fn uniform(d: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; d],
            upper: vec![upper; d],
            n: 601,
            r_max: 4,
            sweeps: 10,
            seed: 0,
            mapping: Mapping::Arctan,
            fixed: Vec::new(),
            skip_failures: true,
            record_evaluations: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn fixed_value(&self, k: usize) -> Option<f64> {
        self.fixed.get(k).copied().flatten()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::Config("optimizer needs at least one dimension".into()));
        }
        if self.upper.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.upper.len(),
            });
        }
        if !self.fixed.is_empty() && self.fixed.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.fixed.len(),
            });
        }
        if self.lower.iter().zip(&self.upper).any(|(a, b)| !(a < b)) {
            return Err(Error::Config("need lower < upper in every direction".into()));
        }
        if self.n < 2 || self.r_max < 1 || self.sweeps < 1 {
            return Err(Error::Config("need n >= 2, r_max >= 1 and sweeps >= 1".into()));
        }
        if let Mapping::Exp { scale } = self.mapping {
            if !(scale > 0.0) {
                return Err(Error::Config("exp mapping needs scale > 0".into()));
            }
        }
        Ok(())
    }
}

/// Uniform nodes `lower + j (upper - lower) / (n - 1)` per direction; pinned
/// directions hold only their pinned value.
pub fn discretize(cfg: &TTConfig) -> Vec<Vec<f64>> {
    (0..cfg.dim())
        .map(|k| match cfg.fixed_value(k) {
            Some(v) => vec![v],
            None => {
                let (lo, hi) = (cfg.lower[k], cfg.upper[k]);
                (0..cfg.n)
                    .map(|j| lo + (hi - lo) * j as f64 / (cfg.n - 1) as f64)
                    .collect()
            }
        })
        .collect()
}

/// Per-sweep record of the best value found so far.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub eval_count: usize,
    pub j_best: f64,
    pub q_best: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TTState {
    pub grids: Vec<Vec<f64>>,
    /// `left[k]`: multi-indices over directions `0..k`.
    pub left: Vec<Vec<Vec<usize>>>,
    /// `right[k]`: multi-indices over directions `k..d`.
    pub right: Vec<Vec<Vec<usize>>>,
    pub shift: f64,
    pub best: Option<(Vec<usize>, f64)>,
    pub eval_count: usize,
    cache: HashMap<Vec<usize>, f64>,
    evaluations: Vec<(Vec<usize>, f64)>,
    record: bool,
}

impl TTState {
    /// Grids plus random right index sets drawn from `cfg.seed`.
    pub fn init(cfg: &TTConfig) -> Result<Self> {
        cfg.validate()?;
        let grids = discretize(cfg);
        let d = grids.len();
        let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut right = vec![Vec::new(); d + 1];
        right[d] = vec![Vec::new()];
        for k in 1..d {
            let rank = cfg
                .r_max
                .min(capped_product(&sizes[..k], cfg.r_max))
                .min(capped_product(&sizes[k..], cfg.r_max));
            right[k] = random_suffixes(&sizes[k..], rank, &mut rng);
        }
        let mut left = vec![Vec::new(); d + 1];
        left[0] = vec![Vec::new()];
        Ok(Self {
            grids,
            left,
            right,
            shift: f64::INFINITY,
            best: None,
            eval_count: 0,
            cache: HashMap::new(),
            evaluations: Vec::new(),
            record: cfg.record_evaluations,
        })
    }

    pub fn dim(&self) -> usize {
        self.grids.len()
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(k, &j)| self.grids[k][j]).collect()
    }

    pub fn best_value(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.1)
    }

    pub fn best_point(&self) -> Option<Vec<f64>> {
        self.best.as_ref().map(|(idx, _)| self.point(idx))
    }

    /// Every `(point, value)` evaluated so far, if recording is enabled.
    pub fn evaluations(&self) -> Vec<(Vec<f64>, f64)> {
        self.evaluations
            .iter()
            .map(|(idx, v)| (self.point(idx), *v))
            .collect()
    }

    /// Objective values at `points`, evaluating only what is not cached.
    fn evaluate<O: Objective + ?Sized>(
        &mut self,
        objective: &O,
        points: &[Vec<usize>],
        skip_failures: bool,
    ) -> Result<Vec<f64>> {
        let mut fresh: Vec<Vec<usize>> = Vec::new();
        let mut queued = std::collections::HashSet::new();
        for p in points {
            if !self.cache.contains_key(p) && queued.insert(p.clone()) {
                fresh.push(p.clone());
            }
        }
        let grids = &self.grids;
        let results: Vec<Result<f64>> = fresh
            .par_iter()
            .map(|idx| {
                let q: Vec<f64> = idx.iter().enumerate().map(|(k, &j)| grids[k][j]).collect();
                objective.value(&q).map_err(|e| attach(q, e))
            })
            .collect();
        for (idx, res) in fresh.into_iter().zip(results) {
            let v = match res {
                Ok(v) if v.is_nan() => f64::INFINITY,
                Ok(v) => v,
                Err(_) if skip_failures => f64::INFINITY,
                Err(e) => return Err(e),
            };
            self.eval_count += 1;
            if v < self.best_value() {
                self.best = Some((idx.clone(), v));
            }
            if self.record {
                self.evaluations.push((idx.clone(), v));
            }
            self.cache.insert(idx, v);
        }
        if self.best.is_some() {
            self.shift = self.best_value();
        }
        Ok(points.iter().map(|p| self.cache[p]).collect())
    }
}

fn attach(q: Vec<f64>, e: Error) -> Error {
    match e {
        Error::Objective { .. } => e,
        other => Error::Objective {
            q,
            source: Box::new(other),
        },
    }
}

fn capped_product(sizes: &[usize], cap: usize) -> usize {
    sizes
        .iter()
        .try_fold(1usize, |acc, &s| {
            let p = acc.saturating_mul(s);
            (p <= cap).then_some(p).ok_or(())
        })
        .unwrap_or(cap + 1)
}

fn random_suffixes(sizes: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total = capped_product(sizes, count);
    if total <= count {
        return all_indices(sizes);
    }
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(count);
    while out.len() < count {
        let idx: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
        if !out.contains(&idx) {
            out.push(idx);
        }
    }
    out
}

fn all_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &s| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |j| {
                    let mut p = prefix.clone();
                    p.push(j);
                    p
                })
            })
            .collect()
    })
}

/// Rows of `values` selected by maxvol on the orthogonal factor of the mapped
/// block. Rows holding only failed (infinite) entries are never selected.
fn select_rows(values: &DMatrix<f64>, shift: f64, mapping: Mapping, r_max: usize) -> Result<Vec<usize>> {
    let rows: Vec<usize> = (0..values.nrows())
        .filter(|&i| values.row(i).iter().any(|v| v.is_finite()))
        .collect();
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let cols = values.ncols().min(r_max);
    if rows.len() <= cols {
        return Ok(rows);
    }
    let mapped = DMatrix::from_fn(rows.len(), values.ncols(), |i, j| {
        let v = values[(rows[i], j)];
        if v.is_finite() {
            mapping.apply(v - shift)
        } else {
            0.0
        }
    });
    let q = mapped.qr().q();
    let q = q.columns(0, cols).clone_owned();
    let picked = maxvol(&q)?;
    let mut out: Vec<usize> = picked.into_iter().map(|i| rows[i]).collect();
    out.sort_unstable();
    Ok(out)
}

/// Makes sure the index set contains the part of the best point, replacing
/// the last selected entry when the set is full.
fn keep_best(set: &mut Vec<Vec<usize>>, part: &[usize], r_max: usize) {
    if set.iter().any(|p| p == part) {
        return;
    }
    if set.len() >= r_max {
        set.pop();
    }
    set.push(part.to_vec());
}

/// One left-to-right and one right-to-left pass.
pub fn sweep<O: Objective + ?Sized>(objective: &O, state: &mut TTState, cfg: &TTConfig) -> Result<()> {
    let d = state.dim();
    if d == 1 {
        let points: Vec<Vec<usize>> = (0..state.grids[0].len()).map(|j| vec![j]).collect();
        state.evaluate(objective, &points, cfg.skip_failures)?;
        return Ok(());
    }
    for k in 0..d - 1 {
        step(objective, state, cfg, k, true)?;
    }
    for k in (1..d).rev() {
        step(objective, state, cfg, k, false)?;
    }
    Ok(())
}

fn step<O: Objective + ?Sized>(
    objective: &O,
    state: &mut TTState,
    cfg: &TTConfig,
    k: usize,
    forward: bool,
) -> Result<()> {
    let left = state.left[k].clone();
    let right = state.right[k + 1].clone();
    let nk = state.grids[k].len();
    let mut points = Vec::with_capacity(left.len() * nk * right.len());
    for a in &left {
        for j in 0..nk {
            for b in &right {
                let mut p = Vec::with_capacity(state.dim());
                p.extend_from_slice(a);
                p.push(j);
                p.extend_from_slice(b);
                points.push(p);
            }
        }
    }
    let values = state.evaluate(objective, &points, cfg.skip_failures)?;
    let at = |ai: usize, j: usize, bi: usize| values[(ai * nk + j) * right.len() + bi];

    if forward {
        // rows (prefix, node), columns right suffixes
        let block = DMatrix::from_fn(left.len() * nk, right.len(), |row, bi| {
            at(row / nk, row % nk, bi)
        });
        let picked = select_rows(&block, state.shift, cfg.mapping, cfg.r_max)?;
        if !picked.is_empty() {
            let mut next: Vec<Vec<usize>> = picked
                .into_iter()
                .map(|row| {
                    let mut p = left[row / nk].clone();
                    p.push(row % nk);
                    p
                })
                .collect();
            if let Some((best, _)) = &state.best {
                keep_best(&mut next, &best[..=k], cfg.r_max);
            }
            state.left[k + 1] = next;
        }
    } else {
        // rows (node, suffix), columns left prefixes
        let rs = right.len();
        let block = DMatrix::from_fn(nk * rs, left.len(), |row, ai| at(ai, row / rs, row % rs));
        let picked = select_rows(&block, state.shift, cfg.mapping, cfg.r_max)?;
        if !picked.is_empty() {
            let mut next: Vec<Vec<usize>> = picked
                .into_iter()
                .map(|row| {
                    let mut p = vec![row / rs];
                    p.extend_from_slice(&right[row % rs]);
                    p
                })
                .collect();
            if let Some((best, _)) = &state.best {
                keep_best(&mut next, &best[k..], cfg.r_max);
            }
            state.right[k] = next;
        }
    }
    Ok(())
}

/// Result of a full optimization run.
#[derive(Debug, Clone)]
pub struct TTResult {
    pub q_best: Vec<f64>,
    pub index_best: Vec<usize>,
    pub j_best: f64,
    pub eval_count: usize,
    pub trace: Vec<TraceRow>,
    /// Present when `record_evaluations` is set.
    pub evaluations: Option<Vec<(Vec<f64>, f64)>>,
}

pub fn optimize<O: Objective + ?Sized>(objective: &O, cfg: &TTConfig) -> Result<TTResult> {
    let mut state = TTState::init(cfg)?;
    let mut trace = Vec::with_capacity(cfg.sweeps);
    for s in 0..cfg.sweeps {
        sweep(objective, &mut state, cfg)?;
        trace.push(TraceRow {
            sweep: s + 1,
            eval_count: state.eval_count,
            j_best: state.best_value(),
            q_best: state.best_point().unwrap_or_default(),
        });
    }
    let (index_best, j_best) = state
        .best
        .clone()
        .filter(|b| b.1.is_finite())
        .ok_or_else(|| Error::Config("every objective evaluation failed".into()))?;
    Ok(TTResult {
        q_best: state.point(&index_best),
        index_best,
        j_best,
        eval_count: state.eval_count,
        trace,
        evaluations: cfg.record_evaluations.then(|| state.evaluations()),
    })
}

/// CSV with columns `sweep,eval_count,J_best,q0..q{d-1}`.
pub fn write_trace_csv<W: std::io::Write>(trace: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = trace.first().map_or(0, |r| r.q_best.len());
    let mut header = vec!["sweep".to_string(), "eval_count".into(), "J_best".into()];
    header.extend((0..d).map(|j| format!("q{j}")));
    w.write_record(&header)?;
    for row in trace {
        let mut rec = vec![
            row.sweep.to_string(),
            row.eval_count.to_string(),
            row.j_best.to_string(),
        ];
        rec.extend(row.q_best.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
