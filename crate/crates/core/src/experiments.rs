//! Scenario-driven runs behind the command-line tool.
//!
//! A [`ScenarioConfig`] is one JSON document. Every command writes CSV files
//! into an output directory together with `config.json` (the exact resolved
//! configuration). Timing information goes to `timing.json` only, so that the
//! CSV outputs are byte-identical for identical inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{observe, solve};
use crate::model::{
    build_knots, err_metric, linear_decrease, Grid, ModelParams, SourceParam, B_MAX, B_MIN,
    Q_EXACT_14, Q_EXACT_6,
};
use crate::observation::{self, add_noise, generate_exact, DataSet, ObservationSpec};
use crate::spline::SplineBoundary;
use crate::tikhonov::{Functional, TikhonovConfig};
use crate::ttopt::{optimize, write_trace_csv, Mapping, TTConfig};

/// Regularization weights swept by default.
pub const DEFAULT_ALPHAS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 0.0];

/// Noise levels (percent) of the default noise table.
pub const DEFAULT_DELTAS: [f64; 5] = [1.0, 2.0, 5.0, 8.0, 10.0];

/// Prior `q0`: a named preset or an explicit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Preset(Preset),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    LinearDecrease,
    Zero,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec::Preset(Preset::LinearDecrease)
    }
}

impl PriorSpec {
    pub fn resolve(&self, d: usize) -> Result<Vec<f64>> {
        match self {
            PriorSpec::Preset(Preset::LinearDecrease) => Ok(linear_decrease(d)),
            PriorSpec::Preset(Preset::Zero) => Ok(vec![0.0; d]),
            PriorSpec::Vector(v) if v.len() == d => Ok(v.clone()),
            PriorSpec::Vector(v) => Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            }),
        }
    }
}

/// Optimizer settings of a scenario; bounds default to `[B_MIN, B_MAX]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSpec {
    pub b_min: f64,
    pub b_max: f64,
    pub n: usize,
    pub r_max: usize,
    pub sweeps: usize,
    pub mapping: Mapping,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        let tt = TTConfig::uniform(1, B_MIN, B_MAX);
        Self {
            b_min: B_MIN,
            b_max: B_MAX,
            n: tt.n,
            r_max: tt.r_max,
            sweeps: tt.sweeps,
            mapping: tt.mapping,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub id: String,
    pub model: ModelParams,
    /// Spatial step; the time step follows from the stability bound.
    pub h: f64,
    pub d: usize,
    /// Knot positions; `None` uses the standard placement for `d`.
    pub knots: Option<Vec<f64>>,
    pub boundary: SplineBoundary,
    /// Exact source values; `None` uses the built-in vector for `d` = 6 or 14.
    pub q_ex: Option<Vec<f64>>,
    pub q0: PriorSpec,
    pub deltas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Each seed drives both the noise draw and the optimizer start.
    pub seeds: Vec<u64>,
    /// When set, every run uses this noise seed instead of its own.
    pub noise_seed: Option<u64>,
    pub tt: OptimizerSpec,
    /// Components fixed to their exact value. `None` means none, except for
    /// `apriori`, which then pins every knot in `[1, 3]`.
    pub pinned: Option<Vec<usize>>,
    pub obs: ObservationSpec,
    /// Misfit weight; `None` uses `(t_last - 1) / N2`.
    pub weight: Option<f64>,
    /// Measured data to invert instead of synthetic data.
    pub dataset: Option<PathBuf>,
    /// Source values for `forward`; `None` uses `q_ex`.
    pub source: Option<Vec<f64>>,
    /// Keep every objective evaluation of every run in `evaluations/`.
    pub log_evaluations: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            id: "scenario".into(),
            model: ModelParams::default(),
            h: 0.05,
            d: 6,
            knots: None,
            boundary: SplineBoundary::default(),
            q_ex: None,
            q0: PriorSpec::default(),
            deltas: vec![10.0],
            alphas: DEFAULT_ALPHAS.to_vec(),
            seeds: vec![0],
            noise_seed: None,
            tt: OptimizerSpec::default(),
            pinned: None,
            obs: ObservationSpec::default(),
            weight: None,
            dataset: None,
            source: None,
            log_evaluations: false,
        }
    }
}

/// Fully resolved scenario pieces shared by all runs.
#[derive(Debug, Clone)]
pub struct Setup {
    pub params: ModelParams,
    pub grid: Grid,
    pub truth: SourceParam,
    pub q0: Vec<f64>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Changes the dimension and drops knots or exact values that no longer fit.
    pub fn set_dim(&mut self, d: usize) {
        self.d = d;
        if self.knots.as_ref().is_some_and(|k| k.len() != d) {
            self.knots = None;
        }
        if self.q_ex.as_ref().is_some_and(|q| q.len() != d) {
            self.q_ex = None;
        }
    }

    pub fn knots(&self) -> Result<Vec<f64>> {
        match &self.knots {
            Some(k) if k.len() == self.d => Ok(k.clone()),
            Some(k) => Err(Error::DimensionMismatch {
                expected: self.d,
                found: k.len(),
            }),
            None => build_knots(self.d),
        }
    }

    pub fn q_ex(&self) -> Result<Vec<f64>> {
        match (&self.q_ex, self.d) {
            (Some(q), d) if q.len() == d => Ok(q.clone()),
            (Some(q), d) => Err(Error::DimensionMismatch {
                expected: d,
                found: q.len(),
            }),
            (None, 6) => Ok(Q_EXACT_6.to_vec()),
            (None, 14) => Ok(Q_EXACT_14.to_vec()),
            (None, d) => Err(Error::Config(format!(
                "no built-in exact source for d = {d}; set q_ex"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::Config("alpha values must be >= 0".into()));
        }
        if self.deltas.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Config("noise levels must be >= 0".into()));
        }
        if self.seeds.is_empty() || self.alphas.is_empty() || self.deltas.is_empty() {
            return Err(Error::Config("seeds, alphas and deltas must be non-empty".into()));
        }
        if let Some(p) = &self.pinned {
            if let Some(&i) = p.iter().find(|&&i| i >= self.d) {
                return Err(Error::Config(format!("pinned index {i} out of range")));
            }
        }
        self.setup().map(|_| ())
    }

    pub fn setup(&self) -> Result<Setup> {
        self.model.validate()?;
        let grid = Grid::aligned(&self.model, self.h)?;
        let truth = SourceParam::new(self.knots()?, self.q_ex()?)?.with_boundary(self.boundary);
        let q0 = self.q0.resolve(self.d)?;
        Ok(Setup {
            params: self.model.clone(),
            grid,
            truth,
            q0,
        })
    }

    fn tt_config(&self, seed: u64, truth: &SourceParam) -> TTConfig {
        let fixed = if truth.pinned.iter().any(|&p| p) {
            (0..self.d)
                .map(|i| truth.is_pinned(i).then(|| truth.values[i]))
                .collect()
        } else {
            Vec::new()
        };
        TTConfig {
            n: self.tt.n,
            r_max: self.tt.r_max,
            sweeps: self.tt.sweeps,
            mapping: self.tt.mapping,
            seed,
            fixed,
            record_evaluations: self.log_evaluations,
            ..TTConfig::uniform(self.d, self.tt.b_min, self.tt.b_max)
        }
    }

    fn pin_mask(&self, pins: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.d];
        for &i in pins {
            mask[i] = true;
        }
        mask
    }
}

/// One inversion: its inputs and what the optimizer returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub d: usize,
    pub delta: f64,
    pub alpha_reg: f64,
    pub seed: u64,
    /// Components separated by single spaces.
    pub q_best: String,
    pub err: f64,
    pub t_best: f64,
    pub misfit: f64,
    pub penalty: f64,
    pub eval_count: usize,
}

impl RunRecord {
    pub fn q_best(&self) -> Result<Vec<f64>> {
        self.q_best
            .split_whitespace()
            .map(|s| {
                s.parse().map_err(|_| Error::Parse {
                    line: 0,
                    msg: format!("bad q_best component `{s}`"),
                })
            })
            .collect()
    }
}

/// A finished run with the artifacts that do not fit a CSV row.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub trace: Vec<crate::ttopt::TraceRow>,
    pub evaluations: Option<Vec<(Vec<f64>, f64)>>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub delta: f64,
    pub alpha: f64,
    pub seed: u64,
}

fn join(q: &[f64]) -> String {
    q.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn dataset_for(cfg: &ScenarioConfig, clean: &DataSet, run: &RunSpec) -> Result<DataSet> {
    let ds = match &cfg.dataset {
        Some(path) => observation::load(path)?,
        None => add_noise(clean, run.delta, cfg.noise_seed.unwrap_or(run.seed)),
    };
    if ds.len() != cfg.obs.t_points.len() {
        return Err(Error::DimensionMismatch {
            expected: cfg.obs.t_points.len(),
            found: ds.len(),
        });
    }
    Ok(ds)
}

/// Runs one inversion with the given pin set.
pub fn run_one(cfg: &ScenarioConfig, setup: &Setup, clean: &DataSet, pins: &[usize], run: RunSpec) -> Result<RunOutcome> {
    let start = Instant::now();
    let data = dataset_for(cfg, clean, &run)?;
    let mut tik = TikhonovConfig::new(run.alpha, setup.q0.clone(), &data);
    if let Some(w) = cfg.weight {
        tik.weight = w;
    }
    let template = setup.truth.clone().with_pinned(cfg.pin_mask(pins))?;
    let tt = cfg.tt_config(run.seed, &template);
    let fun = Functional::new(
        setup.params.clone(),
        setup.grid.clone(),
        template,
        cfg.obs.clone(),
        data,
        tik,
    )?
    .memoized();
    let res = optimize(&fun, &tt)?;
    let terms = fun.terms(&res.q_best)?;
    let q_ex = &setup.truth.values;
    let record = RunRecord {
        scenario: cfg.id.clone(),
        d: cfg.d,
        delta: run.delta,
        alpha_reg: run.alpha,
        seed: run.seed,
        q_best: join(&res.q_best),
        err: err_metric(q_ex, &res.q_best)?,
        t_best: res.j_best,
        misfit: terms.misfit,
        penalty: terms.penalty,
        eval_count: res.eval_count,
    };
    Ok(RunOutcome {
        record,
        trace: res.trace,
        evaluations: res.evaluations,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Runs every spec concurrently; results keep the order of `runs`.
pub fn run_many(cfg: &ScenarioConfig, pins: &[usize], runs: &[RunSpec]) -> Result<Vec<RunOutcome>> {
    let setup = cfg.setup()?;
    let clean = generate_exact(&setup.params, &setup.truth, &setup.grid, &cfg.obs)?;
    runs.par_iter()
        .map(|run| run_one(cfg, &setup, &clean, pins, *run))
        .collect()
}

/// Knots in `[1, 3]`, the default a-priori pin set.
pub fn default_apriori_pins(knots: &[f64]) -> Vec<usize> {
    (0..knots.len())
        .filter(|&i| knots[i] >= 1.0 - 1e-12 && knots[i] <= 3.0 + 1e-12)
        .collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes<F>(fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        fill(&mut w)?;
        w.flush()?;
    }
    Ok(buf)
}

fn write_config(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    write_atomic(&out.join("config.json"), serde_json::to_string_pretty(cfg)?.as_bytes())
}

fn write_runs(outcomes: &[RunOutcome], out: &Path) -> Result<()> {
    let bytes = csv_bytes(|w| {
        if outcomes.is_empty() {
            w.write_record([
                "scenario", "d", "delta", "alpha_reg", "seed", "q_best", "err", "t_best", "misfit",
                "penalty", "eval_count",
            ])?;
        }
        for o in outcomes {
            w.serialize(&o.record)?;
        }
        Ok(())
    })?;
    write_atomic(&out.join("runs.csv"), &bytes)?;

    #[derive(Serialize)]
    struct Timing {
        run: usize,
        seed: u64,
        alpha_reg: f64,
        delta: f64,
        wall_time: f64,
    }
    let timing: Vec<Timing> = outcomes
        .iter()
        .enumerate()
        .map(|(run, o)| Timing {
            run,
            seed: o.record.seed,
            alpha_reg: o.record.alpha_reg,
            delta: o.record.delta,
            wall_time: o.wall_time,
        })
        .collect();
    write_atomic(&out.join("timing.json"), serde_json::to_string_pretty(&timing)?.as_bytes())?;

    let traces = out.join("traces");
    fs::create_dir_all(&traces)?;
    for (i, o) in outcomes.iter().enumerate() {
        let mut buf = Vec::new();
        write_trace_csv(&o.trace, &mut buf)?;
        write_atomic(&traces.join(format!("run_{i:03}.csv")), &buf)?;
        if let Some(evals) = &o.evaluations {
            let dir = out.join("evaluations");
            fs::create_dir_all(&dir)?;
            let bytes = csv_bytes(|w| {
                let d = evals.first().map_or(0, |e| e.0.len());
                let mut header: Vec<String> = (0..d).map(|j| format!("q{j}")).collect();
                header.push("value".into());
                w.write_record(&header)?;
                for (q, v) in evals {
                    let mut row: Vec<String> = q.iter().map(f64::to_string).collect();
                    row.push(v.to_string());
                    w.write_record(&row)?;
                }
                Ok(())
            })?;
            write_atomic(&dir.join(format!("run_{i:03}.csv")), &bytes)?;
        }
    }
    Ok(())
}

/// Positions where recovered curves are sampled.
pub fn curve_points(params: &ModelParams) -> Vec<f64> {
    let steps = 500;
    (0..=steps)
        .map(|i| params.l1 + (params.l2 - params.l1) * i as f64 / steps as f64)
        .collect()
}

/// Rows `(x, phi_exact, phi_recovered, phi_prior)`.
pub fn phi_curves(setup: &Setup, q_best: &[f64]) -> Result<Vec<[f64; 4]>> {
    let xs = curve_points(&setup.params);
    let exact = setup.truth.spline()?.eval_many(&xs);
    let rec = setup.truth.with_values(q_best)?.spline()?.eval_many(&xs);
    let prior = setup.truth.with_values(&setup.q0)?.spline()?.eval_many(&xs);
    Ok((0..xs.len()).map(|i| [xs[i], exact[i], rec[i], prior[i]]).collect())
}

fn write_phi(setup: &Setup, outcomes: &[RunOutcome], out: &Path) -> Result<()> {
    if outcomes.len() == 1 {
        let rows = phi_curves(setup, &outcomes[0].record.q_best()?)?;
        let bytes = csv_bytes(|w| {
            w.write_record(["x", "phi_exact", "phi_recovered", "phi_prior"])?;
            for r in &rows {
                w.write_record(r.iter().map(f64::to_string))?;
            }
            Ok(())
        })?;
        return write_atomic(&out.join("phi_recovered.csv"), &bytes);
    }
    let bytes = csv_bytes(|w| {
        w.write_record(["run", "x", "phi_exact", "phi_recovered", "phi_prior"])?;
        for (i, o) in outcomes.iter().enumerate() {
            for r in phi_curves(setup, &o.record.q_best()?)? {
                let mut row = vec![i.to_string()];
                row.extend(r.iter().map(f64::to_string));
                w.write_record(&row)?;
            }
        }
        Ok(())
    })?;
    write_atomic(&out.join("phi_recovered.csv"), &bytes)
}

fn prepare(cfg: &ScenarioConfig, out: &Path) -> Result<Setup> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    write_config(cfg, out)?;
    cfg.setup()
}

fn finish(cfg: &ScenarioConfig, pins: &[usize], runs: &[RunSpec], out: &Path) -> Result<Vec<RunRecord>> {
    let setup = prepare(cfg, out)?;
    let outcomes = run_many(cfg, pins, runs)?;
    write_runs(&outcomes, out)?;
    write_phi(&setup, &outcomes, out)?;
    Ok(outcomes.into_iter().map(|o| o.record).collect())
}

/// Solves the forward problem; writes `field.csv` (all nodes at the
/// observation times) and `observations.csv` (`x` by `t` point values).
pub fn cmd_forward(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<Vec<f64>>> {
    let setup = prepare(cfg, out)?;
    let src = match &cfg.source {
        Some(v) => setup.truth.with_values(v)?,
        None => setup.truth.clone(),
    };
    let field = solve(&setup.params, &src, &setup.grid)?;
    let mut times = vec![1.0];
    times.extend(cfg.obs.t_points.iter().copied().filter(|&t| t != 1.0));
    let mut buf = Vec::new();
    field.write_csv(&mut buf, &times)?;
    write_atomic(&out.join("field.csv"), &buf)?;

    let m = observe(&field, &cfg.obs.x_points, &cfg.obs.t_points)?;
    let bytes = csv_bytes(|w| {
        let mut header = vec!["x".to_string()];
        header.extend(cfg.obs.t_points.iter().map(|t| format!("t={t}")));
        w.write_record(&header)?;
        for (x, row) in cfg.obs.x_points.iter().zip(&m) {
            let mut rec = vec![x.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    write_atomic(&out.join("observations.csv"), &bytes)?;
    Ok(m)
}

/// Writes `data_d{delta}_s{seed}.csv` (plus sidecar) for every noise level and seed.
pub fn cmd_generate_data(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let setup = prepare(cfg, out)?;
    let clean = generate_exact(&setup.params, &setup.truth, &setup.grid, &cfg.obs)?;
    let mut paths = Vec::new();
    for &delta in &cfg.deltas {
        for &seed in &cfg.seeds {
            let seed = cfg.noise_seed.unwrap_or(seed);
            let path = out.join(format!("data_d{delta}_s{seed}.csv"));
            if paths.contains(&path) {
                continue;
            }
            observation::save(&add_noise(&clean, delta, seed), &path)?;
            paths.push(path);
        }
    }
    Ok(paths)
}

fn configured_pins(cfg: &ScenarioConfig) -> Vec<usize> {
    cfg.pinned.clone().unwrap_or_default()
}

/// One run with the first noise level, weight and seed of the scenario.
pub fn cmd_invert(cfg: &ScenarioConfig, out: &Path) -> Result<RunRecord> {
    let run = RunSpec {
        delta: cfg.deltas[0],
        alpha: cfg.alphas[0],
        seed: cfg.seeds[0],
    };
    Ok(finish(cfg, &configured_pins(cfg), &[run], out)?.remove(0))
}

/// Every weight times every seed at the first noise level.
pub fn cmd_alpha_sweep(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<RunRecord>> {
    let runs: Vec<RunSpec> = cfg
        .alphas
        .iter()
        .flat_map(|&alpha| {
            cfg.seeds.iter().map(move |&seed| RunSpec {
                delta: cfg.deltas[0],
                alpha,
                seed,
            })
        })
        .collect();
    finish(cfg, &configured_pins(cfg), &runs, out)
}

/// Aggregate of the runs sharing one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub delta: f64,
    pub runs: usize,
    pub err_mean: f64,
    pub err_std: f64,
    /// `err_mean` in percent.
    pub err_pct: f64,
    pub t_mean: f64,
    pub t_std: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn noise_rows(records: &[RunRecord], deltas: &[f64]) -> Vec<NoiseRow> {
    deltas
        .iter()
        .map(|&delta| {
            let sel: Vec<&RunRecord> = records.iter().filter(|r| r.delta == delta).collect();
            let errs: Vec<f64> = sel.iter().map(|r| r.err).collect();
            let ts: Vec<f64> = sel.iter().map(|r| r.t_best).collect();
            let (err_mean, err_std) = mean_std(&errs);
            let (t_mean, t_std) = mean_std(&ts);
            NoiseRow {
                delta,
                runs: sel.len(),
                err_mean,
                err_std,
                err_pct: 100.0 * err_mean,
                t_mean,
                t_std,
            }
        })
        .collect()
}

/// Every noise level times every seed at the first weight; also writes
/// `noise_table.csv` with mean and standard deviation per level.
pub fn cmd_noise_table(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<NoiseRow>> {
    let runs: Vec<RunSpec> = cfg
        .deltas
        .iter()
        .flat_map(|&delta| {
            cfg.seeds.iter().map(move |&seed| RunSpec {
                delta,
                alpha: cfg.alphas[0],
                seed,
            })
        })
        .collect();
    let records = finish(cfg, &configured_pins(cfg), &runs, out)?;
    let rows = noise_rows(&records, &cfg.deltas);
    let bytes = csv_bytes(|w| {
        for r in &rows {
            w.serialize(r)?;
        }
        Ok(())
    })?;
    write_atomic(&out.join("noise_table.csv"), &bytes)?;
    Ok(rows)
}

/// Like [`cmd_invert`] over all seeds, with components pinned to their exact
/// values (by default every knot in `[1, 3]`).
pub fn cmd_apriori(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<RunRecord>> {
    let pins = match &cfg.pinned {
        Some(p) => p.clone(),
        None => default_apriori_pins(&cfg.knots()?),
    };
    let runs: Vec<RunSpec> = cfg
        .seeds
        .iter()
        .map(|&seed| RunSpec {
            delta: cfg.deltas[0],
            alpha: cfg.alphas[0],
            seed,
        })
        .collect();
    finish(cfg, &pins, &runs, out)
}

/// Reads `runs.csv` back.
pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}
