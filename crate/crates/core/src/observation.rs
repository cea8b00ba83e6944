//! Integral-type observations `f_k = sum_i u(x_i, t_k)` and their noisy copies.
//!
//! Noise is multiplicative, `f_k^delta = f_k (1 + delta * gamma_k / 100)`, with
//! `gamma_k` standard normal. The normals come from the Box-Muller transform
//! applied to uniforms drawn from ChaCha20 (`rand_chacha::ChaCha20Rng`, seeded
//! with `seed_from_u64`). A uniform is `(next_u64 >> 11) * 2^-53`; each pair
//! `(u1, u2)` yields `sqrt(-2 ln(1 - u1)) cos(2 pi u2)` followed by the matching
//! `sin` term.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::solve_observed;
use crate::model::{Grid, ModelParams, SourceParam};

/// Where the field is sampled and summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSpec {
    pub x_points: Vec<f64>,
    pub t_points: Vec<f64>,
}

impl Default for ObservationSpec {
    fn default() -> Self {
        Self {
            x_points: (1..=5).map(f64::from).collect(),
            t_points: (3..=24).map(f64::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub f_delta: Vec<f64>,
    /// Noise level in percent.
    pub delta: f64,
    pub seed: u64,
    /// Number of summed spatial points.
    pub n1: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    delta: f64,
    seed: u64,
    n1: usize,
}

impl DataSet {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        for len in [self.f.len(), self.f_delta.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if !(self.delta >= 0.0) {
            return Err(Error::Config("noise level must be >= 0".into()));
        }
        if self.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("exact observations must be finite".into()));
        }
        Ok(())
    }
}

/// Noise-free observations of the solution started from `src`.
pub fn generate_exact(
    params: &ModelParams,
    src: &SourceParam,
    grid: &Grid,
    spec: &ObservationSpec,
) -> Result<DataSet> {
    let samples = solve_observed(params, src, grid, &spec.x_points, &spec.t_points)?;
    let f = column_sums(&samples, spec.t_points.len());
    Ok(DataSet {
        t: spec.t_points.clone(),
        f_delta: f.clone(),
        f,
        delta: 0.0,
        seed: 0,
        n1: spec.x_points.len(),
    })
}

pub(crate) fn column_sums(samples: &[Vec<f64>], cols: usize) -> Vec<f64> {
    (0..cols)
        .map(|k| samples.iter().map(|row| row[k]).sum())
        .collect()
}

/// Replaces `f_delta` with a fresh noisy copy of `f`.
pub fn add_noise(ds: &DataSet, delta: f64, seed: u64) -> DataSet {
    let gamma = standard_normals(seed, ds.f.len());
    let f_delta = ds
        .f
        .iter()
        .zip(&gamma)
        .map(|(f, g)| f + delta * f * g / 100.0)
        .collect();
    DataSet {
        f_delta,
        delta,
        seed,
        ..ds.clone()
    }
}

/// `count` i.i.d. standard normals from the seeded Box-Muller stream.
pub fn standard_normals(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut out = Vec::with_capacity(count + 1);
    while out.len() < count {
        let u1 = 1.0 - uniform();
        let u2 = uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        out.push(radius * angle.cos());
        out.push(radius * angle.sin());
    }
    out.truncate(count);
    out
}

/// Path of the JSON metadata written next to a dataset CSV.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `t,f,f_delta` rows to `path` and `{delta, seed, n1}` to the sidecar.
pub fn save(ds: &DataSet, path: &Path) -> Result<()> {
    ds.validate()?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "f", "f_delta"])?;
    for k in 0..ds.len() {
        w.write_record([
            ds.t[k].to_string(),
            ds.f[k].to_string(),
            ds.f_delta[k].to_string(),
        ])?;
    }
    w.flush()?;
    let meta = Sidecar {
        delta: ds.delta,
        seed: ds.seed,
        n1: ds.n1,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<DataSet> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("missing column `{name}`"),
        })
    };
    let (ct, cf, cd) = (column("t")?, column("f")?, column("f_delta")?);

    let mut ds = DataSet {
        t: Vec::new(),
        f: Vec::new(),
        f_delta: Vec::new(),
        delta: 0.0,
        seed: 0,
        n1: 0,
    };
    for record in r.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: usize| -> Result<f64> {
            let raw = record.get(c).ok_or_else(|| Error::Parse {
                line,
                msg: "too few fields".into(),
            })?;
            raw.trim().parse().map_err(|_| Error::Parse {
                line,
                msg: format!("`{raw}` is not a number"),
            })
        };
        ds.t.push(field(ct)?);
        ds.f.push(field(cf)?);
        ds.f_delta.push(field(cd)?);
    }

    let meta_text = fs::read_to_string(sidecar_path(path))?;
    let meta: Sidecar = serde_json::from_str(&meta_text)?;
    ds.delta = meta.delta;
    ds.seed = meta.seed;
    ds.n1 = meta.n1;
    ds.validate()?;
    Ok(ds)
}
