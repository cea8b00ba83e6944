//! Explicit finite-difference solver for the diffusion-logistic equation.
//!
//! Forward Euler in time, central second differences in space, homogeneous
//! Neumann boundaries through mirrored ghost nodes (`u_{-1} = u_1`,
//! `u_{N+1} = u_{N-1}`). The scheme is first order in `tau` and second order
//! in `h`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{Grid, ModelParams, SourceParam};

const SAFETY: f64 = 0.5;

/// Largest time step that keeps the scheme monotone for `0 <= u <= K`.
///
/// `tau_max = 0.5 h^2 / (2 D + h^2 sup r)`
pub fn stability_check(params: &ModelParams, h: f64) -> f64 {
    SAFETY * h * h / (2.0 * params.diffusivity + h * h * params.max_growth())
}

/// Space-time solution `u[level][node]`.
#[derive(Debug, Clone)]
pub struct Field {
    values: Vec<f64>,
    grid: Grid,
}

impl Field {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn level(&self, n: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[n * nx..(n + 1) * nx]
    }

    pub fn at(&self, level: usize, node: usize) -> f64 {
        self.values[level * self.grid.nx() + node]
    }

    pub fn levels(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.grid.nx())
    }

    /// Trapezoidal mass `h * sum' u_i` at a time level; conserved by pure
    /// diffusion under the mirrored boundaries.
    pub fn mass(&self, level: usize) -> f64 {
        let u = self.level(level);
        let n = u.len();
        self.grid.h * (u[1..n - 1].iter().sum::<f64>() + 0.5 * (u[0] + u[n - 1]))
    }

    /// CSV with an `x` column followed by one column per requested time.
    pub fn write_csv<W: Write>(&self, out: W, times: &[f64]) -> Result<()> {
        let levels = times
            .iter()
            .map(|&t| self.grid.t_index(t))
            .collect::<Result<Vec<_>>>()?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend(times.iter().map(|t| format!("t={t}")));
        w.write_record(&header)?;
        for (i, x) in self.grid.x_nodes.iter().enumerate() {
            let mut row = vec![x.to_string()];
            row.extend(levels.iter().map(|&n| self.at(n, i).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Optional right-hand side `g(x, t)` added to the equation.
pub type Forcing<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

/// Solves the initial-boundary value problem with `u(x, 1) = phi(x)`.
pub fn solve(params: &ModelParams, src: &SourceParam, grid: &Grid) -> Result<Field> {
    let initial = src.spline()?.eval_many(&grid.x_nodes);
    solve_profile(params, grid, &initial, None)
}

/// Solves from an arbitrary initial profile sampled on the grid nodes.
pub fn solve_profile(
    params: &ModelParams,
    grid: &Grid,
    initial: &[f64],
    forcing: Option<Forcing<'_>>,
) -> Result<Field> {
    let mut values = Vec::with_capacity(grid.nx() * grid.nt());
    march(params, grid, initial, forcing, |_, u| {
        values.extend_from_slice(u);
        true
    })?;
    Ok(Field {
        values,
        grid: grid.clone(),
    })
}

/// Point values `u(x_i, t_k)` as an `x_points.len() x t_points.len()` matrix.
pub fn observe(field: &Field, x_points: &[f64], t_points: &[f64]) -> Result<Vec<Vec<f64>>> {
    let grid = field.grid();
    let xi = x_points
        .iter()
        .map(|&x| grid.x_index(x))
        .collect::<Result<Vec<_>>>()?;
    let tn = t_points
        .iter()
        .map(|&t| grid.t_index(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(xi
        .iter()
        .map(|&i| tn.iter().map(|&n| field.at(n, i)).collect())
        .collect())
}

/// Same result as `observe(&solve(..))` without storing the whole field.
pub fn solve_observed(
    params: &ModelParams,
    src: &SourceParam,
    grid: &Grid,
    x_points: &[f64],
    t_points: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let xi = x_points
        .iter()
        .map(|&x| grid.x_index(x))
        .collect::<Result<Vec<_>>>()?;
    let tn = t_points
        .iter()
        .map(|&t| grid.t_index(t))
        .collect::<Result<Vec<_>>>()?;
    let last = tn.iter().copied().max().unwrap_or(0);
    let mut out = vec![vec![0.0; tn.len()]; xi.len()];
    let initial = src.spline()?.eval_many(&grid.x_nodes);
    march(params, grid, &initial, None, |level, u| {
        for (k, _) in tn.iter().enumerate().filter(|(_, n)| **n == level) {
            for (row, &i) in out.iter_mut().zip(&xi) {
                row[k] = u[i];
            }
        }
        level < last
    })?;
    Ok(out)
}

/// Time-marching kernel. `visit(level, u)` is called for every level starting
/// at 0 and may return `false` to stop early.
fn march<F>(
    params: &ModelParams,
    grid: &Grid,
    initial: &[f64],
    forcing: Option<Forcing<'_>>,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &[f64]) -> bool,
{
    params.validate()?;
    let nx = grid.nx();
    if initial.len() != nx {
        return Err(Error::DimensionMismatch {
            expected: nx,
            found: initial.len(),
        });
    }
    let tau_max = stability_check(params, grid.h);
    if grid.tau > tau_max * (1.0 + 1e-12) {
        return Err(Error::Unstable {
            tau: grid.tau,
            tau_max,
        });
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            level: 0,
            time: grid.t_nodes[0],
        });
    }

    let diff = params.diffusivity / (grid.h * grid.h);
    let inv_k = 1.0 / params.capacity;
    let tau = grid.tau;
    let mut cur = initial.to_vec();
    let mut next = vec![0.0; nx];
    if !visit(0, &cur) {
        return Ok(());
    }
    for n in 0..grid.nt() - 1 {
        let t = grid.t_nodes[n];
        let r = params.growth.at(t);
        for i in 0..nx {
            let c = cur[i];
            let left = if i == 0 { cur[1] } else { cur[i - 1] };
            let right = if i == nx - 1 { cur[nx - 2] } else { cur[i + 1] };
            let mut rate = diff * (left - 2.0 * c + right) + (1.0 - c * inv_k) * r * c;
            if let Some(g) = forcing {
                rate += g(grid.x_nodes[i], t);
            }
            next[i] = c + tau * rate;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                level: n + 1,
                time: grid.t_nodes[n + 1],
            });
        }
        std::mem::swap(&mut cur, &mut next);
        if !visit(n + 1, &cur) {
            break;
        }
    }
    Ok(())
}
