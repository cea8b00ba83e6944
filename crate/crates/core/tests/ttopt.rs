mod common;

use dlinv::ttopt::{discretize, maxvol, optimize, sweep, TTConfig, TTState, MAXVOL_TOL};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

#[test]
fn maxvol_is_near_the_brute_force_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (rows, cols) in [(6, 2), (8, 3)] {
        for _ in 0..200 {
            let m = random_matrix(&mut rng, rows, cols);
            let idx = maxvol(&m).unwrap();
            let got = common::det_of_rows(&m, &idx).abs();
            let best = common::brute_max_det(&m);
            assert!(got >= best * (1.0 + MAXVOL_TOL).powi(-(cols as i32)), "{got} < {best}");
        }
    }
}

#[test]
fn maxvol_coefficients_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let m = random_matrix(&mut rng, 40, 4);
        let idx = maxvol(&m).unwrap();
        let sq = DMatrix::from_fn(4, 4, |i, j| m[(idx[i], j)]);
        let c = &m * sq.try_inverse().unwrap();
        assert!(c.amax() <= 1.0 + MAXVOL_TOL + 1e-9);
    }
}

fn uniform_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
}

#[test]
fn separable_quadratics_hit_the_grid_argmin() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..50 {
        let d = rng.gen_range(2..=4);
        let n = rng.gen_range(5..=21);
        let grid = uniform_grid(n, -1.0, 1.0);
        let c: Vec<f64> = (0..d).map(|_| grid[rng.gen_range(0..n)]).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..10.0)).collect();
        let f = |q: &[f64]| q.iter().zip(&c).zip(&w).map(|((x, y), s)| s * (x - y).powi(2)).sum::<f64>();
        let cfg = TTConfig {
            n,
            r_max: rng.gen_range(1..=4),
            sweeps: 5,
            seed: trial,
            ..TTConfig::uniform(d, -1.0, 1.0)
        };
        let res = optimize(&f, &cfg).unwrap();
        let (arg, _) = common::grid_argmin(&vec![grid.clone(); d], f);
        assert_eq!(res.q_best, arg, "trial {trial}");
    }
}

#[test]
fn rosenbrock_reaches_the_nearest_node_to_the_minimum() {
    let cfg = TTConfig {
        n: 101,
        r_max: 4,
        sweeps: 10,
        ..TTConfig::uniform(2, -2.0, 2.0)
    };
    let res = optimize(&common::rosenbrock, &cfg).unwrap();
    let grid = discretize(&cfg);
    let nearest: Vec<f64> = grid
        .iter()
        .map(|g| *g.iter().min_by(|a, b| (*a - 1.0).abs().total_cmp(&(*b - 1.0).abs())).unwrap())
        .collect();
    assert!(res.j_best <= common::rosenbrock(&nearest), "{:?} {}", res.q_best, res.j_best);
}

#[test]
fn one_dimension_is_exhaustive() {
    let f = |q: &[f64]| (q[0] - 0.3).abs();
    let cfg = TTConfig {
        n: 11,
        sweeps: 1,
        ..TTConfig::uniform(1, 0.0, 1.0)
    };
    let res = optimize(&f, &cfg).unwrap();
    assert_eq!(res.eval_count, 11);
    let (arg, _) = common::grid_argmin(&discretize(&cfg), f);
    assert_eq!(res.q_best, arg);
}

#[test]
fn constant_objective() {
    let res = optimize(&|_: &[f64]| 3.25, &TTConfig { n: 7, sweeps: 1, ..TTConfig::uniform(3, 0.0, 1.0) }).unwrap();
    assert_eq!(res.j_best, 3.25);
    assert!(res.eval_count > 0);
}

#[test]
fn fully_pinned_problem_needs_one_evaluation() {
    let cfg = TTConfig {
        n: 9,
        fixed: vec![Some(0.25), Some(0.5), Some(0.75)],
        ..TTConfig::uniform(3, 0.0, 1.0)
    };
    let res = optimize(&|q: &[f64]| q.iter().sum::<f64>(), &cfg).unwrap();
    assert_eq!(res.q_best, vec![0.25, 0.5, 0.75]);
    assert_eq!(res.eval_count, 1);
}

#[test]
fn failed_evaluations_are_skipped() {
    let f = |q: &[f64]| if q[0] > 0.5 { f64::NAN } else { (q[0] - 0.25).powi(2) + q[1] * q[1] };
    let cfg = TTConfig { n: 9, ..TTConfig::uniform(2, 0.0, 1.0) };
    let res = optimize(&f, &cfg).unwrap();
    assert_eq!(res.q_best, vec![0.25, 0.0]);
}

fn objective_strategy() -> impl Strategy<Value = (usize, Vec<f64>, u64)> {
    (2usize..=5, any::<u64>()).prop_flat_map(|(d, seed)| {
        (Just(d), prop::collection::vec(-1.0f64..1.0, d), Just(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sweep_invariants((d, shift, seed) in objective_strategy(), r_max in 1usize..5) {
        // rotated, non-separable bowl with ripples
        let f = move |q: &[f64]| {
            let mut s = 0.0;
            for i in 0..q.len() {
                let a = q[i] - shift[i];
                let b = q[(i + 1) % q.len()] - shift[(i + 1) % q.len()];
                s += (a + 0.5 * b).powi(2) + 0.1 * (5.0 * a).sin().powi(2);
            }
            s
        };
        let cfg = TTConfig {
            n: 9,
            r_max,
            sweeps: 3,
            seed,
            record_evaluations: true,
            ..TTConfig::uniform(d, -1.0, 1.0)
        };
        let mut state = TTState::init(&cfg).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..cfg.sweeps {
            sweep(&f, &mut state, &cfg).unwrap();
            for set in state.left.iter().chain(&state.right) {
                prop_assert!(set.len() <= r_max);
            }
            prop_assert!(state.best_value() <= last);
            last = state.best_value();
        }
        let evals = state.evaluations();
        let min = evals.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(state.best_value(), min);
        prop_assert_eq!(evals.len(), state.eval_count);
        let best = state.best_point().unwrap();
        let grids = discretize(&cfg);
        for (k, v) in best.iter().enumerate() {
            prop_assert!(grids[k].contains(v));
        }
        prop_assert_eq!(f(&best), state.best_value());
    }

    #[test]
    fn optimize_is_deterministic(seed in any::<u64>()) {
        let f = |q: &[f64]| common::rosenbrock(q);
        let cfg = TTConfig { n: 21, sweeps: 2, seed, ..TTConfig::uniform(2, -2.0, 2.0) };
        let a = optimize(&f, &cfg).unwrap();
        let b = optimize(&f, &cfg).unwrap();
        prop_assert_eq!(a.q_best, b.q_best);
        prop_assert_eq!(a.eval_count, b.eval_count);
        let trace: Vec<f64> = a.trace.iter().map(|t| t.j_best).collect();
        prop_assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
