mod common;

use common::Manufactured;
use dlinv::forward::{observe, solve, solve_profile, stability_check};
use dlinv::model::{build_knots, GrowthRate, Grid, ModelParams, SourceParam, Q_EXACT_6};
use dlinv::observation::{generate_exact, ObservationSpec};
use proptest::prelude::*;

const MS: Manufactured = Manufactured {
    d: 0.1,
    k: 25.0,
    r: 0.5,
    l1: 1.0,
    l2: 6.0,
};

fn ms_params(t_end: f64) -> ModelParams {
    ModelParams {
        diffusivity: MS.d,
        capacity: MS.k,
        growth: GrowthRate::Constant { r: MS.r },
        l1: MS.l1,
        l2: MS.l2,
        t_end,
    }
}

/// Max-norm error against the manufactured solution at `t_end`.
fn ms_error(h: f64, tau: f64) -> f64 {
    let p = ms_params(2.0);
    let g = Grid::new(&p, h, tau).unwrap();
    let init: Vec<f64> = g.x_nodes.iter().map(|&x| MS.exact(x, 1.0)).collect();
    let forcing = |x: f64, t: f64| MS.forcing(x, t);
    let f = solve_profile(&p, &g, &init, Some(&forcing)).unwrap();
    let last = g.nt() - 1;
    g.x_nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| (f.at(last, i) - MS.exact(x, 2.0)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn manufactured_solution_converges_in_space_and_time() {
    let e: Vec<f64> = [0.25, 0.125, 0.0625]
        .iter()
        .map(|&h| ms_error(h, 0.4 * h * h))
        .collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "order {order} from {e:?}");
    }
}

#[test]
fn explicit_step_is_first_order_in_time() {
    let p = ms_params(2.0);
    let h = 0.25;
    let run = |tau: f64| {
        let g = Grid::new(&p, h, tau).unwrap();
        let init: Vec<f64> = g.x_nodes.iter().map(|&x| MS.exact(x, 1.0)).collect();
        let forcing = |x: f64, t: f64| MS.forcing(x, t);
        let f = solve_profile(&p, &g, &init, Some(&forcing)).unwrap();
        f.level(g.nt() - 1).to_vec()
    };
    let reference = run(0.025 / 64.0);
    let errs: Vec<f64> = [0.025, 0.0125, 0.00625]
        .iter()
        .map(|&tau| {
            run(tau)
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.95, "order {order} from {errs:?}");
    }
}

#[test]
fn aligned_grid_respects_stability_bound() {
    let p = ModelParams::default();
    for h in [0.05, 0.1, 0.2, 0.5] {
        let g = Grid::aligned(&p, h).unwrap();
        assert!(g.tau <= stability_check(&p, h));
        assert!(g.x_index(3.0).is_ok() && g.t_index(24.0).is_ok());
    }
}

#[test]
fn observations_equal_column_sums_of_exported_field() {
    let p = ModelParams::default();
    let g = Grid::aligned(&p, 0.05).unwrap();
    let src = SourceParam::new(build_knots(6).unwrap(), Q_EXACT_6.to_vec()).unwrap();
    let spec = ObservationSpec::default();
    let field = solve(&p, &src, &g).unwrap();
    let mut buf = Vec::new();
    field.write_csv(&mut buf, &spec.t_points).unwrap();
    let mut r = csv::Reader::from_reader(buf.as_slice());
    let rows: Vec<Vec<f64>> = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    let sums: Vec<f64> = (0..spec.t_points.len())
        .map(|k| {
            rows.iter()
                .filter(|row| spec.x_points.iter().any(|x| (row[0] - x).abs() < 1e-9))
                .map(|row| row[k + 1])
                .sum()
        })
        .collect();
    let ds = generate_exact(&p, &src, &g, &spec).unwrap();
    for (a, b) in sums.iter().zip(&ds.f) {
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }
    let m = observe(&field, &spec.x_points, &spec.t_points).unwrap();
    assert!(m.iter().flatten().all(|v| v.is_finite()));
}

fn admissible_profile(nx: usize, k: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=k, nx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounded_and_positive(
        init in admissible_profile(26, 25.0),
        d in 0.001f64..0.5,
        r in 0.0f64..3.0,
        b in 0.0f64..1.0,
    ) {
        let p = ModelParams {
            diffusivity: d,
            growth: GrowthRate::ExpDecay { r, b },
            t_end: 6.0,
            ..ModelParams::default()
        };
        let g = Grid::aligned(&p, 0.2).unwrap();
        let f = solve_profile(&p, &g, &init, None).unwrap();
        for u in f.levels().flatten() {
            prop_assert!(*u >= 0.0 && *u <= p.capacity);
        }
    }

    #[test]
    fn pure_diffusion_conserves_mass(init in admissible_profile(51, 25.0), d in 0.001f64..0.3) {
        let p = ModelParams {
            diffusivity: d,
            growth: GrowthRate::Constant { r: 0.0 },
            t_end: 4.0,
            ..ModelParams::default()
        };
        let g = Grid::aligned(&p, 0.1).unwrap();
        let f = solve_profile(&p, &g, &init, None).unwrap();
        let m0 = f.mass(0);
        for n in 1..g.nt() {
            prop_assert!((f.mass(n) - m0).abs() <= 1e-10 * m0.max(1e-300));
        }
    }

    #[test]
    fn ordered_initial_data_stay_ordered(
        lo in admissible_profile(26, 12.0),
        bump in admissible_profile(26, 12.0),
    ) {
        let p = ModelParams { t_end: 6.0, ..ModelParams::default() };
        let g = Grid::aligned(&p, 0.2).unwrap();
        let hi: Vec<f64> = lo.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let a = solve_profile(&p, &g, &lo, None).unwrap();
        let b = solve_profile(&p, &g, &hi, None).unwrap();
        for (x, y) in a.levels().flatten().zip(b.levels().flatten()) {
            prop_assert!(x <= y);
        }
    }
}
