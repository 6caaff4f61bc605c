use dglab::classifier::{lambda_sequence, log_add_exp, DeltaProfile};
use dglab::field::DiscreteField;
use dglab::grid::Grid;
use dglab::metric::{ball_volume, height_hstar, in_cone, in_dual_cone, solve_lambda};
use dglab::solver::{assemble, cascade_defect, solve, truncation_cascade, BoundaryData, DegenerateProblem, SolveOptions};
use dglab::Geometry;
use proptest::prelude::*;

fn geometries() -> impl Strategy<Value = Geometry> {
    prop_oneof![
        (0.3f64..2.0).prop_map(|s| Geometry::power_log(3, s).unwrap()),
        (0.2f64..1.5).prop_map(|s| Geometry::inverse_power(s).unwrap()),
        (0.5f64..3.0).prop_map(|a| Geometry::finite_type(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_duality(
        g in geometries(),
        x1 in 0.05f64..0.3,
        x2 in -0.1f64..0.1,
        t in 0.0f64..0.12,
        dy in -0.05f64..0.05,
        r in 0.01f64..0.1,
    ) {
        let x = [x1, x2];
        let y = [x1 + t, x2 + dy];
        prop_assert_eq!(in_cone(&g, x, y, r).unwrap(), in_dual_cone(&g, y, x, r).unwrap());
    }

    #[test]
    fn volume_nondecreasing_in_r(g in geometries(), n in 2usize..5, x1 in 0.01f64..0.3, r in 1e-4f64..0.15, k in 1.01f64..1.5) {
        let a = ball_volume(&g, n, x1, r).unwrap();
        let b = ball_volume(&g, n, x1, (r * k).min(0.3)).unwrap();
        prop_assert!(b >= a * (1.0 - 1e-12), "{a} > {b}");
    }

    #[test]
    fn derivative_matches_finite_difference(g in geometries(), x in 0.02f64..0.5) {
        let h = 1e-6 * x;
        let fd = (g.big_f(x + h).unwrap() - g.big_f(x - h).unwrap()) / (2.0 * h);
        let d1 = g.d1(x).unwrap();
        prop_assert!((fd - d1).abs() <= 1e-6 * d1.abs(), "{fd} vs {d1}");
    }

    #[test]
    fn linear_profile_scaling(r in 0.01f64..0.2, t in 0.01f64..0.2) {
        let g = Geometry::finite_type(1.0).unwrap();
        let a = solve_lambda(&g, 0.0, r).unwrap();
        let b = solve_lambda(&g, 0.0, 2.0 * r).unwrap();
        prop_assert!((b / a - 2.0).abs() < 1e-8);
        let h1 = height_hstar(&g, 0.0, t).unwrap();
        let h2 = height_hstar(&g, 0.0, 2.0 * t).unwrap();
        prop_assert!((h2 / h1 - 4.0).abs() < 1e-8);
    }

    #[test]
    fn lambda_decreases_with_sigma(s in 0.3f64..1.5, ds in 0.05f64..0.5, count in 1usize..40) {
        let lo = lambda_sequence(&DeltaProfile::of_geometry(&Geometry::power_log(3, s).unwrap()), 0.25, count).unwrap();
        let hi = lambda_sequence(&DeltaProfile::of_geometry(&Geometry::power_log(3, s + ds).unwrap()), 0.25, count).unwrap();
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(b.ln_lambda < a.ln_lambda);
        }
    }

    #[test]
    fn log_add_exp_matches_direct_sum(a in -300f64..300.0, b in -300f64..300.0) {
        let direct = (a.exp() + b.exp()).ln();
        prop_assert!((log_add_exp(a, b) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn cascade_identity(seed in any::<u64>(), k in 1usize..20) {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let grid = Grid::new(0.05, 0.35, 17, -0.15, 0.15, 17).unwrap();
        let v = DiscreteField::from_fn(&g, grid, |a, b| {
            let s = (seed % 1000) as f64 / 1000.0;
            (7.0 * a + 3.0 * b + s).sin()
        })
        .unwrap();
        let ws = truncation_cascade(&v, k).unwrap();
        prop_assert_eq!(ws.len(), k + 1);
        let (_, scaled) = cascade_defect(&ws);
        prop_assert!(scaled <= 1e-12, "{scaled}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_matrix_symmetric_and_maximum_principle(sigma in 0.3f64..1.5, seed in any::<u64>(), cells in 8usize..24) {
        let p = DegenerateProblem {
            geometry: Geometry::power_log(3, sigma).unwrap(),
            rect: [0.05, 0.35, -0.15, 0.15],
            cells: [cells, cells],
            boundary: BoundaryData::RandomPiecewise { seed, lattice: 3 },
        };
        let sys = assemble(&p).unwrap();
        prop_assert!(sys.matrix.is_symmetric());
        let u = solve(&sys, SolveOptions::default()).unwrap().u;
        let grid = *u.grid();
        let bnd: Vec<f64> = (0..grid.len())
            .filter(|&k| { let (i, j) = grid.ij(k); grid.is_boundary(i, j) })
            .map(|k| u.values()[k])
            .collect();
        let lo = bnd.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = bnd.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(u.min() >= lo - 1e-10 && u.max() <= hi + 1e-10);
    }
}
