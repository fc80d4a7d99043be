use neuroage::quadrature::gauss5;
use neuroage::roots::{nearest_index, newton_bisect};
use neuroage::steady::SteadyOptions;
use neuroage::upwind::upwind_step;
use neuroage::{
    build_grid, cfl_dt_itm, discrete_flux_map, discretize_initial, find_all_roots,
    invertibility_psi, itm_run, select_branch, stationary_density, stationary_flux_roots,
    BranchPolicy, HazardModel, InitialDensity, ItmOptions, Rate, Refractory, ScanOptions,
};
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = Rate> {
    prop_oneof![
        (0.1..2.0f64).prop_map(|value| Rate::Constant { value }),
        (0.2..2.0f64, 0.5..10.0f64)
            .prop_map(|(amplitude, decay)| Rate::ExpDecay { amplitude, decay }),
        (1.0..10.0f64, 0.2..1.0f64)
            .prop_map(|(amplitude, offset)| Rate::Hill { amplitude, offset }),
    ]
}

fn initial() -> impl Strategy<Value = InitialDensity> {
    prop_oneof![
        (0.1..1.0f64, 0.5..2.0f64)
            .prop_map(|(height, knee)| InitialDensity::PlateauExp { height, knee }),
        (0.0..1.5f64).prop_map(|onset| InitialDensity::ShiftedExp { onset }),
        (0.0..1.0f64, 0.2..2.0f64, 0.1..2.0f64).prop_map(|(start, len, height)| {
            InitialDensity::Indicator {
                start,
                end: start + len,
                height,
            }
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn upwind_keeps_sign_and_balances_mass(
        values in prop::collection::vec(0.0..2.0f64, 4..40),
        rate_scale in 0.0..5.0f64,
        courant in 0.05..0.9f64,
        inflow in 0.0..3.0f64,
    ) {
        let ds = 0.05;
        let dt = courant * ds;
        let rmax = (1.0 - courant) / dt;
        let rates: Vec<f64> = (0..values.len()).map(|j| rmax * (rate_scale / 5.0) * ((j % 3) as f64 / 2.0)).collect();
        let mut next = values.clone();
        let outflow = upwind_step(&mut next, &rates, inflow, courant, dt, 0).unwrap();
        prop_assert!(next.iter().all(|&v| v >= 0.0));
        let loss: f64 = rates.iter().zip(&values).map(|(r, v)| r * v).sum::<f64>() * dt;
        let before: f64 = values.iter().sum();
        let after: f64 = next.iter().sum();
        let expected = before + courant * inflow - outflow - loss;
        prop_assert!((after - expected).abs() <= 1e-12 * (1.0 + before));
    }

    #[test]
    fn itm_conserves_mass_and_bounds_flux(rate in rate(), sigma in 0.0..1.0f64, n0 in initial()) {
        let model = HazardModel::new(rate, Refractory::Fixed { sigma });
        let ds = 0.05;
        let p_sup = model.norms().unwrap().p_sup;
        let t_final = 2.0;
        let bound = cfl_dt_itm(ds, p_sup).unwrap();
        let dt = t_final / (t_final / (0.9 * bound)).ceil();
        let grid = build_grid(ds, dt, n0.support_bound() + t_final + 4.0, t_final).unwrap();
        let init = discretize_initial(&n0, &grid).unwrap();
        let mass0 = init.mass();
        let traj = itm_run(init, &model, &grid, ItmOptions::default()).unwrap();
        prop_assert!(traj.mass_drift() <= 1e-10, "drift {}", traj.mass_drift());
        prop_assert!(traj.density_min.iter().all(|&v| v >= -1e-14));
        prop_assert!(traj.flux.iter().all(|&n| n >= 0.0 && n <= p_sup * mass0 * (1.0 + 1e-12)));
    }

    #[test]
    fn scanned_roots_are_fixed_points(rate in rate(), sigma in 0.0..1.0f64, n0 in initial()) {
        let model = HazardModel::new(rate, Refractory::Fixed { sigma });
        let grid = build_grid(0.05, 0.01, n0.support_bound() + 1.0, 1.0).unwrap();
        let n = discretize_initial(&n0, &grid).unwrap();
        let report = find_all_roots(&n, &model, &ScanOptions::default()).unwrap();
        prop_assert!(!report.roots.is_empty());
        prop_assert!(report.roots.windows(2).all(|w| w[0] < w[1]));
        for (&x, &psi) in report.roots.iter().zip(&report.psi) {
            prop_assert!((x - discrete_flux_map(&n, &model, x)).abs() <= 1e-10 * x.max(1.0));
            prop_assert!((psi - invertibility_psi(&n, &model, x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn stationary_density_has_unit_mass(amplitude in 0.2..2.0f64, decay in 0.5..10.0f64, sigma in 0.0..1.0f64) {
        let model = HazardModel::new(Rate::ExpDecay { amplitude, decay }, Refractory::Fixed { sigma });
        let roots = stationary_flux_roots(&model, &SteadyOptions::default()).unwrap();
        prop_assert_eq!(roots.len(), 1);
        let grid = build_grid(0.01, 0.005, 200.0, 1.0).unwrap();
        let n = stationary_density(&model, roots[0], 1.0, &grid);
        prop_assert!((n.mass() - 1.0).abs() <= 1e-6, "mass {}", n.mass());
        prop_assert!(n.values()[0] <= roots[0] * (1.0 + 1e-12) && n.values()[0] >= roots[0] * (1.0 - 0.01 * amplitude));
    }

    #[test]
    fn newton_bisect_refines_any_sign_change(a in -3.0..-0.1f64, b in 0.1..3.0f64, shift in -0.09..0.09f64) {
        let g = |x: f64| ((x - shift).powi(3) + 0.5 * (x - shift), 3.0 * (x - shift).powi(2) + 0.5);
        let x = newton_bisect(&g, a, b, 1e-14);
        prop_assert!((x - shift).abs() <= 1e-12);
    }

    #[test]
    fn nearest_policy_minimizes_distance(
        mut roots in prop::collection::vec(0.0..5.0f64, 1..6),
        previous in 0.0..5.0f64,
    ) {
        roots.sort_by(f64::total_cmp);
        let i = select_branch(&roots, previous, BranchPolicy::Nearest).unwrap();
        prop_assert_eq!(i, nearest_index(&roots, previous));
        prop_assert!(roots.iter().all(|r| (r - previous).abs() >= (roots[i] - previous).abs()));
        prop_assert_eq!(select_branch(&roots, previous, BranchPolicy::Lowest).unwrap(), 0);
        prop_assert_eq!(select_branch(&roots, previous, BranchPolicy::Highest).unwrap(), roots.len() - 1);
    }

    #[test]
    fn gauss5_is_exact_to_degree_nine(c in prop::collection::vec(-2.0..2.0f64, 10), a in -1.0..0.0f64, w in 0.1..2.0f64) {
        let b = a + w;
        let poly = |x: f64| c.iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let antideriv = |x: f64| c.iter().enumerate().map(|(k, &ck)| ck * x.powi(k as i32 + 1) / (k + 1) as f64).sum::<f64>();
        let exact = antideriv(b) - antideriv(a);
        prop_assert!((gauss5(poly, a, b) - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }
}
