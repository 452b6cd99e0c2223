use forel_core::analysis::{
    coupling_drift, coupling_series, fenchel_coupling, max_deviation, regret, regret_bound, CouplingReference,
};
use forel_core::dynamics::{integrate_primal, PrimalField};
use forel_core::equilibrium::{interior_equilibrium, max_support_equilibrium};
use forel_core::{catalog, Error, ForelSystem, GameSpec, Method, MixedProfile, RegularizerKind, ScoreState};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn scores(sys: &ForelSystem, x: &MixedProfile) -> ScoreState {
    ScoreState::new(
        sys.regularizers()
            .iter()
            .zip(x.as_slices())
            .map(|(r, xi)| r.preimage(xi).unwrap())
            .collect(),
    )
    .unwrap()
}

fn interior(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    })
}

fn kind() -> impl Strategy<Value = RegularizerKind> {
    prop_oneof![Just(RegularizerKind::Entropic), Just(RegularizerKind::Euclidean)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coupling_is_conserved_in_zero_sum_games_with_interior_equilibrium(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0,
        x in interior(2), y in interior(2),
    ) {
        // Cyclic sign pattern: no saddle point, so the equilibrium is interior.
        let m = DMatrix::from_row_slice(2, 2, &[a.abs() + 0.1, -(b.abs() + 0.1), -(c.abs() + 0.1), d.abs() + 0.1]);
        let game = GameSpec::zero_sum(m).unwrap();
        let x_star = interior_equilibrium(&game).unwrap();
        let sys = ForelSystem::uniform(game, RegularizerKind::Entropic).unwrap();
        let x0 = MixedProfile::new(vec![x, y]).unwrap();
        let traj = sys.integrate(&scores(&sys, &x0), 10.0, 1e-3, Method::Rk4, 50).unwrap();
        let g = coupling_series(&traj, sys.regularizers(), &CouplingReference::unweighted(x_star)).unwrap();
        prop_assert!(max_deviation(&g) <= 1e-7, "{}", max_deviation(&g));
    }

    #[test]
    fn regret_respects_the_initial_score_bound(
        k0 in kind(), k1 in kind(), x in interior(3), y in interior(2),
    ) {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, -0.5, -1.0, 2.0, 0.25, 0.0]);
        let game = GameSpec::zero_sum(m).unwrap();
        let regs = vec![
            forel_core::Regularizer::new(k0, 3).unwrap(),
            forel_core::Regularizer::new(k1, 2).unwrap(),
        ];
        let sys = ForelSystem::new(game, regs.clone()).unwrap();
        let y0 = scores(&sys, &MixedProfile::new(vec![x, y]).unwrap());
        let traj = sys.integrate(&y0, 20.0, 1e-3, Method::Rk4, 20).unwrap();
        for (i, r) in regs.iter().enumerate() {
            let bound = regret_bound(r, y0.player(i)).unwrap();
            for (t, reg) in regret(&traj, i).unwrap() {
                prop_assert!(t * reg <= bound + 1e-6, "player {i} t {t}: {} > {bound}", t * reg);
            }
        }
    }

    #[test]
    fn regret_from_prox_center_is_below_omega(k0 in kind(), k1 in kind(), shift in -3.0f64..3.0) {
        let regs = vec![
            forel_core::Regularizer::new(k0, 2).unwrap(),
            forel_core::Regularizer::new(k1, 2).unwrap(),
        ];
        let game = GameSpec::zero_sum(DMatrix::from_row_slice(2, 2, &[1.0 + shift, 2.0, 0.0, 1.0])).unwrap();
        let sys = ForelSystem::new(game, regs.clone()).unwrap();
        let traj = sys.integrate(&ScoreState::zeros(&[2, 2]), 20.0, 1e-3, Method::Rk4, 20).unwrap();
        for (i, r) in regs.iter().enumerate() {
            for (t, reg) in regret(&traj, i).unwrap() {
                prop_assert!(t * reg <= r.omega() + 1e-6);
            }
        }
    }
}

#[test]
fn coupling_slope_matches_drift() {
    let game = catalog::dominant_strategy();
    let eq = max_support_equilibrium(&catalog::dominant_strategy_matrix()).unwrap();
    let reference = CouplingReference::unweighted(eq.x_star);
    let sys = ForelSystem::uniform(game, RegularizerKind::Entropic).unwrap();
    let x0 = MixedProfile::new(vec![vec![0.3, 0.7], vec![0.2, 0.8]]).unwrap();
    let h = 1e-3;
    let traj = sys.integrate(&scores(&sys, &x0), 2.0, h, Method::Rk4, 1).unwrap();
    let g = coupling_series(&traj, sys.regularizers(), &reference).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..g.len() - 1 {
        let slope = (g[k + 1] - g[k - 1]) / (2.0 * h);
        let drift = coupling_drift(&sys, &reference, &traj.states()[k]).unwrap();
        assert!(drift < 0.0);
        worst = worst.max((slope - drift).abs());
    }
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn euler_converges_at_first_order() {
    let sys = ForelSystem::uniform(catalog::matching_pennies(), RegularizerKind::Entropic).unwrap();
    let x0 = MixedProfile::new(vec![vec![0.8, 0.2], vec![0.5, 0.5]]).unwrap();
    let y0 = scores(&sys, &x0);
    let reference = sys.integrate(&y0, 2.0, 1e-4, Method::Rk4, 20000).unwrap();
    let target = reference.profiles().last().unwrap().clone();
    let err = |h: f64| {
        let t = sys.integrate(&y0, 2.0, h, Method::Euler, 1_000_000).unwrap();
        t.profiles().last().unwrap().sup_distance(&target)
    };
    let ratio = err(2e-3) / err(1e-3);
    assert!((1.8..2.2).contains(&ratio), "{ratio}");
}

#[test]
fn euclidean_scores_match_projection_dynamics_inside_the_simplex() {
    let game = catalog::matching_pennies();
    let sys = ForelSystem::uniform(game.clone(), RegularizerKind::Euclidean).unwrap();
    let x0 = MixedProfile::new(vec![vec![0.6, 0.4], vec![0.45, 0.55]]).unwrap();
    let traj = sys.integrate(&scores(&sys, &x0), 1.0, 1e-3, Method::Rk4, 100).unwrap();
    let primal = integrate_primal(
        &game,
        PrimalField::Projection { support_tol: 1e-12 },
        &x0,
        1.0,
        1e-3,
        Method::Rk4,
        100,
    )
    .unwrap();
    for (a, (_, b)) in traj.profiles().iter().zip(&primal) {
        assert!(a.is_interior(0.0));
        assert!(a.sup_distance(b) < 1e-10);
    }
}

#[test]
fn weighted_coupling_is_conserved_on_transformed_cycle() {
    let game = catalog::matching_pennies_cycle(4)
        .with_affine(vec![
            forel_core::Affine::new(0.5, 2.0),
            forel_core::Affine::new(1.5, 0.0),
            forel_core::Affine::new(4.0, -3.0),
            forel_core::Affine::new(1.0, 1.0),
        ])
        .unwrap();
    let sys = ForelSystem::uniform(game.clone(), RegularizerKind::Entropic).unwrap();
    let reference = CouplingReference::for_game(&game, MixedProfile::uniform(&[2; 4])).unwrap();
    let x0 = MixedProfile::new(vec![vec![0.7, 0.3], vec![0.4, 0.6], vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
    let y0 = scores(&sys, &x0);
    let traj = sys.integrate(&y0, 20.0, 1e-3, Method::Rk4, 100).unwrap();
    let g = coupling_series(&traj, sys.regularizers(), &reference).unwrap();
    assert!(max_deviation(&g) < 1e-8);
    assert!((g[0] - fenchel_coupling(sys.regularizers(), &reference, &y0).unwrap()).abs() < 1e-15);
}

#[test]
fn guard_reports_divergence_time() {
    let game = GameSpec::zero_sum(DMatrix::from_row_slice(2, 2, &[1e8, 1e8, 0.0, 0.0])).unwrap();
    let sys = ForelSystem::uniform(game, RegularizerKind::Entropic).unwrap();
    match sys.integrate(&ScoreState::zeros(&[2, 2]), 100.0, 1e-2, Method::Rk4, 1) {
        Err(Error::Diverged { last_time }) => assert!(last_time > 0.0 && last_time < 100.0),
        other => panic!("expected divergence, got {other:?}"),
    }
}
