//! Randomized cross-validation: quantities that the library computes by
//! different routes (closed forms, bisection, quadrature, convolution,
//! enumeration, simulation) must agree on seeded random parameter draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relayer_game::equilibrium::{potential_increment, solve_equilibrium};
use relayer_game::game::{
    first_selection_prob, no_upload_utility, upload_gain, upload_utility,
};
use relayer_game::montecarlo::{enumerate_exact, simulate};
use relayer_game::robustness::coalition_curve;
use relayer_game::{GameParams, SolverConfig};

fn random_params(rng: &mut ChaCha8Rng, n_max: u32) -> GameParams {
    let n = rng.random_range(3..=n_max);
    let b = rng.random_range(20.0..500.0);
    let c_f = b * rng.random_range(0.05..0.95);
    let c_l = c_f * rng.random_range(0.01..0.99);
    let p = b * rng.random_range(0.05..12.0);
    GameParams::new(n, b, c_f, c_l, p).unwrap()
}

#[test]
fn solver_root_agrees_with_dense_gain_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let config = SolverConfig::default();
    for _ in 0..30 {
        let params = random_params(&mut rng, 40);
        let report = solve_equilibrium(&params, &config).unwrap();
        // Locate the sign change of the gain on a 1e-5 grid; the solver's
        // root must land inside that bracket.
        let mut bracket = None;
        let mut prev = upload_gain(&params, 1e-5);
        for k in 2..=100_000u32 {
            let q = (k as f64 * 1e-5).min(1.0);
            let g = upload_gain(&params, q);
            if prev > 0.0 && g <= 0.0 {
                bracket = Some((q - 1e-5, q));
                break;
            }
            prev = g;
        }
        let (lo, hi) = bracket.expect("gain changes sign in (0, 1)");
        assert!(
            report.q_star >= lo - 1e-12 && report.q_star <= hi + 1e-12,
            "root {} outside scan bracket [{lo}, {hi}]",
            report.q_star
        );
    }
}

#[test]
fn reward_identities_hold_at_the_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let config = SolverConfig::default();
    for _ in 0..30 {
        let params = random_params(&mut rng, 50);
        let report = solve_equilibrium(&params, &config).unwrap();
        let q = report.q_star;
        // Indifference: both actions earn the reward.
        assert!((upload_utility(&params, q) - report.reward).abs() <= 1e-8);
        assert!((no_upload_utility(&params, q) - report.reward).abs() <= 1e-8);
        // Direct form: b - c_l - q_f (c_f - c_l), inside [b - c_f, b - c_l).
        let direct = params.b()
            - params.c_l()
            - first_selection_prob(params.n(), q) * (params.c_f() - params.c_l());
        assert!((report.reward - direct).abs() <= 1e-9);
        assert!(report.reward >= params.b() - params.c_f() - 1e-9);
        assert!(report.reward < params.b() - params.c_l());
        assert!(report.reward > 0.0);
    }
}

#[test]
fn potential_argmax_sits_at_the_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let config = SolverConfig::default();
    for _ in 0..10 {
        let params = random_params(&mut rng, 30);
        let report = solve_equilibrium(&params, &config).unwrap();
        // Cumulative quadrature over a 1e-3 grid; the maximum must fall
        // within one grid cell of the solver's root.
        let mut value = 0.0;
        let mut best = (0.0, 0.0f64);
        for k in 1..1000 {
            let a = (k - 1) as f64 * 1e-3;
            let b = k as f64 * 1e-3;
            value += potential_increment(&params, a, b).unwrap();
            if value > best.1 {
                best = (b, value);
            }
        }
        assert!(
            (best.0 - report.q_star).abs() <= 2e-3,
            "argmax {} vs root {}",
            best.0,
            report.q_star
        );
    }
}

#[test]
fn enumeration_validates_mixture_forms_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..40 {
        let params = random_params(&mut rng, 8);
        let n = params.n();
        let k = rng.random_range(1..n);
        let q_m = rng.random_range(0.0..=1.0);
        let q_r = rng.random_range(0.0..=1.0);
        let mut strategies = vec![q_m; k as usize];
        strategies.extend(vec![q_r; (n - k) as usize]);
        let exact = enumerate_exact(&params, &strategies).unwrap();
        let split = relayer_game::PopulationSplit::new(k, q_m, q_r).unwrap();
        let gp = relayer_game::robustness::expected_payoffs(&params, &split).unwrap();
        for (i, u) in exact.player_utilities.iter().enumerate() {
            let target = if i < k as usize {
                gp.mutant.unwrap()
            } else {
                gp.resident.unwrap()
            };
            assert!((u - target).abs() <= 1e-10, "{u} vs {target}");
        }
    }
}

#[test]
fn coalition_rows_match_enumeration_for_small_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let config = SolverConfig::default();
    for _ in 0..10 {
        let params = random_params(&mut rng, 8);
        let n = params.n();
        let q_star = solve_equilibrium(&params, &config).unwrap().q_star;
        for row in coalition_curve(&params, q_star).unwrap() {
            let mut strategies = vec![0.0; row.mutants as usize];
            strategies.extend(vec![q_star; (n - row.mutants) as usize]);
            let exact = enumerate_exact(&params, &strategies).unwrap();
            assert!((exact.player_utilities[0] - row.mutant).abs() <= 1e-10);
            assert!(
                (exact.player_utilities[n as usize - 1] - row.resident).abs() <= 1e-10
            );
        }
    }
}

#[test]
fn simulation_reproduces_enumerated_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for seed in [101u64, 202] {
        let params = random_params(&mut rng, 6);
        let n = params.n() as usize;
        let strategies: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..0.9)).collect();
        let exact = enumerate_exact(&params, &strategies).unwrap();
        let stats = simulate(&params, &strategies, 300_000, seed).unwrap();
        for (player, target) in stats.players.iter().zip(&exact.player_utilities) {
            let dev = (player.mean_payoff - target).abs();
            assert!(
                dev <= 3.0 * player.std_error,
                "mean {} vs exact {} (3 SE = {:e})",
                player.mean_payoff,
                target,
                3.0 * player.std_error
            );
        }
    }
}
