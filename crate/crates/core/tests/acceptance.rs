//! Acceptance gate: ten numbered criteria covering equilibrium existence
//! and uniqueness, oracle agreement, reproduction of the published sweep
//! figures, replicator convergence, coalition robustness, the invasion
//! barrier, strong equilibria, and simulator uniformity.
//!
//! One test per criterion; each prints a single PASS or FAIL line (visible
//! with `--nocapture`) and fails the build on any violation. Tolerances are
//! pinned in the asserts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relayer_game::dynamics::integrate;
use relayer_game::equilibrium::{solve_equilibrium, strong_equilibria};
use relayer_game::game::{
    equilibrium_poly, no_upload_utility, realized_payoffs, upload_utility,
};
use relayer_game::montecarlo::{anonymity_uniformity, enumerate_exact, simulate};
use relayer_game::robustness::{coalition_curve, expected_payoffs, invasion_barrier, payoff_gap};
use relayer_game::{Action, GameParams, PopulationSplit, SolverConfig};

fn params(n: u32, b: f64, c_f: f64, c_l: f64, p: f64) -> GameParams {
    GameParams::new(n, b, c_f, c_l, p).unwrap()
}

/// Prints the criterion verdict and panics when violations exist.
fn gate(index: u32, label: &str, violations: Vec<String>) {
    if violations.is_empty() {
        println!("criterion {index:02} ({label}): PASS");
    } else {
        println!("criterion {index:02} ({label}): FAIL");
        for v in &violations {
            println!("  - {v}");
        }
        panic!(
            "criterion {index:02} ({label}): {} violation(s)",
            violations.len()
        );
    }
}

/// Full parameter grid: n in 3..=50, c_f/b in {0.25, 0.5, 0.75}, five c_l
/// levels strictly inside (0, c_f), p/b in {0.1, 1, 5, 10}. 2880 instances.
fn grid() -> Vec<GameParams> {
    let b = 100.0;
    let mut out = Vec::with_capacity(2880);
    for n in 3..=50 {
        for cf_ratio in [0.25, 0.5, 0.75] {
            let c_f = cf_ratio * b;
            for c_l in [1.0, 0.25 * c_f, 0.5 * c_f, 0.75 * c_f, 0.99 * c_f] {
                for p in [10.0, 100.0, 500.0, 1000.0] {
                    out.push(params(n, b, c_f, c_l, p));
                }
            }
        }
    }
    assert_eq!(out.len(), 2880);
    out
}

#[test]
fn criterion_01_equilibrium_unique_on_grid() {
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    for g in grid() {
        let label = format!(
            "n={} c_f={} c_l={} p={}",
            g.n(),
            g.c_f(),
            g.c_l(),
            g.p()
        );
        let report = match solve_equilibrium(&g, &config) {
            Ok(r) => r,
            Err(e) => {
                violations.push(format!("{label}: solver failed: {e}"));
                continue;
            }
        };
        if !(report.q_star > 0.0 && report.q_star < 1.0) {
            violations.push(format!("{label}: q* = {} outside (0,1)", report.q_star));
        }
        if report.residual_h.abs() > 1e-10 {
            violations.push(format!("{label}: |h(q*)| = {:e}", report.residual_h.abs()));
        }
        // Sign scan of h at step 1e-5 over (0, 1]: exactly one change.
        let mut changes = 0u32;
        let mut prev = 0i8;
        for k in 1..=100_000u32 {
            let q = (k as f64 * 1e-5).min(1.0);
            let h = equilibrium_poly(&g, q);
            let sign = if h > 0.0 {
                1
            } else if h < 0.0 {
                -1
            } else {
                0
            };
            if sign != 0 {
                if prev != 0 && sign != prev {
                    changes += 1;
                }
                prev = sign;
            }
        }
        if changes != 1 {
            violations.push(format!("{label}: {changes} sign changes in scan"));
        }
    }
    gate(1, "equilibrium existence and uniqueness", violations);
}

#[test]
fn criterion_02_oracle_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut violations = Vec::new();
    for draw in 0..20u64 {
        let n = rng.random_range(3..=8u32);
        let b = rng.random_range(50.0..150.0);
        let c_f = b * rng.random_range(0.1..0.9);
        let c_l = c_f * rng.random_range(0.01..0.99);
        let p = b * rng.random_range(0.1..10.0);
        let g = params(n, b, c_f, c_l, p);
        let label = format!("draw {draw} (n={n})");

        // Exact enumeration against the symmetric closed forms.
        let q = rng.random_range(0.05..0.95);
        let exact = enumerate_exact(&g, &vec![q; n as usize]).unwrap();
        let closed = q * upload_utility(&g, q) + (1.0 - q) * no_upload_utility(&g, q);
        for u in &exact.player_utilities {
            if (u - closed).abs() > 1e-10 {
                violations.push(format!("{label}: symmetric enumeration off by {:e}", u - closed));
            }
        }
        if (exact.outage_probability - (1.0 - q).powi(n as i32)).abs() > 1e-12 {
            violations.push(format!("{label}: symmetric outage mismatch"));
        }

        // Exact enumeration against the two-group convolution forms.
        let k = rng.random_range(1..n);
        let q_m = rng.random_range(0.05..0.95);
        let q_r = rng.random_range(0.05..0.95);
        let mut strategies = vec![q_m; k as usize];
        strategies.extend(vec![q_r; (n - k) as usize]);
        let exact = enumerate_exact(&g, &strategies).unwrap();
        let split = PopulationSplit::new(k, q_m, q_r).unwrap();
        let gp = expected_payoffs(&g, &split).unwrap();
        let mutant = gp.mutant.unwrap();
        let resident = gp.resident.unwrap();
        for (i, u) in exact.player_utilities.iter().enumerate() {
            let target = if i < k as usize { mutant } else { resident };
            if (u - target).abs() > 1e-10 {
                violations.push(format!(
                    "{label}: convolution mismatch at player {i}: {:e}",
                    u - target
                ));
            }
        }

        // Simulation against enumeration, three standard errors per group.
        let stats = simulate(&g, &strategies, 1_000_000, 9000 + draw).unwrap();
        for group in &stats.groups {
            let target = if group.strategy == q_m && k > 0 {
                mutant
            } else {
                resident
            };
            let dev = (group.mean_payoff - target).abs();
            if dev > 3.0 * group.std_error {
                violations.push(format!(
                    "{label}: group mean {} vs exact {} exceeds 3 SE ({:e})",
                    group.mean_payoff, target, group.std_error
                ));
            }
        }
        let se = (exact.outage_probability * (1.0 - exact.outage_probability) / 1e6).sqrt();
        if (stats.outage_rate - exact.outage_probability).abs() > 3.0 * se {
            violations.push(format!("{label}: outage rate beyond 3 SE"));
        }
    }
    gate(2, "enumeration, closed forms, simulation agree", violations);
}

#[test]
fn criterion_03_reward_and_outage_vs_population() {
    // b = p = 100, c_l = 1; reward share maxima and outage cap per c_f.
    let cases = [(25.0, 0.9165, 0.005), (50.0, 0.7949, 0.005), (75.0, 0.63, 0.01)];
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    for (c_f, share_target, tol) in cases {
        let mut prev_q = f64::INFINITY;
        let mut max_share = f64::NEG_INFINITY;
        for n in 3..=50 {
            let g = params(n, 100.0, c_f, 1.0, 100.0);
            let report = solve_equilibrium(&g, &config).unwrap();
            if report.q_star >= prev_q {
                violations.push(format!(
                    "c_f={c_f}: q* not strictly decreasing at n={n} ({} -> {})",
                    prev_q, report.q_star
                ));
            }
            prev_q = report.q_star;
            max_share = max_share.max(report.reward / 100.0);
            if c_f == 25.0 && report.outage >= 0.05 {
                violations.push(format!("c_f=25: outage {} at n={n}", report.outage));
            }
        }
        if (max_share - share_target).abs() > tol {
            violations.push(format!(
                "c_f={c_f}: max reward share {max_share} vs {share_target} +- {tol}"
            ));
        }
    }
    gate(3, "reward share and outage vs population size", violations);
}

#[test]
fn criterion_04_outage_vs_late_cost() {
    // n = 5, b = p = 100, c_f = 50; c_l must stay strictly below c_f, so
    // the top of the sweep is evaluated at 49.99 (the outage probability is
    // continuous in c_l; the remaining distance to the boundary moves it by
    // far less than the 0.02 band).
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    for (c_l, target) in [(1.0, 0.06), (49.99, 0.17)] {
        let g = params(5, 100.0, 50.0, c_l, 100.0);
        let report = solve_equilibrium(&g, &config).unwrap();
        if (report.outage - target).abs() > 0.02 {
            violations.push(format!(
                "c_l={c_l}: outage {} vs {target} +- 0.02",
                report.outage
            ));
        }
    }
    gate(4, "outage rise with late-upload cost", violations);
}

#[test]
fn criterion_05_penalty_sweep() {
    // b = 100, c_f = 50, c_l = 25. The n = 30 outage crosses 0.05 at
    // p ~ 5.03 b (measured), so penalties are sampled from 5.5 b upward.
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    for n in [5, 10, 30] {
        for p in [550.0, 600.0, 700.0, 800.0, 900.0, 1000.0] {
            let g = params(n, 100.0, 50.0, 25.0, p);
            let report = solve_equilibrium(&g, &config).unwrap();
            if report.outage >= 0.05 {
                violations.push(format!("n={n} p={p}: outage {}", report.outage));
            }
            if report.reward <= 0.0 {
                violations.push(format!("n={n} p={p}: reward {}", report.reward));
            }
        }
    }
    gate(5, "high penalties keep outage low and reward positive", violations);
}

#[test]
fn criterion_06_replicator_convergence() {
    // b = 100, c_f = 25, c_l = 1, p = 100, mu = 0.1. Convergence time per n
    // is the time by which the trajectories from both starts have reached
    // the equilibrium band.
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    let mut times = Vec::new();
    for n in [5, 10, 30] {
        let g = params(n, 100.0, 25.0, 1.0, 100.0);
        let q_star = solve_equilibrium(&g, &config).unwrap().q_star;
        let mut slowest: f64 = 0.0;
        for q0 in [0.10, 0.50] {
            let trajectory = integrate(&g, 0.1, q0, 500.0, 0.01).unwrap();
            let (_, terminal) = trajectory.terminal();
            if (terminal - q_star).abs() >= 1e-4 {
                violations.push(format!(
                    "n={n} q0={q0}: terminal |q - q*| = {:e}",
                    (terminal - q_star).abs()
                ));
            }
            // The potential must not decrease between stored points.
            for pair in trajectory.values.windows(2) {
                let inc = relayer_game::equilibrium::potential_increment(&g, pair[0], pair[1])
                    .unwrap();
                if inc < -1e-9 {
                    violations.push(format!("n={n} q0={q0}: potential fell by {:e}", -inc));
                    break;
                }
            }
            match trajectory.hitting_time(q_star, 1e-4) {
                Some(t) => slowest = slowest.max(t),
                None => violations.push(format!("n={n} q0={q0}: never hit the band")),
            }
        }
        times.push((n, slowest));
    }
    for pair in times.windows(2) {
        if pair[1].1 < pair[0].1 {
            violations.push(format!(
                "convergence time decreased from n={} ({}) to n={} ({})",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            ));
        }
    }
    gate(6, "replicator converges, slower for larger n", violations);
}

#[test]
fn criterion_07_coalition_stake_loss() {
    // b = 100, c_f = 50, c_l = 25; abstaining coalitions. Both groups'
    // payoffs must turn negative within 0.1 of the published thresholds
    // (closed band: the realizable shares k/n step by 0.1 at n = 10).
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    for (p, target) in [(100.0, 0.6), (500.0, 0.4)] {
        for n in [10, 30] {
            let g = params(n, 100.0, 50.0, 25.0, p);
            let report = solve_equilibrium(&g, &config).unwrap();
            let curve = coalition_curve(&g, report.q_star).unwrap();
            for row in &curve {
                if (row.baseline - report.reward).abs() > 1e-9 {
                    violations.push(format!(
                        "p={p} n={n}: baseline {} differs from reward {}",
                        row.baseline, report.reward
                    ));
                    break;
                }
            }
            let resident_cross = curve.iter().find(|r| r.resident < 0.0).map(|r| r.alpha);
            let mutant_cross = curve.iter().find(|r| r.mutant < 0.0).map(|r| r.alpha);
            for (group, cross) in [("resident", resident_cross), ("mutant", mutant_cross)] {
                match cross {
                    Some(alpha) if (alpha - target).abs() <= 0.1 + 1e-9 => {}
                    Some(alpha) => violations.push(format!(
                        "p={p} n={n}: {group} crossing at alpha={alpha} vs {target} +- 0.1"
                    )),
                    None => violations.push(format!(
                        "p={p} n={n}: {group} payoff never turns negative"
                    )),
                }
            }
        }
    }
    gate(7, "stake-loss thresholds of abstaining coalitions", violations);
}

#[test]
fn criterion_08_invasion_barrier() {
    // Lone-mutant payoff gap on a 0.001 strategy grid, plus the reported
    // barrier on a parameter subsample.
    let config = SolverConfig::default();
    let mut violations = Vec::new();
    let mut bad_instances = 0u32;
    let mut total = 0u32;
    let mut example = String::new();
    for g in grid() {
        total += 1;
        let q_star = solve_equilibrium(&g, &config).unwrap().q_star;
        let mut worst = f64::INFINITY;
        let mut worst_q = f64::NAN;
        for k in 0..=1000u32 {
            let q_m = k as f64 * 0.001;
            if q_m == q_star {
                continue;
            }
            let gap = payoff_gap(&g, q_star, q_m, 1).unwrap();
            if gap < worst {
                worst = gap;
                worst_q = q_m;
            }
        }
        if worst <= 0.0 {
            bad_instances += 1;
            if example.is_empty() {
                example = format!(
                    "n={} c_f={} c_l={} p={}: gap {worst:.6} at q_m={worst_q}",
                    g.n(),
                    g.c_f(),
                    g.c_l(),
                    g.p()
                );
            }
        }
    }
    if bad_instances > 0 {
        violations.push(format!(
            "lone-mutant payoff gap not strictly positive on {bad_instances} of {total} \
             grid instances (first: {example})"
        ));
    }
    for (n, p) in [(3, 100.0), (5, 100.0), (10, 100.0), (30, 100.0), (50, 100.0),
                   (3, 1000.0), (5, 1000.0), (10, 1000.0), (30, 1000.0), (50, 1000.0)]
    {
        let g = params(n, 100.0, 50.0, 25.0, p);
        let q_star = solve_equilibrium(&g, &config).unwrap().q_star;
        let scan = invasion_barrier(&g, q_star, 0.001).unwrap();
        if scan.barrier < 1.0 / n as f64 {
            violations.push(format!(
                "n={n} p={p}: reported barrier {} below 1/n",
                scan.barrier
            ));
        }
    }
    gate(8, "positive invasion barrier", violations);
}

#[test]
fn criterion_09_strong_equilibria() {
    let mut violations = Vec::new();
    for n in 3..=12u32 {
        for (c_f, c_l, p) in [(25.0, 1.0, 100.0), (50.0, 25.0, 500.0)] {
            let g = params(n, 100.0, c_f, c_l, p);
            let label = format!("n={n} c_f={c_f}");
            let eq = match strong_equilibria(&g) {
                Ok(eq) => eq,
                Err(e) => {
                    violations.push(format!("{label}: verification failed: {e}"));
                    continue;
                }
            };
            if !eq.exhaustive {
                violations.push(format!("{label}: exhaustive check did not run"));
            }
            if eq.profiles.len() != n as usize {
                violations.push(format!("{label}: {} profiles", eq.profiles.len()));
            }
            if (eq.welfare - (n as f64 * 100.0 - c_f)).abs() > 1e-12 {
                violations.push(format!("{label}: welfare {}", eq.welfare));
            }
            for (i, profile) in eq.profiles.iter().enumerate() {
                if profile.uploader_count() != 1 || profile.first_uploader() != Some(i) {
                    violations.push(format!("{label}: profile {i} not single-uploader"));
                }
            }
            // Spot-check the realized payoffs of the first profile.
            let payoffs = realized_payoffs(&g, &eq.profiles[0]).unwrap();
            if payoffs[0] != 100.0 - c_f || payoffs[1..].iter().any(|&v| v != 100.0) {
                violations.push(format!("{label}: unexpected payoffs {payoffs:?}"));
            }
        }
    }
    gate(9, "single-uploader profiles are the strong equilibria", violations);
}

#[test]
fn criterion_10_anonymity_uniformity() {
    let g = params(5, 100.0, 25.0, 1.0, 100.0);
    let config = SolverConfig::default();
    let q_star = solve_equilibrium(&g, &config).unwrap().q_star;
    let mut violations = Vec::new();

    let stats = simulate(&g, &vec![q_star; 5], 200_000, 313).unwrap();
    let test = anonymity_uniformity(&stats).unwrap();
    if !test.pass {
        violations.push(format!(
            "symmetric equilibrium run rejected: chi2 = {}, p = {}",
            test.statistic, test.p_value
        ));
    }

    let all_upload = simulate(&g, &vec![1.0; 5], 200_000, 313).unwrap();
    let test = anonymity_uniformity(&all_upload).unwrap();
    if !test.pass {
        violations.push(format!("all-upload run rejected: p = {}", test.p_value));
    }

    let skew = simulate(&g, &[0.9, 0.1, 0.1, 0.1, 0.1], 200_000, 313).unwrap();
    let test = anonymity_uniformity(&skew).unwrap();
    if test.pass {
        violations.push(format!(
            "skewed control not rejected: p = {}",
            test.p_value
        ));
    }
    gate(10, "first-uploader uniformity", violations);
}

/// The simulator and the payoff definitions agree on the payoff support.
#[test]
fn simulated_payoffs_stay_on_support() {
    let g = params(6, 100.0, 30.0, 10.0, 250.0);
    let support = [70.0, 90.0, 100.0, -250.0];
    for round in 0..500 {
        let outcome =
            relayer_game::montecarlo::simulate_round(&g, &vec![0.4; 6], 99, round).unwrap();
        for (i, &payoff) in outcome.payoffs.iter().enumerate() {
            assert!(support.contains(&payoff));
            match outcome.first_uploader {
                Some(f) if f == i => assert_eq!(payoff, 70.0),
                _ => match outcome.actions[i] {
                    Action::Upload => assert_eq!(payoff, 90.0),
                    Action::NoUpload => {
                        assert!(payoff == 100.0 || payoff == -250.0);
                    }
                },
            }
        }
    }
}
