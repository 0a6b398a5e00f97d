//! Seeded Monte Carlo simulation of repeated rounds, exact enumeration of
//! small games, and a first-uploader uniformity test.
//!
//! Randomness comes from a single ChaCha8 generator (a counter-based
//! stream cipher RNG) seeded with an explicit 64-bit seed. Every round uses
//! its own ChaCha stream (stream id = round index), so outcomes depend only
//! on (seed, round index): rounds may be generated in any partition and
//! merged, and the merged statistics are bit-identical to a single pass.
//! Per round the draws are one uniform per player (Bernoulli upload) and,
//! when uploads exist, one integer draw selecting the first uploader
//! uniformly.
//!
//! Statistics are accumulated as integer event counts (payoffs take only
//! the four values `b - c_f`, `b - c_l`, `b`, `-p`), so means and standard
//! errors are exact functions of the counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

use crate::game::{realized_payoffs, Action, ActionProfile, GameParams};
use crate::robustness::conditional_payoff;
use crate::scalar::{cast, cast_u64, Scalar};

/// Largest player count `enumerate_exact` accepts (2^n profiles).
pub const MAX_ENUMERATION_N: u32 = 20;

/// Non-outage rounds the uniformity test requires.
pub const UNIFORMITY_MIN_ROUNDS: u64 = 100_000;

/// Significance level of the uniformity test.
pub const UNIFORMITY_SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    StrategyLength { expected: usize, got: usize },
    /// Upload probabilities must lie in [0, 1].
    StrategyRange(f64),
    ZeroRounds,
    /// 2^n enumeration refused above [`MAX_ENUMERATION_N`] players.
    EnumerationTooLarge(u32),
    /// The uniformity test needs at least [`UNIFORMITY_MIN_ROUNDS`]
    /// non-outage rounds.
    InsufficientRounds { non_outage: u64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::StrategyLength { expected, got } => {
                write!(f, "strategy vector has {got} entries, expected {expected}")
            }
            SimError::StrategyRange(q) => {
                write!(f, "upload probability must lie in [0, 1], got {q}")
            }
            SimError::ZeroRounds => write!(f, "round count must be positive"),
            SimError::EnumerationTooLarge(n) => write!(
                f,
                "exact enumeration supports at most {MAX_ENUMERATION_N} players, got {n}"
            ),
            SimError::InsufficientRounds { non_outage } => write!(
                f,
                "uniformity test needs {UNIFORMITY_MIN_ROUNDS} non-outage rounds, got {non_outage}"
            ),
        }
    }
}

impl std::error::Error for SimError {}

/// One fully resolved round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundOutcome<S: Scalar> {
    pub round: u64,
    pub actions: Vec<Action>,
    pub first_uploader: Option<usize>,
    pub payoffs: Vec<S>,
    pub outage: bool,
}

/// Per-player event counts and derived payoff statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlayerStats<S: Scalar> {
    pub strategy: S,
    /// Rounds in which this player uploaded first / late / free-rode /
    /// suffered the outage. The four counts sum to the round count.
    pub first_uploads: u64,
    pub late_uploads: u64,
    pub free_rides: u64,
    pub outages: u64,
    pub mean_payoff: S,
    /// Standard error of the mean over i.i.d. rounds.
    pub std_error: S,
}

/// Players sharing one strategy value, with the mean of their per-round
/// group-average payoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats<S: Scalar> {
    pub strategy: S,
    pub members: Vec<usize>,
    pub mean_payoff: S,
    pub std_error: S,
}

/// Aggregated simulation output; deterministic given (params, strategies,
/// rounds, seed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationStats<S: Scalar> {
    pub rounds: u64,
    pub seed: u64,
    pub outage_rounds: u64,
    pub outage_rate: S,
    /// Rounds in which player i was the first uploader.
    pub first_uploader_histogram: Vec<u64>,
    pub players: Vec<PlayerStats<S>>,
    pub groups: Vec<GroupStats<S>>,
}

/// Raw integer counts; merging two disjoint round ranges is exact.
struct Counts {
    outage_rounds: u64,
    first_hist: Vec<u64>,
    /// Per player: [first, late, free ride, outage].
    player: Vec<[u64; 4]>,
    /// Per group: non-outage rounds indexed by 2*(uploads in group) +
    /// (first uploader in group).
    group_patterns: Vec<Vec<u64>>,
}

impl Counts {
    fn new(n: usize, group_sizes: &[usize]) -> Self {
        Counts {
            outage_rounds: 0,
            first_hist: vec![0; n],
            player: vec![[0; 4]; n],
            group_patterns: group_sizes.iter().map(|g| vec![0; 2 * (g + 1)]).collect(),
        }
    }

    #[cfg(test)]
    fn merge(&mut self, other: &Counts) {
        self.outage_rounds += other.outage_rounds;
        for (a, b) in self.first_hist.iter_mut().zip(&other.first_hist) {
            *a += b;
        }
        for (a, b) in self.player.iter_mut().zip(&other.player) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.group_patterns.iter_mut().zip(&other.group_patterns) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

fn validate_strategies<S: Scalar>(n: usize, strategies: &[S]) -> Result<Vec<f64>, SimError> {
    if strategies.len() != n {
        return Err(SimError::StrategyLength {
            expected: n,
            got: strategies.len(),
        });
    }
    strategies
        .iter()
        .map(|s| {
            let q = s.to_f64().unwrap_or(f64::NAN);
            if (0.0..=1.0).contains(&q) {
                Ok(q)
            } else {
                Err(SimError::StrategyRange(q))
            }
        })
        .collect()
}

/// Maximal sets of players sharing one strategy value, in order of first
/// occurrence.
fn group_players<S: Scalar>(strategies: &[S]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut groups: Vec<(S, Vec<usize>)> = Vec::new();
    let mut group_of = vec![0usize; strategies.len()];
    for (i, &s) in strategies.iter().enumerate() {
        match groups.iter_mut().position(|(v, _)| *v == s) {
            Some(g) => {
                groups[g].1.push(i);
                group_of[i] = g;
            }
            None => {
                group_of[i] = groups.len();
                groups.push((s, vec![i]));
            }
        }
    }
    (groups.into_iter().map(|(_, m)| m).collect(), group_of)
}

/// Draws one round; outcomes depend only on (seed, round).
fn draw_round(
    base: &ChaCha8Rng,
    round: u64,
    strategies: &[f64],
    uploaders: &mut Vec<usize>,
) -> Option<usize> {
    let mut rng = base.clone();
    rng.set_stream(round);
    uploaders.clear();
    for (i, &q) in strategies.iter().enumerate() {
        if rng.random::<f64>() < q {
            uploaders.push(i);
        }
    }
    if uploaders.is_empty() {
        None
    } else {
        Some(uploaders[rng.random_range(0..uploaders.len())])
    }
}

fn collect_counts(
    strategies: &[f64],
    seed: u64,
    rounds: std::ops::Range<u64>,
    group_of: &[usize],
    group_sizes: &[usize],
) -> Counts {
    let n = strategies.len();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new(n, group_sizes);
    let mut uploaders = Vec::with_capacity(n);
    let mut group_uploads = vec![0usize; group_sizes.len()];
    for round in rounds {
        let first = draw_round(&base, round, strategies, &mut uploaders);
        match first {
            None => {
                counts.outage_rounds += 1;
                for p in &mut counts.player {
                    p[3] += 1;
                }
            }
            Some(first) => {
                counts.first_hist[first] += 1;
                for slot in &mut group_uploads {
                    *slot = 0;
                }
                let mut is_uploader = vec![false; n];
                for &u in uploaders.iter() {
                    is_uploader[u] = true;
                    group_uploads[group_of[u]] += 1;
                }
                for i in 0..n {
                    let class = if i == first {
                        0
                    } else if is_uploader[i] {
                        1
                    } else {
                        2
                    };
                    counts.player[i][class] += 1;
                }
                for (g, &ups) in group_uploads.iter().enumerate() {
                    let first_here = group_of[first] == g;
                    counts.group_patterns[g][2 * ups + usize::from(first_here)] += 1;
                }
            }
        }
    }
    counts
}

fn finalize<S: Scalar>(
    params: &GameParams<S>,
    strategies: &[S],
    groups: Vec<Vec<usize>>,
    counts: Counts,
    rounds: u64,
    seed: u64,
) -> SimulationStats<S> {
    let rf = cast_u64::<S>(rounds);
    let vals = [
        params.b() - params.c_f(),
        params.b() - params.c_l(),
        params.b(),
        -params.p(),
    ];
    let players = strategies
        .iter()
        .zip(&counts.player)
        .map(|(&strategy, c)| {
            let mut sum = S::zero();
            let mut sum_sq = S::zero();
            for (v, &k) in vals.iter().zip(c.iter()) {
                let kf = cast_u64::<S>(k);
                sum = sum + kf * *v;
                sum_sq = sum_sq + kf * *v * *v;
            }
            let mean = sum / rf;
            let var = (sum_sq / rf - mean * mean).max(S::zero());
            PlayerStats {
                strategy,
                first_uploads: c[0],
                late_uploads: c[1],
                free_rides: c[2],
                outages: c[3],
                mean_payoff: mean,
                std_error: (var / rf).sqrt(),
            }
        })
        .collect();
    let group_stats = groups
        .into_iter()
        .zip(&counts.group_patterns)
        .map(|(members, pattern)| {
            let size = cast_u64::<S>(members.len() as u64);
            let strategy = strategies[members[0]];
            // Per-round group totals: outage rounds contribute -size*p; a
            // non-outage round with u uploads and f firsts in the group
            // contributes u*(b-c_l) - f*(c_f-c_l) + (size-u)*b.
            let mut sum = S::zero();
            let mut sum_sq = S::zero();
            let outage_total = -size * params.p();
            sum = sum + cast_u64::<S>(counts.outage_rounds) * outage_total;
            sum_sq = sum_sq + cast_u64::<S>(counts.outage_rounds) * outage_total * outage_total;
            for (idx, &k) in pattern.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let ups = cast_u64::<S>((idx / 2) as u64);
                let first_here = idx % 2 == 1;
                let mut total = ups * (params.b() - params.c_l()) + (size - ups) * params.b();
                if first_here {
                    total = total - (params.c_f() - params.c_l());
                }
                let kf = cast_u64::<S>(k);
                sum = sum + kf * total;
                sum_sq = sum_sq + kf * total * total;
            }
            let mean = sum / (rf * size);
            let mean_sq = sum_sq / (rf * size * size);
            let var = (mean_sq - mean * mean).max(S::zero());
            GroupStats {
                strategy,
                members,
                mean_payoff: mean,
                std_error: (var / rf).sqrt(),
            }
        })
        .collect();
    SimulationStats {
        rounds,
        seed,
        outage_rounds: counts.outage_rounds,
        outage_rate: cast_u64::<S>(counts.outage_rounds) / rf,
        first_uploader_histogram: counts.first_hist,
        players,
        groups: group_stats,
    }
}

/// Simulates `rounds` independent rounds with per-player upload
/// probabilities `strategies`.
pub fn simulate<S: Scalar>(
    params: &GameParams<S>,
    strategies: &[S],
    rounds: u64,
    seed: u64,
) -> Result<SimulationStats<S>, SimError> {
    if rounds == 0 {
        return Err(SimError::ZeroRounds);
    }
    let strat = validate_strategies(params.n() as usize, strategies)?;
    let (groups, group_of) = group_players(strategies);
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let counts = collect_counts(&strat, seed, 0..rounds, &group_of, &sizes);
    Ok(finalize(params, strategies, groups, counts, rounds, seed))
}

/// Resolves a single round; the same (seed, round) always yields the same
/// outcome regardless of which other rounds are simulated.
pub fn simulate_round<S: Scalar>(
    params: &GameParams<S>,
    strategies: &[S],
    seed: u64,
    round: u64,
) -> Result<RoundOutcome<S>, SimError> {
    let n = params.n() as usize;
    let strat = validate_strategies(n, strategies)?;
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut uploaders = Vec::with_capacity(n);
    let first = draw_round(&base, round, &strat, &mut uploaders);
    let mut actions = vec![Action::NoUpload; n];
    for &u in &uploaders {
        actions[u] = Action::Upload;
    }
    let profile = ActionProfile::new(actions, first).expect("profile is consistent");
    let payoffs = realized_payoffs(params, &profile).expect("length matches");
    Ok(RoundOutcome {
        round,
        actions: profile.actions().to_vec(),
        first_uploader: first,
        payoffs,
        outage: first.is_none(),
    })
}

/// Exact per-player expected utilities and outage probability by summing
/// all 2^n profiles, weighting by the Bernoulli products and averaging the
/// uniform first-uploader draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactExpectation<S: Scalar> {
    pub player_utilities: Vec<S>,
    pub outage_probability: S,
}

pub fn enumerate_exact<S: Scalar>(
    params: &GameParams<S>,
    strategies: &[S],
) -> Result<ExactExpectation<S>, SimError> {
    let n = params.n();
    if n > MAX_ENUMERATION_N {
        return Err(SimError::EnumerationTooLarge(n));
    }
    let n = n as usize;
    validate_strategies(n, strategies)?;
    let mut utilities = vec![S::zero(); n];
    let mut outage = S::zero();
    for mask in 0u32..(1 << n) {
        let mut weight = S::one();
        for (i, &q) in strategies.iter().enumerate() {
            weight = weight * if mask & (1 << i) != 0 { q } else { S::one() - q };
        }
        if weight == S::zero() {
            continue;
        }
        let m = mask.count_ones();
        if m == 0 {
            outage = outage + weight;
            for u in utilities.iter_mut() {
                *u = *u - weight * params.p();
            }
        } else {
            let upload_value = conditional_payoff(params, Action::Upload, m - 1);
            for (i, u) in utilities.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *u = *u + weight * upload_value;
                } else {
                    *u = *u + weight * params.b();
                }
            }
        }
    }
    Ok(ExactExpectation {
        player_utilities: utilities,
        outage_probability: outage,
    })
}

/// Chi-square goodness-of-fit of the first-uploader histogram against the
/// uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityTest<S: Scalar> {
    pub statistic: S,
    pub dof: u32,
    pub p_value: S,
    pub significance: S,
    /// True when uniformity is not rejected at the significance level.
    pub pass: bool,
}

/// Tests whether first uploads are uniform across players, at significance
/// [`UNIFORMITY_SIGNIFICANCE`]. Requires [`UNIFORMITY_MIN_ROUNDS`]
/// non-outage rounds.
pub fn anonymity_uniformity<S: Scalar>(
    stats: &SimulationStats<S>,
) -> Result<UniformityTest<S>, SimError> {
    let non_outage = stats.rounds - stats.outage_rounds;
    if non_outage < UNIFORMITY_MIN_ROUNDS {
        return Err(SimError::InsufficientRounds { non_outage });
    }
    let n = stats.first_uploader_histogram.len();
    let expected = cast_u64::<S>(non_outage) / cast_u64::<S>(n as u64);
    let mut statistic = S::zero();
    for &obs in &stats.first_uploader_histogram {
        let d = cast_u64::<S>(obs) - expected;
        statistic = statistic + d * d / expected;
    }
    let dof = n as u32 - 1;
    let p_value = chi_square_p_value(statistic, dof);
    Ok(UniformityTest {
        statistic,
        dof,
        p_value,
        significance: cast(UNIFORMITY_SIGNIFICANCE),
        pass: p_value >= cast(UNIFORMITY_SIGNIFICANCE),
    })
}

/// Upper tail of the chi-square distribution: Q(dof/2, x/2).
fn chi_square_p_value<S: Scalar>(statistic: S, dof: u32) -> S {
    gamma_q(dof, statistic * cast::<S>(0.5))
}

/// ln Gamma(two_a / 2) for integer or half-integer arguments, by exact
/// recurrence from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
fn ln_gamma_half<S: Scalar>(two_a: u32) -> S {
    debug_assert!(two_a >= 1);
    let (mut a, mut acc) = if two_a % 2 == 0 {
        (S::one(), S::zero())
    } else {
        (
            cast::<S>(0.5),
            cast::<S>(0.5) * cast::<S>(std::f64::consts::PI).ln(),
        )
    };
    let target = cast_u64::<S>(two_a as u64) * cast::<S>(0.5);
    while a < target {
        acc = acc + a.ln();
        a = a + S::one();
    }
    acc
}

/// Regularized upper incomplete gamma Q(a, x) with a = two_a/2, via the
/// series for the lower function (x < a+1) or the Lentz continued fraction.
fn gamma_q<S: Scalar>(two_a: u32, x: S) -> S {
    let a = cast_u64::<S>(two_a as u64) * cast::<S>(0.5);
    if x <= S::zero() {
        return S::one();
    }
    let ln_prefix = a * x.ln() - x - ln_gamma_half::<S>(two_a);
    let eps = cast::<S>(1e-16);
    if x < a + S::one() {
        let mut ap = a;
        let mut term = S::one() / a;
        let mut sum = term;
        for _ in 0..1000 {
            ap = ap + S::one();
            term = term * x / ap;
            sum = sum + term;
            if term.abs() < sum.abs() * eps {
                break;
            }
        }
        (S::one() - sum * ln_prefix.exp()).max(S::zero())
    } else {
        let tiny = S::min_positive_value();
        let mut b = x + S::one() - a;
        let mut c = S::one() / tiny;
        let mut d = S::one() / b;
        let mut h = d;
        for i in 1..1000 {
            let i_f = cast_u64::<S>(i as u64);
            let an = -i_f * (i_f - a);
            b = b + cast::<S>(2.0);
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = S::one() / d;
            let del = d * c;
            h = h * del;
            if (del - S::one()).abs() < eps {
                break;
            }
        }
        (ln_prefix.exp() * h).min(S::one())
    }
}
