//! Robustness of the symmetric equilibrium against mutant subpopulations.
//!
//! A split population has `k` mutants uploading with probability `q_m` and
//! `n - k` residents at `q_r`. Opponent upload counts are exact binomial
//! convolutions: a resident faces `Binomial(k, q_m) + Binomial(n-1-k, q_r)`,
//! a mutant faces `Binomial(k-1, q_m) + Binomial(n-k, q_r)`.

use serde::Serialize;
use std::fmt;

use crate::game::{Action, GameParams};
use crate::scalar::{cast, cast_u64, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum RobustnessError {
    /// Mixing probabilities must lie in [0, 1].
    Probability(f64),
    /// Mutant count incompatible with the requested quantity.
    MutantCount { mutants: u32, n: u32 },
    /// round(alpha * n) must land in [1, n-1].
    CoalitionSize { alpha: f64, n: u32 },
    /// Grid steps must be positive and at most 1.
    StepSize(f64),
}

impl fmt::Display for RobustnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobustnessError::Probability(q) => {
                write!(f, "mixing probability must lie in [0, 1], got {q}")
            }
            RobustnessError::MutantCount { mutants, n } => {
                write!(f, "mutant count {mutants} invalid for {n} players")
            }
            RobustnessError::CoalitionSize { alpha, n } => write!(
                f,
                "alpha = {alpha} rounds to a coalition outside [1, {}]",
                n - 1
            ),
            RobustnessError::StepSize(s) => write!(f, "grid step must lie in (0, 1], got {s}"),
        }
    }
}

impl std::error::Error for RobustnessError {}

/// Population of `mutants` players at `q_m` with the remaining players at
/// `q_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationSplit<S: Scalar> {
    mutants: u32,
    q_m: S,
    q_r: S,
}

impl<S: Scalar> PopulationSplit<S> {
    pub fn new(mutants: u32, q_m: S, q_r: S) -> Result<Self, RobustnessError> {
        for q in [q_m, q_r] {
            if !(q >= S::zero() && q <= S::one()) {
                return Err(RobustnessError::Probability(q.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(PopulationSplit { mutants, q_m, q_r })
    }

    pub fn mutants(&self) -> u32 {
        self.mutants
    }

    pub fn q_m(&self) -> S {
        self.q_m
    }

    pub fn q_r(&self) -> S {
        self.q_r
    }

    /// Mutant share k/n.
    pub fn epsilon(&self, n: u32) -> S {
        cast_u64::<S>(self.mutants as u64) / cast_u64::<S>(n as u64)
    }
}

/// Expected payoffs of one resident and one mutant under a split; `None`
/// for the group that is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupPayoffs<S: Scalar> {
    pub resident: Option<S>,
    pub mutant: Option<S>,
}

/// Expected payoff of one player given `m` uploaders among the opponents,
/// averaged over the uniform first-uploader draw.
///
/// Uploading: `(b - c_f)/(m+1) + m*(b - c_l)/(m+1)`. Abstaining: `b` when
/// `m >= 1`, `-p` on the outage.
pub fn conditional_payoff<S: Scalar>(params: &GameParams<S>, action: Action, m: u32) -> S {
    match action {
        Action::Upload => {
            let mf = cast_u64::<S>(m as u64);
            let total = mf + S::one();
            ((params.b() - params.c_f()) + mf * (params.b() - params.c_l())) / total
        }
        Action::NoUpload => {
            if m >= 1 {
                params.b()
            } else {
                -params.p()
            }
        }
    }
}

/// Probability mass of `Binomial(n, p)` as a dense vector of length n+1.
///
/// Direct multiplicative products for small n; logarithm-domain otherwise
/// (n > 60, or whenever `(1-p)^n` would underflow) to avoid zeroing the
/// whole vector.
fn binomial_pmf<S: Scalar>(n: u32, p: S) -> Vec<S> {
    let len = n as usize + 1;
    if p <= S::zero() {
        let mut v = vec![S::zero(); len];
        v[0] = S::one();
        return v;
    }
    if p >= S::one() {
        let mut v = vec![S::zero(); len];
        v[len - 1] = S::one();
        return v;
    }
    let q = S::one() - p;
    let log_floor = S::min_positive_value().ln() + cast::<S>(8.0);
    if n > 60 || cast_u64::<S>(n as u64) * q.ln() < log_floor {
        let lp = p.ln();
        let lq = q.ln();
        let mut out = Vec::with_capacity(len);
        let mut ln_choose = S::zero();
        for k in 0..=n {
            if k > 0 {
                ln_choose = ln_choose + cast_u64::<S>((n - k + 1) as u64).ln()
                    - cast_u64::<S>(k as u64).ln();
            }
            let kf = cast_u64::<S>(k as u64);
            let rest = cast_u64::<S>((n - k) as u64);
            out.push((ln_choose + kf * lp + rest * lq).exp());
        }
        out
    } else {
        let ratio = p / q;
        let mut out = Vec::with_capacity(len);
        let mut cur = q.powi(n as i32);
        out.push(cur);
        for k in 1..=n {
            cur = cur * cast_u64::<S>((n - k + 1) as u64) / cast_u64::<S>(k as u64) * ratio;
            out.push(cur);
        }
        out
    }
}

fn convolve<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expected payoff of a player mixing at `own_q` whose opponent upload
/// count is distributed as `dist`.
fn mixed_payoff<S: Scalar>(params: &GameParams<S>, own_q: S, dist: &[S]) -> S {
    let mut up = S::zero();
    let mut down = S::zero();
    for (m, &w) in dist.iter().enumerate() {
        up = up + w * conditional_payoff(params, Action::Upload, m as u32);
        down = down + w * conditional_payoff(params, Action::NoUpload, m as u32);
    }
    own_q * up + (S::one() - own_q) * down
}

/// Expected payoffs of a resident and a mutant under the split.
pub fn expected_payoffs<S: Scalar>(
    params: &GameParams<S>,
    split: &PopulationSplit<S>,
) -> Result<GroupPayoffs<S>, RobustnessError> {
    let n = params.n();
    let k = split.mutants;
    if k > n {
        return Err(RobustnessError::MutantCount { mutants: k, n });
    }
    let resident = (k <= n - 1).then(|| {
        let dist = convolve(
            &binomial_pmf(k, split.q_m),
            &binomial_pmf(n - 1 - k, split.q_r),
        );
        mixed_payoff(params, split.q_r, &dist)
    });
    let mutant = (k >= 1).then(|| {
        let dist = convolve(
            &binomial_pmf(k - 1, split.q_m),
            &binomial_pmf(n - k, split.q_r),
        );
        mixed_payoff(params, split.q_m, &dist)
    });
    Ok(GroupPayoffs { resident, mutant })
}

/// Resident-minus-mutant payoff difference `D(q_m, k/n)` with residents at
/// `q_star`. Requires `1 <= mutants <= n-1` so both groups exist.
pub fn payoff_gap<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
    q_m: S,
    mutants: u32,
) -> Result<S, RobustnessError> {
    let n = params.n();
    if mutants < 1 || mutants > n - 1 {
        return Err(RobustnessError::MutantCount { mutants, n });
    }
    let split = PopulationSplit::new(mutants, q_m, q_star)?;
    let gp = expected_payoffs(params, &split)?;
    Ok(gp.resident.expect("resident group exists") - gp.mutant.expect("mutant group exists"))
}

/// Per-coalition-size minimum of the payoff gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierPoint<S: Scalar> {
    pub mutants: u32,
    pub epsilon: S,
    pub min_gap: S,
    pub argmin_q_m: S,
}

/// Result of the invasion-barrier grid scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvasionBarrierScan<S: Scalar> {
    /// Largest mutant share k/n whose worst-case gap stays positive; 0 when
    /// even a single mutant can match or beat the residents.
    pub barrier: S,
    pub barrier_mutants: u32,
    pub per_k: Vec<BarrierPoint<S>>,
}

/// Scans mutant shares k/n for k = 1..n-1 and mutant strategies `q_m` over
/// a grid of the given step (locally refined around the minimum, `q_m =
/// q_star` excluded), and reports the largest share whose minimum gap is
/// strictly positive.
pub fn invasion_barrier<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
    q_m_step: S,
) -> Result<InvasionBarrierScan<S>, RobustnessError> {
    if !(q_m_step > S::zero() && q_m_step <= S::one()) {
        return Err(RobustnessError::StepSize(
            q_m_step.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let n = params.n();
    let mut per_k = Vec::with_capacity(n as usize - 1);
    let mut barrier = S::zero();
    let mut barrier_mutants = 0u32;
    for k in 1..n {
        let coarse = min_gap_over_grid(params, q_star, k, S::zero(), S::one(), q_m_step)?;
        let lo = (coarse.1 - q_m_step).max(S::zero());
        let hi = (coarse.1 + q_m_step).min(S::one());
        let fine = min_gap_over_grid(params, q_star, k, lo, hi, q_m_step / cast(100.0))?;
        let (min_gap, argmin_q_m) = if fine.0 < coarse.0 { fine } else { coarse };
        let epsilon = cast_u64::<S>(k as u64) / cast_u64::<S>(n as u64);
        if min_gap > S::zero() && epsilon > barrier {
            barrier = epsilon;
            barrier_mutants = k;
        }
        per_k.push(BarrierPoint {
            mutants: k,
            epsilon,
            min_gap,
            argmin_q_m,
        });
    }
    Ok(InvasionBarrierScan {
        barrier,
        barrier_mutants,
        per_k,
    })
}

fn min_gap_over_grid<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
    mutants: u32,
    lo: S,
    hi: S,
    step: S,
) -> Result<(S, S), RobustnessError> {
    let mut min_gap = S::infinity();
    let mut argmin = lo;
    let mut i = 0u64;
    loop {
        let q_m = (lo + cast_u64::<S>(i) * step).min(hi);
        if q_m != q_star {
            let gap = payoff_gap(params, q_star, q_m, mutants)?;
            if gap < min_gap {
                min_gap = gap;
                argmin = q_m;
            }
        }
        if q_m >= hi {
            return Ok((min_gap, argmin));
        }
        i += 1;
    }
}

/// Payoffs when a coalition abstains outright (`q_m = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoalitionOutcome<S: Scalar> {
    pub mutants: u32,
    /// Realized share mutants/n.
    pub alpha: S,
    pub resident: S,
    pub mutant: S,
    /// Homogeneous-population payoff (no coalition) for comparison.
    pub baseline: S,
}

/// Expected payoffs when a coalition of share `alpha` abstains while the
/// rest keep playing `q_star`. The coalition size is `round(alpha * n)`
/// (half away from zero) and must land in [1, n-1].
pub fn coalition_abstention<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
    alpha: S,
) -> Result<CoalitionOutcome<S>, RobustnessError> {
    let n = params.n();
    let k = (alpha * cast_u64::<S>(n as u64))
        .round()
        .to_u32()
        .filter(|k| (1..n).contains(k))
        .ok_or(RobustnessError::CoalitionSize {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            n,
        })?;
    coalition_outcome(params, q_star, k)
}

/// [`coalition_abstention`] at every realizable size k = 1..n-1.
pub fn coalition_curve<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
) -> Result<Vec<CoalitionOutcome<S>>, RobustnessError> {
    (1..params.n())
        .map(|k| coalition_outcome(params, q_star, k))
        .collect()
}

fn coalition_outcome<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
    k: u32,
) -> Result<CoalitionOutcome<S>, RobustnessError> {
    let n = params.n();
    let split = PopulationSplit::new(k, S::zero(), q_star)?;
    let gp = expected_payoffs(params, &split)?;
    let baseline_split = PopulationSplit::new(0, S::zero(), q_star)?;
    let baseline = expected_payoffs(params, &baseline_split)?
        .resident
        .expect("baseline population has residents");
    Ok(CoalitionOutcome {
        mutants: k,
        alpha: cast_u64::<S>(k as u64) / cast_u64::<S>(n as u64),
        resident: gp.resident.expect("resident group exists"),
        mutant: gp.mutant.expect("mutant group exists"),
        baseline,
    })
}

/// Smallest abstaining-coalition share k/n at which the resident payoff
/// turns negative; `None` when no size manages that.
pub fn stake_loss_threshold<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
) -> Result<Option<S>, RobustnessError> {
    for outcome in coalition_curve(params, q_star)? {
        if outcome.resident < S::zero() {
            return Ok(Some(outcome.alpha));
        }
    }
    Ok(None)
}

/// Summary row combining a split's payoffs with the global scan results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustnessReport<S: Scalar> {
    pub resident_payoff: S,
    pub mutant_payoff: S,
    /// Always `resident_payoff - mutant_payoff`.
    pub gap: S,
    pub stake_loss_threshold: Option<S>,
    pub invasion_barrier: S,
}

impl<S: Scalar> RobustnessReport<S> {
    pub fn new(
        resident_payoff: S,
        mutant_payoff: S,
        stake_loss_threshold: Option<S>,
        invasion_barrier: S,
    ) -> Self {
        RobustnessReport {
            resident_payoff,
            mutant_payoff,
            gap: resident_payoff - mutant_payoff,
            stake_loss_threshold,
            invasion_barrier,
        }
    }
}
