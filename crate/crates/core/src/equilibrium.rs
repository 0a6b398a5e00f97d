//! Symmetric mixed equilibrium of the upload game and the pure strong
//! equilibria.
//!
//! The equilibrium upload probability is the unique root of
//! [`game::equilibrium_poly`] in (0, 1), found by bisection. `h(0) = 0` for
//! every parameter set, so the bracket starts at a small positive floor
//! instead of 0 to exclude the spurious boundary root.

use serde::Serialize;
use std::fmt;

use crate::game::{
    equilibrium_poly, no_upload_utility, upload_gain, ActionProfile, GameParams,
};
use crate::robustness::conditional_payoff;
use crate::scalar::{cast, Scalar};

/// Bisection controls. Defaults: tolerance `1e-12` on `|h|`, 200
/// iterations, bracket floor `1e-9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<S: Scalar> {
    /// Accept a root once `|h(q)|` falls below this.
    pub tolerance: S,
    pub max_iterations: u32,
    /// Lower end of the initial bracket; must be positive to skip the
    /// spurious root at q = 0.
    pub bracket_floor: S,
}

impl<S: Scalar> Default for SolverConfig<S> {
    fn default() -> Self {
        SolverConfig {
            tolerance: cast(1e-12),
            max_iterations: 200,
            bracket_floor: cast(1e-9),
        }
    }
}

impl<S: Scalar> SolverConfig<S> {
    fn validate(&self) -> Result<(), SolveError> {
        if !(self.tolerance > S::zero() && self.tolerance.is_finite()) {
            return Err(SolveError::BadConfig("tolerance must be positive"));
        }
        if !(self.bracket_floor > S::zero() && self.bracket_floor < S::one()) {
            return Err(SolveError::BadConfig("bracket floor must lie in (0, 1)"));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::BadConfig("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Failures of the solver, the quadrature, or the exhaustive verification.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    BadConfig(&'static str),
    /// The polynomial did not change sign over the initial bracket; with
    /// validated parameters this indicates an internal bug.
    Bracket { at_floor: f64, at_one: f64 },
    NoConvergence { iterations: u32, residual: f64 },
    /// Adaptive quadrature exhausted its recursion depth.
    Quadrature,
    /// The exhaustive deviation check contradicted the expected equilibrium
    /// structure.
    Verification(String),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::BadConfig(msg) => write!(f, "invalid solver config: {msg}"),
            SolveError::Bracket { at_floor, at_one } => write!(
                f,
                "no sign change over the bracket: h(floor) = {at_floor}, h(1) = {at_one}"
            ),
            SolveError::NoConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "bisection did not reach tolerance after {iterations} iterations \
                 (best residual {residual:e})"
            ),
            SolveError::Quadrature => write!(f, "adaptive quadrature did not converge"),
            SolveError::Verification(msg) => write!(f, "equilibrium verification failed: {msg}"),
        }
    }
}

impl std::error::Error for SolveError {}

/// Solved symmetric equilibrium and its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumReport<S: Scalar> {
    /// Equilibrium upload probability.
    pub q_star: S,
    /// Outage probability `(1 - q_star)^n`.
    pub outage: S,
    /// Expected per-relayer reward at equilibrium.
    pub reward: S,
    /// `h(q_star)`.
    pub residual_h: S,
    /// `upload_gain(q_star)`; zero at an exact root.
    pub residual_gain: S,
    pub iterations: u32,
    /// Final bisection bracket around the root.
    pub bracket: (S, S),
}

/// Finds the unique root of the equilibrium polynomial in (0, 1) by
/// bisection on `[bracket_floor, 1]`.
pub fn solve_equilibrium<S: Scalar>(
    params: &GameParams<S>,
    config: &SolverConfig<S>,
) -> Result<EquilibriumReport<S>, SolveError> {
    config.validate()?;
    let mut lo = config.bracket_floor;
    let mut hi = S::one();
    let h_lo = equilibrium_poly(params, lo);
    let h_hi = equilibrium_poly(params, hi);
    if !(h_lo > S::zero() && h_hi < S::zero()) {
        return Err(SolveError::Bracket {
            at_floor: h_lo.to_f64().unwrap_or(f64::NAN),
            at_one: h_hi.to_f64().unwrap_or(f64::NAN),
        });
    }

    let half = cast::<S>(0.5);
    let mut best_q = lo;
    let mut best_h = h_lo;
    for iteration in 1..=config.max_iterations {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            // No representable midpoint left; the bracket is one ulp wide.
            break;
        }
        let h_mid = equilibrium_poly(params, mid);
        if h_mid.abs() < best_h.abs() {
            best_q = mid;
            best_h = h_mid;
        }
        if h_mid.abs() <= config.tolerance {
            return Ok(report(params, mid, h_mid, iteration, (lo, hi)));
        }
        if h_mid > S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_h.abs() <= config.tolerance {
        return Ok(report(
            params,
            best_q,
            best_h,
            config.max_iterations,
            (lo, hi),
        ));
    }
    Err(SolveError::NoConvergence {
        iterations: config.max_iterations,
        residual: best_h.abs().to_f64().unwrap_or(f64::NAN),
    })
}

fn report<S: Scalar>(
    params: &GameParams<S>,
    q_star: S,
    residual_h: S,
    iterations: u32,
    bracket: (S, S),
) -> EquilibriumReport<S> {
    EquilibriumReport {
        q_star,
        outage: outage_probability(params, q_star),
        reward: expected_reward(params, q_star),
        residual_h,
        residual_gain: upload_gain(params, q_star),
        iterations,
        bracket,
    }
}

/// Probability that nobody uploads: `(1 - q)^n`.
pub fn outage_probability<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    (S::one() - q).powi(params.n() as i32)
}

/// Expected per-relayer reward under symmetric mixing at `q`; at the
/// equilibrium both actions yield this value.
pub fn expected_reward<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    no_upload_utility(params, q)
}

/// Potential function `phi(q) = integral of upload_gain over [0, q]`
/// (integration constant 0). Its maximizer on [0, 1] is the equilibrium.
pub fn potential<S: Scalar>(params: &GameParams<S>, q: S) -> Result<S, SolveError> {
    potential_increment(params, S::zero(), q)
}

/// Integral of the gain over `[from, to]`; the increment of the potential
/// along a trajectory segment. More accurate than differencing two calls to
/// [`potential`] when the segment is short.
pub fn potential_increment<S: Scalar>(params: &GameParams<S>, from: S, to: S) -> Result<S, SolveError> {
    adaptive_simpson(&|x| upload_gain(params, x), from, to, cast(1e-11), 60)
}

fn adaptive_simpson<S: Scalar, F: Fn(S) -> S>(
    f: &F,
    a: S,
    b: S,
    tol: S,
    max_depth: u32,
) -> Result<S, SolveError> {
    if a == b {
        return Ok(S::zero());
    }
    let m = (a + b) * cast::<S>(0.5);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

fn simpson<S: Scalar>(a: S, b: S, fa: S, fm: S, fb: S) -> S {
    (b - a) / cast::<S>(6.0) * (fa + cast::<S>(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<S: Scalar, F: Fn(S) -> S>(
    f: &F,
    a: S,
    b: S,
    fa: S,
    fm: S,
    fb: S,
    whole: S,
    tol: S,
    depth: u32,
) -> Result<S, SolveError> {
    let m = (a + b) * cast::<S>(0.5);
    let lm = (a + m) * cast::<S>(0.5);
    let rm = (m + b) * cast::<S>(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= cast::<S>(15.0) * tol {
        return Ok(left + right + err / cast::<S>(15.0));
    }
    if depth == 0 {
        return Err(SolveError::Quadrature);
    }
    let half_tol = tol * cast::<S>(0.5);
    let l = simpson_step(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Ok(l + r)
}

/// The pure strong equilibria: exactly the `n` single-uploader profiles,
/// each attaining welfare `n*b - c_f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongEquilibria<S: Scalar> {
    /// Welfare every strong equilibrium attains.
    pub welfare: S,
    /// One profile per player: that player uploads, everyone else abstains.
    pub profiles: Vec<ActionProfile>,
    /// Whether the exhaustive deviation check ran (player counts up to 12).
    pub exhaustive: bool,
}

/// Cap for the exhaustive 2^n / coalition scans.
pub const EXHAUSTIVE_VERIFY_MAX_N: u32 = 12;

/// Describes the pure strong equilibria. For `n <= 12` this also verifies
/// exhaustively that the single-uploader profiles are exactly the pure Nash
/// equilibria and that no coalition deviation from them strictly improves
/// every deviator.
///
/// Deviation comparisons use expected payoffs under the uniform
/// first-uploader draw.
pub fn strong_equilibria<S: Scalar>(
    params: &GameParams<S>,
) -> Result<StrongEquilibria<S>, SolveError> {
    let n = params.n();
    let welfare = params.n_scalar() * params.b() - params.c_f();
    let profiles: Vec<ActionProfile> = (0..n as usize)
        .map(|i| ActionProfile::single_uploader(n, i))
        .collect();
    let exhaustive = n <= EXHAUSTIVE_VERIFY_MAX_N;
    if exhaustive {
        verify_nash_set(params)?;
        verify_coalition_proof(params)?;
    }
    Ok(StrongEquilibria {
        welfare,
        profiles,
        exhaustive,
    })
}

/// Expected payoff of one player in a pure profile with `uploaders` total
/// uploads, averaging over the uniform first draw.
fn pure_profile_payoff<S: Scalar>(params: &GameParams<S>, uploads: bool, uploaders: u32) -> S {
    use crate::game::Action::*;
    if uploads {
        debug_assert!(uploaders >= 1);
        conditional_payoff(params, Upload, uploaders - 1)
    } else {
        conditional_payoff(params, NoUpload, uploaders)
    }
}

/// Scans all 2^n pure profiles: the profiles with no strictly improving
/// unilateral deviation must be exactly the n single-uploader ones.
fn verify_nash_set<S: Scalar>(params: &GameParams<S>) -> Result<(), SolveError> {
    let n = params.n();
    for mask in 0u32..(1 << n) {
        let m = mask.count_ones();
        let mut is_nash = true;
        for i in 0..n {
            let uploads = mask & (1 << i) != 0;
            let current = pure_profile_payoff(params, uploads, m);
            let deviated = if uploads {
                pure_profile_payoff(params, false, m - 1)
            } else {
                pure_profile_payoff(params, true, m + 1)
            };
            if deviated > current {
                is_nash = false;
                break;
            }
        }
        if is_nash != (m == 1) {
            return Err(SolveError::Verification(format!(
                "profile mask {mask:#b} (uploaders = {m}): nash = {is_nash}"
            )));
        }
    }
    Ok(())
}

/// Checks every coalition deviation from each single-uploader profile.
///
/// A deviation by coalition C that strictly improves all of C also strictly
/// improves all of the subset that actually changes action, so scanning
/// flip-sets covers every (coalition, joint action) pair.
fn verify_coalition_proof<S: Scalar>(params: &GameParams<S>) -> Result<(), SolveError> {
    let n = params.n();
    for uploader in 0..n {
        let upl_bit = 1u32 << uploader;
        for flip in 1u32..(1 << n) {
            // Uploader set after flipping: {uploader} XOR-toggled by flip.
            let new_mask = upl_bit ^ flip;
            let m_new = new_mask.count_ones();
            let mut all_improve = true;
            for i in 0..n {
                if flip & (1 << i) == 0 {
                    continue;
                }
                let old = pure_profile_payoff(params, i == uploader, 1);
                let new = pure_profile_payoff(params, new_mask & (1 << i) != 0, m_new);
                if new <= old {
                    all_improve = false;
                    break;
                }
            }
            if all_improve {
                return Err(SolveError::Verification(format!(
                    "coalition flip {flip:#b} from single uploader {uploader} improves all members"
                )));
            }
        }
    }
    Ok(())
}
