//! Single-round upload game among `n` relayers.
//!
//! Each relayer either uploads or abstains. When at least one uploads, one
//! uploader is drawn uniformly as "first" and pays the full upload cost
//! `c_f`; the remaining uploaders pay the late cost `c_l`; everyone earns
//! the reward `b`. When nobody uploads, everyone pays the outage penalty
//! `p`. Besides the realized payoffs this module carries the closed forms
//! for symmetric mixed play: the first-selection probability, the expected
//! utilities of uploading and abstaining, their gain, and the polynomial
//! whose interior root is the symmetric equilibrium.

use std::fmt;

use serde::Serialize;

use crate::scalar::{cast, cast_u64, Scalar};

/// A relayer's move in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Action {
    Upload,
    NoUpload,
}

/// Violations of the parameter or profile contracts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameError {
    /// The game needs at least three relayers.
    PlayerCount(u32),
    /// Costs must satisfy 0 < c_l < c_f < b.
    CostOrder,
    /// The outage penalty must be strictly positive.
    Penalty,
    /// Parameters must be finite numbers.
    NonFinite,
    /// An action profile's length must equal the player count.
    ProfileLength { expected: usize, got: usize },
    /// The first uploader must exist exactly when someone uploads, and must
    /// itself upload.
    FirstUploader,
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::PlayerCount(n) => {
                write!(f, "player count must satisfy n >= 3, got {n}")
            }
            GameError::CostOrder => write!(f, "costs must satisfy 0 < c_l < c_f < b"),
            GameError::Penalty => write!(f, "outage penalty must satisfy p > 0"),
            GameError::NonFinite => write!(f, "parameters must be finite"),
            GameError::ProfileLength { expected, got } => {
                write!(f, "action profile has {got} entries, expected {expected}")
            }
            GameError::FirstUploader => write!(
                f,
                "first uploader must be an uploader and present exactly when uploads exist"
            ),
        }
    }
}

impl std::error::Error for GameError {}

/// Validated parameter set: `n >= 3`, `0 < c_l < c_f < b`, `p > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams<S: Scalar> {
    n: u32,
    b: S,
    c_f: S,
    c_l: S,
    p: S,
}

impl<S: Scalar> GameParams<S> {
    pub fn new(n: u32, b: S, c_f: S, c_l: S, p: S) -> Result<Self, GameError> {
        if !(b.is_finite() && c_f.is_finite() && c_l.is_finite() && p.is_finite()) {
            return Err(GameError::NonFinite);
        }
        if n < 3 {
            return Err(GameError::PlayerCount(n));
        }
        if !(S::zero() < c_l && c_l < c_f && c_f < b) {
            return Err(GameError::CostOrder);
        }
        if p <= S::zero() {
            return Err(GameError::Penalty);
        }
        Ok(GameParams { n, b, c_f, c_l, p })
    }

    /// Number of relayers.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Reward every relayer earns when the upload happens.
    pub fn b(&self) -> S {
        self.b
    }

    /// Cost paid by the first uploader.
    pub fn c_f(&self) -> S {
        self.c_f
    }

    /// Cost paid by every late uploader.
    pub fn c_l(&self) -> S {
        self.c_l
    }

    /// Penalty every relayer pays on an outage (nobody uploads).
    pub fn p(&self) -> S {
        self.p
    }

    pub(crate) fn n_scalar(&self) -> S {
        cast_u64(self.n as u64)
    }
}

/// Pure action profile together with the resolved first uploader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionProfile {
    actions: Vec<Action>,
    first_uploader: Option<usize>,
}

impl ActionProfile {
    /// Builds a profile, checking that `first_uploader` is an uploading
    /// index exactly when at least one player uploads.
    pub fn new(actions: Vec<Action>, first_uploader: Option<usize>) -> Result<Self, GameError> {
        let uploads = actions.iter().any(|a| *a == Action::Upload);
        match first_uploader {
            Some(i) if uploads && actions.get(i) == Some(&Action::Upload) => {}
            None if !uploads => {}
            _ => return Err(GameError::FirstUploader),
        }
        Ok(ActionProfile {
            actions,
            first_uploader,
        })
    }

    /// Profile in which exactly one player uploads.
    pub fn single_uploader(n: u32, uploader: usize) -> Self {
        let mut actions = vec![Action::NoUpload; n as usize];
        actions[uploader] = Action::Upload;
        ActionProfile {
            actions,
            first_uploader: Some(uploader),
        }
    }

    /// Profile in which nobody uploads.
    pub fn all_no_upload(n: u32) -> Self {
        ActionProfile {
            actions: vec![Action::NoUpload; n as usize],
            first_uploader: None,
        }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn first_uploader(&self) -> Option<usize> {
        self.first_uploader
    }

    pub fn uploader_count(&self) -> usize {
        self.actions
            .iter()
            .filter(|a| **a == Action::Upload)
            .count()
    }
}

/// Realized payoff of every player under a resolved profile.
///
/// First uploader earns `b - c_f`, late uploaders `b - c_l`, abstainers `b`
/// when someone uploaded, and everyone `-p` on an outage.
pub fn realized_payoffs<S: Scalar>(
    params: &GameParams<S>,
    profile: &ActionProfile,
) -> Result<Vec<S>, GameError> {
    let n = params.n as usize;
    if profile.actions.len() != n {
        return Err(GameError::ProfileLength {
            expected: n,
            got: profile.actions.len(),
        });
    }
    let payoffs = match profile.first_uploader {
        None => vec![-params.p; n],
        Some(first) => profile
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| match a {
                Action::Upload if i == first => params.b - params.c_f,
                Action::Upload => params.b - params.c_l,
                Action::NoUpload => params.b,
            })
            .collect(),
    };
    Ok(payoffs)
}

/// Sum of realized payoffs; independent of which uploader is drawn first.
///
/// With `m >= 1` uploaders the welfare is `n*b - c_f - (m-1)*c_l`; an
/// outage yields `-n*p`.
pub fn welfare<S: Scalar>(params: &GameParams<S>, profile: &ActionProfile) -> Result<S, GameError> {
    let n = params.n as usize;
    if profile.actions.len() != n {
        return Err(GameError::ProfileLength {
            expected: n,
            got: profile.actions.len(),
        });
    }
    let m = profile.uploader_count();
    if m == 0 {
        Ok(-params.n_scalar() * params.p)
    } else {
        Ok(params.n_scalar() * params.b - params.c_f - cast_u64::<S>(m as u64 - 1) * params.c_l)
    }
}

/// Probability that an uploader is drawn first when each of the other
/// `n - 1` players uploads independently with probability `q`.
///
/// Equals the average of `1/(m+1)` over `m ~ Binomial(n-1, q)`, which
/// collapses to `(1 - (1-q)^n) / (n*q)`; extended by continuity to 1 at
/// `q = 0`.
pub fn first_selection_prob<S: Scalar>(n: u32, q: S) -> S {
    if q == S::zero() {
        return S::one();
    }
    let nf = cast_u64::<S>(n as u64);
    (S::one() - (S::one() - q).powi(n as i32)) / (nf * q)
}

/// Expected utility of uploading while the other `n - 1` players mix at `q`.
pub fn upload_utility<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    let q_f = first_selection_prob(params.n, q);
    q_f * (params.b - params.c_f) + (S::one() - q_f) * (params.b - params.c_l)
}

/// Expected utility of abstaining while the other `n - 1` players mix at `q`.
pub fn no_upload_utility<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    let none = (S::one() - q).powi(params.n as i32 - 1);
    params.b * (S::one() - none) - params.p * none
}

/// Expected gain of uploading over abstaining at symmetric mix `q`.
///
/// Strictly positive at 0 (`b - c_f + p`) and strictly negative at 1
/// (`-c_l - (c_f - c_l)/n`), so an indifference point exists in (0, 1).
pub fn upload_gain<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    upload_utility(params, q) - no_upload_utility(params, q)
}

/// Polynomial `n*q*(b+p)*(1-q)^(n-1) - n*q*c_l + (c_l-c_f)*(1-(1-q)^n)`.
///
/// Satisfies `h(q) = n * q * upload_gain(q)`, so its unique root in (0, 1)
/// is the symmetric equilibrium; the root at q = 0 is spurious.
pub fn equilibrium_poly<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    let nf = params.n_scalar();
    let one = S::one();
    nf * q * (params.b + params.p) * (one - q).powi(params.n as i32 - 1) - nf * q * params.c_l
        + (params.c_l - params.c_f) * (one - (one - q).powi(params.n as i32))
}

/// First derivative of [`equilibrium_poly`] in `q`.
pub fn equilibrium_poly_prime<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    let nf = params.n_scalar();
    let one = S::one();
    let n = params.n as i32;
    nf * (params.b + params.p)
        * ((one - q).powi(n - 1) - q * cast_u64::<S>(params.n as u64 - 1) * (one - q).powi(n - 2))
        - nf * params.c_l
        + nf * (params.c_l - params.c_f) * (one - q).powi(n - 1)
}

/// Second derivative of [`equilibrium_poly`] in `q`.
///
/// Factors as `n*(n-1)*(b+p)*(1-q)^(n-3) * (n*q - 2 - (c_l-c_f)/(b+p)*(1-q))`,
/// so it changes sign exactly once on (0, 1), at [`inflection_point`].
pub fn equilibrium_poly_second<S: Scalar>(params: &GameParams<S>, q: S) -> S {
    let nf = params.n_scalar();
    let one = S::one();
    let bp = params.b + params.p;
    nf * (nf - one) * bp * (one - q).powi(params.n as i32 - 3)
        * (nf * q - cast::<S>(2.0) - (params.c_l - params.c_f) / bp * (one - q))
}

/// The single inflection point of [`equilibrium_poly`] on (0, 1):
/// `(2*(b+p) + c_l - c_f) / (n*(b+p) + c_l - c_f)`.
pub fn inflection_point<S: Scalar>(params: &GameParams<S>) -> S {
    let bp = params.b + params.p;
    let d = params.c_l - params.c_f;
    (cast::<S>(2.0) * bp + d) / (params.n_scalar() * bp + d)
}
