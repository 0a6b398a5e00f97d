//! Replicator dynamics of the population upload probability:
//! `dq/dt = mu * q * (1 - q) * upload_gain(q)`.
//!
//! Trajectories from any interior start converge to the interior
//! equilibrium; the potential of [`crate::equilibrium::potential`] is
//! non-decreasing along them.

use serde::Serialize;
use std::fmt;

use crate::game::{upload_gain, GameParams};
use crate::scalar::{cast, cast_u64, Scalar};

/// Most points a stored trajectory keeps; longer runs are decimated.
pub const MAX_STORED_POINTS: usize = 10_000;

/// Overshoot beyond [0, 1] tolerated per step before integration aborts.
const OVERSHOOT_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// `q0` must lie strictly inside (0, 1); the boundaries are fixed points.
    BadStart(f64),
    /// Step size and horizon must be positive and finite.
    BadStep,
    /// A step left [0, 1] by more than the clamp limit; the step size is
    /// too coarse for the parameters.
    Overshoot { time: f64, value: f64 },
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::BadStart(q0) => {
                write!(f, "initial condition must lie in (0, 1), got {q0}")
            }
            DynamicsError::BadStep => write!(f, "dt and t_end must be positive finite"),
            DynamicsError::Overshoot { time, value } => write!(
                f,
                "integration left [0, 1] at t = {time} (q = {value}); reduce dt"
            ),
        }
    }
}

impl std::error::Error for DynamicsError {}

/// Stored integration output: strictly increasing times starting at 0 and
/// the matching upload probabilities, decimated to at most
/// [`MAX_STORED_POINTS`] points (the final point is always kept).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<S: Scalar> {
    pub mu: S,
    pub q0: S,
    pub dt: S,
    pub times: Vec<S>,
    pub values: Vec<S>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn terminal(&self) -> (S, S) {
        (
            *self.times.last().expect("trajectory is never empty"),
            *self.values.last().expect("trajectory is never empty"),
        )
    }

    /// First stored time at which `|q - target| < tol`, if any.
    pub fn hitting_time(&self, target: S, tol: S) -> Option<S> {
        self.times
            .iter()
            .zip(&self.values)
            .find(|(_, q)| (**q - target).abs() < tol)
            .map(|(t, _)| *t)
    }
}

/// Right-hand side `mu * q * (1 - q) * upload_gain(q)`.
pub fn replicator_rhs<S: Scalar>(params: &GameParams<S>, mu: S, q: S) -> S {
    mu * q * (S::one() - q) * upload_gain(params, q)
}

/// Integrates the replicator equation with fixed-step fourth-order
/// Runge-Kutta from `q0` over `[0, t_end]`.
///
/// The final step is shortened to land exactly on `t_end`. Values that
/// leave [0, 1] by at most 1e-12 are clamped; larger overshoots abort.
pub fn integrate<S: Scalar>(
    params: &GameParams<S>,
    mu: S,
    q0: S,
    t_end: S,
    dt: S,
) -> Result<Trajectory<S>, DynamicsError> {
    if !(q0 > S::zero() && q0 < S::one()) {
        return Err(DynamicsError::BadStart(q0.to_f64().unwrap_or(f64::NAN)));
    }
    if !(dt > S::zero() && dt.is_finite() && t_end > S::zero() && t_end.is_finite()) {
        return Err(DynamicsError::BadStep);
    }

    let total_steps = (t_end / dt).ceil().to_usize().unwrap_or(usize::MAX);
    let stride = total_steps / MAX_STORED_POINTS + 1;

    let mut times = Vec::with_capacity(total_steps / stride + 2);
    let mut values = Vec::with_capacity(total_steps / stride + 2);
    times.push(S::zero());
    values.push(q0);

    let mut q = q0;
    let mut t = S::zero();
    for step in 1..=total_steps {
        let h = if t + dt > t_end { t_end - t } else { dt };
        q = rk4_step(params, mu, q, h);
        t = if step == total_steps {
            t_end
        } else {
            cast_u64::<S>(step as u64) * dt
        };
        if q < S::zero() || q > S::one() {
            let excess = if q < S::zero() { -q } else { q - S::one() };
            if excess <= cast(OVERSHOOT_LIMIT) {
                q = q.min(S::one()).max(S::zero());
            } else {
                return Err(DynamicsError::Overshoot {
                    time: t.to_f64().unwrap_or(f64::NAN),
                    value: q.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if step % stride == 0 || step == total_steps {
            times.push(t);
            values.push(q);
        }
    }

    Ok(Trajectory {
        mu,
        q0,
        dt,
        times,
        values,
    })
}

fn rk4_step<S: Scalar>(params: &GameParams<S>, mu: S, q: S, h: S) -> S {
    let half = cast::<S>(0.5);
    let k1 = replicator_rhs(params, mu, q);
    let k2 = replicator_rhs(params, mu, q + half * h * k1);
    let k3 = replicator_rhs(params, mu, q + half * h * k2);
    let k4 = replicator_rhs(params, mu, q + h * k3);
    q + h / cast::<S>(6.0) * (k1 + cast::<S>(2.0) * k2 + cast::<S>(2.0) * k3 + k4)
}
