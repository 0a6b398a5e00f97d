//! Analysis toolkit for the relayer upload game: a volunteer's-dilemma
//! style one-shot game in which `n` relayers decide independently whether
//! to upload a block, the first uploader bears the highest cost, and a
//! round with no upload penalizes everyone.
//!
//! Modules:
//! - [`game`]: parameters, realized payoffs, and the symmetric closed forms.
//! - [`equilibrium`]: the unique symmetric mixed equilibrium, outage
//!   probability, expected reward, potential function, and the pure strong
//!   equilibria.
//! - [`dynamics`]: replicator dynamics of the upload probability.
//! - [`robustness`]: mutant/resident payoff gaps, invasion barrier,
//!   coalition abstention, and stake-loss thresholds.
//! - [`montecarlo`]: seeded round simulation, exact enumeration, and a
//!   first-uploader uniformity test.
//!
//! Everything is generic over the floating-point type via
//! [`scalar::Scalar`]; the aliases below fix `f64`, which is what the CLI
//! and the validation suite use.

pub mod dynamics;
pub mod equilibrium;
pub mod game;
pub mod montecarlo;
pub mod robustness;
pub mod scalar;

pub use game::{Action, ActionProfile, GameError};

/// `f64` instantiations of the generic types.
pub type GameParams = game::GameParams<f64>;
pub type SolverConfig = equilibrium::SolverConfig<f64>;
pub type EquilibriumReport = equilibrium::EquilibriumReport<f64>;
pub type StrongEquilibria = equilibrium::StrongEquilibria<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type PopulationSplit = robustness::PopulationSplit<f64>;
pub type GroupPayoffs = robustness::GroupPayoffs<f64>;
pub type InvasionBarrierScan = robustness::InvasionBarrierScan<f64>;
pub type CoalitionOutcome = robustness::CoalitionOutcome<f64>;
pub type RobustnessReport = robustness::RobustnessReport<f64>;
pub type SimulationStats = montecarlo::SimulationStats<f64>;
pub type RoundOutcome = montecarlo::RoundOutcome<f64>;
pub type ExactExpectation = montecarlo::ExactExpectation<f64>;
pub type UniformityTest = montecarlo::UniformityTest<f64>;
