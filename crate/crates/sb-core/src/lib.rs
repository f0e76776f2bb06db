//! Simulated-bifurcation optimization for fully connected Ising problems,
//! with an encoding layer that maps constrained integer portfolio and
//! multi-period trading-trajectory problems onto Ising instances.
//!
//! The crate is organized around five pieces:
//!
//! - [`ising`] — dense Ising problems, energy evaluation, exhaustive
//!   ground-state search for small instances.
//! - [`solver`] — the simulated-bifurcation dynamics: a network of pumped
//!   Kerr-nonlinear oscillators whose adiabatic passage through the
//!   bifurcation point settles oscillator signs into a (near-)ground state.
//! - [`portfolio`] — binary-bit encoding of integer weight trajectories into
//!   spins, with hard per-asset quantity caps and per-bit trading costs.
//! - [`market`] — synthetic market scenarios sampled from geometric Brownian
//!   motion, with optional drift, seasonality and a risk-free asset.
//! - [`oracle`] — independent ground-truth solvers (exhaustive trajectory
//!   enumeration, random portfolio clouds, per-period local optimization)
//!   used to verify solver output.

pub mod error;
pub mod ising;
pub mod market;
pub mod oracle;
pub mod portfolio;
pub mod solver;

pub use error::{Error, Result};
pub use ising::{IsingProblem, SpinVector, ENUMERATION_LIMIT};
pub use market::{add_risk_free, generate_scenario, MarketConfig};
pub use oracle::{
    count_better_configurations, enumerate_best_trajectory, per_time_local_optimal,
    random_portfolios, EnumerationResult, LocalFallback, LocalOptimum, VALUE_EXPORT_BITS,
};
pub use portfolio::{
    build_layout, decode, encode, objective, objective_of_spins, spins_from_weights,
    transition_bit_costs, EncodedPortfolio, MarketScenario, PortfolioSpec, SpinLayout, TradeCost,
    TrajectorySolution, WeightTrajectory,
};
pub use solver::{
    a_of_p, classical_hamiltonian, evolve, evolve_full, evolve_full_with_init, evolve_with_init,
    pump_schedule, sample_initial_state, solve_best_of, write_trace_csv, BestOfResult, Detuning,
    Dynamics, OscillatorState, SbParams, SolveResult, TraceSample,
};
