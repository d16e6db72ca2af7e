//! Boolean satisfiability as a spin system.
//!
//! Parse DIMACS CNF ([`cnf`]), solve and enumerate models ([`satcore`]),
//! compile formulas into pairwise Ising Hamiltonians ([`ising`]), relax them
//! with Metropolis annealing ([`anneal`]) and reduce the trajectories to
//! order parameters and correlations ([`analysis`]). [`pipeline`] wires the
//! stages together for the `spinsat` command-line tool.

pub mod analysis;
pub mod anneal;
pub mod cnf;
pub mod dyadic;
mod error;
pub mod ising;
pub mod numfmt;
pub mod pipeline;
pub mod satcore;

pub use error::{Error, Result};
