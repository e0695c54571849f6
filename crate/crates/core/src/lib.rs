//! Game theory in the operator representation.
//!
//! Games are described the way quantum mechanics describes ensembles: each
//! player's mixed strategy is a density matrix over a strategy basis, payoffs
//! are Hermitian operators on the joint strategy space, and expected payoff
//! is a trace pairing `E^i = Tr(ρ H^i)`. The crate covers the full pipeline:
//!
//! * [`matrix`]: complex matrices, Kronecker/partial-trace algebra, a
//!   deterministic Hermitian eigensolver, and the Hermitian matrix
//!   exponential.
//! * [`game`]: strategy bases, density-matrix states, manipulative
//!   (object-level) and abstract (operator-level) game definitions, SU(2)
//!   strategies, and unitary decompositions of restricted states.
//! * [`compiler`]: compiling manipulative definitions into Hermitian payoff
//!   operators, strategy-basis changes, and sub-game extraction.
//! * [`payoff`]: expected payoffs and the opponent-reduced payoff matrices
//!   single players respond to.
//! * [`solver`]: damped Boltzmann best-response iteration, inverse-temperature
//!   sweeps, and Metropolis sampling for diagonal games.
//! * [`equilibrium`]: best-response values, regrets, generalized Nash checks,
//!   and the known equilibrium family of the spin reflection game.
//! * [`reducibility`]: commutation tests, common eigenbases, and reduction of
//!   operator games to classical payoff tables when the structure permits.

pub mod compiler;
pub mod equilibrium;
pub mod error;
#[cfg(test)]
pub(crate) mod test_support;
pub mod game;
pub mod matrix;
pub mod payoff;
pub mod reducibility;
pub mod solver;

pub use error::{Error, Result};
