//! Exactly solvable dynamics of a spin-1/2 coupled to a planar quantum rotor.
//!
//! The Hamiltonian `H = L_z²/(2I) + Δ S_x + g L_z S_z` conserves the rotor
//! angular momentum, so every rotor sector `m` evolves under its own static
//! effective field `Δ x̂ + g m ẑ`. This crate computes the per-sector spectra
//! and propagators in closed form ([`model`]), the entangling dynamics of
//! rotor superpositions together with reduced density matrices, purity, and
//! entanglement entropy ([`entanglement`]), and cross-checks everything
//! against a brute-force matrix-evolution oracle with no shared numerics
//! ([`oracle`]). The [`cli`] module drives it all from the command line.

pub mod cli;
pub mod entanglement;
mod error;
pub mod model;
pub mod oracle;
pub mod scenarios;

pub use error::{Error, Result};
pub use model::{ModelParams, SectorIndex, SectorSpectrum, Spinor};
