//! Error-resilient analog simulation with the [[4n,2n,2]] Hamiltonian code.
//!
//! Modules follow the pipeline: Pauli algebra, code construction, perturbative
//! gadgets, model encoders, noisy dynamics and a verification battery.

pub mod code;
pub mod error;
pub mod matrix;
pub mod pauli;

pub use error::{Error, Result};
pub mod gadget;
pub mod models;
pub mod rng;
pub mod dynamics;
pub mod verify;
