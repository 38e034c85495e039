//! Twisted gl(N) Gaudin model, its master T-operator and the classical
//! Calogero-Moser system.
//!
//! The crate builds exact transfer matrices of the inhomogeneous Gaudin
//! model from matrix derivatives of characters, checks the bilinear
//! identities of the KP hierarchy for the master T-operator, and compares
//! the quantum spectrum with the intersection of Lagrangian submanifolds in
//! the Calogero-Moser phase space.

pub mod calogero;
pub mod cli;
pub mod error;
pub mod gaudin;
pub mod kp_verifier;
pub mod linalg;
pub mod matrix_derivative;
pub mod partitions;
pub mod poly;
pub mod scalar;
pub mod spectrum;
pub mod tensor;

pub use error::{Error, Result};
