//! Matrix eigenvalue transformations h(A) computed as a weighted double sum of
//! Hamiltonian evolutions e^{−it(kL+H)}, where A = L + iH, the weight over k is
//! a fixed analytic kernel and the weight over t is the inverse Laplace
//! transform g of h.
//!
//! Every stage has an exact small-matrix reference: eigen-decomposition
//! oracles, an independent scaling-and-squaring exponential, adaptive scalar
//! quadrature for the Laplace pairs, and an explicit LCU simulation.

pub mod cost;
pub mod engine;
pub mod error;
pub mod integrate;
pub mod kernel;
pub mod lcu;
pub mod linalg;
pub mod pairs;
mod par;
pub mod quadrature;
pub mod special;
pub mod summation;
pub mod tolerances;

pub use error::{Error, Result};
pub use num_complex::Complex64;
