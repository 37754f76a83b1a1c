//! Time evolution of a two-level non-Hermitian Hamiltonian near its
//! exceptional points.
//!
//! The model is `H(λ) = diag(ω₁, ω₂) + λ·[[ε₁, δ], [δ, ε₂]]` with complex
//! constants. [`spectral`] gives its eigenvalues, exceptional points and
//! eigenvectors in closed form; [`evolution`] solves the Schrödinger equation
//! both away from and exactly at an exceptional point; [`jordan`] covers the
//! defective case through the Jordan decomposition of the generator;
//! [`sweep`] builds the trajectories, time series and width/beat observables.

pub mod error;
pub mod evolution;
pub mod jordan;
pub mod model;
pub mod numerics;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{Matrix2, ModelParams, StateVector};
pub use num_complex::Complex64;
