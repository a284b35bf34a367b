//! Semiclassical tunneling in the triple-well potential
//! `V(x) = (ω²/2) x² (x² − 1)²`.
//!
//! The pipeline runs from the classical kink ([`instanton`]) through the
//! Gelfand–Yaglom fluctuation determinants ([`fluctuation`]) to the dilute
//! instanton gas and its three lowest levels ([`dilute_gas`]). Every stage
//! that admits an exact check is cross-validated by brute-force grid
//! diagonalization in [`spectrum_oracle`].

pub mod cli;
pub mod dilute_gas;
pub mod fluctuation;
pub mod instanton;
pub mod numerics;
pub mod potential;
pub mod spectrum_oracle;
pub mod tridiagonal;
