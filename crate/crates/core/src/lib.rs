//! Discrete-time quantum walk of two fermions with a Thirring-type contact
//! interaction: single-particle Dirac walk, two-particle operators, analytic
//! eigen-solutions, a position-space simulator and a dense spectral oracle.

pub mod error;
pub mod numeric;
pub mod single;
pub mod oracle;
pub mod simulator;
pub mod solutions;
pub mod two_particle;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::{Boundary, ComplexMomentum, Momentum, Sign, Tolerances, WalkParams, C64};
