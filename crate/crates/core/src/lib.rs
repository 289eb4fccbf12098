//! Linear maps on `M_d(C)`: representations, the positivity hierarchy
//! between positivity and complete positivity, entanglement tooling, and the
//! dictionary between classical Markov evolutions (stochastic matrices,
//! Kolmogorov generators) and quantum ones (channels, GKLS generators).

pub mod bridge;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod json;
pub mod linalg;
pub mod linmap;
pub mod positivity;
pub mod rng;

pub use error::{Error, Result};
