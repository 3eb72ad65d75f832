//! Exact computations with compactifications of discrete groups.
//!
//! Free-group words and boundary points, exact cylinder measures and the
//! Poisson transform, convergence oracles for the Gromov, point-orbital
//! and orbital topologies, finite audits of declared topologies, and
//! witness generators that refute point-orbitality.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod groups;
#[doc(hidden)]
pub mod fuzzing;
pub mod measure;
pub mod random;
pub mod rational;
pub mod topology;
pub mod witness;
pub mod word;

pub use boundary::BoundaryPoint;
pub use error::{Error, ParseError, Result};
pub use measure::{CylinderFunction, CylinderMeasure};
pub use rational::Rational;
pub use word::{Letter, ReducedWord};
