//! Discrete Malliavin calculus on finite Rademacher spaces, with
//! second-order Poincaré Berry-Esseen bounds for random-graph and
//! tree-percolation statistics.

pub mod bounds;
pub mod chaos;
pub mod error;
pub mod exact;
pub mod functional;
pub mod gradient;
pub mod harness;
pub mod montecarlo;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
pub use functional::{Functional, GradientOracles};
pub use space::{Configuration, RademacherSpace};
