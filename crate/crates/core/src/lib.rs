//! Exact I-function coefficients for abelian complete-intersection GIT
//! quotients `Y//T ⊂ X//T`, together with the convexity and quantum
//! Lefschetz diagnostics built on them.

pub mod analysis;
pub mod catalog;
pub mod checks;
pub mod cones;
pub mod engine;
pub mod ifunc;
pub mod linalg;
pub mod lp;
pub mod presentation;
pub mod rational;
pub mod ring;
pub mod sectors;
pub mod series;

pub use engine::{Engine, EngineError, EnumerationError, Grading};
pub use presentation::{Presentation, RationalClass};
pub use rational::Q;
