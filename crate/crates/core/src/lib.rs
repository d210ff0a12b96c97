//! Exact and numeric machinery for completions of fundamental groups relative
//! to a finite monodromy group: reduced bar constructions on finite
//! commutative DGA models, free and nilpotent graded Lie algebras with
//! truncated enveloping algebras, Chen iterated integrals with parallel
//! transport of Lie-algebra-valued 1-forms, and the braid/KZ worked example.
//!
//! Everything upstream of the ODE integrator is exact rational arithmetic;
//! the transport engine works in complex floats over the same enveloping
//! algebra code path.

pub mod rational;
pub mod linalg;
pub mod freelie;
pub mod envelope;
pub mod bar;
pub mod groups;
pub mod relcomp;
pub mod transport;
pub mod braid;
pub mod interchange;
pub mod checks;

pub use rational::{Rat, CRat};
