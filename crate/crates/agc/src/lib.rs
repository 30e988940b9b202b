//! Assume-guarantee contract toolkit for LTL robotic mission specifications.
//!
//! The crate models mission objectives as LTL assume-guarantee contracts,
//! checks consistency and refinement against a typed world model, and
//! searches a component library for the best candidate composition. When a
//! candidate falls short, it either computes the missing specification via
//! the contract quotient or patches the specification via separation and
//! merging.

pub mod cli;
pub mod contract;
pub mod engine;
pub mod library;
pub mod ltl;
pub mod machine;
pub mod mission;
pub mod patterns;
pub mod report;
pub mod sat;
pub mod world;

pub use contract::Contract;
pub use ltl::{Ap, Formula};
pub use world::WorldModel;
