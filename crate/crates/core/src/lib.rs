//! Finite-dimensional quantum dynamical semigroups: generators in GKLS form,
//! their evolution, the entropies they may or may not decrease, and numerical
//! certificates for unitality, positivity and the qubit generator cones.

pub mod cli;
pub mod entropy;
pub mod gkls;
pub mod linalg;
pub mod qubit;
pub mod sampling;
pub mod states;
pub mod superop;
pub mod twirling;
