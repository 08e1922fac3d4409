//! Exact computation and verification toolkit for the anticoncentration of
//! random permutation sums `sum_i a_i * b_{pi(i)}`.
//!
//! All engines work in exact rational arithmetic: the full distribution of
//! the sum over all n! pairings, its max point mass Q, its variance, the
//! additive-energy statistics of the coefficient multisets, and the bound
//! formulas they are checked against. A seeded Monte Carlo sampler covers
//! sizes beyond the exact caps; floats appear only in rendered diagnostics.

pub mod bounds;
pub mod dist;
pub mod energy;
pub mod error;
pub mod multiset;
pub mod rational;
pub mod sampler;

pub use dist::{EngineCaps, ExactDistribution, PointMassReport};
pub use error::{Error, Result};
pub use multiset::{Decomposition, MultiplicityProfile, WeightedMultiset};
pub use rational::Rational;
