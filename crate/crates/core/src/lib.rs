//! Exact binomial probabilities, classical concentration bounds, normal
//! approximations with correction terms, sample-size inversion and Bayesian
//! inversion for repeated Bernoulli trials, plus seeded simulations of
//! dependent trial schemes.
//!
//! Every quantity is computed from first principles in `f64`, with a
//! big-rational oracle available for certifying the exact engine on
//! moderate `n`.

pub mod approx;
pub mod bayes;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod inversion;
pub mod rational;
pub mod reproduce;
pub mod schemes;
pub mod special;

#[cfg(test)]
mod tests;

pub use error::{Error, Result};
pub use exact::{BinomialModel, DeviationQuery, IntegerInterval};
pub use rational::Rational;
pub use special::PrecisionConfig;
