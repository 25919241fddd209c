//! Near-exact bin covering: items with exact rational sizes are packed so
//! that as many bins as possible have a total in `[1, 1 + delta)`.

pub mod classify;
pub mod error;
pub mod exact;
pub mod generators;
pub mod greedy;
pub mod grouping;
pub mod harness;
pub mod i1;
pub mod i2;
pub mod lp;
pub mod model;
pub mod pricing;
pub mod rational;

pub use error::{Error, Result};
pub use model::{evaluate, Instance, Packing};
pub use rational::Rational;
