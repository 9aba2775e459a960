//! Collision times and collision locations of pairs of noise-perturbed
//! gradient flows, self-stabilizing diffusions and mean-field particle
//! systems: analytic predictions and Monte Carlo checks of their small-noise
//! (Kramers-type) laws.

pub mod dynamics;
pub mod error;
pub mod kramers;
pub mod landscape;
pub mod noise;
pub mod point;
pub mod potentials;
pub mod stopping;

pub use error::{Assumption, Error, Result};
pub use point::Point;
