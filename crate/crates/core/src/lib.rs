//! Pairwise-comparison ratings built around the Bradley-Terry model.
//!
//! - [`matrix`]: the comparison matrix, wins, irreducibility and quasi-symmetry.
//! - [`estimators`]: maximum-likelihood Bradley-Terry fitting with its
//!   diagnostics, plus PageRank-family spectral ratings and RPI.
//! - [`simulators`]: seeded game scenarios and discriminal processes that
//!   generate Bradley-Terry outcomes, with a sharded (optionally parallel)
//!   batch runner.
//! - [`geometric`]: ratings as the closest point on the unit sphere to a set of
//!   pairwise or race results.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod estimators;
pub mod geometric;
mod linalg;
pub mod matrix;
pub mod ratings;
pub mod simulators;

pub use error::{Error, Result};
pub use matrix::{bt_probability, ComparisonMatrix, QuasiSymmetry, WinsVector};
pub use ratings::{Normalization, RankLabel, RatingVector};
