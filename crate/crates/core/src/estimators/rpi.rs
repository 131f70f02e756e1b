//! Ratings Percentage Index in its textbook form: a team's own games count
//! towards its opponents' win percentages.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComparisonMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RpiWeights {
    pub own: f64,
    pub opponents: f64,
    pub opponents_opponents: f64,
}

impl Default for RpiWeights {
    fn default() -> Self {
        Self {
            own: 0.25,
            opponents: 0.5,
            opponents_opponents: 0.25,
        }
    }
}

/// `w1 x + w2 M̂x + w3 M̂²x`, with `x` the win percentages and `M̂` the match
/// matrix normalized by row.
pub fn rpi_classic(c: &ComparisonMatrix, weights: RpiWeights) -> Result<Vec<f64>> {
    let total = weights.own + weights.opponents + weights.opponents_opponents;
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "RPI weights sum to {total}, expected 1"
        )));
    }
    let n = c.len();
    let m = c.match_matrix();
    let played = c.matches_played();
    if let Some(k) = played.iter().position(|&p| p <= 0.0) {
        return Err(Error::NoMatches {
            item: c.items()[k].clone(),
        });
    }
    let wins = c.wins().values;
    let x: Vec<f64> = wins.iter().zip(&played).map(|(w, p)| w / p).collect();
    let opp = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)] * v[j]).sum::<f64>() / played[i])
            .collect()
    };
    let ow = opp(&x);
    let oow = opp(&ow);
    Ok((0..n)
        .map(|i| {
            weights.own * x[i] + weights.opponents * ow[i] + weights.opponents_opponents * oow[i]
        })
        .collect())
}
