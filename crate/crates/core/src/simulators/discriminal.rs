//! Discriminal processes: each item's perceived strength is a random draw and
//! the larger draw wins. Four families give exactly Bradley-Terry odds.

use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `b ~ Exp(mean π)`.
    Exponential,
    /// `P(b ≤ x) = exp(−π e^{−αx})`.
    Gumbel,
    /// `P(b ≤ x) = 1 − exp(−(x/λ)^α)`, so `π = λ^α`.
    Weibull,
    /// `P(b ≤ x) = exp(−π x^{−α})`.
    Frechet,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Gumbel => "gumbel",
            Family::Weibull => "weibull",
            Family::Frechet => "frechet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminalSpec {
    pub family: Family,
    /// `α`; ignored for the exponential family.
    pub shape: f64,
    /// Means for exponential, `π` for Gumbel and Fréchet, scales `λ` for Weibull.
    pub item_params: Vec<f64>,
}

impl DiscriminalSpec {
    pub fn new(family: Family, shape: f64, item_params: Vec<f64>) -> Result<Self> {
        let spec = Self {
            family,
            shape,
            item_params,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Gumbel draws with means `λ_i`, i.e. `π_i = exp(α λ_i − γ)`.
    pub fn gumbel_from_means(shape: f64, means: &[f64]) -> Result<Self> {
        let params = means
            .iter()
            .map(|m| (shape * m - EULER_GAMMA).exp())
            .collect();
        Self::new(Family::Gumbel, shape, params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.item_params.len() < 2 {
            return Err(Error::invalid("need parameters for at least two items"));
        }
        if let Some(p) = self
            .item_params
            .iter()
            .find(|p| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::invalid(format!(
                "item parameter {p} must be positive"
            )));
        }
        if self.family != Family::Exponential && !(self.shape.is_finite() && self.shape > 0.0) {
            return Err(Error::invalid(format!(
                "shape {} must be positive for the {} family",
                self.shape,
                self.family.name()
            )));
        }
        Ok(())
    }

    /// Bradley-Terry strength implied for item `i`.
    pub fn strength(&self, i: usize) -> f64 {
        let p = self.item_params[i];
        match self.family {
            Family::Weibull => p.powf(self.shape),
            _ => p,
        }
    }

    /// Mean of item `i`'s draw (closed form for exponential and Gumbel only).
    pub fn mean(&self, i: usize) -> Option<f64> {
        let p = self.item_params[i];
        match self.family {
            Family::Exponential => Some(p),
            Family::Gumbel => Some((p.ln() + EULER_GAMMA) / self.shape),
            _ => None,
        }
    }

    pub fn win_probability(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.strength(i), self.strength(j));
        a / (a + b)
    }

    /// One draw of item `i`'s perceived strength by CDF inversion.
    pub fn draw<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        let p = self.item_params[i];
        let a = self.shape;
        match self.family {
            Family::Exponential => -p * u.ln(),
            Family::Gumbel => (p.ln() - (-u.ln()).ln()) / a,
            Family::Weibull => p * (-u.ln()).powf(1.0 / a),
            Family::Frechet => (p / -u.ln()).powf(1.0 / a),
        }
    }
}

/// Draws both perceived strengths and returns the index of the larger.
pub fn sample_discriminal_winner<R: Rng + ?Sized>(
    spec: &DiscriminalSpec,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<usize> {
    check_pair(spec, i, j)?;
    Ok(if spec.draw(i, rng) > spec.draw(j, rng) {
        i
    } else {
        j
    })
}

pub(crate) fn check_pair(spec: &DiscriminalSpec, i: usize, j: usize) -> Result<()> {
    spec.validate()?;
    let n = spec.item_params.len();
    if i == j || i >= n || j >= n {
        return Err(Error::invalid(format!(
            "need two distinct items below {n}, got {i} and {j}"
        )));
    }
    Ok(())
}
