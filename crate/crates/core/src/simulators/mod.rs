//! Seeded generative models that induce Bradley-Terry probabilities, and a
//! sharded batch runner for them.
//!
//! # Reproducibility
//!
//! All randomness comes from ChaCha8 ([`SimRng`]). Batch runs split the trials
//! into shards of [`SHARD_SIZE`]; shard `s` draws from the generator seeded with
//! `seed` on stream `s`. Shard boundaries do not depend on the thread count,
//! so the sequential and the rayon-backed runner produce identical tallies.

mod discriminal;
mod games;
mod tournament;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use discriminal::{sample_discriminal_winner, DiscriminalSpec, Family, EULER_GAMMA};
pub use games::{simulate_game, GameOutcome, GameSpec, SUDDEN_DEATH_ROUND_LIMIT};
pub use tournament::{generate_tournament, round_robin_schedule};

use crate::error::{Error, Result};

pub type SimRng = ChaCha8Rng;

/// Trials per shard in batch runs.
pub const SHARD_SIZE: u64 = 8192;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Anything the batch runner can repeat.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Game(GameSpec),
    /// A discriminal comparison of items `i` and `j`.
    Discriminal {
        spec: DiscriminalSpec,
        i: usize,
        j: usize,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Game(g) => g.name(),
            Scenario::Discriminal { spec, .. } => spec.family.name(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::Game(g) => g.validate(),
            Scenario::Discriminal { spec, i, j } => discriminal::check_pair(spec, *i, *j),
        }
    }

    /// Closed-form outcome probabilities, aligned with [`SimResult::counts`].
    pub fn theoretical(&self) -> Result<Vec<f64>> {
        match self {
            Scenario::Game(g) => g.theoretical(),
            Scenario::Discriminal { spec, i, j } => {
                discriminal::check_pair(spec, *i, *j)?;
                let p = spec.win_probability(*i, *j);
                Ok(vec![p, 1.0 - p])
            }
        }
    }

    fn slots(&self) -> usize {
        match self {
            Scenario::Game(GameSpec::Barker { strengths, .. }) => strengths.len(),
            _ => 2,
        }
    }
}

/// Probability that the first side wins (or the long-run occupancy vector for
/// Barker, via [`Scenario::theoretical`]).
pub fn theoretical_win_probability(scenario: &Scenario) -> Result<f64> {
    match scenario {
        Scenario::Game(GameSpec::Barker { .. }) => Err(Error::invalid(
            "Barker has occupancy fractions, not a single win probability",
        )),
        other => Ok(other.theoretical()?[0]),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
struct Tally {
    counts: Vec<u64>,
    per_match: Option<Vec<u64>>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.counts.is_empty() {
            return other;
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        if let (Some(a), Some(b)) = (self.per_match.as_mut(), other.per_match) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }
}

/// Aggregate outcome of a batch run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub scenario: Scenario,
    /// Wins of the first and second side; per-item champion games for Barker;
    /// winner of the final match for the accumulated-win-ratio game.
    pub counts: Vec<u64>,
    /// Accumulated-win-ratio only: wins of the first side at each match index.
    pub per_match_wins: Option<Vec<u64>>,
    pub n_trials: u64,
    pub seed: u64,
    pub shard_size: u64,
    pub n_shards: u64,
    pub theoretical: Vec<f64>,
    pub empirical_frequencies: Vec<f64>,
}

impl SimResult {
    /// Binomial standard error of each frequency around its closed form,
    /// treating every tallied outcome as independent. Barker occupancy counts
    /// come from one autocorrelated chain, so this understates its error.
    pub fn standard_errors(&self) -> Vec<f64> {
        let total = self.counts.iter().sum::<u64>() as f64;
        self.theoretical
            .iter()
            .map(|p| (p * (1.0 - p) / total).sqrt())
            .collect()
    }

    /// `(empirical − theoretical) / standard error` per outcome.
    pub fn z_scores(&self) -> Vec<f64> {
        self.empirical_frequencies
            .iter()
            .zip(&self.theoretical)
            .zip(self.standard_errors())
            .map(|((e, t), se)| if se > 0.0 { (e - t) / se } else { 0.0 })
            .collect()
    }

    pub fn within_sigma(&self, k: f64) -> bool {
        self.z_scores().iter().all(|z| z.abs() <= k)
    }
}

fn shard_count(n_trials: u64) -> u64 {
    n_trials.div_ceil(SHARD_SIZE)
}

fn run_shard(scenario: &Scenario, seed: u64, shard: u64, n_trials: u64) -> Result<Tally> {
    let start = shard * SHARD_SIZE;
    let trials = SHARD_SIZE.min(n_trials - start);
    let mut rng = stream_rng(seed, shard);
    let mut tally = Tally {
        counts: vec![0; scenario.slots()],
        per_match: match scenario {
            Scenario::Game(GameSpec::AccumulatedWinRatio { n_matches, .. }) => {
                Some(vec![0; *n_matches as usize])
            }
            _ => None,
        },
    };
    for _ in 0..trials {
        match scenario {
            Scenario::Discriminal { spec, i, j } => {
                let side = if spec.draw(*i, &mut rng) > spec.draw(*j, &mut rng) {
                    0
                } else {
                    1
                };
                tally.counts[side] += 1;
            }
            Scenario::Game(g) => match games::play(g, &mut rng)? {
                GameOutcome::Winner(w) => tally.counts[w] += 1,
                GameOutcome::Sequence(seq) => {
                    if let Some(per) = tally.per_match.as_mut() {
                        for (k, &w) in seq.iter().enumerate() {
                            if w == 0 {
                                per[k] += 1;
                            }
                        }
                    }
                    if let Some(&last) = seq.last() {
                        tally.counts[last] += 1;
                    }
                }
                GameOutcome::Occupancy(occ) => {
                    for (c, o) in tally.counts.iter_mut().zip(occ) {
                        *c += o;
                    }
                }
            },
        }
    }
    Ok(tally)
}

fn finish(scenario: &Scenario, n_trials: u64, seed: u64, tally: Tally) -> Result<SimResult> {
    let total = tally.counts.iter().sum::<u64>() as f64;
    Ok(SimResult {
        theoretical: scenario.theoretical()?,
        empirical_frequencies: tally.counts.iter().map(|&c| c as f64 / total).collect(),
        scenario: scenario.clone(),
        counts: tally.counts,
        per_match_wins: tally.per_match,
        n_trials,
        seed,
        shard_size: SHARD_SIZE,
        n_shards: shard_count(n_trials),
    })
}

fn check_batch(scenario: &Scenario, n_trials: u64) -> Result<()> {
    if n_trials == 0 {
        return Err(Error::invalid("trial count must be at least 1"));
    }
    scenario.validate()
}

/// Runs `n_trials` independent repetitions shard by shard on this thread.
pub fn simulate_sequential(scenario: &Scenario, n_trials: u64, seed: u64) -> Result<SimResult> {
    check_batch(scenario, n_trials)?;
    let tally = (0..shard_count(n_trials))
        .map(|s| run_shard(scenario, seed, s, n_trials))
        .try_fold(Tally::default(), |acc, t| t.map(|t| acc.merge(t)))?;
    finish(scenario, n_trials, seed, tally)
}

/// Same as [`simulate_sequential`], with shards spread over the rayon pool.
#[cfg(feature = "parallel")]
pub fn simulate_parallel(scenario: &Scenario, n_trials: u64, seed: u64) -> Result<SimResult> {
    use rayon::prelude::*;

    check_batch(scenario, n_trials)?;
    let tallies = (0..shard_count(n_trials))
        .into_par_iter()
        .map(|s| run_shard(scenario, seed, s, n_trials))
        .collect::<Result<Vec<_>>>()?;
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
    finish(scenario, n_trials, seed, tally)
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn simulate(scenario: &Scenario, n_trials: u64, seed: u64) -> Result<SimResult> {
    #[cfg(feature = "parallel")]
    {
        simulate_parallel(scenario, n_trials, seed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        simulate_sequential(scenario, n_trials, seed)
    }
}
