//! Game scenarios whose winner probabilities take Bradley-Terry form.

use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Hard cap on sudden-death rounds per game.
pub const SUDDEN_DEATH_ROUND_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GameSpec {
    /// First to score under independent Poisson processes with these rates.
    PoissonRace { rates: [f64; 2] },
    /// Rounds of simultaneous attempts succeeding with `p`; the winner is the
    /// first to lead by `r` decided rounds.
    SuddenDeath { p: [f64; 2], r: u32 },
    /// `n_matches` games where each side's chance is proportional to its
    /// initial strength plus wins so far.
    AccumulatedWinRatio { strengths: [f64; 2], n_matches: u32 },
    /// Two-state "who is leading" chain: the lead passes to side 0 at rate
    /// `rates[0]` and to side 1 at rate `rates[1]`. The leader at `horizon` wins.
    TwoStateChain { rates: [f64; 2], horizon: f64 },
    /// Winner-stays-on: the champion `i` meets `j` with probability
    /// `proposal[i][j]` and keeps the title with Barker's acceptance ratio.
    Barker {
        strengths: Vec<f64>,
        proposal: Vec<Vec<f64>>,
        n_games: u64,
    },
}

/// What one simulated game produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameOutcome {
    /// Index of the winning side (0 or 1).
    Winner(usize),
    /// Winner of each match in order.
    Sequence(Vec<usize>),
    /// Games spent as champion, per item.
    Occupancy(Vec<u64>),
}

impl GameSpec {
    /// Barker tournament with uniform opponent selection.
    pub fn barker_uniform(strengths: Vec<f64>, n_games: u64) -> Self {
        let n = strengths.len();
        let share = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
        let proposal = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { share }).collect())
            .collect();
        GameSpec::Barker {
            strengths,
            proposal,
            n_games,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GameSpec::PoissonRace { .. } => "poisson",
            GameSpec::SuddenDeath { .. } => "sudden-death",
            GameSpec::AccumulatedWinRatio { .. } => "accumulated",
            GameSpec::TwoStateChain { .. } => "two-state",
            GameSpec::Barker { .. } => "barker",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |xs: &[f64], what: &str| -> Result<()> {
            match xs.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                Some(x) => Err(Error::invalid(format!(
                    "{what} {x} must be positive and finite"
                ))),
                None => Ok(()),
            }
        };
        match self {
            GameSpec::PoissonRace { rates } => positive(rates, "rate"),
            GameSpec::SuddenDeath { p, r } => {
                if let Some(x) = p.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                    return Err(Error::invalid(format!(
                        "success probability {x} must lie in (0, 1)"
                    )));
                }
                if *r == 0 {
                    return Err(Error::invalid("winning margin r must be at least 1"));
                }
                Ok(())
            }
            GameSpec::AccumulatedWinRatio {
                strengths,
                n_matches,
            } => {
                positive(strengths, "strength")?;
                if *n_matches == 0 {
                    return Err(Error::invalid("need at least one match"));
                }
                Ok(())
            }
            GameSpec::TwoStateChain { rates, horizon } => {
                positive(rates, "switch rate")?;
                positive(&[*horizon], "horizon")
            }
            GameSpec::Barker {
                strengths,
                proposal,
                n_games,
            } => {
                let n = strengths.len();
                if n < 2 {
                    return Err(Error::invalid("need at least two players"));
                }
                positive(strengths, "strength")?;
                if *n_games == 0 {
                    return Err(Error::invalid("need at least one game"));
                }
                if proposal.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: proposal.len(),
                    });
                }
                for (i, row) in proposal.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            actual: row.len(),
                        });
                    }
                    if row[i] != 0.0 {
                        return Err(Error::invalid("proposal must have a zero diagonal"));
                    }
                    if row.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                        return Err(Error::invalid("proposal entries must be nonnegative"));
                    }
                    let s: f64 = row.iter().sum();
                    if (s - 1.0).abs() > 1e-12 {
                        return Err(Error::invalid(format!(
                            "proposal row {i} sums to {s}, expected 1"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Closed-form probabilities: `[p, 1 - p]` for two-sided games, the
    /// normalized strengths (long-run occupancy) for Barker.
    pub fn theoretical(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let pair = |a: f64, b: f64| vec![a / (a + b), b / (a + b)];
        Ok(match self {
            GameSpec::PoissonRace { rates } => pair(rates[0], rates[1]),
            GameSpec::SuddenDeath { p, r } => {
                let q = p.map(|x| x / (1.0 - x));
                pair(q[0].powi(*r as i32), q[1].powi(*r as i32))
            }
            GameSpec::AccumulatedWinRatio { strengths, .. } => pair(strengths[0], strengths[1]),
            GameSpec::TwoStateChain { rates, .. } => pair(rates[0], rates[1]),
            GameSpec::Barker { strengths, .. } => {
                let total: f64 = strengths.iter().sum();
                strengths.iter().map(|s| s / total).collect()
            }
        })
    }

    /// Probability that the incumbent `i` keeps the title against `j`.
    pub fn barker_retention(strengths: &[f64], proposal: &[Vec<f64>], i: usize, j: usize) -> f64 {
        let a = strengths[i] * proposal[i][j];
        let b = strengths[j] * proposal[j][i];
        a / (a + b)
    }
}

fn exp_draw<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln() / rate
}

/// Plays one game of `spec`.
pub fn simulate_game<R: Rng + ?Sized>(spec: &GameSpec, rng: &mut R) -> Result<GameOutcome> {
    spec.validate()?;
    play(spec, rng)
}

/// [`simulate_game`] without re-validating.
pub(crate) fn play<R: Rng + ?Sized>(spec: &GameSpec, rng: &mut R) -> Result<GameOutcome> {
    match spec {
        GameSpec::PoissonRace { rates } => {
            let t0 = exp_draw(rates[0], rng);
            let t1 = exp_draw(rates[1], rng);
            Ok(GameOutcome::Winner(if t0 < t1 { 0 } else { 1 }))
        }
        GameSpec::SuddenDeath { p, r } => {
            let target = *r as i64;
            let mut lead: i64 = 0;
            let mut rounds: u64 = 0;
            while lead.abs() < target {
                rounds += 1;
                if rounds > SUDDEN_DEATH_ROUND_LIMIT {
                    return Err(Error::RoundLimit {
                        limit: SUDDEN_DEATH_ROUND_LIMIT,
                    });
                }
                let a = rng.random::<f64>() < p[0];
                let b = rng.random::<f64>() < p[1];
                match (a, b) {
                    (true, false) => lead += 1,
                    (false, true) => lead -= 1,
                    _ => {}
                }
            }
            Ok(GameOutcome::Winner(if lead > 0 { 0 } else { 1 }))
        }
        GameSpec::AccumulatedWinRatio {
            strengths,
            n_matches,
        } => {
            let mut weight = *strengths;
            let mut seq = Vec::with_capacity(*n_matches as usize);
            for _ in 0..*n_matches {
                let p0 = weight[0] / (weight[0] + weight[1]);
                let w = if rng.random::<f64>() < p0 { 0 } else { 1 };
                weight[w] += 1.0;
                seq.push(w);
            }
            Ok(GameOutcome::Sequence(seq))
        }
        GameSpec::TwoStateChain { rates, horizon } => {
            let mut leader = if rng.random::<f64>() < rates[0] / (rates[0] + rates[1]) {
                0
            } else {
                1
            };
            let mut t = 0.0;
            loop {
                // the lead leaves side k at the rate the other side takes it
                t += exp_draw(rates[1 - leader], rng);
                if t > *horizon {
                    break;
                }
                leader = 1 - leader;
            }
            Ok(GameOutcome::Winner(leader))
        }
        GameSpec::Barker {
            strengths,
            proposal,
            n_games,
        } => {
            let n = strengths.len();
            let mut occupancy = vec![0u64; n];
            let mut champion = rng.random_range(0..n);
            for _ in 0..*n_games {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut opponent = n - 1;
                for (j, &phi) in proposal[champion].iter().enumerate() {
                    acc += phi;
                    if phi > 0.0 && u < acc {
                        opponent = j;
                        break;
                    }
                }
                if opponent == champion {
                    // rounding left u past the last positive entry
                    opponent = proposal[champion]
                        .iter()
                        .rposition(|&phi| phi > 0.0)
                        .unwrap_or(champion);
                }
                if opponent != champion {
                    let keep = GameSpec::barker_retention(strengths, proposal, champion, opponent);
                    if rng.random::<f64>() >= keep {
                        champion = opponent;
                    }
                }
                occupancy[champion] += 1;
            }
            Ok(GameOutcome::Occupancy(occupancy))
        }
    }
}
