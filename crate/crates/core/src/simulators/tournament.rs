use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::matrix::ComparisonMatrix;
use crate::ratings::RatingVector;

/// Draws a tournament from the Bradley-Terry model: for every unordered pair
/// with `m_ij` meetings, `c_ij ~ Binomial(m_ij, π_i / (π_i + π_j))` and
/// `c_ji = m_ij − c_ij`.
pub fn generate_tournament<R: Rng + ?Sized>(
    strengths: &RatingVector,
    schedule: &[Vec<u64>],
    rng: &mut R,
) -> Result<ComparisonMatrix> {
    let n = strengths.len();
    if schedule.len() != n || schedule.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("schedule must be {n}x{n}")));
    }
    for i in 0..n {
        if schedule[i][i] != 0 {
            return Err(Error::invalid("schedule must have a zero diagonal"));
        }
        for j in (i + 1)..n {
            if schedule[i][j] != schedule[j][i] {
                return Err(Error::invalid(format!(
                    "schedule is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let pi = &strengths.values;
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let m = schedule[i][j];
            if m == 0 {
                continue;
            }
            let p = pi[i] / (pi[i] + pi[j]);
            let wins = Binomial::new(m, p)
                .map_err(|e| Error::invalid(format!("binomial({m}, {p}): {e}")))?
                .sample(rng);
            rows[i][j] = wins as f64;
            rows[j][i] = (m - wins) as f64;
        }
    }
    ComparisonMatrix::new(strengths.items.clone(), rows)
}

/// Every pair meets `m` times.
pub fn round_robin_schedule(n: usize, m: u64) -> Vec<Vec<u64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { m }).collect())
        .collect()
}
