//! Ratings as points on the unit sphere.
//!
//! Every result (a single pairwise win or a whole race) becomes a unit vector
//! with zero sum; the rating is the unit vector closest, in summed squared
//! distance, to all of them. Since `‖x − λ‖² = 2 − 2 x·λ` on the sphere, that is
//! just the normalized resultant.

use crate::error::{Error, Result};
use crate::matrix::ComparisonMatrix;

/// Unit-norm, zero-sum vector encoding one result.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultVector {
    values: Vec<f64>,
}

impl ResultVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One race: `participants[k]` finished in position `ranks[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceRecord {
    pub race_id: String,
    pub participants: Vec<usize>,
    pub ranks: Vec<usize>,
}

impl RaceRecord {
    pub fn validate(&self, n: usize) -> Result<()> {
        let k = self.participants.len();
        if k < 2 {
            return Err(Error::invalid(format!(
                "race {:?} has {} participant(s), need at least 2",
                self.race_id, k
            )));
        }
        if self.ranks.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                actual: self.ranks.len(),
            });
        }
        let mut seen_rank = vec![false; k];
        for &r in &self.ranks {
            if r == 0 || r > k || std::mem::replace(&mut seen_rank[r - 1], true) {
                return Err(Error::invalid(format!(
                    "race {:?}: ranks must be a permutation of 1..={}",
                    self.race_id, k
                )));
            }
        }
        let mut seen_item = vec![false; n];
        for &p in &self.participants {
            if p >= n || std::mem::replace(&mut seen_item[p], true) {
                return Err(Error::invalid(format!(
                    "race {:?}: participant index {} repeated or out of range",
                    self.race_id, p
                )));
            }
        }
        Ok(())
    }
}

/// `+1/√2` for the winner `i`, `−1/√2` for the loser `j`.
pub fn pairwise_result_vector(i: usize, j: usize, n: usize) -> Result<ResultVector> {
    if i == j {
        return Err(Error::invalid("winner and loser must differ"));
    }
    if i >= n || j >= n {
        return Err(Error::invalid(format!("index out of range for {n} items")));
    }
    let mut values = vec![0.0; n];
    values[i] = std::f64::consts::FRAC_1_SQRT_2;
    values[j] = -std::f64::consts::FRAC_1_SQRT_2;
    Ok(ResultVector { values })
}

/// Centred, scaled and negated finishing positions: participant `i` gets
/// `((n_k + 1)/2 − r_i) / sqrt(n_k (n_k² − 1)/12)`, non-entrants get 0.
pub fn rank_to_sphere(record: &RaceRecord, n: usize) -> Result<ResultVector> {
    record.validate(n)?;
    let k = record.participants.len() as f64;
    let scale = (k * (k * k - 1.0) / 12.0).sqrt();
    let mut values = vec![0.0; n];
    for (&p, &r) in record.participants.iter().zip(&record.ranks) {
        values[p] = ((k + 1.0) / 2.0 - r as f64) / scale;
    }
    Ok(ResultVector { values })
}

/// Normalized resultant of `results`.
pub fn geometric_rating(results: &[ResultVector]) -> Result<Vec<f64>> {
    let first = results
        .first()
        .ok_or_else(|| Error::invalid("no results to rate"))?;
    let n = first.len();
    let mut sum = vec![0.0; n];
    for r in results {
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: r.len(),
            });
        }
        for (s, v) in sum.iter_mut().zip(&r.values) {
            *s += v;
        }
    }
    normalize_resultant(sum, results.len() as f64)
}

/// Geometric rating of every pairwise result in `c` (entry `c_ij` counts as
/// that many copies of the `i`-beats-`j` vector).
pub fn geometric_rating_from_matrix(c: &ComparisonMatrix) -> Result<Vec<f64>> {
    let n = c.len();
    let mut sum = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let cij = c.get(i, j);
            sum[i] += cij * std::f64::consts::FRAC_1_SQRT_2;
            sum[j] -= cij * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    normalize_resultant(sum, c.total())
}

fn normalize_resultant(sum: Vec<f64>, count: f64) -> Result<Vec<f64>> {
    let norm = sum.iter().map(|v| v * v).sum::<f64>().sqrt();
    // each term has unit norm, so anything this small is cancellation noise
    if norm <= 1e-12 * count.max(1.0) {
        return Err(Error::ZeroResultant);
    }
    Ok(sum.into_iter().map(|v| v / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::fixtures::five_team;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pairwise_vector() {
        let x = pairwise_result_vector(3, 1, 5).unwrap();
        assert_eq!(x.values(), &[0., -FRAC_1_SQRT_2, 0., FRAC_1_SQRT_2, 0.]);
        assert!(pairwise_result_vector(2, 2, 5).is_err());
        assert!(pairwise_result_vector(0, 5, 5).is_err());
    }

    #[test]
    fn four_runner_race() {
        let rec = RaceRecord {
            race_id: "r".into(),
            participants: vec![0, 1, 2, 3],
            ranks: vec![2, 3, 1, 4],
        };
        let x = rank_to_sphere(&rec, 4).unwrap();
        let d = 2.0 * 5f64.sqrt();
        let expected = [1.0 / d, -1.0 / d, 3.0 / d, -3.0 / d];
        for (a, e) in x.values().iter().zip(expected) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn two_runner_race_is_pairwise() {
        let rec = RaceRecord {
            race_id: "r".into(),
            participants: vec![2, 0],
            ranks: vec![1, 2],
        };
        let a = rank_to_sphere(&rec, 4).unwrap();
        let b = pairwise_result_vector(2, 0, 4).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn bad_races() {
        let dup = RaceRecord {
            race_id: "r".into(),
            participants: vec![0, 1, 2],
            ranks: vec![1, 1, 3],
        };
        assert!(rank_to_sphere(&dup, 3).is_err());
        let solo = RaceRecord {
            race_id: "r".into(),
            participants: vec![0],
            ranks: vec![1],
        };
        assert!(rank_to_sphere(&solo, 3).is_err());
    }

    #[test]
    fn five_team_geometric() {
        let c = five_team();
        let mut results = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                if c.get(i, j) > 0.0 {
                    results.push(pairwise_result_vector(i, j, 5).unwrap());
                }
            }
        }
        let sum: Vec<f64> = (0..5)
            .map(|k| results.iter().map(|r| r.values()[k]).sum())
            .collect();
        for (s, e) in sum.iter().zip([2., 2., 0., -2., -2.]) {
            assert!((s - e * FRAC_1_SQRT_2).abs() < 1e-14);
        }
        let g = geometric_rating(&results).unwrap();
        for (a, e) in g.iter().zip([0.5, 0.5, 0.0, -0.5, -0.5]) {
            assert!((a - e).abs() < 1e-14);
        }
        assert_eq!(g, geometric_rating_from_matrix(&c).unwrap());
    }

    #[test]
    fn geometric_edge_cases() {
        let x = pairwise_result_vector(0, 1, 3).unwrap();
        assert_eq!(
            geometric_rating(std::slice::from_ref(&x)).unwrap(),
            x.values()
        );
        let y = pairwise_result_vector(1, 0, 3).unwrap();
        assert_eq!(geometric_rating(&[x, y]), Err(Error::ZeroResultant));
        assert!(geometric_rating(&[]).is_err());
    }

    fn race() -> impl Strategy<Value = (usize, Vec<usize>)> {
        (2usize..=8).prop_flat_map(|n| (Just(n), Just((1..=n).collect::<Vec<_>>()).prop_shuffle()))
    }

    proptest! {
        #[test]
        fn race_vectors_are_unit_and_centred((k, ranks) in race(), extra in 0usize..4) {
            let n = k + extra;
            let rec = RaceRecord { race_id: "p".into(), participants: (0..k).collect(), ranks };
            let x = rank_to_sphere(&rec, n).unwrap();
            let norm: f64 = x.values().iter().map(|v| v * v).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            prop_assert!(x.values().iter().sum::<f64>().abs() < 1e-12);
        }

        #[test]
        fn rating_is_permutation_equivariant(
            pairs in proptest::collection::vec((0usize..5, 0usize..5), 1..20),
            perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let pairs: Vec<_> = pairs.into_iter().filter(|(i, j)| i != j).collect();
            let plain: Vec<_> = pairs.iter().map(|&(i, j)| pairwise_result_vector(i, j, 5).unwrap()).collect();
            let moved: Vec<_> = pairs.iter().map(|&(i, j)| pairwise_result_vector(perm[i], perm[j], 5).unwrap()).collect();
            match (geometric_rating(&plain), geometric_rating(&moved)) {
                (Ok(a), Ok(b)) => {
                    let norm: f64 = a.iter().map(|v| v * v).sum();
                    prop_assert!((norm - 1.0).abs() < 1e-12);
                    prop_assert!(a.iter().sum::<f64>().abs() < 1e-12);
                    for i in 0..5 {
                        prop_assert!((a[i] - b[perm[i]]).abs() < 1e-12);
                    }
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "mismatch {:?} {:?}", a, b),
            }
        }
    }
}
