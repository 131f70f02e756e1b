#![allow(dead_code)]

use btkit::simulators::stream_rng;
use btkit::ComparisonMatrix;
use rand::Rng;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

/// Random irreducible tournament with `n` items and counts in `0..=max_count`.
pub fn random_irreducible<R: Rng>(rng: &mut R, n: usize, max_count: u32) -> ComparisonMatrix {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            rng.random_range(0..=max_count) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let c = ComparisonMatrix::new(labels(n), rows).unwrap();
        if c.is_irreducible() {
            return c;
        }
    }
}

/// `count` random irreducible tournaments of size 3..=6 from a fixed seed.
pub fn tournaments(seed: u64, count: usize) -> Vec<ComparisonMatrix> {
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=6);
            random_irreducible(&mut rng, n, 5)
        })
        .collect()
}

/// Round robin where every pair meets `m` times with uniformly random splits.
pub fn random_round_robin<R: Rng>(rng: &mut R, n: usize, m: u32) -> ComparisonMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.random_range(0..=m);
            rows[i][j] = w as f64;
            rows[j][i] = (m - w) as f64;
        }
    }
    ComparisonMatrix::new(labels(n), rows).unwrap()
}

/// Quasi-symmetric `c_ij = a_i s_ij` with random positive `a` and symmetric `s`.
pub fn random_quasi_symmetric<R: Rng>(rng: &mut R, n: usize) -> (ComparisonMatrix, Vec<f64>) {
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(0.5..10.0);
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    let rows = (0..n)
        .map(|i| (0..n).map(|j| a[i] * s[i][j]).collect())
        .collect();
    (ComparisonMatrix::new(labels(n), rows).unwrap(), a)
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()))
        .fold(0.0, f64::max)
}
