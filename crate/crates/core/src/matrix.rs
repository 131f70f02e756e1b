//! Tournament data model.
//!
//! A [`ComparisonMatrix`] holds `c[i][j]`, the (possibly fractional) number of
//! times item `i` was preferred to item `j`. Everything else in the crate is a
//! function of it: wins are row sums, losses are column sums and the match
//! matrix is `C + Cᵀ`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Labelled square matrix of nonnegative preference counts with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    items: Vec<String>,
    counts: DMatrix<f64>,
}

impl ComparisonMatrix {
    /// Builds a matrix from row vectors, validating every invariant.
    pub fn new<S: Into<String>>(items: Vec<S>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        let n = items.len();
        if rows.len() != n {
            return Err(Error::invalid(format!(
                "{} labels but {} rows",
                n,
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {:?} has {} entries, expected {}",
                    items[i],
                    row.len(),
                    n
                )));
            }
        }
        let counts = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_dmatrix(items, counts)
    }

    pub fn from_dmatrix(items: Vec<String>, counts: DMatrix<f64>) -> Result<Self> {
        let n = items.len();
        if n < 2 {
            return Err(Error::invalid("at least two items are required"));
        }
        if counts.nrows() != n || counts.ncols() != n {
            return Err(Error::invalid(format!(
                "matrix is {}x{} but there are {} labels",
                counts.nrows(),
                counts.ncols(),
                n
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if items[i] == items[j] {
                    return Err(Error::invalid(format!("duplicate label {:?}", items[i])));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = counts[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "entry ({:?}, {:?}) = {} is not a finite nonnegative count",
                        items[i], items[j], v
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::invalid(format!(
                        "diagonal entry for {:?} is {}, expected 0",
                        items[i], v
                    )));
                }
            }
        }
        Ok(Self { items, counts })
    }

    /// All-zero matrix over the given labels.
    pub fn zeros<S: Into<String>>(items: Vec<S>) -> Result<Self> {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        let n = items.len();
        Self::from_dmatrix(items, DMatrix::zeros(n, n))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.items.iter().position(|l| l == label)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.counts[(i, j)]
    }

    pub fn counts(&self) -> &DMatrix<f64> {
        &self.counts
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Sum of every entry, i.e. the number of comparisons.
    pub fn total(&self) -> f64 {
        self.counts.sum()
    }

    /// Row sums: observed wins per item.
    pub fn wins(&self) -> WinsVector {
        WinsVector {
            values: self.counts.row_iter().map(|r| r.sum()).collect(),
        }
    }

    /// Column sums: observed losses per item.
    pub fn losses(&self) -> Vec<f64> {
        self.counts.column_iter().map(|c| c.sum()).collect()
    }

    /// `M = C + Cᵀ`, the number of meetings between each pair.
    pub fn match_matrix(&self) -> DMatrix<f64> {
        &self.counts + self.counts.transpose()
    }

    /// Matches played per item (row sums of `M`).
    pub fn matches_played(&self) -> Vec<f64> {
        let m = self.match_matrix();
        m.row_iter().map(|r| r.sum()).collect()
    }

    /// Strong connectivity of the graph with an edge `j -> i` whenever
    /// `c[i][j] > 0`. This is Ford's condition for finite ratings.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    let w = if forward {
                        self.get(v, u)
                    } else {
                        self.get(u, v)
                    };
                    if w > 0.0 && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    pub(crate) fn require_irreducible(&self) -> Result<()> {
        if self.is_irreducible() {
            Ok(())
        } else {
            Err(Error::Reducible)
        }
    }

    /// Column sums, failing on the first item without a loss.
    pub(crate) fn positive_losses(&self) -> Result<Vec<f64>> {
        let losses = self.losses();
        if let Some(k) = losses.iter().position(|&l| l <= 0.0) {
            return Err(Error::Undefeated {
                item: self.items[k].clone(),
            });
        }
        Ok(losses)
    }

    /// Tries to write `C = A S` with `A` diagonal and `S` symmetric.
    ///
    /// `log a` is fitted by least squares to `log a_i - log a_j = log(c_ij / c_ji)`
    /// over pairs with wins both ways, then the recomposition is checked
    /// elementwise against `tol`.
    pub fn quasi_symmetry(&self, tol: f64) -> Result<QuasiSymmetry> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        self.require_irreducible()?;
        let n = self.len();

        let two_way = |i: usize, j: usize| i != j && self.get(i, j) > 0.0 && self.get(j, i) > 0.0;
        let components = components(n, two_way);

        let mut log_a = vec![0.0; n];
        for comp in components.iter().filter(|c| c.len() > 1) {
            // anchor is the last member, so the last item overall ends up at 0
            let free = &comp[..comp.len() - 1];
            let k = free.len();
            let mut lap = DMatrix::<f64>::zeros(k, k);
            let mut rhs = DVector::<f64>::zeros(k);
            for (p, &i) in comp.iter().enumerate() {
                for (q, &j) in comp.iter().enumerate().skip(p + 1) {
                    if !two_way(i, j) {
                        continue;
                    }
                    let d = (self.get(i, j) / self.get(j, i)).ln();
                    if p < k {
                        lap[(p, p)] += 1.0;
                        rhs[p] += d;
                    }
                    if q < k {
                        lap[(q, q)] += 1.0;
                        rhs[q] -= d;
                    }
                    if p < k && q < k {
                        lap[(p, q)] -= 1.0;
                        lap[(q, p)] -= 1.0;
                    }
                }
            }
            let sol = lap
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::invalid("singular least-squares system"))?;
            for (p, &i) in free.iter().enumerate() {
                log_a[i] = sol[p];
            }
        }

        let a: Vec<f64> = log_a.iter().map(|x| x.exp()).collect();
        let scale = a[n - 1];
        let a: Vec<f64> = a.iter().map(|x| x / scale).collect();

        let mut s = DMatrix::<f64>::zeros(n, n);
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.get(i, j) / a[i] + self.get(j, i) / a[j]);
                s[(i, j)] = v;
                s[(j, i)] = v;
                residual = residual
                    .max((a[i] * v - self.get(i, j)).abs())
                    .max((a[j] * v - self.get(j, i)).abs());
            }
        }
        if residual > tol {
            return Err(Error::NotQuasiSymmetric { residual });
        }
        Ok(QuasiSymmetry {
            a,
            s,
            max_residual: residual,
        })
    }
}

/// Connected components of an undirected graph given by `adjacent`, each
/// sorted ascending.
fn components(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for v in 0..n {
                if label[v] == usize::MAX && adjacent(u, v) {
                    label[v] = id;
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Observed wins per item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinsVector {
    pub values: Vec<f64>,
}

impl WinsVector {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `C = A S`: diagonal component `a` (last entry 1) and symmetric `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiSymmetry {
    pub a: Vec<f64>,
    pub s: DMatrix<f64>,
    pub max_residual: f64,
}

impl QuasiSymmetry {
    /// Elementwise `a_i s_ij`.
    pub fn recompose(&self) -> DMatrix<f64> {
        let n = self.a.len();
        DMatrix::from_fn(n, n, |i, j| self.a[i] * self.s[(i, j)])
    }
}

/// `π_i / (π_i + π_j)`.
pub fn bt_probability(pi_i: f64, pi_j: f64) -> Result<f64> {
    for v in [pi_i, pi_j] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!(
                "strength {v} must be positive and finite"
            )));
        }
    }
    Ok(pi_i / (pi_i + pi_j))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn wins_examples() {
        assert_eq!(five_team().wins().values, vec![3., 3., 2., 1., 1.]);
        assert_eq!(three_team_even().wins().values, vec![22., 15., 8.]);
        let z = ComparisonMatrix::zeros(vec!["a", "b", "c"]).unwrap();
        assert_eq!(z.wins().values, vec![0., 0., 0.]);
    }

    #[test]
    fn match_matrix_examples() {
        let m = five_team().match_matrix();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m[(i, j)], if i == j { 0. } else { 1. });
            }
        }
        let m = three_team_uneven().match_matrix();
        assert_eq!(m[(0, 1)], 15.);
        assert_eq!(m[(0, 2)], 90.);
        assert_eq!(m[(1, 2)], 90.);
        let z = ComparisonMatrix::zeros(vec!["a", "b"]).unwrap();
        assert_eq!(z.match_matrix().sum(), 0.);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(five_team().is_irreducible());
        assert!(three_team_even().is_irreducible());
        let hierarchy = ComparisonMatrix::new(
            vec!["A", "B", "C"],
            vec![vec![0., 1., 1.], vec![0., 0., 1.], vec![0., 0., 0.]],
        )
        .unwrap();
        assert!(!hierarchy.is_irreducible());
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(ComparisonMatrix::new(vec!["a"], vec![vec![0.]]).is_err());
        assert!(ComparisonMatrix::new(vec!["a", "b"], vec![vec![1., 0.], vec![0., 0.]]).is_err());
        assert!(ComparisonMatrix::new(vec!["a", "b"], vec![vec![0., -1.], vec![0., 0.]]).is_err());
        assert!(
            ComparisonMatrix::new(vec!["a", "b"], vec![vec![0., f64::NAN], vec![0., 0.]]).is_err()
        );
        assert!(ComparisonMatrix::new(vec!["a", "a"], vec![vec![0., 1.], vec![1., 0.]]).is_err());
        assert!(ComparisonMatrix::new(vec!["a", "b"], vec![vec![0., 1.]]).is_err());
    }

    #[test]
    fn quasi_symmetry_of_the_even_three_team_matrix() {
        let qs = three_team_even().quasi_symmetry(1e-9).unwrap();
        assert_relative_eq!(qs.a[0], 4.0, epsilon = 1e-12);
        assert_relative_eq!(qs.a[1], 2.0, epsilon = 1e-12);
        assert_eq!(qs.a[2], 1.0);
        assert_relative_eq!(qs.s[(0, 1)], 2.5, epsilon = 1e-12);
        assert_relative_eq!(qs.s[(0, 2)], 3.0, epsilon = 1e-12);
        assert_relative_eq!(qs.s[(1, 2)], 5.0, epsilon = 1e-12);
        assert_eq!(qs.s[(1, 0)], qs.s[(0, 1)]);
    }

    #[test]
    fn quasi_symmetry_symmetric_input_is_identity() {
        let c = ComparisonMatrix::new(
            vec!["a", "b", "c"],
            vec![vec![0., 2., 3.], vec![2., 0., 1.], vec![3., 1., 0.]],
        )
        .unwrap();
        let qs = c.quasi_symmetry(1e-12).unwrap();
        for a in qs.a {
            assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn quasi_symmetry_failures() {
        match five_team().quasi_symmetry(1e-6) {
            Err(Error::NotQuasiSymmetric { residual }) => assert!(residual > 0.1),
            other => panic!("expected failure, got {other:?}"),
        }
        let hierarchy = ComparisonMatrix::new(
            vec!["A", "B", "C"],
            vec![vec![0., 1., 1.], vec![0., 0., 1.], vec![0., 0., 0.]],
        )
        .unwrap();
        assert_eq!(hierarchy.quasi_symmetry(1e-6), Err(Error::Reducible));
    }

    #[test]
    fn bt_probability_examples() {
        assert_eq!(bt_probability(1., 1.).unwrap(), 0.5);
        assert_relative_eq!(bt_probability(4., 2.).unwrap(), 2. / 3.);
        assert_relative_eq!(bt_probability(4., 1.).unwrap(), 0.8);
        assert!(bt_probability(0., 1.).is_err());
        assert!(bt_probability(1., f64::INFINITY).is_err());
        assert!(bt_probability(-1., 1.).is_err());
    }

    fn brute_force_reach(adj: &[Vec<bool>]) -> bool {
        // Floyd-Warshall transitive closure
        let n = adj.len();
        let mut r = adj.to_vec();
        for i in 0..n {
            r[i][i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r.iter().all(|row| row.iter().all(|&x| x))
    }

    fn binary_matrix() -> impl Strategy<Value = (usize, Vec<bool>)> {
        (2usize..=6).prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * n)))
    }

    proptest! {
        #[test]
        fn irreducible_matches_closure((n, bits) in binary_matrix()) {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i != j && bits[i * n + j] { 1.0 } else { 0.0 }).collect())
                .collect();
            let labels: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
            let c = ComparisonMatrix::new(labels, rows.clone()).unwrap();
            // edge j -> i when c_ij > 0
            let adj: Vec<Vec<bool>> = (0..n)
                .map(|j| (0..n).map(|i| rows[i][j] > 0.0).collect())
                .collect();
            prop_assert_eq!(c.is_irreducible(), brute_force_reach(&adj));
            let m = c.match_matrix();
            for i in 0..n {
                prop_assert_eq!(m[(i, i)], 0.0);
                for j in 0..n {
                    prop_assert_eq!(m[(i, j)], m[(j, i)]);
                }
            }
            prop_assert_eq!(c.wins().total(), c.total());
        }

        #[test]
        fn bt_probability_monotone_and_scale_free(a in 0.01f64..100., b in 0.01f64..100., c in 0.01f64..100.) {
            let p = bt_probability(a, b).unwrap();
            prop_assert!((p + bt_probability(b, a).unwrap() - 1.0).abs() < 1e-15);
            prop_assert!(bt_probability(a * 1.5, b).unwrap() > p);
            prop_assert!(bt_probability(a, b * 1.5).unwrap() < p);
            prop_assert!((bt_probability(c * a, c * b).unwrap() - p).abs() < 1e-14);
        }

        #[test]
        fn quasi_symmetric_recomposition_round_trips(
            a in proptest::collection::vec(0.1f64..10.0, 4),
            s in proptest::collection::vec(0.5f64..20.0, 6),
        ) {
            let n = 4;
            let mut sym = vec![vec![0.0; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    sym[i][j] = s[k];
                    sym[j][i] = s[k];
                    k += 1;
                }
            }
            let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[i] * sym[i][j]).collect()).collect();
            let c = ComparisonMatrix::new(vec!["a", "b", "c", "d"], rows).unwrap();
            let qs = c.quasi_symmetry(1e-9).unwrap();
            let re = qs.recompose();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((re[(i, j)] - c.get(i, j)).abs() <= 1e-9);
                }
                prop_assert!((qs.a[i] - a[i] / a[n - 1]).abs() <= 1e-9 * qs.a[i].max(1.0));
            }
            let again = ComparisonMatrix::from_dmatrix(c.items().to_vec(), re).unwrap();
            let qs2 = again.quasi_symmetry(1e-9).unwrap();
            prop_assert!(qs2.max_residual <= 1e-9);
            for i in 0..n {
                prop_assert!((qs2.a[i] - qs.a[i]).abs() <= 1e-9 * qs.a[i].max(1.0));
            }
        }
    }
}
