//! Linear assignment solver.
//!
//! Shortest-augmenting-path algorithm with dual potentials, O(n^3) for an
//! n x n matrix. Rows are augmented in index order and column scans pick the
//! lowest qualifying index, so ties resolve identically on every run.

use crate::error::{Error, Result};

/// Cells at or above this value mark forbidden assignments. All real edit
/// costs are far below it.
pub const LARGE: f64 = 1e6;

/// Dense square cost matrix for [`solve_lap`].
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn zeros(n: usize) -> Self {
        CostMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {n} (matrix must be square)",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(CostMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }
}

/// A minimum-cost perfect assignment: `assignment[row] = col`.
#[derive(Debug, Clone, PartialEq)]
pub struct LapSolution {
    pub assignment: Vec<usize>,
    pub total: f64,
}

/// Solves the linear assignment problem exactly.
///
/// Entries must be finite and nonnegative; forbidden cells are encoded with
/// [`LARGE`] rather than infinity.
pub fn solve_lap(cost: &CostMatrix) -> Result<LapSolution> {
    let n = cost.n;
    for (i, &v) in cost.data.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Value(format!(
                "cost matrix entry ({}, {}) is {v}; entries must be finite and nonnegative",
                i / n,
                i % n
            )));
        }
    }
    if n == 0 {
        return Ok(LapSolution {
            assignment: Vec::new(),
            total: 0.0,
        });
    }

    const NONE: usize = usize::MAX;
    let mut u = vec![0.0f64; n]; // row potentials
    let mut v = vec![0.0f64; n]; // column potentials
    let mut col4row = vec![NONE; n];
    let mut row4col = vec![NONE; n];
    let mut path = vec![NONE; n]; // predecessor row for each column
    let mut shortest = vec![f64::INFINITY; n];
    let mut visited_rows = vec![false; n];
    let mut visited_cols = vec![false; n];
    let mut remaining = vec![0usize; n];

    for cur_row in 0..n {
        // Dijkstra over columns from cur_row, tracking reduced costs.
        let mut num_remaining = n;
        for (slot, col) in remaining.iter_mut().enumerate() {
            *col = slot;
        }
        visited_rows.iter_mut().for_each(|x| *x = false);
        visited_cols.iter_mut().for_each(|x| *x = false);
        shortest.iter_mut().for_each(|x| *x = f64::INFINITY);

        let mut min_val = 0.0f64;
        let mut i = cur_row;
        let mut sink = NONE;
        while sink == NONE {
            visited_rows[i] = true;
            let mut lowest = f64::INFINITY;
            let mut index = NONE;
            for it in 0..num_remaining {
                let j = remaining[it];
                let reduced = min_val + cost.get(i, j) - u[i] - v[j];
                if reduced < shortest[j] {
                    path[j] = i;
                    shortest[j] = reduced;
                }
                // Prefer unassigned columns among equal path costs so the
                // augmentation terminates as early as possible.
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == NONE) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if !min_val.is_finite() {
                return Err(Error::Value("assignment is infeasible".into()));
            }
            let j = remaining[index];
            if row4col[j] == NONE {
                sink = j;
            } else {
                i = row4col[j];
            }
            visited_cols[j] = true;
            num_remaining -= 1;
            remaining[index] = remaining[num_remaining];
        }

        u[cur_row] += min_val;
        for row in 0..n {
            if visited_rows[row] && row != cur_row {
                u[row] += min_val - shortest[col4row[row]];
            }
        }
        for col in 0..n {
            if visited_cols[col] {
                v[col] -= min_val - shortest[col];
            }
        }

        // Augment along the alternating path back to cur_row.
        let mut j = sink;
        loop {
            let i = path[j];
            row4col[j] = i;
            std::mem::swap(&mut col4row[i], &mut j);
            if i == cur_row {
                break;
            }
        }
    }

    let total = (0..n).map(|row| cost.get(row, col4row[row])).sum();
    Ok(LapSolution {
        assignment: col4row,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_diagonal_picks_identity() {
        let m = CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let sol = solve_lap(&m).unwrap();
        assert_eq!(sol.assignment, vec![0, 1]);
        assert_eq!(sol.total, 0.0);
    }

    #[test]
    fn two_by_two_cross() {
        // Enumerating both permutations: 4 + 3 = 7 vs 1 + 2 = 3.
        let m = CostMatrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let sol = solve_lap(&m).unwrap();
        assert_eq!(sol.assignment, vec![1, 0]);
        assert_eq!(sol.total, 3.0);
    }

    #[test]
    fn non_square_rejected() {
        let err = CostMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert_eq!(err.category(), "shape");
    }

    #[test]
    fn negative_entry_rejected() {
        let m = CostMatrix::from_rows(&[vec![-1.0]]).unwrap();
        assert_eq!(solve_lap(&m).unwrap_err().category(), "value");
    }

    #[test]
    fn empty_matrix_is_trivial() {
        let sol = solve_lap(&CostMatrix::zeros(0)).unwrap();
        assert!(sol.assignment.is_empty());
        assert_eq!(sol.total, 0.0);
    }

    #[test]
    fn large_sentinel_avoided_when_possible() {
        let m = CostMatrix::from_rows(&[
            vec![LARGE, 1.0, LARGE],
            vec![2.0, LARGE, LARGE],
            vec![LARGE, LARGE, 0.5],
        ])
        .unwrap();
        let sol = solve_lap(&m).unwrap();
        assert_eq!(sol.assignment, vec![1, 0, 2]);
        assert!((sol.total - 3.5).abs() < 1e-12);
    }
}
