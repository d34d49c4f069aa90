//! Linear assignment by the Hungarian method.
//!
//! Dense `O(n^3)` shortest-augmenting-path formulation with row and
//! column potentials. Rectangular inputs are padded with zero-cost
//! dummies.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;

/// Column assigned to each row of a square cost matrix, minimizing total
/// cost.
fn solve_square(cost: &Matrix) -> Vec<usize> {
    let n = cost.rows();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    // 1-based with a virtual column 0, as in the classical formulation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if owner[j] > 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}

fn pad_square(m: &Matrix, fill: f64) -> Matrix {
    let n = m.rows().max(m.cols());
    Matrix::from_fn(n, n, |i, j| if i < m.rows() && j < m.cols() { m[(i, j)] } else { fill })
}

/// Minimum-cost assignment; entry `i` is the column given to row `i`, or
/// `None` when the row only received a padding column.
pub fn min_cost_assignment(cost: &Matrix) -> Vec<Option<usize>> {
    let square = pad_square(cost, 0.0);
    solve_square(&square)
        .into_iter()
        .take(cost.rows())
        .map(|j| (j < cost.cols()).then_some(j))
        .collect()
}

/// Maximum-weight assignment over nonnegative weights.
pub fn max_weight_assignment(weights: &Matrix) -> Vec<Option<usize>> {
    let top = weights.as_slice().iter().copied().fold(0.0, f64::max);
    let cost = Matrix::from_fn(weights.rows(), weights.cols(), |i, j| top - weights[(i, j)]);
    // Padding with cost `top` mirrors zero-weight dummies.
    let square = pad_square(&cost, top);
    solve_square(&square)
        .into_iter()
        .take(weights.rows())
        .map(|j| (j < weights.cols()).then_some(j))
        .collect()
}
