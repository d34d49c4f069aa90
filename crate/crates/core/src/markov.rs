//! Empirical Markov matrix over word patterns, its equilibrium, spectrum
//! and detailed-balance diagnostics.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::assignment::min_cost_assignment;
use crate::corpus::PatternId;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::stats::PairTable;

/// Row-stochastic matrix over an ordered list of pattern states.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMatrix {
    pub states: Vec<PatternId>,
    pub rows: Matrix,
    pub equilibrium: Vec<f64>,
}

/// Raw transition weights `n_ij * exp(-<log L_ij>)` between `states`.
pub fn transition_weights(states: &[PatternId], table: &PairTable) -> Matrix {
    Matrix::from_fn(states.len(), states.len(), |a, b| {
        table.get(states[a], states[b]).map_or(0.0, |s| s.weight())
    })
}

/// Normalizes each row to sum to one. Returns the index of the first
/// all-zero row as the error.
pub fn row_normalize(weights: &Matrix) -> core::result::Result<Matrix, usize> {
    let mut p = weights.clone();
    for i in 0..p.rows() {
        let sum: f64 = p.row(i).iter().sum();
        if !(sum > 0.0) {
            return Err(i);
        }
        for x in p.row_mut(i) {
            *x /= sum;
        }
    }
    Ok(p)
}

/// Estimates the long-range transition matrix over `states` and its
/// equilibrium. `label` names a state in error messages.
pub fn estimate_matrix(
    states: &[PatternId],
    table: &PairTable,
    label: impl Fn(PatternId) -> String,
) -> Result<MarkovMatrix> {
    if let Some(&missing) = states.iter().find(|s| !table.contains(**s)) {
        return Err(Error::UnknownPattern(missing.0));
    }
    let weights = transition_weights(states, table);
    let rows = row_normalize(&weights).map_err(|i| Error::IsolatedPattern(label(states[i])))?;
    let equilibrium = equilibrium(&rows)?;
    Ok(MarkovMatrix {
        states: states.to_vec(),
        rows,
        equilibrium,
    })
}

fn reachable(p: &Matrix, start: usize, forward: bool) -> Vec<bool> {
    let n = p.rows();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            let w = if forward { p[(i, j)] } else { p[(j, i)] };
            if w > 0.0 && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

/// States that do not communicate with state 0; empty iff irreducible.
pub fn non_communicating_states(p: &Matrix) -> Vec<usize> {
    if p.rows() == 0 {
        return Vec::new();
    }
    let fwd = reachable(p, 0, true);
    let bwd = reachable(p, 0, false);
    (0..p.rows()).filter(|&i| !(fwd[i] && bwd[i])).collect()
}

const EQUILIBRIUM_TOL: f64 = 1e-12;
const POWER_ITERATIONS: usize = 20_000;
const POLISH_ITERATIONS: usize = 2_000;

fn l1_residual(p: &Matrix, pi: &[f64]) -> f64 {
    p.left_mul(pi).iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

/// Solves `pi (P - I) = 0`, `sum(pi) = 1` by Gaussian elimination.
fn equilibrium_direct(p: &Matrix) -> Vec<f64> {
    let n = p.rows();
    // Unknowns pi_0..pi_{n-1}; the last balance equation is replaced by
    // the normalization.
    let mut a = Matrix::from_fn(n, n, |eq, k| {
        if eq == n - 1 {
            1.0
        } else {
            p[(k, eq)] - if k == eq { 1.0 } else { 0.0 }
        }
    });
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[(x, col)].abs().partial_cmp(&a[(y, col)].abs()).unwrap())
            .unwrap();
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            b.swap(col, piv);
        }
        let d = a[(col, col)];
        for row in col + 1..n {
            let f = a[(row, col)] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[(row, j)] -= f * a[(col, j)];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let acc: f64 = (col + 1..n).map(|j| a[(col, j)] * x[j]).sum();
        x[col] = (b[col] - acc) / a[(col, col)];
    }
    x
}

/// Unique stationary distribution of an irreducible stochastic matrix.
///
/// Iterates the lazy chain `(I + P)/2`, which shares the equilibrium of
/// `P` and is aperiodic, from the uniform vector until the residual
/// `||pi P - pi||_1` drops below `1e-12`. Slow mixers fall back to a
/// direct solve that is then polished by the same iteration.
pub fn equilibrium(p: &Matrix) -> Result<Vec<f64>> {
    let n = p.rows();
    if n == 0 || !p.is_square() {
        return Err(Error::InvalidSize {
            what: "equilibrium needs a non-empty square matrix",
            got: n,
        });
    }
    let outside = non_communicating_states(p);
    if !outside.is_empty() {
        return Err(Error::Reducible(outside));
    }

    let mut pi = vec![1.0 / n as f64; n];
    let mut converged = false;
    for _ in 0..POWER_ITERATIONS {
        let next = p.left_mul(&pi);
        if next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum::<f64>() < EQUILIBRIUM_TOL {
            converged = true;
            break;
        }
        for (x, y) in pi.iter_mut().zip(&next) {
            *x = 0.5 * (*x + y);
        }
    }
    if !converged {
        pi = equilibrium_direct(p);
        for x in pi.iter_mut() {
            *x = x.max(0.0);
        }
    }
    // Polish past the tolerance while the residual keeps shrinking, so
    // downstream sums over long horizons stay near roundoff.
    let mut best = pi.clone();
    let mut best_res = f64::INFINITY;
    let mut stale = 0;
    for _ in 0..POLISH_ITERATIONS {
        let total: f64 = pi.iter().sum();
        for x in pi.iter_mut() {
            *x /= total;
        }
        let res = l1_residual(p, &pi);
        if res < best_res {
            best_res = res;
            best.clone_from(&pi);
            stale = 0;
        } else {
            stale += 1;
        }
        if res <= f64::EPSILON || (best_res < EQUILIBRIUM_TOL && stale >= 8) {
            break;
        }
        let next = p.left_mul(&pi);
        for (x, y) in pi.iter_mut().zip(&next) {
            *x = 0.5 * (*x + y);
        }
    }
    Ok(best)
}

/// `r_n = 1/2 sum_ij |pi_i p^(n)_ij - pi_j p^(n)_ji|`; zero for reversible
/// chains.
pub fn balance_residual(p: &Matrix, pi: &[f64], n: u32) -> f64 {
    let pn = p.pow(n);
    let size = p.rows();
    let mut total = 0.0;
    for i in 0..size {
        for j in 0..size {
            total += (pi[i] * pn[(i, j)] - pi[j] * pn[(j, i)]).abs();
        }
    }
    0.5 * total
}

/// Multiset of eigenvalues, ordered by decreasing modulus then phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| linalg::modulus(*z)).collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.moduli().into_iter().fold(0.0, f64::max)
    }

    /// Largest distance between matched eigenvalues under the pairing
    /// that minimizes total distance; `None` when sizes differ.
    pub fn distance(&self, other: &Spectrum) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let cost = Matrix::from_fn(self.len(), other.len(), |i, j| (self.eigenvalues[i] - other.eigenvalues[j]).norm());
        let pairing = min_cost_assignment(&cost);
        Some(
            pairing
                .iter()
                .enumerate()
                .map(|(i, j)| cost[(i, j.expect("square cost matrix"))])
                .fold(0.0, f64::max),
        )
    }
}

pub fn spectrum(m: &Matrix) -> Result<Spectrum> {
    let mut eigenvalues = linalg::eigenvalues(m)?;
    eigenvalues.sort_by(|a, b| {
        linalg::modulus(*b)
            .partial_cmp(&linalg::modulus(*a))
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    Ok(Spectrum { eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_two_state() {
        let pi = equilibrium(&Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]])).unwrap();
        assert_abs_diff_eq!(pi[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn two_state_by_hand() {
        let pi = equilibrium(&Matrix::from_rows(&[[0.9, 0.1], [0.5, 0.5]])).unwrap();
        assert_abs_diff_eq!(pi[0], 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi[1], 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn periodic_chain_converges() {
        let p = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
        let pi = equilibrium(&p).unwrap();
        for x in pi {
            assert_abs_diff_eq!(x, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let p = Matrix::from_rows(&[[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(equilibrium(&p), Err(Error::Reducible(vec![2])));
    }

    #[test]
    fn zero_row_is_isolated() {
        let w = Matrix::from_rows(&[[1.0, 1.0], [0.0, 0.0]]);
        assert_eq!(row_normalize(&w), Err(1));
    }

    #[test]
    fn reversible_chain_has_zero_residual() {
        // Random walk on a weighted symmetric graph.
        let w = Matrix::from_rows(&[[1.0, 2.0, 0.5], [2.0, 0.0, 3.0], [0.5, 3.0, 1.0]]);
        let p = row_normalize(&w).unwrap();
        let total: f64 = w.as_slice().iter().sum();
        let pi: Vec<f64> = w.row_sums().iter().map(|r| r / total).collect();
        for n in 1..=5 {
            assert!(balance_residual(&p, &pi, n) < 1e-12);
        }
    }

    #[test]
    fn spectrum_of_stochastic_matrix_has_unit_radius() {
        let p = Matrix::from_rows(&[[0.2, 0.3, 0.5], [0.6, 0.1, 0.3], [0.25, 0.25, 0.5]]);
        let s = spectrum(&p).unwrap();
        assert_abs_diff_eq!(s.spectral_radius(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.eigenvalues[0].re, 1.0, epsilon = 1e-10);
        assert_eq!(s.distance(&s), Some(0.0));
    }
}
