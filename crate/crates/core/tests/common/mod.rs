#![allow(dead_code)]

use lisf_core::corpus::{Document, PatternId};
use lisf_core::linalg::Matrix;
use lisf_core::stats::PairStats;

/// Cyclic Jacobi rotations for a symmetric matrix. Returns eigenvalues
/// and the eigenvectors as columns.
pub fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Stationary vector from Gauss-Jordan elimination on the transposed
/// balance equations with one of them replaced by normalization.
pub fn direct_equilibrium(p: &Matrix) -> Vec<f64> {
    let n = p.rows();
    let mut aug = vec![vec![0.0; n + 1]; n];
    for (eq, row) in aug.iter_mut().enumerate() {
        for k in 0..n {
            row[k] = if eq == 0 { 1.0 } else { p[(k, eq)] - f64::from(u8::from(k == eq)) };
        }
        row[n] = if eq == 0 { 1.0 } else { 0.0 };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs())).unwrap();
        aug.swap(col, piv);
        let d = aug[col][col];
        for x in aug[col].iter_mut() {
            *x /= d;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..=n {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    aug.iter().map(|r| r[n]).collect()
}

/// Transition statistics by walking the token stream one token at a time.
pub fn brute_force_pair(doc: &Document, i: PatternId, j: PatternId) -> PairStats {
    let toks = doc.tokens();
    let pats = doc.token_patterns();
    let span_max = |id: PatternId| {
        toks.iter()
            .zip(pats)
            .filter(|(_, p)| **p == Some(id))
            .map(|(t, _)| t.end - t.start)
            .max()
            .unwrap_or(0)
    };
    let m = span_max(i).max(span_max(j));
    let mut lengths = Vec::new();
    for a in 0..toks.len() {
        if pats[a] != Some(i) {
            continue;
        }
        for b in a + 1..toks.len() {
            if pats[b] == Some(j) {
                let gap = toks[b].start - toks[a].end;
                if gap > m {
                    lengths.push((gap - m) as f64);
                }
                break;
            }
            if pats[b] == Some(i) {
                break;
            }
        }
    }
    PairStats::from_lengths(lengths)
}

/// Best total over all permutations of a square matrix, summed in row
/// order.
pub fn brute_force_max_assignment(w: &Matrix) -> f64 {
    fn go(w: &Matrix, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        let n = w.rows();
        if row == n {
            if acc > *best {
                *best = acc;
            }
            return;
        }
        for c in 0..n {
            if !used[c] {
                used[c] = true;
                go(w, row + 1, used, acc + w[(row, c)], best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(w, 0, &mut vec![false; w.rows()], 0.0, &mut best);
    best
}

pub fn lcg_text(seed: u64, words: usize, vocab: &[&str]) -> String {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut out = String::new();
    for k in 0..words {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let w = vocab[(state >> 33) as usize % vocab.len()];
        out.push_str(w);
        out.push_str(if k % 11 == 10 { ". " } else { " " });
    }
    out
}
