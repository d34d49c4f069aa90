//! Cross-document topic alignment: Ruzicka similarity, chapter-vector
//! screening and maximum-weight matching of fingerprints.

use alloc::vec::Vec;

use crate::assignment::max_weight_assignment;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// `sum min(a, b) / sum max(a, b)`; the shorter vector is zero-extended.
pub fn ruzicka(a: &[f64], b: &[f64]) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 0.0);
    for k in 0..a.len().max(b.len()) {
        let x = a.get(k).copied().unwrap_or(0.0);
        let y = b.get(k).copied().unwrap_or(0.0);
        lo += x.min(y);
        hi += x.max(y);
    }
    if !(hi > 0.0) {
        return Err(Error::UndefinedSimilarity);
    }
    Ok(lo / hi)
}

pub fn ruzicka_counts(a: &[u32], b: &[u32]) -> Result<f64> {
    let a: Vec<f64> = a.iter().map(|&x| x as f64).collect();
    let b: Vec<f64> = b.iter().map(|&x| x as f64).collect();
    ruzicka(&a, &b)
}

/// Threshold a pair of chapter vectors must reach: the larger of
/// `1 - 0.07 sqrt(K)` and `1 - sqrt(#shared chapters / sum max)`.
pub fn screen_threshold(a: &[u32], b: &[u32], chapters: usize) -> f64 {
    let shared = a.iter().zip(b).filter(|(&x, &y)| x.min(y) > 0).count() as f64;
    let union: f64 = (0..a.len().max(b.len()))
        .map(|k| a.get(k).copied().unwrap_or(0).max(b.get(k).copied().unwrap_or(0)) as f64)
        .sum();
    let first = 1.0 - 0.07 * math::sqrt(chapters as f64);
    let second = if union > 0.0 { 1.0 - math::sqrt(shared / union) } else { 1.0 };
    first.max(second)
}

pub fn screen(a: &[u32], b: &[u32], chapters: usize) -> Result<bool> {
    if chapters == 0 {
        return Err(Error::InvalidSize {
            what: "screening needs at least one chapter",
            got: 0,
        });
    }
    Ok(ruzicka_counts(a, b)? >= screen_threshold(a, b, chapters))
}

/// Fingerprint similarity after screening: the Ruzicka similarity when
/// screened and at least `floor`, otherwise zero. Two zero vectors
/// carry no evidence and also score zero.
pub fn similarity(a: &[f64], b: &[f64], screened: bool, floor: f64) -> f64 {
    if !screened {
        return 0.0;
    }
    match ruzicka(a, b) {
        Ok(s) if s >= floor => s,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `(source row, target column, similarity)`, by source row.
    pub pairs: Vec<(usize, usize, f64)>,
    pub total: f64,
}

/// Maximum-total one-to-one assignment over a nonnegative similarity
/// matrix; zero-similarity pairs are left out.
pub fn match_bipartite(sim: &Matrix) -> Assignment {
    let pairs: Vec<(usize, usize, f64)> = max_weight_assignment(sim)
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| {
            let j = j?;
            (sim[(i, j)] > 0.0).then(|| (i, j, sim[(i, j)]))
        })
        .collect();
    let total = pairs.iter().map(|p| p.2).sum();
    Assignment { pairs, total }
}
