//! Semantic cliques, localized recurrence matrices and their spectral
//! fingerprints.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::PatternId;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::markov;
use crate::math;
use crate::stats::{affinity, DiagParams, PairTable};

/// Topical candidates joining `center`: both directed affinities must
/// exceed `alpha_star`, each judged against the Gaussian model of its
/// own source pattern. Returned in candidate order, center excluded.
pub fn build_clique(
    center: PatternId,
    candidates: &[PatternId],
    table: &PairTable,
    params: impl Fn(PatternId) -> Option<DiagParams>,
    alpha_star: f64,
) -> Result<Vec<PatternId>> {
    let pc = params(center).ok_or(Error::InsufficientSamples { needed: 2, got: 0 })?;
    let mut members = Vec::new();
    for &j in candidates {
        if j == center {
            continue;
        }
        let (Some(ij), Some(ji), Some(pj)) = (table.get(center, j), table.get(j, center), params(j)) else {
            continue;
        };
        if ij.n == 0 || ji.n == 0 {
            continue;
        }
        let (Some(a_ij), Some(a_ji)) = (affinity(&ij, &pc), affinity(&ji, &pj)) else {
            continue;
        };
        if a_ij.min(a_ji) > alpha_star {
            members.push(j);
        }
    }
    Ok(members)
}

/// Row-normalized subblock of `weights` on `indices`. Members whose row
/// is zero inside the subblock are dropped until none remain; the first
/// index is never dropped. Returns the kept positions (into `indices`)
/// and the normalized matrix.
pub fn localize(weights: &Matrix, indices: &[usize]) -> core::result::Result<(Vec<usize>, Matrix), usize> {
    let mut keep: Vec<usize> = (0..indices.len()).collect();
    loop {
        let sub: Vec<usize> = keep.iter().map(|&k| indices[k]).collect();
        let block = weights.submatrix(&sub);
        match markov::row_normalize(&block) {
            Ok(p) => return Ok((keep, p)),
            Err(0) => return Err(keep[0]),
            Err(_) => {
                let zero: Vec<bool> = (0..block.rows()).map(|r| block.row(r).iter().all(|&x| x <= 0.0)).collect();
                if zero[0] {
                    return Err(keep[0]);
                }
                keep = keep.into_iter().zip(zero).filter(|(_, z)| !z).map(|(k, _)| k).collect();
            }
        }
    }
}

/// Copy of `p_local` with the center's row and column set to zero.
pub fn recurrence_matrix(p_local: &Matrix) -> Matrix {
    let mut r = p_local.clone();
    for k in 0..r.rows() {
        r[(0, k)] = 0.0;
        r[(k, 0)] = 0.0;
    }
    r
}

/// `-sum_ij pi_i p_ij ln p_ij` in nats per word.
pub fn entropy_rate(p: &Matrix, pi: &[f64]) -> f64 {
    let mut eta = 0.0;
    for (i, &w) in pi.iter().enumerate() {
        for &x in p.row(i) {
            eta -= w * math::xlogx(x);
        }
    }
    eta.max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    /// Eigenvalue magnitudes of the recurrence matrix, descending.
    pub magnitudes: Vec<f64>,
    /// `floor(e^eta)`, kept within `1..=magnitudes.len()`.
    pub cutoff: usize,
    /// First `cutoff` magnitudes followed by zeros, of the configured
    /// length.
    pub padded: Vec<f64>,
}

pub fn fingerprint(r_local: &Matrix, eta: f64, fp_len: usize) -> Result<Fingerprint> {
    let mut magnitudes: Vec<f64> = linalg::eigenvalues(r_local)?.into_iter().map(linalg::modulus).collect();
    magnitudes.sort_by(|a, b| b.total_cmp(a));
    // The epsilon keeps e^(log k) from rounding just below k.
    let cutoff = (math::floor(math::exp(eta) + 1e-9) as usize).clamp(1, magnitudes.len().max(1));
    let mut padded = vec![0.0; fp_len];
    for (slot, &m) in padded.iter_mut().zip(magnitudes.iter().take(cutoff)) {
        *slot = m;
    }
    Ok(Fingerprint {
        magnitudes,
        cutoff,
        padded,
    })
}

/// A center pattern with the localized chain on its semantic clique.
#[derive(Debug, Clone, PartialEq)]
pub struct Clique {
    pub center: PatternId,
    /// Center first, then by descending local equilibrium, ties by id.
    pub members: Vec<PatternId>,
    pub p_local: Matrix,
    pub pi_local: Vec<f64>,
    pub eta: f64,
    /// Members removed because their row vanished inside the clique.
    pub dropped: Vec<PatternId>,
}

impl Clique {
    /// Localizes `table`'s transition weights onto `center` plus
    /// `others`.
    pub fn localize(
        center: PatternId,
        others: &[PatternId],
        table: &PairTable,
        label: impl Fn(PatternId) -> String,
    ) -> Result<Clique> {
        let mut states = vec![center];
        states.extend(others.iter().copied().filter(|&o| o != center));
        if let Some(&missing) = states.iter().find(|s| !table.contains(**s)) {
            return Err(Error::UnknownPattern(missing.0));
        }
        let weights = markov::transition_weights(&states, table);
        let all: Vec<usize> = (0..states.len()).collect();
        let (keep, p) = localize(&weights, &all).map_err(|_| Error::IsolatedPattern(label(center)))?;
        let dropped = (0..states.len()).filter(|k| !keep.contains(k)).map(|k| states[k]).collect();
        let kept: Vec<PatternId> = keep.iter().map(|&k| states[k]).collect();
        let pi = markov::equilibrium(&p)?;

        let mut order: Vec<usize> = (1..kept.len()).collect();
        order.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]).then(kept[a].cmp(&kept[b])));
        order.insert(0, 0);
        let p_local = Matrix::from_fn(order.len(), order.len(), |a, b| p[(order[a], order[b])]);
        let pi_local: Vec<f64> = order.iter().map(|&k| pi[k]).collect();
        let eta = entropy_rate(&p_local, &pi_local);
        Ok(Clique {
            center,
            members: order.iter().map(|&k| kept[k]).collect(),
            p_local,
            pi_local,
            eta,
            dropped,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn recurrence_matrix(&self) -> Matrix {
        recurrence_matrix(&self.p_local)
    }

    pub fn fingerprint(&self, fp_len: usize) -> Result<Fingerprint> {
        fingerprint(&self.recurrence_matrix(), self.eta, fp_len)
    }
}
