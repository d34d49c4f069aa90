//! Long-range transition statistics between word patterns.
//!
//! A transition from an occurrence `a` of pattern `i` goes to the next
//! occurrence `b` of pattern `j` that starts after `a` ends, provided no
//! occurrence of `i` sits in between. With raw gap `g = start(b) - end(a)`
//! and `m` the longest form length of the two patterns, the transition
//! counts only when `g > m`, and then contributes the effective length
//! `L = g - m`.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Document, PatternId, Span};
use crate::error::{Error, Result};
use crate::math::{self, EULER_GAMMA};

/// Sufficient statistics of the effective lengths `L` of one ordered
/// pattern pair. Logarithms are natural.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairStats {
    pub n: u32,
    pub sum_log: f64,
    pub sum_log2: f64,
    pub sum_len: f64,
    pub sum_len_log: f64,
    pub sum_len_log2: f64,
}

impl PairStats {
    pub fn from_lengths<I: IntoIterator<Item = f64>>(lengths: I) -> Self {
        let mut s = PairStats::default();
        for l in lengths {
            s.push(l);
        }
        s
    }

    pub fn push(&mut self, len: f64) {
        let lg = math::ln(len);
        self.n += 1;
        self.sum_log += lg;
        self.sum_log2 += lg * lg;
        self.sum_len += len;
        self.sum_len_log += len * lg;
        self.sum_len_log2 += len * lg * lg;
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `<log L>`, or `None` without samples.
    pub fn mean_log(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum_log / self.n as f64)
    }

    /// `<L>`, or `None` without samples.
    pub fn mean_len(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum_len / self.n as f64)
    }

    /// Transition weight `n * exp(-<log L>)` used by the Markov estimator.
    pub fn weight(&self) -> f64 {
        match self.mean_log() {
            Some(ml) => self.n as f64 * math::exp(-ml),
            None => 0.0,
        }
    }
}

fn pattern_spans(doc: &Document, id: PatternId) -> Result<&[Span]> {
    doc.pattern(id)
        .map(|p| p.occurrences.as_slice())
        .ok_or(Error::UnknownPattern(id.0))
}

/// Statistics of transitions from pattern `i` to pattern `j` (`i == j`
/// gives recurrences), computed by merging the two occurrence lists.
pub fn scan_pair(doc: &Document, i: PatternId, j: PatternId) -> Result<PairStats> {
    let from = pattern_spans(doc, i)?;
    let to = pattern_spans(doc, j)?;
    let m = doc.patterns()[i.index()].max_form_len.max(doc.patterns()[j.index()].max_form_len);
    let mut stats = PairStats::default();
    let mut cursor = 0;
    for (k, a) in from.iter().enumerate() {
        let next_from = from.get(k + 1).map_or(usize::MAX, |s| s.start);
        let b = if i == j {
            from.get(k + 1)
        } else {
            while cursor < to.len() && to[cursor].start < a.end {
                cursor += 1;
            }
            to.get(cursor).filter(|b| b.start < next_from)
        };
        if let Some(b) = b {
            let gap = b.start - a.end;
            if gap > m {
                stats.push((gap - m) as f64);
            }
        }
    }
    Ok(stats)
}

/// Recurrence statistics of every pattern, indexed by pattern id.
pub fn diagonal_stats(doc: &Document) -> Vec<PairStats> {
    doc.patterns()
        .iter()
        .map(|p| scan_pair(doc, p.id, p.id).expect("pattern ids come from the document"))
        .collect()
}

/// Sparse statistics for every ordered pair within a member set.
#[derive(Debug, Clone)]
pub struct PairTable {
    members: Vec<PatternId>,
    slot: Vec<u32>,
    rows: Vec<Vec<(u32, PairStats)>>,
}

const NOT_MEMBER: u32 = u32::MAX;

impl PairTable {
    /// Sweeps the token stream once per member row. Each occurrence of
    /// the row pattern opens a window that runs to its next occurrence;
    /// the first occurrence of every other member inside the window is
    /// the transition target.
    pub fn build(doc: &Document, members: &[PatternId]) -> Self {
        let mut members: Vec<PatternId> = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut slot = vec![NOT_MEMBER; doc.patterns().len()];
        for (k, m) in members.iter().enumerate() {
            slot[m.index()] = k as u32;
        }

        // Member tokens only: (slot, start, end).
        let stream: Vec<(u32, usize, usize)> = doc
            .tokens()
            .iter()
            .zip(doc.token_patterns())
            .filter_map(|(t, p)| {
                let s = slot[p.as_ref()?.index()];
                (s != NOT_MEMBER).then_some((s, t.start, t.end))
            })
            .collect();
        let mut positions: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
        for (k, &(s, _, _)) in stream.iter().enumerate() {
            positions[s as usize].push(k);
        }
        let max_len: Vec<usize> = members
            .iter()
            .map(|m| doc.patterns()[m.index()].max_form_len)
            .collect();

        let mut scratch = vec![PairStats::default(); members.len()];
        let mut seen = vec![usize::MAX; members.len()];
        let mut touched: Vec<u32> = Vec::new();
        let mut rows = Vec::with_capacity(members.len());
        for (row, pos) in positions.iter().enumerate() {
            for (k, &p) in pos.iter().enumerate() {
                let a_end = stream[p].2;
                let window_end = pos.get(k + 1).copied().unwrap_or(stream.len());
                // Recurrence: the next occurrence of the row pattern itself.
                if let Some(&q) = pos.get(k + 1) {
                    let gap = stream[q].1 - a_end;
                    let m = max_len[row];
                    if gap > m {
                        if scratch[row].is_empty() {
                            touched.push(row as u32);
                        }
                        scratch[row].push((gap - m) as f64);
                    }
                }
                for &(s, start, _) in &stream[p + 1..window_end] {
                    let col = s as usize;
                    if seen[col] == p {
                        continue;
                    }
                    seen[col] = p;
                    let gap = start - a_end;
                    let m = max_len[row].max(max_len[col]);
                    if gap > m {
                        if scratch[col].is_empty() {
                            touched.push(s);
                        }
                        scratch[col].push((gap - m) as f64);
                    }
                }
            }
            touched.sort_unstable();
            let entries: Vec<(u32, PairStats)> = touched
                .drain(..)
                .map(|c| (c, core::mem::take(&mut scratch[c as usize])))
                .collect();
            rows.push(entries);
        }
        PairTable { members, slot, rows }
    }

    pub fn members(&self) -> &[PatternId] {
        &self.members
    }

    pub fn contains(&self, id: PatternId) -> bool {
        self.slot.get(id.index()).is_some_and(|&s| s != NOT_MEMBER)
    }

    /// Statistics for `i -> j`. Member pairs without transitions give
    /// empty statistics; non-members give `None`.
    pub fn get(&self, i: PatternId, j: PatternId) -> Option<PairStats> {
        let si = *self.slot.get(i.index()).filter(|&&s| s != NOT_MEMBER)?;
        let sj = *self.slot.get(j.index()).filter(|&&s| s != NOT_MEMBER)?;
        let row = &self.rows[si as usize];
        Some(match row.binary_search_by_key(&sj, |e| e.0) {
            Ok(k) => row[k].1,
            Err(_) => PairStats::default(),
        })
    }

    /// Non-empty entries of row `i`, as `(target, stats)`.
    pub fn row(&self, i: PatternId) -> impl Iterator<Item = (PatternId, &PairStats)> + '_ {
        let row = self
            .slot
            .get(i.index())
            .filter(|&&s| s != NOT_MEMBER)
            .map(|&s| self.rows[s as usize].as_slice())
            .unwrap_or(&[]);
        row.iter().map(move |(c, st)| (self.members[*c as usize], st))
    }
}

/// Two-sigma half-width for `delta` under exponentially distributed
/// recurrences: `(2/sqrt(n)) * sqrt(pi^2/6 - 1 - 1/(2n))`.
pub fn poisson_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::UndefinedStatistic);
    }
    let n = n as f64;
    let pi2_6 = core::f64::consts::PI * core::f64::consts::PI / 6.0;
    Ok(2.0 / math::sqrt(n) * math::sqrt(pi2_6 - 1.0 - 1.0 / (2.0 * n)))
}

/// `log<L> - <log L> - gamma_0 + 1/(2n)`; zero in expectation for
/// exponential recurrences.
pub fn delta_statistic(diag: &PairStats) -> Result<f64> {
    if diag.n < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: diag.n as usize,
        });
    }
    let n = diag.n as f64;
    Ok(math::ln(diag.sum_len / n) - diag.sum_log / n - EULER_GAMMA + 1.0 / (2.0 * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topicality {
    NonTopical,
    /// Recurrences burstier than Poisson (mixture of exponentials).
    TopicalBelow,
    TopicalAbove,
}

impl Topicality {
    pub fn is_topical(self) -> bool {
        self != Topicality::NonTopical
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topicality::NonTopical => "non_topical",
            Topicality::TopicalBelow => "topical_below",
            Topicality::TopicalAbove => "topical_above",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopicalityVerdict {
    pub delta: f64,
    pub bound: f64,
    pub verdict: Topicality,
}

pub fn classify_delta(delta: f64, bound: f64) -> Topicality {
    if delta.abs() < bound {
        Topicality::NonTopical
    } else if delta < 0.0 {
        Topicality::TopicalBelow
    } else {
        Topicality::TopicalAbove
    }
}

pub fn classify_topicality(diag: &PairStats) -> Result<TopicalityVerdict> {
    let delta = delta_statistic(diag)?;
    let bound = poisson_bound(diag.n as usize)?;
    Ok(TopicalityVerdict {
        delta,
        bound,
        verdict: classify_delta(delta, bound),
    })
}

/// Mean and variance of the Gaussian affinity model derived from a
/// pattern's recurrences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagParams {
    /// `<L log L>/<L> - 1`
    pub ell: f64,
    /// `<L (ell - log L)^2>/<L>`
    pub beta: f64,
    pub degenerate: bool,
}

pub fn diag_params(diag: &PairStats) -> Result<DiagParams> {
    if diag.n < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: diag.n as usize,
        });
    }
    if diag.sum_len <= 0.0 {
        return Err(Error::UndefinedStatistic);
    }
    let ell = diag.sum_len_log / diag.sum_len - 1.0;
    let beta = ((diag.sum_len_log2 - 2.0 * ell * diag.sum_len_log + ell * ell * diag.sum_len) / diag.sum_len).max(0.0);
    Ok(DiagParams {
        ell,
        beta,
        degenerate: beta <= 0.0,
    })
}

/// Survival function at `ell` of a Gaussian with mean `ell_i` and
/// variance `beta_i / n_ij`.
pub fn gaussian_alpha(n_ij: u32, ell_i: f64, beta_i: f64, ell: f64) -> Result<f64> {
    if n_ij == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if !(beta_i > 0.0) {
        return Err(Error::DegenerateVariance(beta_i));
    }
    let sd = math::sqrt(beta_i / n_ij as f64);
    Ok(math::normal_sf((ell - ell_i) / sd))
}

/// Affinity of `i -> j` observed at `<log L_ij>`; falls back to the
/// step-function limit when the variance degenerates.
pub fn affinity(pair: &PairStats, params: &DiagParams) -> Option<f64> {
    let observed = pair.mean_log()?;
    if params.degenerate {
        return Some(if observed < params.ell { 1.0 } else { 0.0 });
    }
    gaussian_alpha(pair.n, params.ell, params.beta, observed).ok()
}

/// `P(Z <= 1)` for a standard normal; the default clique threshold.
pub fn standard_gaussian_threshold() -> f64 {
    1.0 - math::normal_sf(1.0)
}

/// Euler–Mascheroni constant.
pub const EULER_MASCHERONI: f64 = EULER_GAMMA;
