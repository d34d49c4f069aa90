//! Answer ranking by entropy production on a damped, query-localized
//! chain, with MAP/MRR evaluation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::PatternId;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::markov;
use crate::math;

pub const DEFAULT_DAMPING: f64 = 0.85;

/// Question openings that ask for quantities, dates or fates. Questions
/// starting with one of them are left out of the filtered evaluation.
pub const QUANTITATIVE_PREFIXES: [&str; 7] = [
    "How big",
    "How long",
    "How many",
    "How old",
    "What became of",
    "What happened to",
    "What year",
];

/// Case-insensitive prefix test against `prefixes`.
pub fn has_prefix(question: &str, prefixes: &[&str]) -> bool {
    let q = question.trim_start();
    prefixes.iter().any(|p| {
        q.len() >= p.len() && q.is_char_boundary(p.len()) && q[..p.len()].eq_ignore_ascii_case(p)
    })
}

/// `d p_ij + (1 - d)/N`.
pub fn damp(p: &Matrix, d: f64) -> Matrix {
    let n = p.rows();
    let teleport = (1.0 - d) / n as f64;
    Matrix::from_fn(n, n, |i, j| d * p[(i, j)] + teleport)
}

/// Row-normalizes `weights`, sending rows without mass uniformly.
pub fn normalize_dangling(weights: &Matrix) -> Matrix {
    let n = weights.rows();
    let mut p = weights.clone();
    for i in 0..n {
        let sum: f64 = p.row(i).iter().sum();
        for x in p.row_mut(i) {
            *x = if sum > 0.0 { *x / sum } else { 1.0 / n as f64 };
        }
    }
    p
}

/// Query-expanded chain: the question's patterns, their semantic
/// neighbourhood, the damped transition matrix on it and its PageRank.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryIndex {
    /// Question patterns with multiplicity, in question order.
    pub question: Vec<PatternId>,
    /// Question patterns and their clique members, sorted by id.
    pub expanded: Vec<PatternId>,
    pub damped: Matrix,
    pub pagerank: Vec<f64>,
    position: BTreeMap<PatternId, usize>,
}

impl QueryIndex {
    /// `weights[a][b]` is the raw transition weight between
    /// `expanded[a]` and `expanded[b]`.
    pub fn new(question: Vec<PatternId>, expanded: Vec<PatternId>, weights: &Matrix, damping: f64) -> Result<Self> {
        if question.is_empty() || expanded.is_empty() {
            return Err(Error::EmptyQuery);
        }
        if !(0.0..=1.0).contains(&damping) {
            return Err(Error::InvalidParameter(alloc::format!("damping {damping} outside [0, 1]")));
        }
        if weights.rows() != expanded.len() || !weights.is_square() {
            return Err(Error::InvalidSize {
                what: "query weights must match the expanded set",
                got: weights.rows(),
            });
        }
        let position: BTreeMap<PatternId, usize> = expanded.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        if let Some(q) = question.iter().find(|q| !position.contains_key(q)) {
            return Err(Error::UnknownPattern(q.0));
        }
        let damped = damp(&normalize_dangling(weights), damping);
        let pagerank = markov::equilibrium(&damped)?;
        Ok(QueryIndex {
            question,
            expanded,
            damped,
            pagerank,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.expanded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expanded.is_empty()
    }

    pub fn contains(&self, id: PatternId) -> bool {
        self.position.contains_key(&id)
    }

    /// Entropy-production score of an answer given as its pattern
    /// occurrences, with the distinct contributing pairs.
    pub fn score(&self, answer: &[PatternId]) -> (f64, Vec<(PatternId, PatternId)>) {
        let mut total = 0.0;
        let mut pairs = Vec::new();
        for &q in &self.question {
            let i = self.position[&q];
            for &a in answer {
                let Some(&j) = self.position.get(&a) else {
                    continue;
                };
                let term = -self.pagerank[i] * math::xlogx(self.damped[(i, j)]);
                if term > 0.0 {
                    total += term;
                    pairs.push((q, a));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        (total, pairs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAnswer {
    pub text: String,
    pub score: f64,
    pub matched_words: Vec<(PatternId, PatternId)>,
}

/// Scores each `(text, patterns)` candidate and sorts by descending
/// score, keeping input order among ties.
pub fn rank_answers<'a, I>(index: &QueryIndex, candidates: I) -> Vec<ScoredAnswer>
where
    I: IntoIterator<Item = (&'a str, Vec<PatternId>)>,
{
    let mut scored: Vec<ScoredAnswer> = candidates
        .into_iter()
        .map(|(text, pats)| {
            let (score, matched_words) = index.score(&pats);
            ScoredAnswer {
                text: String::from(text),
                score,
                matched_words,
            }
        })
        .collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    scored
}

/// Average precision of a ranked relevance list; `None` without any
/// relevant item.
pub fn average_precision(ranked: &[bool]) -> Option<f64> {
    let mut hits = 0usize;
    let mut acc = 0.0;
    for (k, &rel) in ranked.iter().enumerate() {
        if rel {
            hits += 1;
            acc += hits as f64 / (k + 1) as f64;
        }
    }
    (hits > 0).then(|| acc / hits as f64)
}

pub fn reciprocal_rank(ranked: &[bool]) -> Option<f64> {
    ranked.iter().position(|&r| r).map(|k| 1.0 / (k + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuestionMetrics {
    pub average_precision: f64,
    pub reciprocal_rank: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// One entry per input list; `None` for lists without a positive.
    pub per_question: Vec<Option<QuestionMetrics>>,
    pub map: f64,
    pub mrr: f64,
    pub evaluated: usize,
}

/// MAP and MRR over ranked relevance lists.
pub fn evaluate(lists: &[Vec<bool>]) -> Metrics {
    let per_question: Vec<Option<QuestionMetrics>> = lists
        .iter()
        .map(|l| {
            Some(QuestionMetrics {
                average_precision: average_precision(l)?,
                reciprocal_rank: reciprocal_rank(l)?,
            })
        })
        .collect();
    let used: Vec<&QuestionMetrics> = per_question.iter().flatten().collect();
    let n = used.len();
    let mean = |f: fn(&QuestionMetrics) -> f64| if n == 0 { 0.0 } else { used.iter().map(|m| f(m)).sum::<f64>() / n as f64 };
    Metrics {
        map: mean(|m| m.average_precision),
        mrr: mean(|m| m.reciprocal_rank),
        evaluated: n,
        per_question,
    }
}

/// Uniform `n x n` weights, handy for tests and singleton queries.
pub fn uniform_weights(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |_, _| 1.0)
}

/// Builds a trivial index on a single pattern.
pub fn singleton_index(q: PatternId) -> Result<QueryIndex> {
    QueryIndex::new(vec![q], vec![q], &uniform_weights(1), DEFAULT_DAMPING)
}
