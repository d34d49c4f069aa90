//! Whole-document pipeline: topicality of every pattern, the shared pair
//! table, Markov matrices, cliques, fingerprints, query expansion and
//! translation between two documents.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::align::{self, match_bipartite};
use crate::corpus::{Document, PatternId};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::markov::{self, MarkovMatrix};
use crate::qa::{self, QueryIndex, ScoredAnswer};
use crate::semantics::{build_clique, Clique, Fingerprint};
use crate::stats::{
    classify_topicality, diag_params, diagonal_stats, standard_gaussian_threshold, DiagParams, PairStats, PairTable,
    TopicalityVerdict,
};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// Patterns with fewer occurrences never enter the model.
    pub min_count: usize,
    /// States of the global Markov matrix.
    pub top_n: usize,
    pub alpha_star: f64,
    pub fp_len: usize,
    /// Minimum recurrence count for translation candidates.
    pub candidate_min_recurrences: u32,
    pub sim_floor: f64,
    pub damping: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            min_count: 3,
            top_n: 100,
            alpha_star: standard_gaussian_threshold(),
            fp_len: 64,
            candidate_min_recurrences: 20,
            sim_floor: 0.7,
            damping: qa::DEFAULT_DAMPING,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha_star > 0.5 && self.alpha_star < 1.0) {
            return bad(alloc::format!("alpha_star {} outside (0.5, 1)", self.alpha_star));
        }
        if !(0.0..=1.0).contains(&self.sim_floor) {
            return bad(alloc::format!("sim_floor {} outside [0, 1]", self.sim_floor));
        }
        if !(0.0..=1.0).contains(&self.damping) {
            return bad(alloc::format!("damping {} outside [0, 1]", self.damping));
        }
        if self.fp_len == 0 {
            return bad("fp_len must be positive".into());
        }
        if self.top_n == 0 {
            return bad("top_n must be positive".into());
        }
        Ok(())
    }
}

/// Per-pattern diagnostics plus the pair table shared by every later
/// stage.
#[derive(Debug, Clone)]
pub struct Analysis<'d> {
    doc: &'d Document,
    config: AnalysisConfig,
    diag: Vec<PairStats>,
    verdicts: Vec<Option<TopicalityVerdict>>,
    params: Vec<Option<DiagParams>>,
    topical: Vec<PatternId>,
    table: PairTable,
}

impl<'d> Analysis<'d> {
    pub fn new(doc: &'d Document, config: AnalysisConfig) -> Result<Self> {
        config.validate()?;
        let diag = diagonal_stats(doc);
        let verdicts: Vec<Option<TopicalityVerdict>> = diag.iter().map(|d| classify_topicality(d).ok()).collect();
        let params: Vec<Option<DiagParams>> = diag.iter().map(|d| diag_params(d).ok()).collect();
        let topical: Vec<PatternId> = doc
            .patterns()
            .iter()
            .filter(|p| p.count() >= config.min_count)
            .filter(|p| verdicts[p.id.index()].is_some_and(|v| v.verdict.is_topical()))
            .map(|p| p.id)
            .collect();
        let mut members: BTreeSet<PatternId> = topical.iter().copied().collect();
        members.extend(top_patterns(doc, config.top_n));
        let members: Vec<PatternId> = members.into_iter().collect();
        let table = PairTable::build(doc, &members);
        Ok(Analysis {
            doc,
            config,
            diag,
            verdicts,
            params,
            topical,
            table,
        })
    }

    pub fn document(&self) -> &'d Document {
        self.doc
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.config
    }

    pub fn table(&self) -> &PairTable {
        &self.table
    }

    pub fn diag(&self, id: PatternId) -> Option<&PairStats> {
        self.diag.get(id.index())
    }

    pub fn verdict(&self, id: PatternId) -> Option<TopicalityVerdict> {
        self.verdicts.get(id.index()).copied().flatten()
    }

    pub fn params(&self, id: PatternId) -> Option<DiagParams> {
        self.params.get(id.index()).copied().flatten()
    }

    /// Topical patterns with at least `min_count` occurrences, by id.
    pub fn topical(&self) -> &[PatternId] {
        &self.topical
    }

    pub fn is_topical(&self, id: PatternId) -> bool {
        self.topical.binary_search(&id).is_ok()
    }

    pub fn label(&self, id: PatternId) -> String {
        self.doc.pattern(id).map_or_else(|| alloc::format!("#{}", id.0), |p| p.label.clone())
    }

    /// Global Markov matrix over the `top_n` most frequent patterns.
    pub fn markov(&self) -> Result<MarkovMatrix> {
        let states = top_patterns(self.doc, self.config.top_n);
        markov::estimate_matrix(&states, &self.table, |id| self.label(id))
    }

    pub fn clique_members(&self, center: PatternId) -> Result<Vec<PatternId>> {
        if self.doc.pattern(center).is_none() {
            return Err(Error::UnknownPattern(center.0));
        }
        if !self.table.contains(center) {
            // Only topical patterns grow cliques; anything else stays alone.
            return Ok(Vec::new());
        }
        build_clique(center, &self.topical, &self.table, |id| self.params(id), self.config.alpha_star)
    }

    pub fn clique(&self, center: PatternId) -> Result<Clique> {
        let members = self.clique_members(center)?;
        if !self.table.contains(center) {
            return Err(Error::InvalidParameter(alloc::format!("`{}` is not a topical pattern", self.label(center))));
        }
        Clique::localize(center, &members, &self.table, |id| self.label(id))
    }

    pub fn fingerprint(&self, center: PatternId) -> Result<Fingerprint> {
        self.clique(center)?.fingerprint(self.config.fp_len)
    }

    /// Topical patterns recurring at least `candidate_min_recurrences`
    /// times, by descending recurrence count then id.
    pub fn candidate_pool(&self) -> Vec<PatternId> {
        let mut pool: Vec<PatternId> = self
            .topical
            .iter()
            .copied()
            .filter(|&id| self.diag[id.index()].n >= self.config.candidate_min_recurrences)
            .collect();
        pool.sort_by(|a, b| self.diag[b.index()].n.cmp(&self.diag[a.index()].n).then(a.cmp(b)));
        pool
    }

    /// Candidate pool restricted to nonzero fingerprints, with them.
    pub fn fingerprinted_candidates(&self) -> Result<Vec<(PatternId, Fingerprint)>> {
        let mut out = Vec::new();
        for id in self.candidate_pool() {
            let fp = self.fingerprint(id)?;
            if fp.padded.iter().any(|&x| x > 0.0) {
                out.push((id, fp));
            }
        }
        Ok(out)
    }

    /// Question patterns of `question`: known to the document, outside
    /// the stop set and with at least `min_count` occurrences.
    pub fn question_patterns(&self, question: &str) -> Vec<PatternId> {
        self.doc
            .patterns_in(question)
            .into_iter()
            .filter(|&id| self.doc.pattern(id).is_some_and(|p| p.count() >= self.config.min_count))
            .collect()
    }

    /// Expands the question over the cliques of its patterns and builds
    /// the damped chain on the union.
    pub fn expand_query(&self, question: &str) -> Result<QueryIndex> {
        let q = self.question_patterns(question);
        if q.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let mut expanded: BTreeSet<PatternId> = q.iter().copied().collect();
        for &id in &q {
            expanded.extend(self.clique_members(id)?);
        }
        let expanded: Vec<PatternId> = expanded.into_iter().collect();
        let local = PairTable::build(self.doc, &expanded);
        let weights = markov::transition_weights(&expanded, &local);
        QueryIndex::new(q, expanded, &weights, self.config.damping)
    }

    pub fn score_answer(&self, index: &QueryIndex, answer: &str) -> ScoredAnswer {
        let (score, matched_words) = index.score(&self.doc.patterns_in(answer));
        ScoredAnswer {
            text: answer.into(),
            score,
            matched_words,
        }
    }

    pub fn rank_answers<'a>(&self, index: &QueryIndex, answers: impl IntoIterator<Item = &'a str>) -> Vec<ScoredAnswer> {
        qa::rank_answers(index, answers.into_iter().map(|a| (a, self.doc.patterns_in(a))))
    }
}

/// The `n` most frequent patterns, ties broken by id.
pub fn top_patterns(doc: &Document, n: usize) -> Vec<PatternId> {
    let mut ids: Vec<PatternId> = doc.patterns().iter().map(|p| p.id).collect();
    ids.sort_by(|a, b| doc.patterns()[b.index()].count().cmp(&doc.patterns()[a.index()].count()).then(a.cmp(b)));
    ids.truncate(n);
    ids
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub source: PatternId,
    pub target: PatternId,
    pub similarity: f64,
    pub screened: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub source_candidates: Vec<PatternId>,
    pub target_candidates: Vec<PatternId>,
    pub pairs: Vec<AlignedPair>,
    pub total: f64,
}

impl Translation {
    pub fn mean_similarity(&self) -> f64 {
        if self.pairs.is_empty() {
            0.0
        } else {
            self.total / self.pairs.len() as f64
        }
    }
}

/// Screens every candidate pair on chapter vectors, scores the survivors
/// by fingerprint similarity and solves the maximum-weight matching.
pub fn translate(source: &Analysis<'_>, target: &Analysis<'_>) -> Result<Translation> {
    let k_src = source.document().chapters().len();
    let k_tgt = target.document().chapters().len();
    if k_src != k_tgt {
        return Err(Error::ChapterMismatch {
            source_chapters: k_src,
            target_chapters: k_tgt,
        });
    }
    let floor = source.config().sim_floor;
    let src = source.fingerprinted_candidates()?;
    let tgt = target.fingerprinted_candidates()?;
    let src_b: Vec<Vec<u32>> = src.iter().map(|(id, _)| source.document().chapter_vector(*id)).collect();
    let tgt_b: Vec<Vec<u32>> = tgt.iter().map(|(id, _)| target.document().chapter_vector(*id)).collect();

    let mut screened = Matrix::zeros(src.len(), tgt.len());
    let sim = Matrix::from_fn(src.len(), tgt.len(), |i, j| {
        let pass = align::screen(&src_b[i], &tgt_b[j], k_src).unwrap_or(false);
        screened[(i, j)] = if pass { 1.0 } else { 0.0 };
        align::similarity(&src[i].1.padded, &tgt[j].1.padded, pass, floor)
    });
    let assignment = match_bipartite(&sim);
    let pairs = assignment
        .pairs
        .iter()
        .map(|&(i, j, s)| AlignedPair {
            source: src[i].0,
            target: tgt[j].0,
            similarity: s,
            screened: screened[(i, j)] > 0.0,
        })
        .collect();
    Ok(Translation {
        source_candidates: src.into_iter().map(|c| c.0).collect(),
        target_candidates: tgt.into_iter().map(|c| c.0).collect(),
        pairs,
        total: assignment.total,
    })
}
