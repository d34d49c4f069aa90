//! Command implementations as plain functions returning serializable
//! reports.

use std::collections::BTreeMap;
use std::path::Path;

use log::warn;
use lisf_core::analysis::{translate as align_documents, Analysis};
use lisf_core::chainlab;
use lisf_core::corpus::{Document, DocumentOptions, PatternId};
use lisf_core::markov::{self, MarkovMatrix, Spectrum};
use lisf_core::qa::{self, QUANTITATIVE_PREFIXES};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::input::{self, ChapterSpec, Gold, GoldLabel, QaItem};

/// Everything needed to turn raw text into a document.
#[derive(Debug, Clone)]
pub struct Loader {
    pub options: DocumentOptions,
    pub chapters: ChapterSpec,
}

impl Loader {
    /// `default_stoplist` applies when the configuration names none.
    pub fn new(config: &RunConfig, default_stoplist: &str) -> Result<Self> {
        let stop_set = input::load_stoplist(config.stoplist.as_deref().unwrap_or(default_stoplist))?;
        let lexicon = config.lexicon.as_deref().map(|p| input::load_lexicon(Path::new(p))).transpose()?;
        Ok(Loader {
            options: DocumentOptions {
                stop_set,
                lexicon,
                ..DocumentOptions::default()
            },
            chapters: ChapterSpec::parse(&config.chapter_rule)?,
        })
    }

    pub fn document(&self, text: &str) -> Document {
        Document::from_text(text, &self.options, &self.chapters.rule())
    }

    pub fn load(&self, path: &Path) -> Result<Document> {
        Ok(self.document(&input::read_text(path)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicRow {
    pub pattern: String,
    pub count: usize,
    pub recurrences: u32,
    pub delta: Option<f64>,
    pub bound: Option<f64>,
    pub verdict: &'static str,
}

/// Topicality of every pattern, by descending count then id.
pub fn topics(analysis: &Analysis<'_>) -> Vec<TopicRow> {
    let doc = analysis.document();
    let mut ids: Vec<PatternId> = doc.patterns().iter().map(|p| p.id).collect();
    ids.sort_by(|a, b| doc.patterns()[b.index()].count().cmp(&doc.patterns()[a.index()].count()).then(a.cmp(b)));
    ids.into_iter()
        .map(|id| {
            let v = analysis.verdict(id);
            TopicRow {
                pattern: analysis.label(id),
                count: doc.patterns()[id.index()].count(),
                recurrences: analysis.diag(id).map_or(0, |d| d.n),
                delta: v.map(|v| v.delta),
                bound: v.map(|v| v.bound),
                verdict: v.map_or("insufficient", |v| v.verdict.as_str()),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub characters: usize,
    pub tokens: usize,
    pub patterns: usize,
    pub chapters: usize,
    pub topical: usize,
    pub states: usize,
    /// `r_n` for `n = 1..=5`.
    pub balance_residuals: Vec<f64>,
    pub spectral_radius: f64,
    pub entropy_rate: f64,
    pub equilibrium: Vec<(String, f64)>,
}

pub struct Analyzed {
    pub report: AnalyzeReport,
    pub matrix: MarkovMatrix,
    pub spectrum: Spectrum,
}

pub fn analyze(analysis: &Analysis<'_>) -> Result<Analyzed> {
    let doc = analysis.document();
    let matrix = analysis.markov()?;
    let spectrum = markov::spectrum(&matrix.rows)?;
    let balance_residuals = (1..=5).map(|n| markov::balance_residual(&matrix.rows, &matrix.equilibrium, n)).collect();
    let report = AnalyzeReport {
        characters: doc.char_len(),
        tokens: doc.tokens().len(),
        patterns: doc.patterns().len(),
        chapters: doc.chapters().len(),
        topical: analysis.topical().len(),
        states: matrix.states.len(),
        balance_residuals,
        spectral_radius: spectrum.spectral_radius(),
        entropy_rate: lisf_core::semantics::entropy_rate(&matrix.rows, &matrix.equilibrium),
        equilibrium: matrix
            .states
            .iter()
            .zip(&matrix.equilibrium)
            .map(|(&s, &p)| (analysis.label(s), p))
            .collect(),
    };
    Ok(Analyzed {
        report,
        matrix,
        spectrum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliqueReport {
    pub center: String,
    pub members: Vec<String>,
    pub eta: f64,
    pub cutoff: usize,
    pub magnitudes: Vec<f64>,
    pub fingerprint: Vec<f64>,
}

/// Resolves center words; an empty list means the translation candidate
/// pool.
pub fn resolve_centers(analysis: &Analysis<'_>, words: &[String]) -> Result<Vec<PatternId>> {
    if words.is_empty() {
        return Ok(analysis.candidate_pool());
    }
    words
        .iter()
        .map(|w| {
            analysis
                .document()
                .lookup(&w.to_lowercase())
                .ok_or_else(|| CliError::Config(format!("`{w}` is not a pattern of the document")))
        })
        .collect()
}

pub fn cliques(analysis: &Analysis<'_>, centers: &[PatternId]) -> Result<Vec<CliqueReport>> {
    centers
        .iter()
        .map(|&c| {
            let clique = analysis.clique(c)?;
            if !clique.dropped.is_empty() {
                let names: Vec<String> = clique.dropped.iter().map(|&d| analysis.label(d)).collect();
                warn!("clique of `{}`: dropped {} (no transitions inside the clique)", analysis.label(c), names.join(", "));
            }
            let fp = clique.fingerprint(analysis.config().fp_len)?;
            Ok(CliqueReport {
                center: analysis.label(c),
                members: clique.members.iter().map(|&m| analysis.label(m)).collect(),
                eta: clique.eta,
                cutoff: fp.cutoff,
                magnitudes: fp.magnitudes,
                fingerprint: fp.padded,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub source: String,
    pub target: String,
    pub similarity: f64,
    pub screened: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldSummary {
    pub correct: usize,
    pub close: usize,
    pub incorrect: usize,
    pub precision: f64,
    pub precision_with_close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationSummary {
    pub matched: usize,
    pub total_candidates: usize,
    pub source_candidates: usize,
    pub target_candidates: usize,
    pub mean_similarity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationReport {
    pub pairs: Vec<PairRow>,
    pub summary: TranslationSummary,
}

pub fn translate(source: &Analysis<'_>, target: &Analysis<'_>, gold: Option<&Gold>) -> Result<TranslationReport> {
    let t = align_documents(source, target)?;
    let mut pairs: Vec<PairRow> = t
        .pairs
        .iter()
        .map(|p| PairRow {
            source: source.label(p.source),
            target: target.label(p.target),
            similarity: p.similarity,
            screened: p.screened,
            gold: None,
        })
        .collect();
    let gold_summary = gold.map(|g| {
        let (mut correct, mut close) = (0, 0);
        for row in &mut pairs {
            let key = (row.source.to_lowercase(), row.target.to_lowercase());
            row.gold = Some(match g.get(&key) {
                Some(GoldLabel::Correct) => {
                    correct += 1;
                    "correct"
                }
                Some(GoldLabel::Close) => {
                    close += 1;
                    "close"
                }
                None => "incorrect",
            });
        }
        let n = pairs.len();
        let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        GoldSummary {
            correct,
            close,
            incorrect: n - correct - close,
            precision: frac(correct),
            precision_with_close: frac(correct + close),
        }
    });
    Ok(TranslationReport {
        summary: TranslationSummary {
            matched: pairs.len(),
            total_candidates: t.source_candidates.len() + t.target_candidates.len(),
            source_candidates: t.source_candidates.len(),
            target_candidates: t.target_candidates.len(),
            mean_similarity: t.mean_similarity(),
            gold: gold_summary,
        },
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub sentence: String,
    pub score: f64,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionReport {
    pub question_id: String,
    pub question: String,
    pub document_id: String,
    pub quantitative: bool,
    pub expanded: Vec<String>,
    pub average_precision: Option<f64>,
    pub reciprocal_rank: Option<f64>,
    pub ranking: Vec<RankedCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub map: f64,
    pub mrr: f64,
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnswerReport {
    pub lisf: MetricSummary,
    /// Same metrics without questions asking for quantities or fates.
    pub lisf_star: MetricSummary,
    pub skipped: Vec<String>,
    pub questions: Vec<QuestionReport>,
}

fn summarize<'a>(reports: impl Iterator<Item = &'a QuestionReport>) -> MetricSummary {
    let lists: Vec<Vec<bool>> = reports.map(|r| r.ranking.iter().map(|c| c.label).collect()).collect();
    let m = qa::evaluate(&lists);
    MetricSummary {
        map: m.map,
        mrr: m.mrr,
        evaluated: m.evaluated,
    }
}

fn answer_one(analysis: &Analysis<'_>, item: &QaItem) -> QuestionReport {
    let (expanded, ranking) = match analysis.expand_query(&item.question) {
        Ok(index) => {
            let ranked = analysis.rank_answers(&index, item.candidates.iter().map(|c| c.0.as_str()));
            let labels: BTreeMap<&str, bool> = item.candidates.iter().map(|c| (c.0.as_str(), c.1)).collect();
            let ranking: Vec<RankedCandidate> = ranked
                .into_iter()
                .map(|r| RankedCandidate {
                    label: labels[r.text.as_str()],
                    sentence: r.text,
                    score: r.score,
                })
                .collect();
            (index.expanded.iter().map(|&p| analysis.label(p)).collect(), ranking)
        }
        Err(e) => {
            warn!("question {}: {e}; candidates keep file order", item.question_id);
            let ranking = item
                .candidates
                .iter()
                .map(|c| RankedCandidate {
                    sentence: c.0.clone(),
                    score: 0.0,
                    label: c.1,
                })
                .collect();
            (Vec::new(), ranking)
        }
    };
    let labels: Vec<bool> = ranking.iter().map(|c| c.label).collect();
    QuestionReport {
        question_id: item.question_id.clone(),
        question: item.question.clone(),
        document_id: item.document_id.clone(),
        quantitative: qa::has_prefix(&item.question, &QUANTITATIVE_PREFIXES),
        expanded,
        average_precision: qa::average_precision(&labels),
        reciprocal_rank: qa::reciprocal_rank(&labels),
        ranking,
    }
}

/// Ranks every question's candidates against its reference document.
/// Questions without a positive candidate or without a readable
/// reference are skipped with a warning.
pub fn answer(items: &[QaItem], docs: &Path, loader: &Loader, config: &RunConfig) -> Result<AnswerReport> {
    let mut by_doc: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for (k, item) in items.iter().enumerate() {
        if item.candidates.iter().any(|c| c.1) {
            by_doc.entry(item.document_id.as_str()).or_default().push(k);
        } else {
            warn!("question {}: no positive candidate, skipped", item.question_id);
            skipped.push(item.question_id.clone());
        }
    }
    let mut reports: Vec<Option<QuestionReport>> = vec![None; items.len()];
    for (doc_id, ks) in by_doc {
        let path = input::reference_path(docs, doc_id);
        let text = match input::read_text(&path) {
            Ok(t) => t,
            Err(e) => {
                warn!("document {doc_id}: {e}; {} question(s) skipped", ks.len());
                skipped.extend(ks.iter().map(|&k| items[k].question_id.clone()));
                continue;
            }
        };
        let doc = loader.document(&text);
        let analysis = Analysis::new(&doc, config.analysis.clone())?;
        for k in ks {
            reports[k] = Some(answer_one(&analysis, &items[k]));
        }
    }
    let questions: Vec<QuestionReport> = reports.into_iter().flatten().collect();
    skipped.sort();
    Ok(AnswerReport {
        lisf: summarize(questions.iter()),
        lisf_star: summarize(questions.iter().filter(|q| !q.quantitative)),
        skipped,
        questions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgfRow {
    pub n: usize,
    pub t: f64,
    pub monte_carlo: f64,
    pub closed_form: f64,
    pub std_err: f64,
    pub within_3se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub mixture: Vec<(f64, f64)>,
    pub mean_mc: f64,
    pub mean_predicted: f64,
    pub mean_se: f64,
    pub var_mc: f64,
    pub var_predicted: f64,
    pub var_se: f64,
    pub within_3se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub n: usize,
    pub non_topical_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub hr_identity_max_defect: f64,
    pub min_tail_quadratic_form: f64,
    pub reversible_max_balance_residual: f64,
    pub random_r1_mean: f64,
    pub mgf: Vec<MgfRow>,
    pub moments: Vec<MomentRow>,
    pub calibration: Vec<CalibrationRow>,
}

/// Largest identity defect over `chains` random ergodic chains with up
/// to eight states and horizons up to `horizon`.
pub fn hr_identity_sweep(chains: u64, horizon: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for c in 0..chains {
        let n = rng.gen_range(2..=8);
        let chain = chainlab::random_ergodic_chain(n, seed.wrapping_add(c))?;
        let size = rng.gen_range(1..n);
        let mut states: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            states.swap(k, rng.gen_range(0..=k));
        }
        let t = rng.gen_range(1..=horizon);
        worst = worst.max(chainlab::verify_hr_identity(&chain, &states[..size], t)?);
    }
    Ok(worst)
}

/// Smallest Hankel quadratic form of return-time tails over random
/// reversible chains, singleton and doubleton target sets and random
/// complex coefficients on up to four lags.
pub fn tail_form_sweep(chains: u64, forms_per_chain: usize, seed: u64) -> Result<f64> {
    const MAX_LAG: usize = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lowest = f64::INFINITY;
    for c in 0..chains {
        let n = rng.gen_range(3..=9);
        let chain = chainlab::reversible_chain(n, seed.wrapping_add(c))?;
        for size in [1usize, 2] {
            let first = rng.gen_range(0..n);
            let subset: Vec<usize> = (0..size).map(|k| (first + k) % n).collect();
            let tail = chainlab::return_tail(&chain, &subset, 2 * MAX_LAG + 1)?;
            for _ in 0..forms_per_chain {
                let m = rng.gen_range(1..=4);
                let times: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=MAX_LAG)).collect();
                let coeffs: Vec<Complex64> =
                    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                lowest = lowest.min(chainlab::tail_quadratic_form(&tail, &times, &coeffs));
            }
        }
    }
    Ok(lowest)
}

/// Mean of `r_1` over `samples` random `n x n` stochastic matrices and
/// the largest `r_1..r_5` over as many reversible chains.
pub fn balance_sweep(n: usize, samples: u64, seed: u64) -> Result<(f64, f64)> {
    let mut r1 = 0.0;
    let mut reversible: f64 = 0.0;
    for s in 0..samples {
        let c = chainlab::random_ergodic_chain(n, seed.wrapping_add(s))?;
        r1 += markov::balance_residual(&c.p, &c.pi, 1);
        let r = chainlab::reversible_chain(2 + (s as usize % 30), seed.wrapping_add(s))?;
        for k in 1..=5 {
            reversible = reversible.max(markov::balance_residual(&r.p, &r.pi, k));
        }
    }
    Ok((r1 / samples as f64, reversible))
}

pub const TWO_SCALE_MIXTURE: [(f64, f64); 2] = [(0.25, 1.0), (0.75, 7.0)];

pub fn simulate(seed: u64, trials: usize) -> Result<SimulationReport> {
    let mut mgf = Vec::new();
    for (k, &(n, t)) in [(2, 0.5), (2, 1.0), (5, 0.5), (5, 1.0), (10, 0.5), (10, 1.0)].iter().enumerate() {
        let c = chainlab::yn_mgf_check(n, t, trials, seed.wrapping_add(k as u64))?;
        mgf.push(MgfRow {
            n,
            t,
            monte_carlo: c.monte_carlo,
            closed_form: c.closed_form,
            std_err: c.std_err,
            within_3se: c.within(3.0),
        });
    }
    let mixtures: [Vec<(f64, f64)>; 3] = [TWO_SCALE_MIXTURE.to_vec(), vec![(0.5, 0.2), (0.5, 3.0)], vec![(1.0, 1.0)]];
    let mut moments = Vec::new();
    for (k, mix) in mixtures.iter().enumerate() {
        let c = chainlab::log_hitting_moments_check(mix, trials, seed.wrapping_add(100 + k as u64))?;
        moments.push(MomentRow {
            mixture: mix.clone(),
            mean_mc: c.mean_mc,
            mean_predicted: c.mean_predicted,
            mean_se: c.mean_se,
            var_mc: c.var_mc,
            var_predicted: c.var_predicted,
            var_se: c.var_se,
            within_3se: c.within(3.0),
        });
    }
    let calibration = [50usize, 200, 1000]
        .iter()
        .map(|&n| {
            Ok(CalibrationRow {
                n,
                non_topical_rate: chainlab::poisson_calibration(n, 2000, seed.wrapping_add(n as u64))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (random_r1_mean, reversible_max_balance_residual) = balance_sweep(100, 10, seed)?;
    Ok(SimulationReport {
        seed,
        hr_identity_max_defect: hr_identity_sweep(100, 200, seed)?,
        min_tail_quadratic_form: tail_form_sweep(100, 20, seed)?,
        reversible_max_balance_residual,
        random_r1_mean,
        mgf,
        moments,
        calibration,
    })
}
