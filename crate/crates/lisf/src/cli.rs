use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lisf_core::analysis::Analysis;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::export;
use crate::input;
use crate::pipeline::{self, Loader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lisf", version, about = "Markov semantic model of word-pattern recurrences")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Surface-to-group TSV replacing the suffix heuristic for listed words.
    #[arg(long, global = true)]
    pub lexicon: Option<String>,
    /// `none`, `english` or a file with one word per line.
    #[arg(long, global = true)]
    pub stoplist: Option<String>,
    /// `single`, `delimiter:<text>` or `heading:<regex>`.
    #[arg(long, global = true)]
    pub chapter_rule: Option<String>,
    #[arg(long, global = true)]
    pub min_count: Option<usize>,
    #[arg(long, global = true)]
    pub top_n: Option<usize>,
    #[arg(long, global = true)]
    pub alpha_star: Option<f64>,
    #[arg(long, global = true)]
    pub sim_floor: Option<f64>,
    #[arg(long, global = true)]
    pub fp_len: Option<usize>,
    #[arg(long, global = true)]
    pub candidate_min_recurrences: Option<u32>,
    #[arg(long, global = true)]
    pub damping: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus and Markov-model summary.
    Analyze {
        text: PathBuf,
        /// Also write the transition matrix as TSV.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Also write the spectrum as TSV.
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Topicality of every pattern.
    Topics { text: PathBuf },
    /// Cliques around the given words, or around every translation
    /// candidate.
    Cliques { text: PathBuf, words: Vec<String> },
    /// Padded fingerprints, one line per center.
    Fingerprint { text: PathBuf, words: Vec<String> },
    /// Bipartite alignment of candidate patterns of two texts.
    Translate {
        source: PathBuf,
        target: PathBuf,
        /// `source<TAB>target<TAB>correct|close` lines.
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Ranks candidate answer sentences of a question set.
    Answer {
        questions: PathBuf,
        /// Reference text, or a directory of `<document id>.txt` files.
        docs: PathBuf,
        /// Report only the metrics without quantity and fate questions.
        #[arg(long)]
        lisf_star: bool,
    },
    /// Synthetic checks of the recurrence-time theory.
    Simulate {
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
    },
}

impl GlobalOpts {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        let a = &mut c.analysis;
        macro_rules! over {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        over!(
            min_count => a.min_count,
            top_n => a.top_n,
            alpha_star => a.alpha_star,
            sim_floor => a.sim_floor,
            fp_len => a.fp_len,
            candidate_min_recurrences => a.candidate_min_recurrences,
            damping => a.damping,
            seed => c.seed,
            chapter_rule => c.chapter_rule,
        );
        if self.stoplist.is_some() {
            c.stoplist = self.stoplist.clone();
        }
        if self.lexicon.is_some() {
            c.lexicon = self.lexicon.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn with_analysis<T>(loader: &Loader, config: &RunConfig, text: &Path, f: impl FnOnce(&Analysis<'_>) -> Result<T>) -> Result<T> {
    let doc = loader.load(text)?;
    let analysis = Analysis::new(&doc, config.analysis.clone())?;
    f(&analysis)
}

/// Runs a parsed command and returns what goes to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let config = cli.global.run_config()?;
    let default_stoplist = match cli.command {
        Command::Answer { .. } => "english",
        _ => "none",
    };
    let fmt = cli.global.format;
    let loader = || Loader::new(&config, default_stoplist);
    match &cli.command {
        Command::Topics { text } => with_analysis(&loader()?, &config, text, |a| {
            let rows = pipeline::topics(a);
            Ok(match fmt.unwrap_or(Format::Tsv) {
                Format::Tsv => export::topics_tsv(&rows),
                Format::Json => export::json(&rows),
            })
        }),
        Command::Analyze { text, matrix, spectrum } => with_analysis(&loader()?, &config, text, |a| {
            let out = pipeline::analyze(a)?;
            if let Some(p) = matrix {
                write_file(p, &export::matrix_tsv(a, &out.matrix))?;
            }
            if let Some(p) = spectrum {
                write_file(p, &export::spectrum_tsv(&out.spectrum))?;
            }
            Ok(match fmt.unwrap_or(Format::Json) {
                Format::Json => export::json(&out.report),
                Format::Tsv => export::spectrum_tsv(&out.spectrum),
            })
        }),
        Command::Cliques { text, words } => with_analysis(&loader()?, &config, text, |a| {
            let reports = pipeline::cliques(a, &pipeline::resolve_centers(a, words)?)?;
            Ok(match fmt.unwrap_or(Format::Json) {
                Format::Json => export::json(&reports),
                Format::Tsv => export::cliques_tsv(&reports),
            })
        }),
        Command::Fingerprint { text, words } => with_analysis(&loader()?, &config, text, |a| {
            let reports = pipeline::cliques(a, &pipeline::resolve_centers(a, words)?)?;
            Ok(match fmt.unwrap_or(Format::Tsv) {
                Format::Tsv => export::fingerprints_tsv(&reports),
                Format::Json => {
                    let fps: Vec<(&str, &[f64])> = reports.iter().map(|r| (r.center.as_str(), r.fingerprint.as_slice())).collect();
                    export::json(&fps)
                }
            })
        }),
        Command::Translate { source, target, gold } => {
            let loader = loader()?;
            let gold = gold.as_deref().map(input::load_gold).transpose()?;
            let src_doc = loader.load(source)?;
            let tgt_doc = loader.load(target)?;
            let src = Analysis::new(&src_doc, config.analysis.clone())?;
            let tgt = Analysis::new(&tgt_doc, config.analysis.clone())?;
            let report = pipeline::translate(&src, &tgt, gold.as_ref())?;
            Ok(match fmt.unwrap_or(Format::Tsv) {
                Format::Tsv => export::assignment_tsv(&report),
                Format::Json => export::json(&report),
            })
        }
        Command::Answer { questions, docs, lisf_star } => {
            let items = input::load_qa(questions)?;
            let report = pipeline::answer(&items, docs, &loader()?, &config)?;
            Ok(if *lisf_star {
                export::json(&report.lisf_star)
            } else {
                export::json(&report)
            })
        }
        Command::Simulate { trials } => {
            if *trials < 2 {
                return Err(CliError::Config("simulate needs at least 2 trials".into()));
            }
            Ok(export::json(&pipeline::simulate(config.seed, *trials)?))
        }
    }
}
