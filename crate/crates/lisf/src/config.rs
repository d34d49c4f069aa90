//! Run configuration from `key = value` files, overridden by flags.

use std::path::Path;
use std::str::FromStr;

use lisf_core::analysis::AnalysisConfig;

use crate::error::{CliError, Result};
use crate::input::{self, DEFAULT_CHAPTER_RULE};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub analysis: AnalysisConfig,
    pub seed: u64,
    pub chapter_rule: String,
    pub stoplist: Option<String>,
    pub lexicon: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            analysis: AnalysisConfig::default(),
            seed: 0,
            chapter_rule: DEFAULT_CHAPTER_RULE.to_string(),
            stoplist: None,
            lexicon: None,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| format!("`{key}`: {e}"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, raw: &str) -> std::result::Result<(), String> {
        let a = &mut self.analysis;
        match key {
            "min_count" => a.min_count = value(key, raw)?,
            "top_n" => a.top_n = value(key, raw)?,
            "alpha_star" => a.alpha_star = value(key, raw)?,
            "sim_floor" => a.sim_floor = value(key, raw)?,
            "fp_len" => a.fp_len = value(key, raw)?,
            "candidate_min_recurrences" => a.candidate_min_recurrences = value(key, raw)?,
            "damping" => a.damping = value(key, raw)?,
            "seed" => self.seed = value(key, raw)?,
            "chapter_rule" => self.chapter_rule = raw.to_string(),
            "stoplist" => self.stoplist = Some(raw.to_string()),
            "lexicon" => self.lexicon = Some(raw.to_string()),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Applies every `key = value` line; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, raw)) = line.split_once('=') else {
                return Err(CliError::parse(path, k + 1, "expected `key = value`"));
            };
            self.set(key.trim(), raw.trim()).map_err(|m| CliError::parse(path, k + 1, m))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = input::read_text(path)?;
        self.apply_file_text(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        self.analysis.validate().map_err(|e| CliError::Config(e.to_string()))?;
        input::ChapterSpec::parse(&self.chapter_rule)?;
        Ok(())
    }
}
