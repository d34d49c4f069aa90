//! Readers for documents, lexicons, stop lists, question sets and gold
//! alignments.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lisf_core::corpus::{ChapterRule, HeadingMatcher, Lexicon, StopSet};
use regex::Regex;

use crate::error::{CliError, Result};

const ENGLISH_STOPWORDS: &str = include_str!("../data/english_stopwords.txt");

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// `surface<TAB>group` per line.
pub fn parse_lexicon(text: &str, path: &Path) -> Result<Lexicon> {
    let mut lex = Lexicon::new();
    for (line, l) in content_lines(text) {
        let cols: Vec<&str> = l.split('\t').collect();
        if cols.len() != 2 || cols[0].trim().is_empty() || cols[1].trim().is_empty() {
            return Err(CliError::parse(path, line, "expected `surface<TAB>group`"));
        }
        lex.insert(&cols[0].trim().to_lowercase(), cols[1].trim());
    }
    Ok(lex)
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    parse_lexicon(&read_text(path)?, path)
}

fn parse_stoplist(text: &str) -> StopSet {
    StopSet::new(content_lines(text).map(|(_, l)| l.trim().to_lowercase()))
}

pub fn english_stoplist() -> StopSet {
    parse_stoplist(ENGLISH_STOPWORDS)
}

/// `none`, `english` (bundled list) or a file with one word per line.
pub fn load_stoplist(spec: &str) -> Result<StopSet> {
    match spec {
        "none" => Ok(StopSet::default()),
        "english" => Ok(english_stoplist()),
        path => Ok(parse_stoplist(&read_text(Path::new(path))?)),
    }
}

/// Headings found by a regular expression; each match start opens a
/// chapter.
#[derive(Debug, Clone)]
pub struct RegexHeadings(pub Regex);

impl HeadingMatcher for RegexHeadings {
    fn heading_starts(&self, text: &str) -> Vec<usize> {
        self.0.find_iter(text).map(|m| m.start()).collect()
    }
}

pub const DEFAULT_CHAPTER_RULE: &str = r"heading:(?m)^[ \t]*(?i:chapter)\b";

#[derive(Debug, Clone)]
pub enum ChapterSpec {
    Single,
    Delimiter(String),
    Headings(RegexHeadings),
}

impl ChapterSpec {
    /// `single`, `delimiter:<literal>` or `heading:<regex>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if spec == "single" {
            return Ok(ChapterSpec::Single);
        }
        if let Some(lit) = spec.strip_prefix("delimiter:") {
            if lit.is_empty() {
                return Err(CliError::Config("empty chapter delimiter".into()));
            }
            return Ok(ChapterSpec::Delimiter(lit.replace("\\n", "\n")));
        }
        if let Some(re) = spec.strip_prefix("heading:") {
            return Regex::new(re)
                .map(|r| ChapterSpec::Headings(RegexHeadings(r)))
                .map_err(|e| CliError::Config(format!("chapter heading regex: {e}")));
        }
        Err(CliError::Config(format!(
            "chapter rule `{spec}`: expected single, delimiter:<text> or heading:<regex>"
        )))
    }

    pub fn rule(&self) -> ChapterRule<'_> {
        match self {
            ChapterSpec::Single => ChapterRule::Single,
            ChapterSpec::Delimiter(d) => ChapterRule::Delimiter(d),
            ChapterSpec::Headings(m) => ChapterRule::Headings(m),
        }
    }
}

/// One candidate sentence of a question-answering set.
#[derive(Debug, Clone, PartialEq)]
pub struct QaRow {
    pub question_id: String,
    pub question: String,
    pub document_id: String,
    pub sentence: String,
    pub label: bool,
}

/// A question with its candidates in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct QaItem {
    pub question_id: String,
    pub question: String,
    pub document_id: String,
    pub candidates: Vec<(String, bool)>,
}

/// Question-answering TSV. Either five columns (question id, question,
/// document id, sentence, label) or the seven-column layout with a
/// `QuestionID` header, whose columns are located by name.
pub fn parse_qa(text: &str, path: &Path) -> Result<Vec<QaItem>> {
    let mut lines = content_lines(text).peekable();
    let mut cols = [0usize, 1, 2, 3, 4];
    let mut width = 5;
    if let Some(&(line, first)) = lines.peek() {
        if first.starts_with("QuestionID") {
            let header: Vec<&str> = first.split('\t').collect();
            let find = |name: &str| {
                header
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| CliError::parse(path, line, format!("header lacks `{name}`")))
            };
            cols = [
                find("QuestionID")?,
                find("Question")?,
                find("DocumentID")?,
                find("Sentence")?,
                find("Label")?,
            ];
            width = header.len();
            lines.next();
        }
    }

    let mut items: Vec<QaItem> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (line, l) in lines {
        let f: Vec<&str> = l.split('\t').collect();
        if f.len() != width {
            return Err(CliError::parse(path, line, format!("expected {width} tab-separated columns, found {}", f.len())));
        }
        let label = match f[cols[4]].trim() {
            "1" => true,
            "0" => false,
            other => return Err(CliError::parse(path, line, format!("label must be 0 or 1, found `{other}`"))),
        };
        let row = QaRow {
            question_id: f[cols[0]].trim().to_string(),
            question: f[cols[1]].to_string(),
            document_id: f[cols[2]].trim().to_string(),
            sentence: f[cols[3]].to_string(),
            label,
        };
        let k = *index.entry(row.question_id.clone()).or_insert_with(|| {
            items.push(QaItem {
                question_id: row.question_id.clone(),
                question: row.question.clone(),
                document_id: row.document_id.clone(),
                candidates: Vec::new(),
            });
            items.len() - 1
        });
        items[k].candidates.push((row.sentence, row.label));
    }
    Ok(items)
}

pub fn load_qa(path: &Path) -> Result<Vec<QaItem>> {
    parse_qa(&read_text(path)?, path)
}

/// Where the reference text of a question's document lives: one file for
/// every question, or `<dir>/<document id>.txt`.
pub fn reference_path(docs: &Path, document_id: &str) -> PathBuf {
    if docs.is_dir() {
        docs.join(format!("{document_id}.txt"))
    } else {
        docs.to_path_buf()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoldLabel {
    Correct,
    Close,
}

/// Gold alignments: `source<TAB>target<TAB>correct|close`, keyed by
/// pattern label.
pub type Gold = BTreeMap<(String, String), GoldLabel>;

pub fn parse_gold(text: &str, path: &Path) -> Result<Gold> {
    let mut gold = Gold::new();
    for (line, l) in content_lines(text) {
        let f: Vec<&str> = l.split('\t').map(str::trim).collect();
        if f.len() != 3 {
            return Err(CliError::parse(path, line, "expected `source<TAB>target<TAB>correct|close`"));
        }
        let label = match f[2] {
            "correct" => GoldLabel::Correct,
            "close" => GoldLabel::Close,
            other => return Err(CliError::parse(path, line, format!("unknown gold label `{other}`"))),
        };
        gold.insert((f[0].to_lowercase(), f[1].to_lowercase()), label);
    }
    Ok(gold)
}

pub fn load_gold(path: &Path) -> Result<Gold> {
    parse_gold(&read_text(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicon_reports_line_numbers() {
        let p = Path::new("lex.tsv");
        let lex = parse_lexicon("# comment\nFeel\tfeel\nfelt\tfeel\n", p).unwrap();
        assert_eq!(lex.group_of("feel"), Some("feel"));
        match parse_lexicon("a\tb\n\nbroken\n", p) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chapter_specs() {
        assert!(matches!(ChapterSpec::parse("single").unwrap(), ChapterSpec::Single));
        assert!(matches!(ChapterSpec::parse("delimiter:***").unwrap(), ChapterSpec::Delimiter(d) if d == "***"));
        assert!(ChapterSpec::parse("heading:(").is_err());
        assert!(ChapterSpec::parse("pages").is_err());
        let spec = ChapterSpec::parse(DEFAULT_CHAPTER_RULE).unwrap();
        let text = "Intro\nCHAPTER I\nx\n  Chapter 2\ny\nchapters are not headings? they are\n";
        let ch = lisf_core::corpus::segment_chapters(text, &spec.rule());
        assert_eq!(ch.len(), 2);
    }

    #[test]
    fn qa_formats() {
        let p = Path::new("qa.tsv");
        let five = "q1\tWho?\td1\tA.\t0\nq1\tWho?\td1\tB.\t1\nq2\tWhy?\td2\tC.\t1\n";
        let items = parse_qa(five, p).unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].candidates, vec![("A.".to_string(), false), ("B.".to_string(), true)]);
        let seven = "QuestionID\tQuestion\tDocumentID\tDocumentTitle\tSentenceID\tSentence\tLabel\n\
                     Q1\tHow?\tD1\tT\tD1-0\tFirst.\t1\n";
        let items = parse_qa(seven, p).unwrap();
        assert_eq!(items[0].document_id, "D1");
        assert_eq!(items[0].candidates[0].0, "First.");
        assert!(matches!(parse_qa("q\tx\td\ts\t2\n", p), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn gold_labels() {
        let g = parse_gold("Pride\torgueil\tcorrect\nvanity\tvanité\tclose\n", Path::new("g")).unwrap();
        assert_eq!(g[&("pride".into(), "orgueil".into())], GoldLabel::Correct);
        assert!(parse_gold("a\tb\twrong\n", Path::new("g")).is_err());
    }

    #[test]
    fn bundled_stoplist() {
        let s = english_stoplist();
        assert!(s.contains("the") && s.contains("than") && !s.contains("darcy"));
        assert_eq!(load_stoplist("none").unwrap().len(), 0);
    }
}
