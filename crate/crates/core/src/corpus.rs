//! Tokens, chapters and word patterns.
//!
//! Offsets are counted in Unicode scalar values from the start of the
//! document, so letters, spaces and punctuation all count as one unit of
//! text length.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Half-open character range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Lowercased surface form.
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn span(&self) -> Span {
        Span {
            start: self.start,
            end: self.end,
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '\u{2010}' | '\u{2011}')
}

/// Splits `text` into lowercased word tokens.
///
/// A token is a maximal run of letters or digits, where an apostrophe or
/// hyphen is kept when it sits between two word characters.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i]) {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i + 1;
        loop {
            if end < chars.len() && is_word_char(chars[end]) {
                end += 1;
            } else if end + 1 < chars.len() && is_joiner(chars[end]) && is_word_char(chars[end + 1]) {
                end += 2;
            } else {
                break;
            }
        }
        let surface: String = chars[start..end].iter().flat_map(|c| c.to_lowercase()).collect();
        tokens.push(Token { surface, start, end });
        i = end;
    }
    tokens
}

/// Finds chapter headings in a text. Returned offsets are byte offsets
/// into `text`, each marking where a chapter begins.
pub trait HeadingMatcher {
    fn heading_starts(&self, text: &str) -> Vec<usize>;
}

/// Every line starting with the literal prefix opens a chapter.
impl HeadingMatcher for &str {
    fn heading_starts(&self, text: &str) -> Vec<usize> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut starts = Vec::new();
        let mut line_start = 0;
        for line in text.split_inclusive('\n') {
            if line.trim_start().starts_with(self) {
                starts.push(line_start + (line.len() - line.trim_start().len()));
            }
            line_start += line.len();
        }
        starts
    }
}

pub enum ChapterRule<'a> {
    /// The whole document is one chapter.
    Single,
    /// Each occurrence of the literal closes the current chapter.
    Delimiter(&'a str),
    /// Each heading opens a chapter; any preamble joins the first one.
    Headings(&'a dyn HeadingMatcher),
}

/// Contiguous partition of `[0, char_len]` into chapters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chapters {
    bounds: Vec<usize>,
}

impl Chapters {
    pub fn single(char_len: usize) -> Self {
        Chapters {
            bounds: alloc::vec![0, char_len],
        }
    }

    /// Builds chapters whose interior boundaries are `cuts` (character
    /// offsets). Cuts outside `(0, char_len)` are ignored.
    pub fn from_cuts(char_len: usize, cuts: &[usize]) -> Self {
        let mut bounds = alloc::vec![0];
        let mut sorted: Vec<usize> = cuts.to_vec();
        sorted.sort_unstable();
        bounds.extend(sorted.into_iter().filter(|&c| c > 0 && c < char_len));
        bounds.push(char_len);
        Chapters { bounds }
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// Number of chapters, `K`.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Chapter index holding character offset `pos`.
    pub fn chapter_of(&self, pos: usize) -> usize {
        let k = self.bounds.partition_point(|&b| b <= pos);
        k.saturating_sub(1).min(self.len() - 1)
    }
}

fn byte_to_char_offsets(text: &str, byte_offsets: &[usize]) -> Vec<usize> {
    let mut sorted: Vec<usize> = byte_offsets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len());
    let mut next = sorted.iter().peekable();
    for (char_pos, (byte_pos, _)) in text.char_indices().enumerate() {
        while let Some(&&b) = next.peek() {
            if b <= byte_pos {
                out.push(char_pos);
                next.next();
            } else {
                break;
            }
        }
    }
    let total = text.chars().count();
    out.extend(next.map(|_| total));
    out
}

pub fn segment_chapters(text: &str, rule: &ChapterRule<'_>) -> Chapters {
    let char_len = text.chars().count();
    match rule {
        ChapterRule::Single => Chapters::single(char_len),
        ChapterRule::Delimiter(delim) => {
            if delim.is_empty() {
                return Chapters::single(char_len);
            }
            let bytes: Vec<usize> = text.match_indices(*delim).map(|(b, _)| b).collect();
            let cuts = byte_to_char_offsets(text, &bytes);
            // Each delimiter makes a new segment, even an empty one.
            let mut bounds = alloc::vec![0];
            bounds.extend(cuts);
            bounds.push(char_len);
            Chapters { bounds }
        }
        ChapterRule::Headings(matcher) => {
            let bytes = matcher.heading_starts(text);
            let cuts = byte_to_char_offsets(text, &bytes);
            // The first heading opens chapter one, which also takes the preamble.
            Chapters::from_cuts(char_len, cuts.get(1..).unwrap_or(&[]))
        }
    }
}

/// Opaque pattern identifier, assigned in order of first occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternId(pub u32);

impl PatternId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Surfaces that morphology treats as one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPattern {
    pub id: PatternId,
    /// Display name: the lexicon group name, or the most frequent form.
    pub label: String,
    pub forms: BTreeSet<String>,
    pub occurrences: Vec<Span>,
    /// Longest occurrence span in characters.
    pub max_form_len: usize,
}

impl WordPattern {
    pub fn count(&self) -> usize {
        self.occurrences.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopSet(BTreeSet<String>);

impl StopSet {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopSet(words.into_iter().map(|w| w.as_ref().to_lowercase()).collect())
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.0.contains(surface)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

/// User-supplied surface to group-name mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon(BTreeMap<String, String>);

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: &str, group: &str) {
        self.0.insert(surface.to_lowercase(), String::from(group));
    }

    pub fn group_of(&self, surface: &str) -> Option<&str> {
        self.0.get(surface).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Thresholds for the prefix-stem grouping heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupingConfig {
    pub min_stem: usize,
    pub max_suffix: usize,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        GroupingConfig {
            min_stem: 4,
            max_suffix: 4,
        }
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller index wins so roots are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn common_prefix_len(a: &[char], b: &[char]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Two surfaces are kin when they share a prefix of at least `min_stem`
/// characters and neither leaves more than `max_suffix` characters after
/// it. Groups are the transitive closure of that relation.
fn heuristic_groups(surfaces: &[&str], cfg: &GroupingConfig) -> Vec<usize> {
    let chars: Vec<Vec<char>> = surfaces.iter().map(|s| s.chars().collect()).collect();
    let mut order: Vec<usize> = (0..surfaces.len()).collect();
    order.sort_by(|&a, &b| chars[a].cmp(&chars[b]));

    let mut sets = DisjointSets::new(surfaces.len());
    let stem = cfg.min_stem.max(1);
    let mut block_start = 0;
    while block_start < order.len() {
        let head = &chars[order[block_start]];
        let mut block_end = block_start + 1;
        if head.len() >= stem {
            while block_end < order.len() {
                let other = &chars[order[block_end]];
                if other.len() >= stem && other[..stem] == head[..stem] {
                    block_end += 1;
                } else {
                    break;
                }
            }
            for x in block_start..block_end {
                for y in x + 1..block_end {
                    let (a, b) = (&chars[order[x]], &chars[order[y]]);
                    let lcp = common_prefix_len(a, b);
                    if lcp >= stem && a.len() - lcp <= cfg.max_suffix && b.len() - lcp <= cfg.max_suffix {
                        sets.union(order[x], order[y]);
                    }
                }
            }
        }
        block_start = block_end;
    }
    (0..surfaces.len()).map(|i| sets.find(i)).collect()
}

/// Groups non-stop tokens into word patterns.
///
/// Lexicon entries take precedence; the remaining surfaces are grouped
/// by the prefix heuristic. Pattern ids follow first occurrence.
pub fn group_patterns(
    tokens: &[Token],
    stop_set: &StopSet,
    lexicon: Option<&Lexicon>,
    cfg: &GroupingConfig,
) -> Vec<WordPattern> {
    // Distinct surfaces in order of first appearance.
    let mut first_seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut surfaces: Vec<&str> = Vec::new();
    for t in tokens {
        if stop_set.contains(&t.surface) {
            continue;
        }
        first_seen.entry(t.surface.as_str()).or_insert_with(|| {
            surfaces.push(t.surface.as_str());
            surfaces.len() - 1
        });
    }

    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    enum GroupKey<'a> {
        Lexicon(&'a str),
        Heuristic(usize),
    }

    let free: Vec<usize> = (0..surfaces.len())
        .filter(|&s| lexicon.and_then(|l| l.group_of(surfaces[s])).is_none())
        .collect();
    let free_surfaces: Vec<&str> = free.iter().map(|&s| surfaces[s]).collect();
    let roots = heuristic_groups(&free_surfaces, cfg);
    let mut key_of: Vec<Option<GroupKey<'_>>> = (0..surfaces.len()).map(|_| None).collect();
    for (k, &s) in free.iter().enumerate() {
        key_of[s] = Some(GroupKey::Heuristic(free[roots[k]]));
    }
    if let Some(lex) = lexicon {
        for (s, surface) in surfaces.iter().enumerate() {
            if let Some(g) = lex.group_of(surface) {
                key_of[s] = Some(GroupKey::Lexicon(g));
            }
        }
    }

    // Pattern ids in order of first appearance of any member surface.
    let mut pattern_of_key: BTreeMap<&GroupKey<'_>, usize> = BTreeMap::new();
    let mut pattern_of_surface = Vec::with_capacity(surfaces.len());
    let mut n_patterns = 0;
    for key in key_of.iter() {
        let key = key.as_ref().expect("every surface has a group");
        let p = *pattern_of_key.entry(key).or_insert_with(|| {
            n_patterns += 1;
            n_patterns - 1
        });
        pattern_of_surface.push(p);
    }

    let mut patterns: Vec<WordPattern> = (0..n_patterns)
        .map(|p| WordPattern {
            id: PatternId(p as u32),
            label: String::new(),
            forms: BTreeSet::new(),
            occurrences: Vec::new(),
            max_form_len: 0,
        })
        .collect();
    let mut form_counts: Vec<BTreeMap<&str, usize>> = (0..n_patterns).map(|_| BTreeMap::new()).collect();
    for t in tokens {
        let Some(&s) = first_seen.get(t.surface.as_str()) else {
            continue;
        };
        let p = pattern_of_surface[s];
        let pat = &mut patterns[p];
        pat.occurrences.push(t.span());
        pat.max_form_len = pat.max_form_len.max(t.end - t.start);
        if !pat.forms.contains(&t.surface) {
            pat.forms.insert(t.surface.clone());
        }
        *form_counts[p].entry(t.surface.as_str()).or_insert(0) += 1;
    }
    for (key, &p) in &pattern_of_key {
        patterns[p].label = match key {
            GroupKey::Lexicon(name) => String::from(*name),
            GroupKey::Heuristic(_) => {
                let mut best: Option<(&str, usize)> = None;
                for (&form, &c) in &form_counts[p] {
                    if best.is_none_or(|(_, bc)| c > bc) {
                        best = Some((form, c));
                    }
                }
                String::from(best.map(|(f, _)| f).unwrap_or(""))
            }
        };
    }
    patterns
}

/// Options that control how a text becomes a [`Document`].
#[derive(Debug, Clone, Default)]
pub struct DocumentOptions {
    pub stop_set: StopSet,
    pub lexicon: Option<Lexicon>,
    pub grouping: GroupingConfig,
}

#[derive(Debug, Clone)]
pub struct Document {
    char_len: usize,
    tokens: Vec<Token>,
    token_patterns: Vec<Option<PatternId>>,
    patterns: Vec<WordPattern>,
    chapters: Chapters,
    stop_set: StopSet,
    surface_index: BTreeMap<String, PatternId>,
}

impl Document {
    pub fn from_text(text: &str, options: &DocumentOptions, rule: &ChapterRule<'_>) -> Self {
        let tokens = tokenize(text);
        let patterns = group_patterns(&tokens, &options.stop_set, options.lexicon.as_ref(), &options.grouping);
        let mut surface_index = BTreeMap::new();
        for p in &patterns {
            for f in &p.forms {
                surface_index.insert(f.clone(), p.id);
            }
        }
        let token_patterns = tokens.iter().map(|t| surface_index.get(&t.surface).copied()).collect();
        Document {
            char_len: text.chars().count(),
            tokens,
            token_patterns,
            patterns,
            chapters: segment_chapters(text, rule),
            stop_set: options.stop_set.clone(),
            surface_index,
        }
    }

    pub fn char_len(&self) -> usize {
        self.char_len
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Pattern of each token, `None` for stop words.
    pub fn token_patterns(&self) -> &[Option<PatternId>] {
        &self.token_patterns
    }

    pub fn patterns(&self) -> &[WordPattern] {
        &self.patterns
    }

    pub fn pattern(&self, id: PatternId) -> Option<&WordPattern> {
        self.patterns.get(id.index())
    }

    pub fn chapters(&self) -> &Chapters {
        &self.chapters
    }

    pub fn stop_set(&self) -> &StopSet {
        &self.stop_set
    }

    /// Pattern a (lowercased) surface belongs to, if any.
    pub fn lookup(&self, surface: &str) -> Option<PatternId> {
        self.surface_index.get(surface).copied()
    }

    /// Maps every token of `text` to a pattern of this document, dropping
    /// stop words and unknown surfaces. Multiplicities are kept.
    pub fn patterns_in(&self, text: &str) -> Vec<PatternId> {
        tokenize(text).iter().filter_map(|t| self.lookup(&t.surface)).collect()
    }

    /// Occurrence counts of a pattern per chapter.
    pub fn chapter_vector(&self, id: PatternId) -> Vec<u32> {
        let mut counts = alloc::vec![0u32; self.chapters.len()];
        if let Some(p) = self.pattern(id) {
            for occ in &p.occurrences {
                counts[self.chapters.chapter_of(occ.start)] += 1;
            }
        }
        counts
    }
}
