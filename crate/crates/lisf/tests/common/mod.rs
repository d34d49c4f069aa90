#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lisf_core::corpus::{Document, Lexicon, StopSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STOP_WORDS: [&str; 12] = ["the", "and", "of", "to", "a", "in", "was", "he", "she", "it", "that", "with"];

fn pseudo_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect()
}

/// Distinct random words whose first four letters never repeat, so the
/// suffix heuristic leaves them apart.
fn vocabulary(rng: &mut ChaCha8Rng, n: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = rng.gen_range(5..=9);
        let w = pseudo_word(rng, len);
        if taken.insert(w[..4].to_string()) {
            out.push(w);
        }
    }
    out
}

/// Chaptered synthetic novel. Each chapter is dominated by three topics
/// whose words burst inside it; filler words follow a Zipf-like law and
/// stop words are spread evenly.
pub fn synthetic_novel(seed: u64, chapters: usize, words_per_chapter: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken: BTreeSet<String> = ["chap".to_string()].into();
    let topics: Vec<Vec<String>> = (0..40).map(|_| vocabulary(&mut rng, 5, &mut taken)).collect();
    let filler = vocabulary(&mut rng, 300, &mut taken);
    let zipf: Vec<f64> = (1..=filler.len()).map(|r| 1.0 / r as f64).collect();
    let zipf_total: f64 = zipf.iter().sum();

    let mut text = String::new();
    for c in 0..chapters {
        text.push_str(&format!("Chapter {}\n\n", c + 1));
        let mut ids: Vec<usize> = (0..topics.len()).collect();
        ids.shuffle(&mut rng);
        let dominant = &ids[..3];
        let mut sentence = 0;
        for _ in 0..words_per_chapter {
            let u: f64 = rng.gen();
            let word: &str = if u < 0.3 {
                STOP_WORDS[rng.gen_range(0..STOP_WORDS.len())]
            } else if u < 0.65 {
                let t = &topics[dominant[rng.gen_range(0..3)]];
                &t[rng.gen_range(0..t.len())]
            } else {
                let mut x = rng.gen::<f64>() * zipf_total;
                let mut k = 0;
                while x > zipf[k] && k + 1 < zipf.len() {
                    x -= zipf[k];
                    k += 1;
                }
                &filler[k]
            };
            text.push_str(word);
            sentence += 1;
            if sentence >= 12 && rng.gen_bool(0.2) {
                text.push_str(".\n");
                sentence = 0;
            } else {
                text.push(' ');
            }
        }
        text.push_str(".\n\n");
    }
    text
}

pub fn stop_set() -> StopSet {
    StopSet::new(STOP_WORDS)
}

/// A bijective relabeling of a document's vocabulary.
pub struct Relabeled {
    pub text: String,
    pub stop_set: StopSet,
    pub lexicon: Lexicon,
}

/// Replaces every lowercase word by a fresh random word of the same
/// length. Capitalized words and numbers stay, so chapter headings still
/// match. The lexicon reproduces the original grouping under new names.
pub fn relabel(text: &str, doc: &Document, seed: u64) -> Relabeled {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: BTreeSet<&str> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty() && w.chars().all(|c| c.is_ascii_lowercase()))
        .collect();
    let mut used: BTreeSet<String> = words.iter().map(|w| w.to_string()).collect();
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for w in &words {
        let fresh = loop {
            let cand = pseudo_word(&mut rng, w.len());
            if used.insert(cand.clone()) {
                break cand;
            }
        };
        map.insert(w.to_string(), fresh);
    }
    let rename = |w: &str| map.get(w).cloned().unwrap_or_else(|| w.to_string());

    let mut out = String::with_capacity(text.len());
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            word.push(c);
        } else {
            out.push_str(&rename(&word));
            word.clear();
            out.push(c);
        }
    }
    out.push_str(&rename(&word));

    let mut lexicon = Lexicon::new();
    for p in doc.patterns() {
        for f in &p.forms {
            lexicon.insert(&rename(f), &format!("g{}", p.id.0));
        }
    }
    Relabeled {
        text: out,
        stop_set: StopSet::new(doc.stop_set().iter().map(rename)),
        lexicon,
    }
}
