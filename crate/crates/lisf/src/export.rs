//! TSV and JSON writers. Floats use Rust's shortest round-trip form.

use std::fmt::Write as _;
use std::io::Write;

use lisf_core::analysis::Analysis;
use lisf_core::markov::{MarkovMatrix, Spectrum};
use serde::Serialize;

use crate::pipeline::{CliqueReport, TopicRow, TranslationReport};

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

/// Tabs and newlines inside a field would break the layout.
fn field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

pub fn topics_tsv(rows: &[TopicRow]) -> String {
    let mut out = String::from("pattern\tcount\trecurrences\tdelta\tbound\tverdict\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            field(&r.pattern),
            r.count,
            r.recurrences,
            opt(r.delta),
            opt(r.bound),
            r.verdict
        );
    }
    out
}

/// Transition matrix with a header row of state ids; each row starts with
/// its id and label.
pub fn matrix_tsv(analysis: &Analysis<'_>, m: &MarkovMatrix) -> String {
    let mut out = String::from("id\tlabel");
    for s in &m.states {
        let _ = write!(out, "\t{}", s.0);
    }
    out.push('\n');
    for (i, s) in m.states.iter().enumerate() {
        let _ = write!(out, "{}\t{}", s.0, field(&analysis.label(*s)));
        for v in m.rows.row(i) {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

pub fn spectrum_tsv(s: &Spectrum) -> String {
    let mut out = String::from("re\tim\tmodulus\tphase_over_pi\n");
    for z in &s.eigenvalues {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", z.re, z.im, z.norm(), z.arg() / std::f64::consts::PI);
    }
    out
}

pub fn cliques_tsv(cliques: &[CliqueReport]) -> String {
    let mut out = String::from("center\tsize\teta\tcutoff\tmembers\tmagnitudes\n");
    for c in cliques {
        let mags: Vec<String> = c.magnitudes.iter().map(f64::to_string).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            field(&c.center),
            c.members.len(),
            c.eta,
            c.cutoff,
            field(&c.members.join(" ")),
            mags.join(" ")
        );
    }
    out
}

/// One padded fingerprint per line: center, then the magnitudes.
pub fn fingerprints_tsv(cliques: &[CliqueReport]) -> String {
    let mut out = String::new();
    for c in cliques {
        out.push_str(&field(&c.center));
        for v in &c.fingerprint {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

pub fn assignment_tsv(report: &TranslationReport) -> String {
    let gold = report.summary.gold.is_some();
    let mut out = String::from("source\ttarget\tsimilarity\tscreened");
    out.push_str(if gold { "\tgold\n" } else { "\n" });
    for p in &report.pairs {
        let _ = write!(out, "{}\t{}\t{}\t{}", field(&p.source), field(&p.target), p.similarity, p.screened);
        if let Some(g) = p.gold {
            let _ = write!(out, "\t{g}");
        }
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes to stdout; a closed pipe ends output quietly.
pub fn emit(text: &str) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topics_layout() {
        let rows = [TopicRow {
            pattern: "whale".into(),
            count: 12,
            recurrences: 11,
            delta: Some(0.5),
            bound: Some(0.25),
            verdict: "topical",
        }];
        assert_eq!(topics_tsv(&rows), "pattern\tcount\trecurrences\tdelta\tbound\tverdict\nwhale\t12\t11\t0.5\t0.25\ttopical\n");
        assert_eq!(topics_tsv(&[]).lines().count(), 1);
    }

    #[test]
    fn fields_lose_separators() {
        assert_eq!(field("a\tb\nc"), "a b c");
    }
}
