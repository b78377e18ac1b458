//! Word timings, phrase grouping by temporal gap, and balanced line breaking.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PixelCoord;

/// One sung word with its in and out times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordTiming {
    pub text: String,
    pub t_in: f64,
    pub t_out: f64,
}

impl WordTiming {
    pub fn new(text: impl Into<String>, t_in: f64, t_out: f64) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::InvalidInput("word text is empty".into()));
        }
        if text.contains(['\n', '\r']) {
            return Err(Error::InvalidInput(format!(
                "word {text:?} contains a newline"
            )));
        }
        if !(t_in.is_finite() && t_out.is_finite()) || t_in < 0.0 {
            return Err(Error::InvalidInput(format!(
                "word {text:?} has invalid times [{t_in}, {t_out}]"
            )));
        }
        if t_out <= t_in {
            return Err(Error::InvalidInput(format!("word {text:?}: t_out ≤ t_in")));
        }
        Ok(Self { text, t_in, t_out })
    }
}

/// A group of words displayed together.
#[derive(Debug, Clone, PartialEq)]
pub struct LyricPhrase {
    pub words: Vec<WordTiming>,
    pub lines: Vec<String>,
    pub t_in: f64,
    pub t_out: f64,
    pub shot_index: usize,
    pub placement: Option<PixelCoord>,
}

impl LyricPhrase {
    /// Builds a phrase from a non-empty run of words, with a single unbroken line.
    pub fn from_words(words: Vec<WordTiming>) -> Self {
        assert!(!words.is_empty(), "phrase needs at least one word");
        let t_in = words[0].t_in;
        let t_out = words[words.len() - 1].t_out;
        let mut phrase = Self {
            words,
            lines: Vec::new(),
            t_in,
            t_out,
            shot_index: 0,
            placement: None,
        };
        phrase.lines = vec![phrase.text()];
        phrase
    }

    /// Words joined by single spaces.
    pub fn text(&self) -> String {
        self.words
            .iter()
            .map(|w| w.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Unicode scalar count of the joined text, spaces included.
    pub fn char_count(&self) -> usize {
        let letters: usize = self.words.iter().map(|w| w.text.chars().count()).sum();
        letters + self.words.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupingConfig {
    pub gap_threshold_s: f64,
    pub line_break_threshold_override: Option<usize>,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        Self {
            gap_threshold_s: 0.5,
            line_break_threshold_override: None,
        }
    }
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_threshold_s > 0.0 && self.gap_threshold_s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "gap_threshold_s must be > 0, got {}",
                self.gap_threshold_s
            )));
        }
        if self.line_break_threshold_override == Some(0) {
            return Err(Error::InvalidInput(
                "line_break_threshold_override must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Parsed word-timing file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedWords {
    pub words: Vec<WordTiming>,
    /// Non-fatal findings such as out-of-order start times.
    pub warnings: Vec<String>,
}

/// Reads `word<TAB>t_in<TAB>t_out` records. Blank lines and `#` comments are skipped.
pub fn parse_word_timings(mut source: impl Read) -> Result<ParsedWords> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<word timings>", e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;

    let mut parsed = ParsedWords::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let word = fields[0];
        if word.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty word".into(),
            });
        }
        let time = |s: &str, name: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("{name} {s:?} is not a decimal number"),
                })
        };
        let t_in = time(fields[1], "t_in")?;
        let t_out = time(fields[2], "t_out")?;
        if t_in < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: "t_in is negative".into(),
            });
        }
        if t_out <= t_in {
            return Err(Error::Parse {
                line: line_no,
                message: format!("t_out ≤ t_in at line {line_no}"),
            });
        }
        if let Some(prev) = parsed.words.last() {
            if t_in < prev.t_in {
                parsed.warnings.push(format!(
                    "line {line_no}: t_in {t_in} precedes previous word's t_in {}",
                    prev.t_in
                ));
            }
        }
        parsed.words.push(WordTiming {
            text: word.to_string(),
            t_in,
            t_out,
        });
    }
    Ok(parsed)
}

/// Splits the word sequence wherever the silence between two words exceeds
/// the gap threshold.
pub fn group_words_into_phrases(words: &[WordTiming], cfg: &GroupingConfig) -> Vec<LyricPhrase> {
    let mut phrases = Vec::new();
    let mut current: Vec<WordTiming> = Vec::new();
    for word in words {
        if let Some(prev) = current.last() {
            if word.t_in - prev.t_out > cfg.gap_threshold_s {
                phrases.push(LyricPhrase::from_words(std::mem::take(&mut current)));
            }
        }
        current.push(word.clone());
    }
    if !current.is_empty() {
        phrases.push(LyricPhrase::from_words(current));
    }
    phrases
}

/// Lower median of the phrase character counts, unless overridden.
pub fn compute_line_break_threshold(
    phrases: &[LyricPhrase],
    override_threshold: Option<usize>,
) -> Result<usize> {
    if let Some(t) = override_threshold {
        if t == 0 {
            return Err(Error::InvalidInput(
                "line break threshold must be positive".into(),
            ));
        }
        return Ok(t);
    }
    if phrases.is_empty() {
        return Err(Error::InvalidInput(
            "cannot compute a line break threshold from zero phrases".into(),
        ));
    }
    let mut counts: Vec<usize> = phrases.iter().map(LyricPhrase::char_count).collect();
    counts.sort_unstable();
    Ok(counts[(counts.len() - 1) / 2])
}

/// Breaks a phrase longer than `threshold` characters into
/// `ceil(len / threshold)` lines of near-equal length.
///
/// The split minimizes the squared deviation of line lengths from their
/// mean; ties go to the lexicographically largest tuple of line lengths.
pub fn break_phrase_lines(phrase: &LyricPhrase, threshold: usize) -> Result<LyricPhrase> {
    if threshold == 0 {
        return Err(Error::InvalidInput(
            "line break threshold must be positive".into(),
        ));
    }
    let mut out = phrase.clone();
    let total = phrase.char_count();
    if total <= threshold {
        out.lines = vec![phrase.text()];
        return Ok(out);
    }
    let word_lens: Vec<usize> = phrase
        .words
        .iter()
        .map(|w| w.text.chars().count())
        .collect();
    let line_count = total.div_ceil(threshold).min(word_lens.len());
    let breaks = balanced_breaks(&word_lens, line_count);

    let mut lines = Vec::with_capacity(line_count);
    let mut start = 0;
    for end in breaks.into_iter().chain(std::iter::once(word_lens.len())) {
        let line = phrase.words[start..end]
            .iter()
            .map(|w| w.text.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        lines.push(line);
        start = end;
    }
    out.lines = lines;
    Ok(out)
}

/// Word indices at which lines 2..=n start.
///
/// Σ len_i is fixed for a given line count, so minimizing Σ (len_i − mean)²
/// is the same as minimizing Σ len_i², which stays in exact integers.
fn balanced_breaks(word_lens: &[usize], line_count: usize) -> Vec<usize> {
    let n = word_lens.len();
    let mut prefix = vec![0usize; n + 1];
    for (i, &l) in word_lens.iter().enumerate() {
        prefix[i + 1] = prefix[i] + l;
    }
    // Characters of words i..j joined by spaces.
    let run_len = |i: usize, j: usize| prefix[j] - prefix[i] + (j - i - 1);

    // best[k][i]: min cost splitting words i.. into k lines, with the end of
    // the first line chosen as late as possible among optimal splits.
    const NONE: u64 = u64::MAX;
    let mut cost = vec![vec![NONE; n + 1]; line_count + 1];
    let mut next = vec![vec![0usize; n + 1]; line_count + 1];
    cost[0][n] = 0;
    for k in 1..=line_count {
        for i in (0..n).rev() {
            // The remaining k-1 lines need at least k-1 words.
            let max_end = n + 1 - k;
            for j in (i + 1)..=max_end {
                let rest = cost[k - 1][j];
                if rest == NONE {
                    continue;
                }
                let len = run_len(i, j) as u64;
                let c = len * len + rest;
                // `>=` lets a longer first line win ties.
                if cost[k][i] == NONE || cost[k][i] >= c {
                    cost[k][i] = c;
                    next[k][i] = j;
                }
            }
        }
    }

    let mut breaks = Vec::with_capacity(line_count - 1);
    let mut i = 0;
    for k in (2..=line_count).rev() {
        i = next[k][i];
        breaks.push(i);
    }
    breaks
}

/// Applies line breaking to every phrase with a shared threshold.
pub fn break_all_lines(phrases: &mut [LyricPhrase], threshold: usize) -> Result<()> {
    for p in phrases.iter_mut() {
        *p = break_phrase_lines(p, threshold)?;
    }
    Ok(())
}
