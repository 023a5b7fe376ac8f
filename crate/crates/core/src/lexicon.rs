//! Opinion-lexicon parsers and polarity normalization.
//!
//! All three source formats normalize onto a common [-1, +1] polarity scale.
//! Words are canonicalized to lowercase with internal whitespace replaced by
//! underscores, matching the WordNet lemma convention, so multi-word entries
//! line up with bigram tokens.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Afinn,
    Liu,
    SentiWordNet,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Afinn => "afinn",
            Source::Liu => "liu",
            Source::SentiWordNet => "sentiwordnet",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub raw: f64,
    pub polarity: f64,
    pub source: Source,
}

/// A parsed opinion lexicon: one entry per word, all polarities in [-1, +1].
/// Warnings collect the duplicate/conflict resolutions applied while parsing.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    source: Source,
    entries: BTreeMap<String, LexiconEntry>,
    warnings: Vec<String>,
}

impl SentimentLexicon {
    pub fn source(&self) -> Source {
        self.source
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Re-applies the per-source scale so every polarity lands in [-1, +1].
    /// Idempotent and order-preserving within a source.
    pub fn normalize(mut self) -> SentimentLexicon {
        for entry in self.entries.values_mut() {
            entry.polarity = normalize_raw(entry.source, entry.raw);
        }
        self
    }

    /// `word<TAB>polarity<TAB>source` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for entry in self.entries.values() {
            writeln!(out, "{}\t{}\t{}", entry.word, entry.polarity, entry.source.name())?;
        }
        Ok(())
    }
}

fn canonical_word(raw: &str) -> String {
    raw.trim().to_lowercase().split_whitespace().collect::<Vec<_>>().join("_")
}

fn normalize_raw(source: Source, raw: f64) -> f64 {
    let value = match source {
        Source::Afinn => raw / 5.0,
        Source::Liu | Source::SentiWordNet => raw,
    };
    value.clamp(-1.0, 1.0)
}

/// AFINN: tab-separated `word<TAB>score`, integer scores in [-5, +5].
/// Duplicate words keep the last occurrence (with a warning).
pub fn parse_afinn(path: &Path) -> Result<SentimentLexicon> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_afinn_reader(std::io::BufReader::new(file), path)
}

pub fn parse_afinn_reader<R: BufRead>(reader: R, path: &Path) -> Result<SentimentLexicon> {
    let mut entries = BTreeMap::new();
    let mut warnings = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let Some((word, score)) = line.split_once('\t') else {
            return Err(Error::parse(path, lineno, "expected word<TAB>score"));
        };
        let raw: i32 = score
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("non-integer score {score:?}")))?;
        if !(-5..=5).contains(&raw) {
            return Err(Error::parse(path, lineno, format!("score {raw} outside [-5, 5]")));
        }
        let word = canonical_word(word);
        if word.is_empty() {
            return Err(Error::parse(path, lineno, "empty word"));
        }
        let entry = LexiconEntry {
            word: word.clone(),
            raw: raw as f64,
            polarity: normalize_raw(Source::Afinn, raw as f64),
            source: Source::Afinn,
        };
        if entries.insert(word.clone(), entry).is_some() {
            warnings.push(format!("line {lineno}: duplicate word {word:?}, last occurrence wins"));
        }
    }
    Ok(SentimentLexicon {
        source: Source::Afinn,
        entries,
        warnings,
    })
}

/// Bing Liu: two word-per-line files, `;` comment lines, bytes decoded
/// lossily. A word present in both lists is dropped with a warning.
pub fn parse_liu(positive_path: &Path, negative_path: &Path) -> Result<SentimentLexicon> {
    let positive = read_liu_words(positive_path)?;
    let negative = read_liu_words(negative_path)?;
    let mut entries = BTreeMap::new();
    let mut warnings = Vec::new();
    for word in &positive {
        entries.insert(
            word.clone(),
            LexiconEntry {
                word: word.clone(),
                raw: 1.0,
                polarity: 1.0,
                source: Source::Liu,
            },
        );
    }
    for word in &negative {
        if positive.contains(word) {
            entries.remove(word);
            warnings.push(format!("word {word:?} appears in both lists, dropped"));
            continue;
        }
        entries.insert(
            word.clone(),
            LexiconEntry {
                word: word.clone(),
                raw: -1.0,
                polarity: -1.0,
                source: Source::Liu,
            },
        );
    }
    Ok(SentimentLexicon {
        source: Source::Liu,
        entries,
        warnings,
    })
}

fn read_liu_words(path: &Path) -> Result<std::collections::BTreeSet<String>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let mut words = std::collections::BTreeSet::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        words.insert(canonical_word(line));
    }
    Ok(words)
}

/// SentiWordNet: TSV with `#` comments and columns
/// POS, ID, PosScore, NegScore, SynsetTerms, Gloss. Per-word polarity is the
/// mean of (PosScore − NegScore) over every sense the word appears in; words
/// whose mean is exactly zero carry no polarity and are dropped.
pub fn parse_sentiwordnet(path: &Path) -> Result<SentimentLexicon> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sentiwordnet_reader(std::io::BufReader::new(file), path)
}

pub fn parse_sentiwordnet_reader<R: BufRead>(reader: R, path: &Path) -> Result<SentimentLexicon> {
    let mut sums: BTreeMap<String, (f64, u32)> = BTreeMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 5 {
            return Err(Error::parse(path, lineno, "expected at least 5 tab-separated columns"));
        }
        let pos_score: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad PosScore {:?}", fields[2])))?;
        let neg_score: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad NegScore {:?}", fields[3])))?;
        for (label, value) in [("PosScore", pos_score), ("NegScore", neg_score)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::parse(path, lineno, format!("{label} {value} outside [0, 1]")));
            }
        }
        let score = pos_score - neg_score;
        for term in fields[4].split_whitespace() {
            let word = term.rsplit_once('#').map_or(term, |(w, _)| w);
            let word = canonical_word(word);
            if word.is_empty() {
                return Err(Error::parse(path, lineno, format!("empty term in {:?}", fields[4])));
            }
            let slot = sums.entry(word).or_insert((0.0, 0));
            slot.0 += score;
            slot.1 += 1;
        }
    }
    let entries = sums
        .into_iter()
        .filter_map(|(word, (sum, count))| {
            let mean = sum / count as f64;
            (mean != 0.0).then(|| {
                (
                    word.clone(),
                    LexiconEntry {
                        word,
                        raw: mean,
                        polarity: normalize_raw(Source::SentiWordNet, mean),
                        source: Source::SentiWordNet,
                    },
                )
            })
        })
        .collect();
    Ok(SentimentLexicon {
        source: Source::SentiWordNet,
        entries,
        warnings: Vec::new(),
    })
}
