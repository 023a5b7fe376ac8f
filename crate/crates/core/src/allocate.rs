//! Tokenization, sentiment-word extraction, and document allocation into the
//! weighted sentiment lattice.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::bitset::{AttributeSet, ObjectSet};
use crate::error::{Error, Result};
use crate::sentiment::{SentimentContext, WeightedSentimentLattice};

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationClass {
    NotPolarized,
    Specific,
    New,
    Ambiguous,
}

/// Where one document landed: its matched words, the class of the allocation,
/// and (for Specific/New) the intent of the target concept.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AllocationResult {
    pub doc_id: String,
    pub matched: Vec<String>,
    pub class: AllocationClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_intent: Option<Vec<String>>,
    pub polarity: f64,
}

/// Lowercases, strips URLs and the `@`/`#` sigils, splits on anything that is
/// not alphanumeric or an apostrophe, and appends the contiguous bigrams
/// (underscore-joined) so multi-word lexicon entries can match.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens: Vec<String> = Vec::new();
    for raw in text.split_whitespace() {
        let lower = raw.to_lowercase();
        if lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
        {
            continue;
        }
        let stripped = lower.trim_start_matches(['@', '#']);
        for piece in stripped.split(|c: char| !(c.is_alphanumeric() || c == '\'')) {
            if !piece.is_empty() {
                tokens.push(piece.to_string());
            }
        }
    }
    let bigrams: Vec<String> = tokens
        .windows(2)
        .map(|pair| format!("{}_{}", pair[0], pair[1]))
        .collect();
    tokens.extend(bigrams);
    tokens
}

/// Distinct sentiment-context objects whose word equals one of the tokens.
pub fn extract_sentiment_words(tokens: &[String], sctx: &SentimentContext) -> ObjectSet {
    let mut set = sctx.context().empty_object_set();
    for token in tokens {
        if let Some(o) = sctx.word_id(token) {
            set.insert(o);
        }
    }
    set
}

/// The derivation outcome of a document's word set, before any lattice write.
struct Generated {
    words: ObjectSet,
    /// (extent, intent) of the generated concept when the words share at
    /// least one synset.
    concept: Option<(ObjectSet, AttributeSet)>,
}

/// Derives every document's word set and generated concept, sharding the
/// corpus across workers when asked to. Document order is preserved.
fn generate_all(
    docs: &[Document],
    sctx: &SentimentContext,
    threads: usize,
) -> Result<Vec<Generated>> {
    let threads = threads.max(1).min(docs.len().max(1));
    if threads == 1 {
        return docs.iter().map(|d| generate(&d.text, sctx)).collect();
    }
    let chunk = docs.len().div_ceil(threads);
    let outcomes: Vec<Result<Vec<Generated>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = docs
            .chunks(chunk)
            .map(|shard| {
                scope.spawn(move || shard.iter().map(|d| generate(&d.text, sctx)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut generated = Vec::with_capacity(docs.len());
    for outcome in outcomes {
        generated.extend(outcome?);
    }
    Ok(generated)
}

fn generate(doc_text: &str, sctx: &SentimentContext) -> Result<Generated> {
    let tokens = tokenize(doc_text);
    let words = extract_sentiment_words(&tokens, sctx);
    if words.is_empty() {
        return Ok(Generated {
            words,
            concept: None,
        });
    }
    let intent = sctx.context().derive_objects(&words)?;
    if intent.is_empty() {
        return Ok(Generated {
            words,
            concept: None,
        });
    }
    let extent = sctx.context().derive_attributes(&intent)?;
    Ok(Generated {
        words,
        concept: Some((extent, intent)),
    })
}

fn matched_words(sctx: &SentimentContext, words: &ObjectSet) -> Vec<String> {
    words
        .iter()
        .map(|o| sctx.context().objects()[o].clone())
        .collect()
}

fn mean_word_polarity(sctx: &SentimentContext, words: &ObjectSet) -> f64 {
    let mut sum = 0.0;
    let mut count = 0u32;
    for o in words.iter() {
        sum += sctx.polarities()[o];
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn intent_names(sctx: &SentimentContext, intent: &AttributeSet) -> Vec<String> {
    intent
        .iter()
        .map(|a| sctx.context().attributes()[a].clone())
        .collect()
}

fn record_ambiguous_traces(
    sctx: &SentimentContext,
    lattice: &mut WeightedSentimentLattice,
    words: &ObjectSet,
) -> Result<()> {
    let share = 1.0 / words.len() as f64;
    for o in words.iter() {
        let gamma = crate::lattice::object_concept(sctx.context(), o)?;
        if let Some(idx) = lattice.index_of_intent(&gamma.intent) {
            lattice.add_trace(idx, share)?;
        }
    }
    Ok(())
}

/// Allocates one document online: a generated concept that is not yet
/// materialized is inserted immediately as an emergent concept.
pub fn allocate(
    doc: &Document,
    sctx: &SentimentContext,
    lattice: &mut WeightedSentimentLattice,
) -> Result<AllocationResult> {
    lattice.check_context(sctx)?;
    let generated = generate(&doc.text, sctx)?;
    if generated.words.is_empty() {
        return Ok(AllocationResult {
            doc_id: doc.id.clone(),
            matched: Vec::new(),
            class: AllocationClass::NotPolarized,
            target_intent: None,
            polarity: 0.0,
        });
    }
    let matched = matched_words(sctx, &generated.words);
    match generated.concept {
        None => {
            record_ambiguous_traces(sctx, lattice, &generated.words)?;
            Ok(AllocationResult {
                doc_id: doc.id.clone(),
                matched,
                class: AllocationClass::Ambiguous,
                target_intent: None,
                polarity: mean_word_polarity(sctx, &generated.words),
            })
        }
        Some((extent, intent)) => {
            let (class, idx) = match lattice.index_of_intent(&intent) {
                Some(idx) => (AllocationClass::Specific, idx),
                None => {
                    let idx = lattice.insert_emergent(sctx, extent, intent.clone())?;
                    (AllocationClass::New, idx)
                }
            };
            lattice.increment_population(idx)?;
            let concept = lattice.concept(idx)?;
            Ok(AllocationResult {
                doc_id: doc.id.clone(),
                matched,
                class,
                target_intent: Some(intent_names(sctx, &intent)),
                polarity: concept.polarity,
            })
        }
    }
}

/// Per-class counts of one corpus run. `tagged` always equals
/// `specific + new + ambiguous`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CorpusStats {
    pub total: u64,
    pub tagged: u64,
    pub not_polarized: u64,
    pub specific: u64,
    pub new: u64,
    pub ambiguous: u64,
}

impl CorpusStats {
    pub fn partition_holds(&self) -> bool {
        self.tagged == self.specific + self.new + self.ambiguous
            && self.total == self.tagged + self.not_polarized
    }

    fn count(&mut self, class: AllocationClass) {
        self.total += 1;
        match class {
            AllocationClass::NotPolarized => self.not_polarized += 1,
            AllocationClass::Specific => {
                self.tagged += 1;
                self.specific += 1;
            }
            AllocationClass::New => {
                self.tagged += 1;
                self.new += 1;
            }
            AllocationClass::Ambiguous => {
                self.tagged += 1;
                self.ambiguous += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationMode {
    /// Emergent concepts are inserted as soon as a document generates them;
    /// later duplicates of the same intent count as Specific.
    Online,
    /// Two passes: all novel intents are inserted first, then every document
    /// whose intent was not materialized before the run counts as New,
    /// independent of corpus order.
    Batch,
}

/// Runs a whole corpus single-threaded. Document ids must be unique.
pub fn run_corpus(
    docs: &[Document],
    sctx: &SentimentContext,
    lattice: &mut WeightedSentimentLattice,
    mode: AllocationMode,
) -> Result<(Vec<AllocationResult>, CorpusStats)> {
    run_corpus_threaded(docs, sctx, lattice, mode, 1)
}

/// Like `run_corpus`, but in batch mode the derivation pass shards across
/// `threads` workers. Online allocation is order-defined and therefore always
/// sequential; the final state is identical either way.
pub fn run_corpus_threaded(
    docs: &[Document],
    sctx: &SentimentContext,
    lattice: &mut WeightedSentimentLattice,
    mode: AllocationMode,
    threads: usize,
) -> Result<(Vec<AllocationResult>, CorpusStats)> {
    lattice.check_context(sctx)?;
    let mut ids = HashSet::with_capacity(docs.len());
    for doc in docs {
        if !ids.insert(doc.id.as_str()) {
            return Err(Error::DuplicateDocument(doc.id.clone()));
        }
    }
    let mut stats = CorpusStats::default();
    let mut results = Vec::with_capacity(docs.len());
    match mode {
        AllocationMode::Online => {
            for doc in docs {
                let result = allocate(doc, sctx, lattice)?;
                stats.count(result.class);
                results.push(result);
            }
        }
        AllocationMode::Batch => {
            let pre_run: HashSet<AttributeSet> = lattice
                .concepts()
                .iter()
                .map(|c| c.intent.clone())
                .collect();
            let generated = generate_all(docs, sctx, threads)?;
            let mut novel: HashMap<AttributeSet, ObjectSet> = HashMap::new();
            for g in &generated {
                if let Some((extent, intent)) = &g.concept {
                    if !pre_run.contains(intent) {
                        novel.entry(intent.clone()).or_insert_with(|| extent.clone());
                    }
                }
            }
            let mut to_insert: Vec<(AttributeSet, ObjectSet)> = novel.into_iter().collect();
            to_insert.sort_by(|a, b| a.0.lectic_cmp(&b.0));
            for (intent, extent) in to_insert {
                lattice.insert_emergent(sctx, extent, intent)?;
            }
            for (doc, g) in docs.iter().zip(generated) {
                let result = if g.words.is_empty() {
                    AllocationResult {
                        doc_id: doc.id.clone(),
                        matched: Vec::new(),
                        class: AllocationClass::NotPolarized,
                        target_intent: None,
                        polarity: 0.0,
                    }
                } else {
                    let matched = matched_words(sctx, &g.words);
                    match g.concept {
                        None => {
                            record_ambiguous_traces(sctx, lattice, &g.words)?;
                            AllocationResult {
                                doc_id: doc.id.clone(),
                                matched,
                                class: AllocationClass::Ambiguous,
                                target_intent: None,
                                polarity: mean_word_polarity(sctx, &g.words),
                            }
                        }
                        Some((_, intent)) => {
                            let idx = lattice
                                .index_of_intent(&intent)
                                .expect("inserted in first pass");
                            lattice.increment_population(idx)?;
                            let class = if pre_run.contains(&intent) {
                                AllocationClass::Specific
                            } else {
                                AllocationClass::New
                            };
                            AllocationResult {
                                doc_id: doc.id.clone(),
                                matched,
                                class,
                                target_intent: Some(intent_names(sctx, &intent)),
                                polarity: lattice.concept(idx)?.polarity,
                            }
                        }
                    }
                };
                stats.count(result.class);
                results.push(result);
            }
        }
    }
    debug_assert!(stats.partition_holds());
    Ok((results, stats))
}

/// `id<TAB>text` corpus lines.
pub fn read_corpus_tsv(path: &Path) -> Result<Vec<Document>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut docs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, text)) = line.split_once('\t') else {
            return Err(Error::parse(path, lineno + 1, "expected id<TAB>text"));
        };
        docs.push(Document {
            id: id.to_string(),
            text: text.to_string(),
            timestamp: None,
        });
    }
    Ok(docs)
}

/// Newline-delimited JSON records with fields `id`, `text`, optional
/// `timestamp`.
pub fn read_corpus_jsonl(path: &Path) -> Result<Vec<Document>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut docs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn write_results_jsonl<W: Write>(results: &[AllocationResult], mut out: W) -> Result<()> {
    for result in results {
        let line = serde_json::to_string(result).map_err(|e| Error::Structural {
            path: "<results>".into(),
            message: e.to_string(),
        })?;
        writeln!(out, "{line}").map_err(|e| Error::io("<results>", e))?;
    }
    Ok(())
}
