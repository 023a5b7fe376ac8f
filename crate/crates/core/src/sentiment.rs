//! Sentiment contexts and the weighted sentiment lattice.
//!
//! The sentiment context restricts the WordNet context to opinion-lexicon
//! words; the base lattice materializes the object concept of every word and
//! the attribute concept of every synset (plus the extremes) rather than the
//! full concept set, so documents can still generate genuinely new concepts.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::bitset::{AttributeSet, ObjectSet};
use crate::context::{ContextBuilder, FormalContext};
use crate::error::{Error, Result};
use crate::lattice::{attribute_concept, build_lattice, hasse_covers, object_concept, FormalConcept};
use crate::lexicon::SentimentLexicon;
use crate::wordnet::Pos;

/// A formal context over lexicon words and their synsets, with one polarity
/// per word.
#[derive(Debug, Clone)]
pub struct SentimentContext {
    ctx: FormalContext,
    polarities: Vec<f64>,
    missing: Vec<String>,
    lexicon_name: Option<String>,
    lexicon_words: Option<u64>,
}

impl SentimentContext {
    /// Wraps an existing context. `polarities[i]` belongs to object `i`; every
    /// attribute column must be populated.
    pub fn from_parts(ctx: FormalContext, polarities: Vec<f64>) -> Result<Self> {
        if polarities.len() != ctx.object_count() {
            return Err(Error::UniverseMismatch {
                dimension: "object",
                got: polarities.len(),
                expected: ctx.object_count(),
            });
        }
        for (i, &p) in polarities.iter().enumerate() {
            if !(-1.0..=1.0).contains(&p) {
                return Err(Error::Structural {
                    path: "<polarity>".into(),
                    message: format!("object {i} polarity {p} outside [-1, 1]"),
                });
            }
        }
        for a in 0..ctx.attribute_count() {
            if ctx.col(a).is_empty() {
                return Err(Error::Structural {
                    path: "<context>".into(),
                    message: format!("attribute {:?} has an empty column", ctx.attribute_name(a)?),
                });
            }
        }
        Ok(SentimentContext {
            ctx,
            polarities,
            missing: Vec::new(),
            lexicon_name: None,
            lexicon_words: None,
        })
    }

    pub fn context(&self) -> &FormalContext {
        &self.ctx
    }

    /// Name and size of the source lexicon, when known (reporting metadata).
    pub fn lexicon_meta(&self) -> (Option<&str>, Option<u64>) {
        (self.lexicon_name.as_deref(), self.lexicon_words)
    }

    pub fn set_lexicon_meta(&mut self, name: &str, words: u64) {
        self.lexicon_name = Some(name.to_string());
        self.lexicon_words = Some(words);
    }

    pub fn polarity(&self, object: usize) -> Result<f64> {
        self.polarities
            .get(object)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                dimension: "objects",
                index: object,
                size: self.polarities.len(),
            })
    }

    pub fn polarities(&self) -> &[f64] {
        &self.polarities
    }

    /// Lexicon words that had no WordNet variant (the coverage report).
    pub fn missing_words(&self) -> &[String] {
        &self.missing
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.ctx.object_id(word)
    }

    /// Stable digest of the context and polarities; lattices remember it so a
    /// mismatched context is rejected instead of silently misindexing.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.ctx.objects().hash(&mut hasher);
        self.ctx.attributes().hash(&mut hasher);
        for o in 0..self.ctx.object_count() {
            self.ctx.row(o).hash(&mut hasher);
        }
        for &p in &self.polarities {
            p.to_bits().hash(&mut hasher);
        }
        hasher.finish()
    }
}

/// Restriction of a WordNet context to lexicon words. A lexicon word matches
/// when any of its part-of-speech variants `word#pos` is a WordNet object;
/// the variants' synset rows merge into one row. Lexicon words absent from
/// WordNet end up in the coverage report.
pub fn build_sentiment_context(
    wordnet_ctx: &FormalContext,
    lexicon: &SentimentLexicon,
) -> Result<SentimentContext> {
    let mut matched: Vec<(String, f64, Vec<u32>)> = Vec::new();
    let mut missing = Vec::new();
    for entry in lexicon.entries() {
        let mut synsets: Vec<u32> = Vec::new();
        for pos in Pos::ALL {
            let variant = format!("{}#{}", entry.word, pos.tag());
            if let Some(o) = wordnet_ctx.object_id(&variant) {
                synsets.extend_from_slice(wordnet_ctx.row(o));
            }
        }
        if synsets.is_empty() {
            missing.push(entry.word.clone());
        } else {
            synsets.sort_unstable();
            synsets.dedup();
            matched.push((entry.word.clone(), entry.polarity, synsets));
        }
    }
    if matched.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    matched.sort_by(|a, b| a.0.cmp(&b.0));

    let mut attr_names: Vec<&str> = matched
        .iter()
        .flat_map(|(_, _, synsets)| synsets.iter())
        .map(|&a| wordnet_ctx.attributes()[a as usize].as_str())
        .collect();
    attr_names.sort_unstable();
    attr_names.dedup();

    let mut builder = ContextBuilder::new();
    for (word, _, _) in &matched {
        builder.add_object(word)?;
    }
    for name in &attr_names {
        builder.add_attribute(name)?;
    }
    for (word, _, synsets) in &matched {
        for &a in synsets {
            builder.add_incidence(word, &wordnet_ctx.attributes()[a as usize])?;
        }
    }
    let ctx = builder.build();
    let polarities = matched.iter().map(|(_, p, _)| *p).collect();
    let mut sctx = SentimentContext::from_parts(ctx, polarities)?;
    sctx.missing = missing;
    sctx.set_lexicon_meta(lexicon.source().name(), lexicon.len() as u64);
    Ok(sctx)
}

/// Writes the sentiment-context section: polarity-bearing object
/// declarations, attribute declarations, coverage report, lexicon metadata,
/// and the incidence pairs. The output doubles as a plain context TSV since
/// every non-pair line is a `#` comment.
pub fn write_sentiment_context<W: Write>(sctx: &SentimentContext, mut out: W) -> Result<()> {
    let ctx = sctx.context();
    let io = |e| Error::io("<sentiment-context>", e);
    let (name, words) = sctx.lexicon_meta();
    if let (Some(name), Some(words)) = (name, words) {
        writeln!(out, "#@ lexicon\t{name}\t{words}").map_err(io)?;
    }
    for (o, obj) in ctx.objects().iter().enumerate() {
        writeln!(out, "#! object\t{}\t{}", obj, sctx.polarities[o]).map_err(io)?;
    }
    for attr in ctx.attributes() {
        writeln!(out, "#! attribute\t{attr}").map_err(io)?;
    }
    for word in &sctx.missing {
        writeln!(out, "#@ missing\t{word}").map_err(io)?;
    }
    for (o, obj) in ctx.objects().iter().enumerate() {
        for &a in ctx.row(o) {
            writeln!(out, "{}\t{}", obj, ctx.attributes()[a as usize]).map_err(io)?;
        }
    }
    Ok(())
}

pub fn write_sentiment_context_file(sctx: &SentimentContext, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_sentiment_context(sctx, std::io::BufWriter::new(file))
}

/// Reads a sentiment context, tolerating (and ignoring) any concept and cover
/// records that follow — a saved lattice file is a valid sentiment context.
pub fn read_sentiment_context_file(path: &Path) -> Result<SentimentContext> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_lattice_text(std::io::BufReader::new(file), path)?;
    Ok(parsed.sctx)
}

/// Mean polarity of the words in `extent`. Empty extents have no polarity;
/// callers decide how to represent that (the bottom concept maps to a neutral
/// zero).
pub fn concept_polarity(sctx: &SentimentContext, extent: &ObjectSet) -> Result<f64> {
    if extent.universe() != sctx.ctx.object_count() {
        return Err(Error::UniverseMismatch {
            dimension: "object",
            got: extent.universe(),
            expected: sctx.ctx.object_count(),
        });
    }
    let mut sum = 0.0;
    let mut count = 0u32;
    for o in extent.iter() {
        sum += sctx.polarities[o];
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyExtent);
    }
    Ok(sum / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Base,
    Emergent,
}

impl Provenance {
    fn name(self) -> &'static str {
        match self {
            Provenance::Base => "base",
            Provenance::Emergent => "emergent",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "base" => Some(Provenance::Base),
            "emergent" => Some(Provenance::Emergent),
            _ => None,
        }
    }
}

/// A materialized concept with its aggregated polarity, the number of
/// documents allocated exactly here, and a fractional trace left by ambiguous
/// documents.
#[derive(Debug, Clone)]
pub struct SentimentConcept {
    pub extent: ObjectSet,
    pub intent: AttributeSet,
    pub polarity: f64,
    pub neutral: bool,
    pub population: u64,
    pub trace: f64,
    pub provenance: Provenance,
}

/// The materialized sentiment lattice: base concepts plus any emergent ones,
/// with the Hasse order maintained under insertion.
#[derive(Debug, Clone)]
pub struct WeightedSentimentLattice {
    concepts: Vec<SentimentConcept>,
    covers: BTreeSet<(u32, u32)>,
    intent_index: HashMap<AttributeSet, u32>,
    top: u32,
    bottom: u32,
    fingerprint: u64,
}

fn make_concept(
    sctx: &SentimentContext,
    extent: ObjectSet,
    intent: AttributeSet,
    provenance: Provenance,
) -> SentimentConcept {
    let (polarity, neutral) = match concept_polarity(sctx, &extent) {
        Ok(p) => (p, false),
        Err(_) => (0.0, true),
    };
    SentimentConcept {
        extent,
        intent,
        polarity,
        neutral,
        population: 0,
        trace: 0.0,
        provenance,
    }
}

/// Materializes γ(w) for every word, μ(y) for every synset, and the two
/// extremes, deduplicated by intent and ordered lectically.
pub fn materialize_base(sctx: &SentimentContext) -> Result<WeightedSentimentLattice> {
    let ctx = sctx.context();
    if ctx.object_count() == 0 {
        return Err(Error::EmptyContext("object"));
    }
    if ctx.attribute_count() == 0 {
        return Err(Error::EmptyContext("attribute"));
    }
    let mut seen: HashMap<AttributeSet, ObjectSet> = HashMap::new();
    let mut push = |c: FormalConcept| {
        seen.entry(c.intent).or_insert(c.extent);
    };
    for o in 0..ctx.object_count() {
        push(object_concept(ctx, o)?);
    }
    for a in 0..ctx.attribute_count() {
        push(attribute_concept(ctx, a)?);
    }
    // top: closure of the empty attribute set
    let top_intent = ctx.close_attributes(&ctx.empty_attribute_set())?;
    let top_extent = ctx.derive_attributes(&top_intent)?;
    push(FormalConcept {
        extent: top_extent,
        intent: top_intent,
    });
    // bottom: objects that carry every attribute
    let bottom_extent = ctx.derive_attributes(&AttributeSet::full(ctx.attribute_count()))?;
    let bottom_intent = ctx.derive_objects(&bottom_extent)?;
    push(FormalConcept {
        extent: bottom_extent,
        intent: bottom_intent,
    });

    let mut pairs: Vec<(AttributeSet, ObjectSet)> = seen.into_iter().collect();
    pairs.sort_by(|a, b| a.0.lectic_cmp(&b.0));
    let concepts: Vec<SentimentConcept> = pairs
        .into_iter()
        .map(|(intent, extent)| make_concept(sctx, extent, intent, Provenance::Base))
        .collect();
    WeightedSentimentLattice::assemble(sctx, concepts)
}

/// The alternative reading: every concept of the sentiment subcontext. Guarded
/// by a concept budget because the full lattice can be exponentially large.
pub fn materialize_full(
    sctx: &SentimentContext,
    limit: Option<usize>,
) -> Result<WeightedSentimentLattice> {
    let lattice = build_lattice(sctx.context())?;
    if let Some(limit) = limit {
        if lattice.len() > limit {
            return Err(Error::Structural {
                path: "<materialize>".into(),
                message: format!("full lattice has {} concepts, limit {limit}", lattice.len()),
            });
        }
    }
    let concepts = lattice
        .concepts()
        .iter()
        .map(|c| make_concept(sctx, c.extent.clone(), c.intent.clone(), Provenance::Base))
        .collect();
    WeightedSentimentLattice::assemble(sctx, concepts)
}

impl WeightedSentimentLattice {
    fn assemble(sctx: &SentimentContext, concepts: Vec<SentimentConcept>) -> Result<Self> {
        let shaped: Vec<FormalConcept> = concepts
            .iter()
            .map(|c| FormalConcept {
                extent: c.extent.clone(),
                intent: c.intent.clone(),
            })
            .collect();
        let covers = hasse_covers(&shaped).into_iter().collect();
        let intent_index: HashMap<AttributeSet, u32> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.intent.clone(), i as u32))
            .collect();
        let ctx = sctx.context();
        let top_intent = ctx.close_attributes(&ctx.empty_attribute_set())?;
        let bottom_extent = ctx.derive_attributes(&AttributeSet::full(ctx.attribute_count()))?;
        let bottom_intent = ctx.derive_objects(&bottom_extent)?;
        let top = *intent_index.get(&top_intent).ok_or(Error::ContextMismatch)?;
        let bottom = *intent_index
            .get(&bottom_intent)
            .ok_or(Error::ContextMismatch)?;
        Ok(WeightedSentimentLattice {
            concepts,
            covers,
            intent_index,
            top,
            bottom,
            fingerprint: sctx.fingerprint(),
        })
    }

    pub fn concepts(&self) -> &[SentimentConcept] {
        &self.concepts
    }

    pub fn concept(&self, index: usize) -> Result<&SentimentConcept> {
        self.concepts.get(index).ok_or(Error::ForeignConcept(index))
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn covers(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.covers.iter().copied()
    }

    pub fn cover_count(&self) -> usize {
        self.covers.len()
    }

    pub fn top(&self) -> usize {
        self.top as usize
    }

    pub fn bottom(&self) -> usize {
        self.bottom as usize
    }

    pub fn index_of_intent(&self, intent: &AttributeSet) -> Option<usize> {
        self.intent_index.get(intent).map(|&i| i as usize)
    }

    pub fn matches_context(&self, sctx: &SentimentContext) -> bool {
        self.fingerprint == sctx.fingerprint()
    }

    pub fn check_context(&self, sctx: &SentimentContext) -> Result<()> {
        if self.matches_context(sctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn increment_population(&mut self, index: usize) -> Result<()> {
        self.concepts
            .get_mut(index)
            .ok_or(Error::ForeignConcept(index))?
            .population += 1;
        Ok(())
    }

    pub fn add_trace(&mut self, index: usize, amount: f64) -> Result<()> {
        self.concepts
            .get_mut(index)
            .ok_or(Error::ForeignConcept(index))?
            .trace += amount;
        Ok(())
    }

    /// Inserts a new emergent concept and splices it into the Hasse order.
    /// The pair must satisfy the concept equations against `sctx`.
    pub fn insert_emergent(
        &mut self,
        sctx: &SentimentContext,
        extent: ObjectSet,
        intent: AttributeSet,
    ) -> Result<usize> {
        self.check_context(sctx)?;
        if self.intent_index.contains_key(&intent) {
            return Err(Error::Structural {
                path: "<lattice>".into(),
                message: "intent already materialized".into(),
            });
        }
        let ctx = sctx.context();
        if ctx.derive_objects(&extent)? != intent || ctx.derive_attributes(&intent)? != extent {
            return Err(Error::Structural {
                path: "<lattice>".into(),
                message: "emergent pair violates the concept equations".into(),
            });
        }
        let idx = self.concepts.len() as u32;
        let concept = make_concept(sctx, extent, intent, Provenance::Emergent);

        let mut strictly_above: Vec<u32> = Vec::new();
        let mut strictly_below: Vec<u32> = Vec::new();
        for (i, c) in self.concepts.iter().enumerate() {
            if concept.extent.is_strict_subset(&c.extent) {
                strictly_above.push(i as u32);
            } else if c.extent.is_strict_subset(&concept.extent) {
                strictly_below.push(i as u32);
            }
        }
        let parents: Vec<u32> = strictly_above
            .iter()
            .copied()
            .filter(|&p| {
                strictly_above.iter().all(|&q| {
                    q == p || !self.concepts[q as usize]
                        .extent
                        .is_strict_subset(&self.concepts[p as usize].extent)
                })
            })
            .collect();
        let children: Vec<u32> = strictly_below
            .iter()
            .copied()
            .filter(|&c| {
                strictly_below.iter().all(|&q| {
                    q == c || !self.concepts[c as usize]
                        .extent
                        .is_strict_subset(&self.concepts[q as usize].extent)
                })
            })
            .collect();
        for &c in &children {
            for &p in &parents {
                self.covers.remove(&(c, p));
            }
        }
        for &p in &parents {
            self.covers.insert((idx, p));
        }
        for &c in &children {
            self.covers.insert((c, idx));
        }
        self.intent_index.insert(concept.intent.clone(), idx);
        self.concepts.push(concept);
        Ok(idx as usize)
    }

    /// Re-checks the concept equations for every materialized concept.
    pub fn validate(&self, sctx: &SentimentContext) -> Result<()> {
        self.check_context(sctx)?;
        let ctx = sctx.context();
        for (i, c) in self.concepts.iter().enumerate() {
            if ctx.derive_objects(&c.extent)? != c.intent
                || ctx.derive_attributes(&c.intent)? != c.extent
            {
                return Err(Error::Structural {
                    path: "<lattice>".into(),
                    message: format!("concept {i} violates the concept equations"),
                });
            }
        }
        Ok(())
    }

    pub fn total_population(&self) -> u64 {
        self.concepts.iter().map(|c| c.population).sum()
    }

    /// Serializes the lattice with its sentiment context into one
    /// self-contained text file.
    pub fn save<W: Write>(&self, sctx: &SentimentContext, mut out: W) -> Result<()> {
        self.check_context(sctx)?;
        let ctx = sctx.context();
        let io = |e| Error::io("<lattice>", e);
        writeln!(out, "# sentilattice v1").map_err(io)?;
        write_sentiment_context(sctx, &mut out)?;
        for c in &self.concepts {
            let intent_names: Vec<&str> = c
                .intent
                .iter()
                .map(|a| ctx.attributes()[a].as_str())
                .collect();
            let intent_field = if intent_names.is_empty() {
                "-".to_string()
            } else {
                intent_names.join(",")
            };
            writeln!(
                out,
                "#@ concept\t{}\t{}\t{}\t{}\t{}\t{}",
                intent_field,
                c.polarity,
                u8::from(c.neutral),
                c.population,
                c.provenance.name(),
                c.trace
            )
            .map_err(io)?;
        }
        for &(child, parent) in &self.covers {
            writeln!(out, "#@ cover\t{child}\t{parent}").map_err(io)?;
        }
        Ok(())
    }

    pub fn save_file(&self, sctx: &SentimentContext, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.save(sctx, std::io::BufWriter::new(file))
    }

    /// Reads a file produced by `save`, restoring both the context and the
    /// lattice. Extents are recomputed from intents and re-checked against
    /// the stored polarity.
    pub fn load<R: BufRead>(reader: R, path: &Path) -> Result<(SentimentContext, Self)> {
        let parsed = parse_lattice_text(reader, path)?;
        if parsed.concepts.is_empty() {
            return Err(Error::structural(
                path,
                "no concept records: a sentiment context, not a lattice",
            ));
        }
        let sctx = parsed.sctx;
        let cover_records = parsed.covers;

        let ctx = sctx.context();
        let mut concepts = Vec::with_capacity(parsed.concepts.len());
        let mut intent_index = HashMap::new();
        for (i, record) in parsed.concepts.into_iter().enumerate() {
            let mut intent = ctx.empty_attribute_set();
            if record.intent_field != "-" {
                for name in record.intent_field.split(',') {
                    let a = ctx.attribute_id(name).ok_or_else(|| {
                        Error::structural(path, format!("unknown attribute {name:?} in concept"))
                    })?;
                    intent.insert(a);
                }
            }
            let extent = ctx.derive_attributes(&intent)?;
            if ctx.derive_objects(&extent)? != intent {
                return Err(Error::structural(
                    path,
                    format!("stored concept {i} is not closed"),
                ));
            }
            intent_index.insert(intent.clone(), i as u32);
            concepts.push(SentimentConcept {
                extent,
                intent,
                polarity: record.polarity,
                neutral: record.neutral,
                population: record.population,
                trace: record.trace,
                provenance: record.provenance,
            });
        }
        let n = concepts.len() as u32;
        for &(child, parent) in &cover_records {
            if child >= n || parent >= n {
                return Err(Error::structural(path, "cover record out of range"));
            }
        }
        let top_intent = ctx.close_attributes(&ctx.empty_attribute_set())?;
        let bottom_extent = ctx.derive_attributes(&AttributeSet::full(ctx.attribute_count()))?;
        let bottom_intent = ctx.derive_objects(&bottom_extent)?;
        let top = *intent_index
            .get(&top_intent)
            .ok_or_else(|| Error::structural(path, "top concept missing"))?;
        let bottom = *intent_index
            .get(&bottom_intent)
            .ok_or_else(|| Error::structural(path, "bottom concept missing"))?;
        let lattice = WeightedSentimentLattice {
            concepts,
            covers: cover_records.into_iter().collect(),
            intent_index,
            top,
            bottom,
            fingerprint: sctx.fingerprint(),
        };
        Ok((sctx, lattice))
    }

    pub fn load_file(path: &Path) -> Result<(SentimentContext, Self)> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load(std::io::BufReader::new(file), path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::fish_fixture;
    use crate::lattice::oracle::random_context;

    pub(crate) fn fish_sentiment() -> SentimentContext {
        SentimentContext::from_parts(fish_fixture(), vec![0.2, -0.6, 1.0, 0.4, -1.0]).unwrap()
    }

    #[test]
    fn polarity_bounds_are_enforced() {
        let err = SentimentContext::from_parts(fish_fixture(), vec![0.0, 0.0, 2.0, 0.0, 0.0]);
        assert!(err.is_err());
    }

    #[test]
    fn singleton_extent_polarity_is_the_word_polarity() {
        let sctx = fish_sentiment();
        let eel = sctx.word_id("eel").unwrap();
        let set = sctx.context().object_set_from(&[eel]).unwrap();
        assert_eq!(concept_polarity(&sctx, &set).unwrap(), 1.0);
    }

    #[test]
    fn opposite_words_cancel() {
        let sctx = fish_sentiment();
        let eel = sctx.word_id("eel").unwrap();
        let shark = sctx.word_id("shark").unwrap();
        let set = sctx.context().object_set_from(&[eel, shark]).unwrap();
        assert_eq!(concept_polarity(&sctx, &set).unwrap(), 0.0);
    }

    #[test]
    fn empty_extent_polarity_is_an_error() {
        let sctx = fish_sentiment();
        let empty = sctx.context().empty_object_set();
        assert!(matches!(
            concept_polarity(&sctx, &empty),
            Err(Error::EmptyExtent)
        ));
    }

    #[test]
    fn mean_matches_direct_resummation() {
        let sctx = fish_sentiment();
        let set = sctx.context().object_set_from(&[0, 2, 4]).unwrap();
        let expected = (0.2 + 1.0 + -1.0) / 3.0;
        assert!((concept_polarity(&sctx, &set).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn base_lattice_contains_eel_object_concept() {
        let sctx = fish_sentiment();
        let lattice = materialize_base(&sctx).unwrap();
        let eel_gamma = object_concept(sctx.context(), sctx.word_id("eel").unwrap()).unwrap();
        let idx = lattice.index_of_intent(&eel_gamma.intent).unwrap();
        assert_eq!(lattice.concept(idx).unwrap().intent.to_indices(), vec![0, 1, 2]);
        assert_eq!(lattice.concept(idx).unwrap().provenance, Provenance::Base);
    }

    #[test]
    fn one_by_one_context_materializes_single_concept() {
        let ctx = FormalContext::from_rows(&["w"], &["s"], &[&[0]]).unwrap();
        let sctx = SentimentContext::from_parts(ctx, vec![0.5]).unwrap();
        let lattice = materialize_base(&sctx).unwrap();
        assert_eq!(lattice.len(), 1);
        assert_eq!(lattice.top(), lattice.bottom());
    }

    #[test]
    fn base_set_is_subset_of_full_lattice_with_consistent_order() {
        for seed in 0..8 {
            let ctx = random_context(5, 5, seed);
            let n = ctx.object_count();
            let polarities: Vec<f64> = (0..n).map(|i| (i as f64) / (n as f64) - 0.5).collect();
            let sctx = SentimentContext::from_parts(ctx, polarities);
            let Ok(sctx) = sctx else { continue }; // empty columns possible
            let base = materialize_base(&sctx).unwrap();
            let full = build_lattice(sctx.context()).unwrap();
            for c in base.concepts() {
                let idx = full.index_of_intent(&c.intent);
                assert!(idx.is_some(), "base concept missing from full lattice");
                assert_eq!(
                    &full.concepts()[idx.unwrap()].extent,
                    &c.extent,
                    "seed {seed}"
                );
            }
            // materialized Hasse order must be a restriction of the full order
            for (child, parent) in base.covers() {
                let ce = &base.concepts()[child as usize].extent;
                let pe = &base.concepts()[parent as usize].extent;
                assert!(ce.is_strict_subset(pe));
            }
        }
    }

    #[test]
    fn materialize_base_is_idempotent() {
        let sctx = fish_sentiment();
        let a = materialize_base(&sctx).unwrap();
        let b = materialize_base(&sctx).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.concepts().iter().zip(b.concepts()) {
            assert_eq!(x.intent, y.intent);
            assert_eq!(x.extent, y.extent);
            assert_eq!(x.polarity, y.polarity);
        }
        assert_eq!(
            a.covers().collect::<Vec<_>>(),
            b.covers().collect::<Vec<_>>()
        );
    }

    #[test]
    fn polarity_stays_within_member_bounds() {
        let sctx = fish_sentiment();
        let lattice = materialize_base(&sctx).unwrap();
        for c in lattice.concepts() {
            if c.neutral {
                continue;
            }
            let members: Vec<f64> = c.extent.iter().map(|o| sctx.polarities()[o]).collect();
            let min = members.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = members.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(c.polarity >= min - 1e-12 && c.polarity <= max + 1e-12);
        }
    }

    #[test]
    fn base_concepts_satisfy_concept_equations() {
        let sctx = fish_sentiment();
        let lattice = materialize_base(&sctx).unwrap();
        lattice.validate(&sctx).unwrap();
    }

    #[test]
    fn build_sentiment_context_merges_pos_variants() {
        // WordNet-shaped context: good#adj in two synsets, good#noun in one
        let wn = FormalContext::from_rows(
            &["good#adj", "good#noun", "plain#adj"],
            &["adj:1", "adj:2", "noun:3", "adj:4"],
            &[&[0, 1], &[2], &[3]],
        )
        .unwrap();
        let lex = crate::lexicon::parse_afinn_reader(
            std::io::Cursor::new("good\t3\nmissingword\t2\n"),
            Path::new("<mem>"),
        )
        .unwrap();
        let sctx = build_sentiment_context(&wn, &lex).unwrap();
        assert_eq!(sctx.context().object_count(), 1);
        assert_eq!(sctx.context().attribute_count(), 3);
        assert_eq!(sctx.context().row(0).len(), 3);
        assert_eq!(sctx.missing_words(), &["missingword".to_string()]);
        assert_eq!(sctx.polarity(0).unwrap(), 0.6);
    }

    #[test]
    fn empty_intersection_is_a_hard_error() {
        let wn = FormalContext::from_rows(&["x#noun"], &["noun:1"], &[&[0]]).unwrap();
        let lex = crate::lexicon::parse_afinn_reader(
            std::io::Cursor::new("zzz\t1\n"),
            Path::new("<mem>"),
        )
        .unwrap();
        assert!(matches!(
            build_sentiment_context(&wn, &lex),
            Err(Error::EmptyIntersection)
        ));
    }

    #[test]
    fn insert_emergent_splices_hasse_order() {
        // two words sharing two synsets, each with a private one, plus fillers
        // making γ(u), γ(v), μ(y) all differ from the generated concept
        let ctx = FormalContext::from_rows(
            &["u", "v", "va", "vb"],
            &["y1", "y2", "y3", "y4"],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2], &[1, 3]],
        )
        .unwrap();
        let sctx = SentimentContext::from_parts(ctx, vec![0.5, -0.5, 0.1, 0.2]).unwrap();
        let mut lattice = materialize_base(&sctx).unwrap();
        let before = lattice.len();

        // S = {u, v}: S' = {y1, y2}, S'' = {u, v}
        let s = sctx.context().object_set_from(&[0, 1]).unwrap();
        let intent = sctx.context().derive_objects(&s).unwrap();
        let extent = sctx.context().derive_attributes(&intent).unwrap();
        assert!(lattice.index_of_intent(&intent).is_none(), "must be novel");
        let idx = lattice.insert_emergent(&sctx, extent, intent.clone()).unwrap();
        assert_eq!(lattice.len(), before + 1);
        assert_eq!(lattice.concept(idx).unwrap().provenance, Provenance::Emergent);
        lattice.validate(&sctx).unwrap();

        // Hasse stays a transitive reduction: no cover is implied by two others
        let edges: Vec<(u32, u32)> = lattice.covers().collect();
        for &(c, p) in &edges {
            for &(c2, p2) in &edges {
                if p == c2 {
                    assert!(
                        !edges.contains(&(c, p2)),
                        "transitivity violation {c}->{p}->{p2}"
                    );
                }
            }
        }
        // duplicate insertion is rejected
        let extent2 = sctx.context().derive_attributes(&intent).unwrap();
        assert!(lattice.insert_emergent(&sctx, extent2, intent).is_err());
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let sctx = fish_sentiment();
        let mut lattice = materialize_base(&sctx).unwrap();
        lattice.increment_population(lattice.top()).unwrap();
        lattice.add_trace(lattice.bottom(), 0.5).unwrap();

        let mut buf = Vec::new();
        lattice.save(&sctx, &mut buf).unwrap();
        let (sctx2, lattice2) =
            WeightedSentimentLattice::load(std::io::Cursor::new(&buf), Path::new("<mem>"))
                .unwrap();
        assert!(lattice2.matches_context(&sctx2));
        assert!(lattice2.matches_context(&sctx));
        let mut buf2 = Vec::new();
        lattice2.save(&sctx2, &mut buf2).unwrap();
        assert_eq!(buf, buf2, "byte-exact round trip");
    }

    #[test]
    fn mismatched_context_is_rejected() {
        let sctx = fish_sentiment();
        let lattice = materialize_base(&sctx).unwrap();
        let other =
            SentimentContext::from_parts(fish_fixture(), vec![0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            lattice.check_context(&other),
            Err(Error::ContextMismatch)
        ));
    }

    #[test]
    fn materialize_full_covers_every_concept() {
        let sctx = fish_sentiment();
        let full = materialize_full(&sctx, Some(1000)).unwrap();
        let reference = build_lattice(sctx.context()).unwrap();
        assert_eq!(full.len(), reference.len());
        assert!(materialize_full(&sctx, Some(2)).is_err());
    }
}
