//! Formal concept analysis toolkit for sentiment lattices.
//!
//! The pipeline: parse WordNet index files into a lemma×synset formal context,
//! restrict it to an opinion lexicon, materialize the base sentiment lattice,
//! allocate documents into it (discovering emergent concepts along the way),
//! and analyze the resulting degree distributions for scale-freeness.

pub mod allocate;
pub mod analysis;
pub mod bitset;
pub mod context;
pub mod error;
pub mod export;
pub mod implications;
pub mod lattice;
pub mod lexicon;
pub mod sentiment;
pub mod wordnet;

pub use bitset::{AttributeSet, ObjectSet};
pub use context::{ContextBuilder, FormalContext};
pub use error::{Error, Result};
pub use lattice::{build_lattice, ConceptLattice, FormalConcept};
pub use lexicon::SentimentLexicon;
pub use sentiment::{SentimentContext, WeightedSentimentLattice};
