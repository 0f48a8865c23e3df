//! Word-level knowledge: embeddings for synonyms, corpus frequencies for
//! uniqueness, importance weights, and noun extraction.

mod embeddings;
mod frequency;
mod importance;
mod nouns;

use std::sync::Arc;

pub use embeddings::EmbeddingTable;
pub use frequency::FrequencyTable;
pub use importance::ImportanceModel;
pub use nouns::{extract_nouns, NounFilter, WordLists, DIRECTION_WORDS};

/// Everything the command pipeline needs to know about words.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub embeddings: EmbeddingTable,
    pub frequencies: Arc<FrequencyTable>,
    pub importance: ImportanceModel,
    pub words: WordLists,
}

impl Lexicon {
    /// Lexicon built from the data files shipped with the crate.
    pub fn bundled() -> Self {
        let frequencies = Arc::new(
            FrequencyTable::parse(crate::data::FREQUENCIES, "frequencies.tsv").expect("bundled frequencies"),
        );
        Lexicon {
            embeddings: EmbeddingTable::parse(crate::data::EMBEDDINGS, "embeddings.txt")
                .expect("bundled embeddings"),
            importance: ImportanceModel::InverseFrequency(Arc::clone(&frequencies)),
            frequencies,
            words: WordLists::bundled(),
        }
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        self.embeddings.cosine(a, b)
    }

    /// The `n` nearest neighbours of `word` with positive similarity.
    pub fn synonyms(&self, word: &str, n: usize) -> Vec<(String, f64)> {
        self.embeddings
            .nearest(word, n)
            .into_iter()
            .filter(|(_, sim)| *sim > 0.0)
            .collect()
    }

    pub fn uniqueness(&self, word: &str) -> f64 {
        self.frequencies.uniqueness(word)
    }

    pub fn importance(&self, word: &str, description: &str) -> f64 {
        self.importance.weight(word, description)
    }
}
