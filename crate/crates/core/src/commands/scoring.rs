//! Candidate scoring.
//!
//! score = count^wp · (Π cos)^ws · uniqueness^wu · importance^wi · b^k / p^m
//!
//! where k counts command words that also occur in the scene description and
//! m counts command nouns with no support in the description, the inventory,
//! or the generated synonyms.

use serde::{Deserialize, Serialize};

/// Exponents applied to the multiplicative factors. All default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorWeights {
    pub popularity: f64,
    pub similarity: f64,
    pub uniqueness: f64,
    pub importance: f64,
}

impl Default for FactorWeights {
    fn default() -> Self {
        FactorWeights {
            popularity: 1.0,
            similarity: 1.0,
            uniqueness: 1.0,
            importance: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    /// Synonyms taken per noun.
    pub synonyms: usize,
    /// Reward base per description-overlap word, > 1.
    pub overlap_base: f64,
    /// Penalty base per unsupported word, > 1.
    pub unsupported_base: f64,
    pub weights: FactorWeights,
}

impl Default for ScoringParams {
    fn default() -> Self {
        ScoringParams {
            synonyms: 5,
            overlap_base: 2.0,
            unsupported_base: 3.0,
            weights: FactorWeights::default(),
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.overlap_base > 1.0 && self.unsupported_base > 1.0) {
            return Err(crate::Error::Usage(format!(
                "scoring bases must exceed 1 (b = {}, p = {})",
                self.overlap_base, self.unsupported_base
            )));
        }
        Ok(())
    }
}

/// The ingredients of one candidate's score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    /// Pattern occurrence count.
    pub popularity: f64,
    /// Product of cosine similarities of the synonym substitutions used.
    pub similarity: f64,
    /// Geometric mean of per-word uniqueness.
    pub uniqueness: f64,
    /// Product of importance weights of the description nouns used.
    pub importance: f64,
    /// k: command words also present in the description.
    pub overlap_words: u32,
    /// m: command nouns with no reason to be there.
    pub unsupported_words: u32,
    /// b^k
    pub overlap_reward: f64,
    /// p^m
    pub unsupported_penalty: f64,
}

impl Factors {
    pub fn new(
        popularity: f64,
        similarity: f64,
        uniqueness: f64,
        importance: f64,
        overlap_words: u32,
        unsupported_words: u32,
        params: &ScoringParams,
    ) -> Self {
        Factors {
            popularity,
            similarity,
            uniqueness,
            importance,
            overlap_words,
            unsupported_words,
            overlap_reward: params.overlap_base.powi(overlap_words as i32),
            unsupported_penalty: params.unsupported_base.powi(unsupported_words as i32),
        }
    }

    pub fn score(&self, weights: &FactorWeights) -> f64 {
        self.popularity.powf(weights.popularity)
            * self.similarity.powf(weights.similarity)
            * self.uniqueness.powf(weights.uniqueness)
            * self.importance.powf(weights.importance)
            * self.overlap_reward
            / self.unsupported_penalty
    }
}
