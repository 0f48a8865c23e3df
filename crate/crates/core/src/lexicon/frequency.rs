use std::collections::HashMap;
use std::path::Path;

use crate::error::{read_file, Error, Result};

/// Corpus occurrence counts, `word<TAB>count` per line.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
}

impl FrequencyTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut counts = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(source_name, idx + 1, "expected word<TAB>count"))?;
            let count: u64 = count
                .trim()
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| Error::format(source_name, idx + 1, format!("count must be a positive integer, got {count:?}")))?;
            counts.insert(word.trim().to_lowercase(), count);
        }
        Ok(FrequencyTable { counts })
    }

    pub fn from_counts<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        FrequencyTable {
            counts: pairs
                .into_iter()
                .map(|(w, c)| (w.to_string(), c.max(1)))
                .collect(),
        }
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    /// `1 / count`; unknown words count once and so are maximally unique.
    pub fn uniqueness(&self, word: &str) -> f64 {
        1.0 / self.count(word).unwrap_or(1) as f64
    }

    /// Geometric mean of per-word uniqueness; 1 for an empty phrase.
    pub fn phrase_uniqueness<'a>(&self, words: impl IntoIterator<Item = &'a str>) -> f64 {
        let (sum_ln, n) = words
            .into_iter()
            .fold((0.0, 0usize), |(s, n), w| (s + self.uniqueness(w).ln(), n + 1));
        if n == 0 {
            1.0
        } else {
            (sum_ln / n as f64).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniqueness_rules() {
        let f = FrequencyTable::parse("sword\t4\nman\t16\n", "f").unwrap();
        assert_eq!(f.uniqueness("sword"), 0.25);
        assert_eq!(f.uniqueness("zorkmid"), 1.0);
        // sqrt(1/4 * 1/16) = 1/8
        assert!((f.phrase_uniqueness(["sword", "man"]) - 0.125).abs() < 1e-12);
        assert_eq!(f.phrase_uniqueness([]), 1.0);
    }

    #[test]
    fn rejects_zero_and_garbage_counts() {
        assert!(FrequencyTable::parse("a\t0\n", "f").is_err());
        assert!(FrequencyTable::parse("a\tmany\n", "f").is_err());
        assert!(FrequencyTable::parse("a 3\n", "f").is_err());
    }
}
