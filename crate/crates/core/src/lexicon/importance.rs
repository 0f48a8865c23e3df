use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use super::FrequencyTable;
use crate::error::{read_file, Error, Result};

/// How important a word in a scene description is, as a weight in (0, 1].
#[derive(Debug, Clone)]
pub enum ImportanceModel {
    /// Rarer words matter more: `1 / (1 + ln count)`, 1 for unknown words.
    InverseFrequency(Arc<FrequencyTable>),
    /// Fixed per-word weights read from a `word<TAB>weight` file, e.g. exported
    /// attention weights. Words not in the file weigh 1.
    Static(HashMap<String, f64>),
}

impl ImportanceModel {
    pub fn load_static(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse_static(&read_file(path)?, &path.display().to_string())
    }

    pub fn parse_static(text: &str, source_name: &str) -> Result<Self> {
        let mut weights = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = line
                .split_once('\t')
                .and_then(|(w, v)| Some((w, v.trim().parse::<f64>().ok()?)))
                .filter(|(_, v)| *v > 0.0 && *v <= 1.0);
            let (word, weight) = parsed.ok_or_else(|| {
                Error::format(source_name, idx + 1, "expected word<TAB>weight with weight in (0, 1]")
            })?;
            weights.insert(word.trim().to_lowercase(), weight);
        }
        Ok(ImportanceModel::Static(weights))
    }

    /// Weight of `word` as it appears in `description`. Neither provider
    /// currently looks at the context.
    pub fn weight(&self, word: &str, _description: &str) -> f64 {
        match self {
            ImportanceModel::InverseFrequency(freq) => match freq.count(word) {
                Some(c) => 1.0 / (1.0 + (c as f64).ln()),
                None => 1.0,
            },
            ImportanceModel::Static(weights) => weights.get(word).copied().unwrap_or(1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_frequency_surrogate() {
        let freq = Arc::new(FrequencyTable::from_counts([("gun", 45), ("floor", 900), ("one", 1)]));
        let m = ImportanceModel::InverseFrequency(freq);
        assert_eq!(m.weight("absent", ""), 1.0);
        assert_eq!(m.weight("one", ""), 1.0);
        assert!(m.weight("gun", "") > m.weight("floor", ""));
        assert!(m.weight("floor", "") > 0.0);
    }

    #[test]
    fn static_provider_passes_values_through() {
        let m = ImportanceModel::parse_static("gun\t0.375\nfloor\t0.02\n", "w").unwrap();
        assert_eq!(m.weight("gun", "anything"), 0.375);
        assert_eq!(m.weight("floor", ""), 0.02);
        assert!(ImportanceModel::parse_static("gun\t1.5\n", "w").is_err());
    }
}
