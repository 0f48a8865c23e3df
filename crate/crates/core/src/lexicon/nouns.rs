use std::collections::HashSet;

use crate::error::Result;

/// Compass and vertical directions. These never count as nouns; "exit",
/// "enter", "left" and "right" are movement commands too but also ordinary
/// nouns in scene text, so they are not listed here.
pub const DIRECTION_WORDS: [&str; 20] = [
    "north", "south", "east", "west", "northeast", "northwest", "southeast", "southwest", "up", "down", "n", "s",
    "e", "w", "ne", "nw", "se", "sw", "u", "d",
];

/// Stopword and known-verb lists, one word per line, `#` comments.
#[derive(Debug, Clone, Default)]
pub struct WordLists {
    pub stopwords: HashSet<String>,
    pub verbs: HashSet<String>,
}

impl WordLists {
    pub fn bundled() -> Self {
        WordLists {
            stopwords: parse_list(crate::data::STOPWORDS),
            verbs: parse_list(crate::data::VERBS),
        }
    }

    pub fn load(stopwords: &std::path::Path, verbs: &std::path::Path) -> Result<Self> {
        Ok(WordLists {
            stopwords: parse_list(&crate::error::read_file(stopwords)?),
            verbs: parse_list(&crate::error::read_file(verbs)?),
        })
    }
}

fn parse_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// The set of words that can never be extracted as nouns.
#[derive(Debug, Clone, Default)]
pub struct NounFilter {
    excluded: HashSet<String>,
}

impl NounFilter {
    pub fn new(lists: &WordLists, extra: impl IntoIterator<Item = String>) -> Self {
        let mut excluded: HashSet<String> = lists.stopwords.union(&lists.verbs).cloned().collect();
        excluded.extend(DIRECTION_WORDS.iter().map(|w| w.to_string()));
        excluded.extend(extra);
        NounFilter { excluded }
    }

    pub fn excludes(&self, word: &str) -> bool {
        self.excluded.contains(word)
    }
}

/// Candidate nouns in order of first appearance, without duplicates.
pub fn extract_nouns(description: &str, filter: &NounFilter) -> Vec<String> {
    let mut seen = HashSet::new();
    crate::text::words(description)
        .filter(|w| w.chars().count() >= 2 && w.chars().any(char::is_alphabetic))
        .filter(|w| !filter.excludes(w))
        .filter(|w| seen.insert(w.clone()))
        .collect()
}
