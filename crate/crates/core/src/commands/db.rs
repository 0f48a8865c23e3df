use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use crate::error::{read_file, Error, Result};

/// Verbs that mark a pattern as useful in a fight.
pub const BATTLE_VERBS: [&str; 5] = ["attack", "kill", "fight", "shoot", "punch"];

/// Words that are never noun slots inside a pattern.
const FUNCTION_WORDS: [&str; 22] = [
    "a", "about", "an", "at", "by", "down", "for", "from", "in", "into", "of", "off", "on", "onto", "out", "over",
    "the", "through", "to", "under", "up", "with",
];

/// A verb phrase template. Every token after the verb that is not a
/// preposition or article is a noun slot that can be substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandPattern {
    pub tokens: Vec<String>,
    pub count: u64,
    pub battle: bool,
    slots: Vec<usize>,
}

impl CommandPattern {
    pub fn new(text: &str, count: u64, battle: bool) -> Option<Self> {
        let tokens: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
        if tokens.is_empty() || count == 0 {
            return None;
        }
        let slots = (1..tokens.len())
            .filter(|&i| !FUNCTION_WORDS.contains(&tokens[i].as_str()))
            .collect();
        Some(CommandPattern {
            tokens,
            count,
            battle,
            slots,
        })
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn verb(&self) -> &str {
        &self.tokens[0]
    }

    /// Token positions that hold substitutable nouns.
    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn slot_words(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().map(|&i| self.tokens[i].as_str())
    }

    /// The first noun slot, i.e. what the verb acts on.
    pub fn direct_object(&self) -> Option<&str> {
        self.slots.first().map(|&i| self.tokens[i].as_str())
    }

    pub fn has_battle_verb(&self) -> bool {
        self.tokens.iter().any(|t| BATTLE_VERBS.contains(&t.as_str()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct CommandDb {
    patterns: Vec<CommandPattern>,
    /// Slot word to indices of the patterns containing it.
    index: HashMap<String, Vec<usize>>,
}

impl CommandDb {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn bundled() -> Self {
        Self::parse(crate::data::SAMPLE_DB, "sample.db").expect("bundled pattern database")
    }

    /// Parses `pattern<TAB>count[<TAB>battle]` lines. Repeated patterns have
    /// their counts summed.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut merged: BTreeMap<String, (usize, u64, bool)> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let pattern = fields.next().unwrap_or_default().trim().to_lowercase();
            let count_field = fields
                .next()
                .ok_or_else(|| Error::format(source_name, line_no, "expected pattern<TAB>count"))?;
            let count: u64 = count_field
                .trim()
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| Error::format(source_name, line_no, format!("count must be a positive integer, got {count_field:?}")))?;
            let battle = match fields.next().map(str::trim) {
                None | Some("") => false,
                Some("battle") => true,
                Some(other) => {
                    return Err(Error::format(source_name, line_no, format!("unknown tag {other:?}")))
                }
            };
            if pattern.split_whitespace().next().is_none() {
                return Err(Error::format(source_name, line_no, "empty pattern"));
            }
            let pattern = pattern.split_whitespace().collect::<Vec<_>>().join(" ");
            if battle && !pattern.split(' ').any(|t| BATTLE_VERBS.contains(&t)) {
                return Err(Error::format(
                    source_name,
                    line_no,
                    format!("battle pattern {pattern:?} lacks a battle verb"),
                ));
            }
            let next = merged.len();
            let entry = merged.entry(pattern).or_insert((next, 0, false));
            entry.1 += count;
            entry.2 |= battle;
        }
        let mut rows: Vec<(String, usize, u64, bool)> =
            merged.into_iter().map(|(p, (order, c, b))| (p, order, c, b)).collect();
        rows.sort_by_key(|r| r.1);
        Ok(Self::from_patterns(
            rows.into_iter()
                .filter_map(|(p, _, c, b)| CommandPattern::new(&p, c, b)),
        ))
    }

    pub fn from_patterns(patterns: impl IntoIterator<Item = CommandPattern>) -> Self {
        let patterns: Vec<CommandPattern> = patterns.into_iter().collect();
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in patterns.iter().enumerate() {
            let mut seen = HashSet::new();
            for w in p.slot_words() {
                if seen.insert(w) {
                    index.entry(w.to_string()).or_default().push(i);
                }
            }
        }
        CommandDb { patterns, index }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[CommandPattern] {
        &self.patterns
    }

    pub fn pattern(&self, i: usize) -> &CommandPattern {
        &self.patterns[i]
    }

    /// Indices of the patterns with `noun` in a slot.
    pub fn lookup(&self, noun: &str) -> &[usize] {
        self.index.get(noun).map_or(&[], Vec::as_slice)
    }

    /// First tokens of all patterns.
    pub fn verbs(&self) -> HashSet<String> {
        self.patterns.iter().map(|p| p.verb().to_string()).collect()
    }

    /// Writes the database back out in its file format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.patterns {
            out.push_str(&p.text());
            out.push('\t');
            out.push_str(&p.count.to_string());
            if p.battle {
                out.push_str("\tbattle");
            }
            out.push('\n');
        }
        out
    }
}
