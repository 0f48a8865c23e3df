use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::db::{CommandDb, CommandPattern};
use super::scoring::{Factors, ScoringParams};
use crate::lexicon::{extract_nouns, Lexicon, NounFilter};

/// What the agent currently sees and carries.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub description: String,
    pub description_words: HashSet<String>,
    pub description_nouns: Vec<String>,
    /// Head noun (last word) of each carried item.
    pub inventory_nouns: Vec<String>,
    pub inventory_words: HashSet<String>,
}

impl Scene {
    pub fn new(description: &str, inventory: &[String], filter: &NounFilter) -> Self {
        let inventory_words: HashSet<String> = inventory
            .iter()
            .flat_map(|item| crate::text::words(item).collect::<Vec<_>>())
            .collect();
        let mut inventory_nouns = Vec::new();
        for item in inventory {
            if let Some(head) = item_noun(item) {
                if !inventory_nouns.contains(&head) {
                    inventory_nouns.push(head);
                }
            }
        }
        Scene {
            description: description.to_string(),
            description_words: crate::text::words(description).collect(),
            description_nouns: extract_nouns(description, filter),
            inventory_nouns,
            inventory_words,
        }
    }

    /// Description nouns followed by inventory nouns not already listed.
    pub fn nouns(&self) -> Vec<String> {
        let mut all = self.description_nouns.clone();
        for n in &self.inventory_nouns {
            if !all.contains(n) {
                all.push(n.clone());
            }
        }
        all
    }
}

/// The word an item is referred to by: the last word of its name.
pub fn item_noun(item: &str) -> Option<String> {
    crate::text::words(item).last()
}

/// Synonyms per scene noun.
#[derive(Debug, Clone, Default)]
pub struct SynonymMap {
    by_noun: BTreeMap<String, Vec<(String, f64)>>,
}

impl SynonymMap {
    pub fn build(nouns: &[String], lex: &Lexicon, n: usize) -> Self {
        SynonymMap {
            by_noun: nouns
                .iter()
                .map(|w| (w.clone(), lex.synonyms(w, n)))
                .collect(),
        }
    }

    pub fn from_lists(lists: impl IntoIterator<Item = (String, Vec<(String, f64)>)>) -> Self {
        SynonymMap {
            by_noun: lists.into_iter().collect(),
        }
    }

    pub fn get(&self, noun: &str) -> &[(String, f64)] {
        self.by_noun.get(noun).map_or(&[], Vec::as_slice)
    }

    pub fn words(&self) -> HashSet<&str> {
        self.by_noun
            .values()
            .flatten()
            .map(|(w, _)| w.as_str())
            .collect()
    }
}

/// A pattern word replaced by the scene word it stands for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substitution {
    pub synonym: String,
    pub original: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCommand {
    pub text: String,
    pub score: f64,
    pub factors: Factors,
    /// Index of the originating pattern in the database.
    pub pattern: usize,
    pub battle: bool,
    pub substitutions: Vec<Substitution>,
    /// Scene nouns that ended up in the command.
    pub bound_nouns: Vec<String>,
    /// Whether the pattern's direct object is a description noun.
    pub targets_description: bool,
}

impl CandidateCommand {
    pub fn recomputed_score(&self, params: &ScoringParams) -> f64 {
        self.factors.score(&params.weights)
    }
}

/// Replaces every token that is a key of `binding` by its value.
pub fn instantiate(pattern: &CommandPattern, binding: &HashMap<String, String>) -> String {
    pattern
        .tokens
        .iter()
        .map(|t| binding.get(t).unwrap_or(t).as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Builds scored candidates from every pattern that mentions one of `keys`
/// (or a synonym of one). Other noun slots of a reached pattern are bound to
/// scene nouns where possible. Results are deduplicated by text, keeping the
/// best-scoring instantiation, and sorted by descending score.
pub fn generate_candidates(
    scene: &Scene,
    keys: &[String],
    synonyms: &SynonymMap,
    db: &CommandDb,
    params: &ScoringParams,
    lex: &Lexicon,
    keep: impl Fn(&CommandPattern) -> bool,
) -> Vec<CandidateCommand> {
    // pattern word -> (scene noun, similarity); scene nouns map to themselves
    let scene_nouns = scene.nouns();
    let mut stands_for: HashMap<&str, (&str, f64)> = scene_nouns
        .iter()
        .map(|n| (n.as_str(), (n.as_str(), 1.0)))
        .collect();
    for noun in &scene_nouns {
        for (syn, sim) in synonyms.get(noun) {
            if scene_nouns.contains(syn) {
                continue;
            }
            let better = stands_for.get(syn.as_str()).is_none_or(|(_, s)| sim > s);
            if better {
                stands_for.insert(syn.as_str(), (noun.as_str(), *sim));
            }
        }
    }

    let mut reached = BTreeSet::new();
    for key in keys {
        reached.extend(db.lookup(key).iter().copied());
        for (syn, _) in synonyms.get(key) {
            reached.extend(db.lookup(syn).iter().copied());
        }
    }

    let synonym_words = synonyms.words();
    let description_nouns: HashSet<&str> = scene.description_nouns.iter().map(String::as_str).collect();
    let mut best: HashMap<String, CandidateCommand> = HashMap::new();

    for pid in reached {
        let pattern = db.pattern(pid);
        if !keep(pattern) {
            continue;
        }
        let Some(candidate) = bind(pid, pattern, scene, keys, &stands_for, &synonym_words, &description_nouns, params, lex)
        else {
            continue;
        };
        match best.get(&candidate.text) {
            Some(existing) if existing.score >= candidate.score => {}
            _ => {
                best.insert(candidate.text.clone(), candidate);
            }
        }
    }

    let mut out: Vec<CandidateCommand> = best.into_values().collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.text.cmp(&b.text)));
    out
}

#[allow(clippy::too_many_arguments)]
fn bind(
    pid: usize,
    pattern: &CommandPattern,
    scene: &Scene,
    keys: &[String],
    stands_for: &HashMap<&str, (&str, f64)>,
    synonym_words: &HashSet<&str>,
    description_nouns: &HashSet<&str>,
    params: &ScoringParams,
    lex: &Lexicon,
) -> Option<CandidateCommand> {
    // Exact matches first, then the closest synonyms; one slot per scene noun.
    let mut options: Vec<(usize, &str, f64)> = pattern
        .slots()
        .iter()
        .filter_map(|&i| {
            stands_for
                .get(pattern.tokens[i].as_str())
                .map(|&(orig, sim)| (i, orig, sim))
        })
        .collect();
    options.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));

    let mut used: HashSet<&str> = HashSet::new();
    let mut binding = HashMap::new();
    let mut substitutions = Vec::new();
    let mut bound_nouns = Vec::new();
    for (i, orig, sim) in options {
        let token = pattern.tokens[i].as_str();
        if used.contains(orig) || binding.contains_key(token) {
            continue;
        }
        used.insert(orig);
        bound_nouns.push(orig.to_string());
        if token != orig {
            binding.insert(token.to_string(), orig.to_string());
            substitutions.push(Substitution {
                synonym: token.to_string(),
                original: orig.to_string(),
                similarity: sim,
            });
        }
    }
    if !bound_nouns.iter().any(|n| keys.contains(n)) {
        return None;
    }

    let text = instantiate(pattern, &binding);
    let final_tokens: Vec<&str> = text.split(' ').collect();
    let distinct_words: BTreeSet<&str> = final_tokens.iter().copied().collect();
    let final_slots: BTreeSet<&str> = pattern.slots().iter().map(|&i| final_tokens[i]).collect();

    let similarity: f64 = substitutions.iter().map(|s| s.similarity).product();
    let uniqueness = lex.frequencies.phrase_uniqueness(distinct_words.iter().copied());
    let importance: f64 = bound_nouns
        .iter()
        .filter(|n| description_nouns.contains(n.as_str()))
        .map(|n| lex.importance(n, &scene.description))
        .product();
    let overlap = distinct_words
        .iter()
        .filter(|w| scene.description_words.contains(**w))
        .count() as u32;
    let unsupported = final_slots
        .iter()
        .filter(|w| {
            !scene.description_words.contains(**w)
                && !scene.inventory_words.contains(**w)
                && !synonym_words.contains(**w)
        })
        .count() as u32;

    let factors = Factors::new(
        pattern.count as f64,
        similarity,
        uniqueness,
        importance,
        overlap,
        unsupported,
        params,
    );
    let targets_description = pattern
        .slots()
        .first()
        .is_some_and(|&i| description_nouns.contains(final_tokens[i]));
    Some(CandidateCommand {
        text,
        score: factors.score(&params.weights),
        factors,
        pattern: pid,
        battle: pattern.battle,
        substitutions,
        bound_nouns,
        targets_description,
    })
}
