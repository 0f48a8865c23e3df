use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::{FactorWeights, ScoringParams};
use crate::error::{read_file, Error, Result};

/// Every tunable of the agent. The defaults are hand-picked for the bundled
/// data and worlds, not fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub synonyms: usize,
    pub overlap_base: f64,
    pub unsupported_base: f64,
    pub weights: FactorWeights,
    /// Nouns to try taking in a newly seen area.
    pub gather_limit: usize,
    /// Best commands executed right after an item is acquired.
    pub item_command_limit: usize,
    /// General commands tried in an area before moving on.
    pub actions_before_move: usize,
    /// Repeats of a fight command once battle mode starts.
    pub battle_repeat: usize,
    /// Unchanged responses in a row that end battle mode.
    pub battle_max_failures: usize,
    /// Multiplier on battle candidates aimed at something in the description.
    pub battle_bias: f64,
    pub c_mv: f64,
    pub seed: u64,
    pub use_map: bool,
    pub use_battle: bool,
    /// Run map minimization after entering an area whose label is already mapped.
    pub minimize_on_revisit: bool,
    /// Commands remembered from the end of a life that ended in death.
    /// `None` means `battle_repeat + 2`.
    pub death_suffix_len: Option<usize>,
    /// Slack kept for the final replay.
    pub finalize_margin: usize,
    pub acquisition_verbs: Vec<String>,
    /// Lowercase fragments that mark a refused move.
    pub move_failure_patterns: Vec<String>,
    pub move_words: Vec<String>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        let scoring = ScoringParams::default();
        AgentConfig {
            synonyms: scoring.synonyms,
            overlap_base: scoring.overlap_base,
            unsupported_base: scoring.unsupported_base,
            weights: scoring.weights,
            gather_limit: 3,
            item_command_limit: 3,
            actions_before_move: 6,
            battle_repeat: 3,
            battle_max_failures: 2,
            battle_bias: 10.0,
            c_mv: 1.0,
            seed: 0,
            use_map: true,
            use_battle: true,
            minimize_on_revisit: true,
            death_suffix_len: None,
            finalize_margin: 5,
            acquisition_verbs: strings(&["take", "get", "pick", "grab", "buy", "steal"]),
            move_failure_patterns: strings(&[
                "can't go that way",
                "cannot go that way",
                "can't go there",
                "blocks your way",
                "no exit",
                "you can't go",
            ]),
            move_words: strings(&crate::mapper::MOVE_WORDS),
        }
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_lowercase())
        .filter(|s| !s.is_empty())
        .collect()
}

impl AgentConfig {
    pub fn scoring(&self) -> ScoringParams {
        ScoringParams {
            synonyms: self.synonyms,
            overlap_base: self.overlap_base,
            unsupported_base: self.unsupported_base,
            weights: self.weights,
        }
    }

    pub fn suffix_len(&self) -> usize {
        self.death_suffix_len.unwrap_or(self.battle_repeat + 2).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.scoring().validate()?;
        if !(self.c_mv >= 0.0 && self.c_mv.is_finite()) {
            return Err(Error::Usage(format!("c_mv must be a non-negative number, got {}", self.c_mv)));
        }
        if !(self.battle_bias > 0.0 && self.battle_bias.is_finite()) {
            return Err(Error::Usage(format!("battle_bias must be positive, got {}", self.battle_bias)));
        }
        if self.move_words.is_empty() {
            return Err(Error::Usage("move_words must not be empty".into()));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_file(path)?;
        let mut config = AgentConfig::default();
        config.apply(&text, &path.display().to_string())?;
        Ok(config)
    }

    /// Applies `key = value` lines on top of the current values. Blank lines
    /// and `#` comments are skipped.
    pub fn apply(&mut self, text: &str, source_name: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::format(source_name, i + 1, format!("expected `key = value`, got `{line}`")));
            };
            self.set(key.trim(), value.trim())
                .map_err(|message| Error::format(source_name, i + 1, message))?;
        }
        self.validate()
    }

    /// Sets one field by name.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value.parse().map_err(|_| format!("bad value `{value}` for `{key}`"))
        }
        fn flag(key: &str, value: &str) -> std::result::Result<bool, String> {
            match value.to_ascii_lowercase().as_str() {
                "true" | "on" | "yes" | "1" => Ok(true),
                "false" | "off" | "no" | "0" => Ok(false),
                _ => Err(format!("bad value `{value}` for `{key}`")),
            }
        }
        match key {
            "synonyms" | "n" => self.synonyms = num(key, value)?,
            "overlap_base" | "b" => self.overlap_base = num(key, value)?,
            "unsupported_base" | "p" => self.unsupported_base = num(key, value)?,
            "weight_popularity" => self.weights.popularity = num(key, value)?,
            "weight_similarity" => self.weights.similarity = num(key, value)?,
            "weight_uniqueness" => self.weights.uniqueness = num(key, value)?,
            "weight_importance" => self.weights.importance = num(key, value)?,
            "gather_limit" => self.gather_limit = num(key, value)?,
            "item_command_limit" => self.item_command_limit = num(key, value)?,
            "actions_before_move" => self.actions_before_move = num(key, value)?,
            "battle_repeat" => self.battle_repeat = num(key, value)?,
            "battle_max_failures" => self.battle_max_failures = num(key, value)?,
            "battle_bias" => self.battle_bias = num(key, value)?,
            "c_mv" => self.c_mv = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "map" | "use_map" => self.use_map = flag(key, value)?,
            "battle" | "use_battle" => self.use_battle = flag(key, value)?,
            "minimize_on_revisit" => self.minimize_on_revisit = flag(key, value)?,
            "death_suffix_len" => {
                self.death_suffix_len = if value.eq_ignore_ascii_case("auto") { None } else { Some(num(key, value)?) }
            }
            "finalize_margin" => self.finalize_margin = num(key, value)?,
            "acquisition_verbs" => self.acquisition_verbs = list(value),
            "move_failure_patterns" => self.move_failure_patterns = list(value),
            "move_words" => self.move_words = list(value),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// The config as `key = value` lines that [`AgentConfig::apply`] reads back.
    pub fn to_text(&self) -> String {
        let suffix = self.death_suffix_len.map_or("auto".to_string(), |n| n.to_string());
        [
            format!("synonyms = {}", self.synonyms),
            format!("overlap_base = {}", self.overlap_base),
            format!("unsupported_base = {}", self.unsupported_base),
            format!("weight_popularity = {}", self.weights.popularity),
            format!("weight_similarity = {}", self.weights.similarity),
            format!("weight_uniqueness = {}", self.weights.uniqueness),
            format!("weight_importance = {}", self.weights.importance),
            format!("gather_limit = {}", self.gather_limit),
            format!("item_command_limit = {}", self.item_command_limit),
            format!("actions_before_move = {}", self.actions_before_move),
            format!("battle_repeat = {}", self.battle_repeat),
            format!("battle_max_failures = {}", self.battle_max_failures),
            format!("battle_bias = {}", self.battle_bias),
            format!("c_mv = {}", self.c_mv),
            format!("seed = {}", self.seed),
            format!("map = {}", self.use_map),
            format!("battle = {}", self.use_battle),
            format!("minimize_on_revisit = {}", self.minimize_on_revisit),
            format!("death_suffix_len = {suffix}"),
            format!("finalize_margin = {}", self.finalize_margin),
            format!("acquisition_verbs = {}", self.acquisition_verbs.join(", ")),
            format!("move_failure_patterns = {}", self.move_failure_patterns.join(", ")),
            format!("move_words = {}", self.move_words.join(", ")),
        ]
        .join("\n")
            + "\n"
    }
}
