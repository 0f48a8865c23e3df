//! The playing agent.
//!
//! Each turn the generators are asked in a fixed order (battle, gather,
//! inventory, general, movement) and the first one with something to offer
//! decides the command. After the game answers, [`Agent::observe`] updates
//! blacklists, inventory, the map and the trajectories.

mod config;
mod episode;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::AgentConfig;
pub use episode::{Outcome, TurnRecord};

use crate::commands::{generate_candidates, roulette_index, CandidateCommand, CommandDb, Scene, ScoringParams, SynonymMap};
use crate::env::Percept;
use crate::lexicon::{extract_nouns, Lexicon, NounFilter};
use crate::mapper::{label_of, MapGraph};
use crate::text::sentences;
use crate::Result;

/// Command used when no generator has anything to offer.
pub const FALLBACK_COMMAND: &str = "look";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Battle,
    Gather,
    Inventory,
    General,
    Movement,
    Fallback,
    Replay,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Battle => "battle",
            Generator::Gather => "gather",
            Generator::Inventory => "inventory",
            Generator::General => "general",
            Generator::Movement => "movement",
            Generator::Fallback => "fallback",
            Generator::Replay => "replay",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Normal,
    Battle {
        command: String,
        /// Repeats after the first blow whose response changed.
        successes: usize,
        /// Unchanged responses in a row.
        failures: usize,
    },
    /// Replaying the best trajectory.
    Final,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Normal => "normal",
            Mode::Battle { .. } => "battle",
            Mode::Final => "final",
        }
    }
}

/// The commands of one life and the score after each.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<(String, i64)>,
    pub final_score: i64,
    pub died: bool,
    /// Which life this came from, counting from 1.
    pub life: u32,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn commands(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|(c, _)| c.as_str())
    }
}

/// The last commands of a life that ended in death. An anchored suffix
/// covers the whole life and only matches from the start of a life.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeathSuffix {
    pub commands: Vec<String>,
    pub anchored: bool,
}

#[derive(Debug, Clone, Default)]
struct AreaState {
    gather_tried: BTreeSet<String>,
    general_used: usize,
}

#[derive(Debug, Clone)]
pub struct AgentState {
    pub mode: Mode,
    pub inventory: Vec<String>,
    /// Failed commands by area label.
    pub blacklists: BTreeMap<String, BTreeSet<String>>,
    pub trajectory: Trajectory,
    pub best: Trajectory,
    pub death_suffixes: Vec<DeathSuffix>,
    pub map: Option<MapGraph>,
    /// Sentences known to describe the current area.
    pub area_description: String,
    /// Text the next candidates are built from.
    pub scene_description: String,
    areas: HashMap<String, AreaState>,
    item_queue: VecDeque<String>,
}

/// What the agent chose and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub command: String,
    pub generator: Generator,
}

/// What [`Agent::observe`] concluded about the last command.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Observation {
    pub failed: bool,
    pub blacklisted: bool,
    pub moved: bool,
    pub inventory_changed: bool,
}

pub struct Agent {
    config: AgentConfig,
    scoring: ScoringParams,
    lexicon: Arc<Lexicon>,
    db: Arc<CommandDb>,
    filter: NounFilter,
    rng: ChaCha8Rng,
    state: AgentState,
}

impl Agent {
    pub fn new(config: AgentConfig, lexicon: Arc<Lexicon>, db: Arc<CommandDb>) -> Result<Self> {
        config.validate()?;
        let filter = NounFilter::new(&lexicon.words, db.verbs());
        Ok(Agent {
            scoring: config.scoring(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            lexicon,
            db,
            filter,
            state: AgentState {
                mode: Mode::Normal,
                inventory: Vec::new(),
                blacklists: BTreeMap::new(),
                trajectory: Trajectory::default(),
                best: Trajectory::default(),
                death_suffixes: Vec::new(),
                map: None,
                area_description: String::new(),
                scene_description: String::new(),
                areas: HashMap::new(),
                item_queue: VecDeque::new(),
            },
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn map(&self) -> Option<&MapGraph> {
        self.state.map.as_ref()
    }

    /// Label of the area the agent believes it is in.
    pub fn current_label(&self) -> String {
        label_of(&self.state.area_description)
    }

    pub fn is_blacklisted(&self, label: &str, command: &str) -> bool {
        self.state.blacklists.get(label).is_some_and(|b| b.contains(command))
    }

    /// Starts a new life from `opening`. Map, blacklists, death suffixes and
    /// the best trajectory carry over; everything else starts fresh.
    pub fn begin_life(&mut self, opening: &Percept, inventory: Vec<String>) {
        let life = self.state.trajectory.life + 1;
        self.state.trajectory = Trajectory {
            life,
            final_score: opening.score,
            ..Trajectory::default()
        };
        self.state.mode = Mode::Normal;
        self.state.inventory = inventory;
        self.state.areas.clear();
        self.state.item_queue.clear();
        self.state.area_description = opening.description.clone();
        self.state.scene_description = opening.description.clone();
        if self.config.use_map {
            match &mut self.state.map {
                Some(map) => map.reset_to_start(),
                None => {
                    self.state.map = Some(MapGraph::with_moves(&opening.description, self.config.move_words.clone()))
                }
            }
        }
    }

    /// The move word `command` stands for, if it is a movement command.
    pub fn move_word(&self, command: &str) -> Option<String> {
        let words: Vec<String> = crate::text::words(command).collect();
        let word = match words.as_slice() {
            [w] => w,
            [go, w] if matches!(go.as_str(), "go" | "walk" | "run") => w,
            _ => return None,
        };
        self.config.move_words.iter().any(|m| m == word).then(|| word.clone())
    }

    /// Whether the inventory should be polled after `command`.
    pub fn wants_inventory_check(&self, command: &str) -> bool {
        crate::text::words(command)
            .next()
            .is_some_and(|v| self.config.acquisition_verbs.contains(&v))
    }

    fn recreates_death_suffix(&self, command: &str) -> bool {
        let life: Vec<&str> = self.state.trajectory.commands().collect();
        self.state.death_suffixes.iter().any(|s| {
            let Some((last, head)) = s.commands.split_last() else {
                return false;
            };
            if last != command || life.len() < head.len() || (s.anchored && life.len() != head.len()) {
                return false;
            }
            life[life.len() - head.len()..].iter().zip(head).all(|(a, b)| a == b)
        })
    }

    /// Drops items that would repeat a deadly ending, unless that leaves nothing.
    fn avoid_death<T>(&self, items: Vec<T>, command: impl Fn(&T) -> &str) -> Vec<T> {
        if self.state.death_suffixes.is_empty() {
            return items;
        }
        let (safe, risky): (Vec<T>, Vec<T>) = items.into_iter().partition(|i| !self.recreates_death_suffix(command(i)));
        if safe.is_empty() {
            risky
        } else {
            safe
        }
    }

    fn scene(&self, description: &str) -> Scene {
        Scene::new(description, &self.state.inventory, &self.filter)
    }

    fn candidates(&self, scene: &Scene, keys: &[String]) -> Vec<CandidateCommand> {
        let synonyms = SynonymMap::build(&scene.nouns(), &self.lexicon, self.scoring.synonyms);
        generate_candidates(scene, keys, &synonyms, &self.db, &self.scoring, &self.lexicon, |_| true)
    }

    /// Picks the next command.
    pub fn next_command(&mut self) -> Decision {
        let label = self.current_label();
        let found = self
            .battle_generator()
            .map(|c| (c, Generator::Battle))
            .or_else(|| self.gather_generator(&label).map(|c| (c, Generator::Gather)))
            .or_else(|| self.inventory_generator(&label).map(|c| (c, Generator::Inventory)))
            .or_else(|| self.general_generator(&label, true).map(|c| (c, Generator::General)))
            .or_else(|| self.movement_generator(&label).map(|c| (c, Generator::Movement)))
            .or_else(|| self.general_generator(&label, false).map(|c| (c, Generator::General)));
        let (command, generator) = found.unwrap_or_else(|| (FALLBACK_COMMAND.to_string(), Generator::Fallback));
        Decision { command, generator }
    }

    /// The active fight command while battle mode lasts.
    pub fn battle_generator(&mut self) -> Option<String> {
        let Mode::Battle { command, .. } = &self.state.mode else {
            return None;
        };
        let command = command.clone();
        if self.recreates_death_suffix(&command) {
            self.state.mode = Mode::Normal;
            return None;
        }
        Some(command)
    }

    /// `take <noun>` for the most promising nouns of an area, once per noun
    /// and life.
    pub fn gather_generator(&mut self, label: &str) -> Option<String> {
        if self.config.gather_limit == 0 {
            return None;
        }
        let mut nouns = extract_nouns(&self.state.area_description, &self.filter);
        let desc = &self.state.area_description;
        let weight = |n: &str| self.lexicon.importance(n, desc) * self.lexicon.uniqueness(n);
        nouns.sort_by(|a, b| weight(b).total_cmp(&weight(a)));
        nouns.truncate(self.config.gather_limit);

        let carried: Vec<String> = self.scene("").inventory_nouns;
        let area = self.state.areas.get(label);
        let options: Vec<String> = nouns
            .into_iter()
            .filter(|n| !carried.contains(n))
            .filter(|n| area.is_none_or(|a| !a.gather_tried.contains(n)))
            .filter(|n| !self.is_blacklisted(label, &format!("take {n}")))
            .collect();
        let options: Vec<(String, String)> = options.into_iter().map(|n| (format!("take {n}"), n)).collect();
        let (command, noun) = self.avoid_death(options, |(c, _)| c.as_str()).into_iter().next()?;
        self.state
            .areas
            .entry(label.to_string())
            .or_default()
            .gather_tried
            .insert(noun);
        Some(command)
    }

    /// The best commands for a freshly acquired item, in score order.
    pub fn inventory_generator(&mut self, label: &str) -> Option<String> {
        while let Some(command) = self.state.item_queue.pop_front() {
            if self.is_blacklisted(label, &command) {
                continue;
            }
            if self.recreates_death_suffix(&command) && !self.state.item_queue.is_empty() {
                continue;
            }
            return Some(command);
        }
        None
    }

    /// Roulette choice over all candidates for the current scene. With
    /// `budgeted`, at most `actions_before_move` picks per area visit.
    pub fn general_generator(&mut self, label: &str, budgeted: bool) -> Option<String> {
        if budgeted
            && self
                .state
                .areas
                .get(label)
                .is_some_and(|a| a.general_used >= self.config.actions_before_move)
        {
            return None;
        }
        let scene = self.scene(&self.state.scene_description);
        let mut cands = self.candidates(&scene, &scene.nouns());
        cands.retain(|c| !self.is_blacklisted(label, &c.text));
        if let Some(map) = &mut self.state.map {
            map.set_command_score(cands.iter().map(|c| c.score).sum());
        }
        let cands = self.avoid_death(cands, |c| c.text.as_str());
        if cands.is_empty() {
            return None;
        }
        let weights: Vec<f64> = cands
            .iter()
            .map(|c| {
                if self.config.use_battle && c.battle && c.targets_description {
                    c.score * self.config.battle_bias
                } else {
                    c.score
                }
            })
            .collect();
        let chosen = &cands[roulette_index(&weights, &mut self.rng)?];
        if budgeted {
            self.state.areas.entry(label.to_string()).or_default().general_used += 1;
        }
        if self.config.use_battle && chosen.battle {
            self.state.mode = Mode::Battle {
                command: chosen.text.clone(),
                successes: 0,
                failures: 0,
            };
        }
        Some(chosen.text.clone())
    }

    /// An untried direction, else the first step towards the most promising
    /// known area. Without a map: any direction not blacklisted here.
    pub fn movement_generator(&mut self, label: &str) -> Option<String> {
        let options: Vec<String> = match &self.state.map {
            Some(map) => map.current_node().untested_moves.iter().cloned().collect(),
            None => self
                .config
                .move_words
                .iter()
                .filter(|m| !self.is_blacklisted(label, m))
                .cloned()
                .collect(),
        };
        let options = self.avoid_death(options, |m| m.as_str());
        if !options.is_empty() {
            let i = self.rng.random_range(0..options.len());
            return Some(options[i].clone());
        }
        let map = self.state.map.as_mut()?;
        match map.choose_destination_excluding(self.config.c_mv, Some(map.current())) {
            Some(dest) => dest.path.into_iter().next(),
            None => {
                // Everything looks explored, but merged look-alike areas
                // can hide exits: wander until something new turns up.
                let all = self.avoid_death(self.config.move_words.clone(), |m| m.as_str());
                (!all.is_empty()).then(|| all[self.rng.random_range(0..all.len())].clone())
            }
        }
    }

    /// Updates memory after `decision` turned `prev` into `new`. `inventory`
    /// is the freshly polled inventory, when it was polled.
    pub fn observe(&mut self, prev: &Percept, decision: &Decision, new: &Percept, inventory: Option<Vec<String>>) -> Observation {
        let command = decision.command.as_str();
        let label = self.current_label();
        let move_word = self.move_word(command);

        let inventory_changed = inventory.as_ref().is_some_and(|inv| *inv != self.state.inventory);
        let score_changed = new.score != prev.score;
        let area_kept = self.area_kept(&new.description) || new.description == prev.description;
        let failed = !score_changed && !inventory_changed && !new.dead && !new.won && area_kept;
        let refused = failed || self.looks_like_refused_move(&new.description);
        let moved = move_word.is_some() && !refused;

        self.state.trajectory.steps.push((command.to_string(), new.score));
        self.state.trajectory.final_score = new.score;
        self.state.trajectory.died = new.dead;
        if new.score > self.state.best.final_score {
            self.state.best = self.state.trajectory.clone();
        }

        let in_battle = matches!(&self.state.mode, Mode::Battle { command: c, .. } if c == command);
        let mut blacklisted = false;
        let mut battle_failed = false;
        if in_battle {
            battle_failed = self.update_battle(prev, new, decision.generator == Generator::Battle);
        }
        let exempt = (in_battle && !battle_failed)
            || decision.generator == Generator::Fallback
            || (move_word.is_some() && self.state.map.is_some());
        if (failed || battle_failed) && !exempt {
            blacklisted = self
                .state
                .blacklists
                .entry(label.clone())
                .or_default()
                .insert(command.to_string());
        }

        if let Some(map) = &mut self.state.map {
            map.note_command_tried();
            if let Some(mv) = &move_word {
                if moved {
                    let from = map.current();
                    let to = map.record_transition(mv, &new.description);
                    let revisit = map.has_label(&label_of(&new.description), to);
                    if self.config.minimize_on_revisit && revisit && to != from {
                        map.minimize_in_place();
                    }
                } else {
                    map.mark_move_failed(mv);
                }
            }
        }

        if moved {
            self.arrive(&new.description);
        } else if !failed {
            self.absorb(&new.description);
        }

        if let Some(inv) = inventory {
            if inventory_changed {
                let gained: Vec<String> = inv.iter().filter(|i| !self.state.inventory.contains(i)).cloned().collect();
                self.state.inventory = inv;
                self.state.blacklists.clear();
                blacklisted = false;
                self.prime_item_queue(&gained);
            }
        }
        if (inventory_changed || new.score > prev.score) && !moved {
            if let Some(map) = &mut self.state.map {
                map.reopen_moves();
            }
        }

        Observation {
            failed,
            blacklisted,
            moved,
            inventory_changed,
        }
    }

    /// Battle bookkeeping after the active fight command. Returns true when
    /// the fight is given up as failed.
    fn update_battle(&mut self, prev: &Percept, new: &Percept, repeat: bool) -> bool {
        let Mode::Battle { successes, failures, .. } = &mut self.state.mode else {
            return false;
        };
        if new.description == prev.description {
            *failures += 1;
        } else {
            *failures = 0;
            if repeat {
                *successes += 1;
            }
        }
        let gave_up = *failures >= self.config.battle_max_failures.max(1);
        if gave_up || *successes >= self.config.battle_repeat || new.is_terminal() {
            self.state.mode = Mode::Normal;
        }
        gave_up
    }

    fn looks_like_refused_move(&self, description: &str) -> bool {
        let lower = description.to_lowercase();
        let tail = lower.strip_prefix(&self.state.area_description.to_lowercase()).unwrap_or(&lower);
        self.config.move_failure_patterns.iter().any(|p| tail.contains(p.as_str()))
    }

    /// Whether `description` still opens with the known area sentences.
    fn area_kept(&self, description: &str) -> bool {
        let area = sentences(&self.state.area_description);
        !area.is_empty() && sentences(description).starts_with(&area)
    }

    fn arrive(&mut self, description: &str) {
        self.state.area_description = description.to_string();
        self.state.scene_description = description.to_string();
        self.state.item_queue.clear();
        if matches!(self.state.mode, Mode::Battle { .. }) {
            self.state.mode = Mode::Normal;
        }
        let label = label_of(description);
        self.state.areas.entry(label).or_default().general_used = 0;
    }

    /// Folds a response that did something into the scene. When the area
    /// text itself changed, the still-shared leading sentences stay the
    /// area description.
    fn absorb(&mut self, description: &str) {
        if self.area_kept(description) {
            self.state.scene_description = description.to_string();
            return;
        }
        let area = sentences(&self.state.area_description);
        let new = sentences(description);
        if !area.is_empty() && area.first() == new.first() {
            let shared = area.iter().zip(&new).take_while(|(a, b)| a == b).count();
            self.state.area_description = area[..shared].join(" ");
            self.state.scene_description = description.to_string();
        } else {
            self.state.scene_description = format!("{} {}", self.state.area_description, description);
        }
    }

    fn prime_item_queue(&mut self, gained: &[String]) {
        let scene = self.scene(&self.state.scene_description);
        for item in gained {
            let Some(noun) = crate::commands::item_noun(item) else {
                continue;
            };
            let cands = self.candidates(&scene, std::slice::from_ref(&noun));
            let picked: Vec<String> = cands
                .into_iter()
                .filter(|c| !(self.wants_inventory_check(&c.text) && c.bound_nouns.contains(&noun)))
                .filter(|c| !self.state.item_queue.contains(&c.text))
                .take(self.config.item_command_limit)
                .map(|c| c.text)
                .collect();
            self.state.item_queue.extend(picked);
        }
    }

    /// Remembers how the current life ended.
    pub fn on_death(&mut self) {
        let life: Vec<String> = self.state.trajectory.commands().map(str::to_string).collect();
        if life.is_empty() {
            return;
        }
        let len = self.config.suffix_len();
        let start = life.len().saturating_sub(len);
        let suffix = DeathSuffix {
            commands: life[start..].to_vec(),
            anchored: life.len() <= len,
        };
        if !self.state.death_suffixes.contains(&suffix) {
            self.state.death_suffixes.push(suffix);
        }
        if let (Some(map), Some((last, _))) = (&mut self.state.map, self.state.trajectory.steps.last()) {
            if self.config.move_words.iter().any(|m| m == last) {
                map.mark_exhausted();
            }
        }
        self.state.mode = Mode::Normal;
    }
}
