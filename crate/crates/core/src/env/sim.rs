//! Deterministic simulator for `.world` adventures.
//!
//! Grammar: `verb [noun [preposition noun]]`, case-insensitive, articles
//! ignored. Every response is the current room rendering followed by a short
//! message, except successful moves which print only the new room.

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::world::WorldSpec;
use super::{Backend, Environment, Percept, SessionHandle};
use crate::error::{Error, Result};
use crate::mapper::MOVE_WORDS;

/// Reply to anything outside the simulator's grammar.
pub const REFUSAL: &str = "I don't understand that.";
const NOT_HERE: &str = "You can't see any such thing.";
const NO_EXIT: &str = "You can't go that way.";
const DIED: &str = "*** You have died ***";
const WON: &str = "*** You have won ***";

const TAKE_VERBS: [&str; 4] = ["take", "get", "grab", "pick"];
const ATTACK_VERBS: [&str; 8] = ["attack", "kill", "fight", "shoot", "punch", "hit", "stab", "strike"];
const EXAMINE_VERBS: [&str; 4] = ["examine", "x", "search", "read"];
const ARTICLES: [&str; 4] = ["the", "a", "an", "some"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Location {
    Room(usize),
    Carried,
}

#[derive(Debug, Clone)]
struct SimState {
    room: usize,
    objects: Vec<Location>,
    object_scored: Vec<bool>,
    enemy_hp: Vec<u32>,
    visited: Vec<bool>,
    /// Indices into `world.objects`, in acquisition order.
    inventory: Vec<usize>,
    score: i64,
    moves: u32,
    dead: bool,
    won: bool,
    rng: ChaCha8Rng,
}

pub struct Simulator {
    world: Arc<WorldSpec>,
    handle: SessionHandle,
    state: SimState,
    last: Percept,
}

impl Simulator {
    /// Opens a session on `world` and returns it with the opening percept.
    pub fn start(world: impl Into<Arc<WorldSpec>>) -> (Self, Percept) {
        let world = world.into();
        let state = Self::initial_state(&world);
        let mut sim = Simulator {
            world,
            handle: SessionHandle::new(Backend::Simulator),
            state,
            last: placeholder(),
        };
        let opening = sim.percept(sim.render_room(), None);
        sim.last = opening.clone();
        (sim, opening)
    }

    pub fn open(path: impl AsRef<std::path::Path>) -> Result<(Self, Percept)> {
        Ok(Self::start(WorldSpec::load(path)?))
    }

    pub fn world(&self) -> &WorldSpec {
        &self.world
    }

    fn initial_state(world: &WorldSpec) -> SimState {
        let objects: Vec<Location> = world
            .objects
            .iter()
            .map(|o| match &o.location {
                Some(id) => Location::Room(world.room_index(id).expect("validated at load")),
                None => Location::Carried,
            })
            .collect();
        let inventory = (0..objects.len())
            .filter(|&i| objects[i] == Location::Carried)
            .collect();
        let mut visited = vec![false; world.rooms.len()];
        visited[0] = true;
        SimState {
            room: 0,
            object_scored: vec![false; objects.len()],
            objects,
            enemy_hp: world.enemies.iter().map(|e| e.hp).collect(),
            visited,
            inventory,
            score: 0,
            moves: 0,
            dead: false,
            won: false,
            rng: ChaCha8Rng::seed_from_u64(world.seed),
        }
    }

    fn percept(&self, description: String, inventory_listing: Option<String>) -> Percept {
        Percept {
            description,
            score: self.state.score,
            moves: self.state.moves,
            dead: self.state.dead,
            won: self.state.won,
            inventory_listing,
        }
    }

    fn room_id(&self) -> &str {
        &self.world.rooms[self.state.room].id
    }

    fn render_room(&self) -> String {
        let room = &self.world.rooms[self.state.room];
        let mut out = room.label.clone();
        if !room.body.is_empty() {
            out.push(' ');
            out.push_str(&room.body);
        }
        let static_words: Vec<String> = crate::text::words(&out).collect();
        let mentioned = |name: &str| static_words.iter().any(|w| w == name);
        for (i, obj) in self.world.objects.iter().enumerate() {
            if self.state.objects[i] == Location::Room(self.state.room) && !mentioned(&obj.name) {
                out.push_str(&format!(" There is a {} here.", obj.name));
            }
        }
        for (i, enemy) in self.world.enemies.iter().enumerate() {
            if enemy.location != room.id {
                continue;
            }
            if self.state.enemy_hp[i] == 0 {
                out.push_str(&format!(" The {} lies defeated.", enemy.name));
            } else if !mentioned(&enemy.name) {
                out.push_str(&format!(" A {} is here.", enemy.name));
            }
        }
        out
    }

    fn inventory_names(&self) -> Vec<String> {
        self.state
            .inventory
            .iter()
            .map(|&i| self.world.objects[i].name.clone())
            .collect()
    }

    fn inventory_listing(&self) -> String {
        let names = self.inventory_names();
        if names.is_empty() {
            "You are empty-handed.".to_string()
        } else {
            format!("You are carrying: {}.", names.join(", "))
        }
    }

    fn object_here(&self, name: &str) -> Option<usize> {
        self.world
            .objects
            .iter()
            .enumerate()
            .find(|(i, o)| o.name == name && self.state.objects[*i] == Location::Room(self.state.room))
            .map(|(i, _)| i)
    }

    fn carried(&self, name: &str) -> Option<usize> {
        self.state
            .inventory
            .iter()
            .copied()
            .find(|&i| self.world.objects[i].name == name)
    }

    fn enemy_here(&self, name: &str) -> Option<usize> {
        let room = self.room_id();
        self.world
            .enemies
            .iter()
            .position(|e| e.name == name && e.location == room)
    }

    fn add_score(&mut self, points: i64) {
        self.state.score += points;
        let won = self
            .world
            .win
            .iter()
            .any(|c| matches!(c, super::WinCondition::Score(n) if self.state.score >= *n));
        if won {
            self.state.won = true;
        }
    }

    /// Runs one parsed command and returns (message, moved, attacked enemy).
    fn execute(&mut self, tokens: &[String]) -> (String, bool, Option<usize>) {
        let Some(verb) = tokens.first().map(String::as_str) else {
            return (REFUSAL.into(), false, None);
        };
        let rest = &tokens[1..];

        let move_word = if matches!(verb, "go" | "walk" | "run") && rest.len() == 1 {
            Some(rest[0].as_str())
        } else if rest.is_empty() && self.is_move_word(verb) {
            Some(verb)
        } else {
            None
        };
        if let Some(word) = move_word {
            let msg = self.go(word);
            let moved = msg.is_empty();
            return (msg, moved, None);
        }

        match verb {
            "look" | "l" if rest.is_empty() => (String::new(), false, None),
            "inventory" | "i" | "inv" => (self.inventory_listing(), false, None),
            "wait" | "z" => ("Time passes.".into(), false, None),
            v if TAKE_VERBS.contains(&v) => {
                let rest = if v == "pick" && rest.first().map(String::as_str) == Some("up") {
                    &rest[1..]
                } else {
                    rest
                };
                (self.take(rest), false, None)
            }
            "drop" => (self.drop_item(rest), false, None),
            "look" if rest.first().map(String::as_str) == Some("at") => (self.examine(&rest[1..]), false, None),
            v if EXAMINE_VERBS.contains(&v) => (self.examine(rest), false, None),
            v if ATTACK_VERBS.contains(&v) => {
                let (msg, attacked) = self.attack(rest);
                (msg, false, attacked)
            }
            _ => (REFUSAL.into(), false, None),
        }
    }

    fn is_move_word(&self, word: &str) -> bool {
        MOVE_WORDS.contains(&word)
            || self
                .world
                .rooms
                .iter()
                .any(|r| r.exits.iter().any(|(w, _)| w == word))
    }

    /// Returns an empty message on success.
    fn go(&mut self, word: &str) -> String {
        let room = &self.world.rooms[self.state.room];
        let Some(target) = room.exit(word) else {
            return NO_EXIT.into();
        };
        for (i, enemy) in self.world.enemies.iter().enumerate() {
            if enemy.location == room.id
                && self.state.enemy_hp[i] > 0
                && enemy.blocks.iter().any(|b| b == word)
            {
                return format!("The {} blocks your way.", enemy.name);
            }
        }
        let target = self.world.room_index(target).expect("validated at load");
        self.state.room = target;
        let target_id = self.world.rooms[target].id.clone();
        if self.world.is_lose_room(&target_id) {
            self.state.dead = true;
        } else {
            if !self.state.visited[target] {
                self.state.visited[target] = true;
                let bonus = self.world.rooms[target].entry_score;
                self.add_score(bonus);
            }
            if self.world.is_win_room(&target_id) {
                self.state.won = true;
            }
        }
        String::new()
    }

    fn take(&mut self, nouns: &[String]) -> String {
        let Some(name) = nouns.first() else {
            return "What do you want to take?".into();
        };
        if self.carried(name).is_some() {
            return "You already have that.".into();
        }
        let Some(i) = self.object_here(name) else {
            return NOT_HERE.into();
        };
        if !self.world.objects[i].takeable {
            return "That's fixed in place.".into();
        }
        self.state.objects[i] = Location::Carried;
        self.state.inventory.push(i);
        if !self.state.object_scored[i] {
            self.state.object_scored[i] = true;
            let points = self.world.objects[i].take_score;
            self.add_score(points);
        }
        "Taken.".into()
    }

    fn drop_item(&mut self, nouns: &[String]) -> String {
        let Some(i) = nouns.first().and_then(|n| self.carried(n)) else {
            return "You don't have that.".into();
        };
        self.state.inventory.retain(|&j| j != i);
        self.state.objects[i] = Location::Room(self.state.room);
        "Dropped.".into()
    }

    fn examine(&self, nouns: &[String]) -> String {
        match nouns.first() {
            Some(n) if self.object_here(n).is_some() || self.carried(n).is_some() || self.enemy_here(n).is_some() => {
                format!("You see nothing special about the {n}.")
            }
            Some(_) => NOT_HERE.into(),
            None => REFUSAL.into(),
        }
    }

    fn attack(&mut self, args: &[String]) -> (String, Option<usize>) {
        let (target, weapon) = match args.iter().position(|t| t == "with") {
            Some(p) => (args[..p].first(), args.get(p + 1)),
            None => (args.first(), None),
        };
        let Some(target) = target else {
            return ("What do you want to attack?".into(), None);
        };
        if let Some(w) = weapon {
            if self.carried(w).is_none() {
                return ("You don't have that.".into(), None);
            }
        }
        let Some(e) = self.enemy_here(target) else {
            return (NOT_HERE.into(), None);
        };
        let name = self.world.enemies[e].name.clone();
        if self.state.enemy_hp[e] == 0 {
            return (format!("The {name} is already defeated."), None);
        }
        self.state.enemy_hp[e] -= 1;
        let hp = self.state.enemy_hp[e];
        if hp == 0 {
            let points = self.world.enemies[e].kill_score;
            self.add_score(points);
            return (format!("The {name} is defeated!"), Some(e));
        }
        let mut msg = format!("You hit the {name}. It has {hp} hit points left.");
        let enemy = &self.world.enemies[e];
        if enemy.lethal && enemy.counter > 0.0 && self.state.rng.random::<f64>() < enemy.counter {
            self.state.dead = true;
            msg.push_str(&format!(" The {name} strikes back."));
        }
        (msg, Some(e))
    }
}

fn placeholder() -> Percept {
    Percept {
        description: String::new(),
        score: 0,
        moves: 0,
        dead: false,
        won: false,
        inventory_listing: None,
    }
}

impl Environment for Simulator {
    fn handle(&self) -> &SessionHandle {
        &self.handle
    }

    fn current(&self) -> &Percept {
        &self.last
    }

    fn step(&mut self, command: &str) -> Result<Percept> {
        if self.state.dead || self.state.won {
            return Err(Error::Usage("the game is over; restart before stepping".into()));
        }
        let tokens: Vec<String> = crate::text::words(command)
            .filter(|t| !ARTICLES.contains(&t.as_str()))
            .collect();
        let start_room = self.state.room;
        let (message, moved, attacked) = self.execute(&tokens);
        self.state.moves += 1;
        self.handle.steps += 1;

        for (i, enemy) in self.world.enemies.iter().enumerate() {
            let in_start_room = self.world.room_index(&enemy.location) == Some(start_room);
            if enemy.regen && in_start_room && self.state.enemy_hp[i] > 0 && attacked != Some(i) {
                self.state.enemy_hp[i] = enemy.hp;
            }
        }

        let mut description = self.render_room();
        if !moved && !message.is_empty() {
            description.push(' ');
            description.push_str(&message);
        }
        if self.state.dead {
            description.push(' ');
            description.push_str(DIED);
        } else if self.state.won {
            description.push(' ');
            description.push_str(WON);
        }
        let listing = (tokens.first().map(String::as_str).is_some_and(|v| matches!(v, "inventory" | "i" | "inv")))
            .then(|| self.inventory_listing());
        let percept = self.percept(description, listing);
        self.last = percept.clone();
        Ok(percept)
    }

    fn restart(&mut self) -> Result<Percept> {
        self.state = Self::initial_state(&self.world);
        self.handle.restarted();
        let opening = self.percept(self.render_room(), None);
        self.last = opening.clone();
        Ok(opening)
    }

    fn query_inventory(&mut self) -> Result<Vec<String>> {
        Ok(self.inventory_names())
    }

    fn max_score(&self) -> Option<i64> {
        Some(self.world.max_score)
    }
}
