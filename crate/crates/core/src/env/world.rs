//! The `.world` text format for authored test adventures.
//!
//! ```text
//! # comment
//! SEED <n>
//! ROOM <id> [score=<n>]
//! LABEL <first sentence>
//! DESC <text...>
//! EXIT <move-word> <room-id>
//! OBJECT <name> [takeable] [score=<n>] [carried]
//! ENEMY <name> hp=<n> [score=<n>] [lethal] [counter=<p>] [regen] [blocks=<move>,...]
//! WIN score=<n> | WIN room=<id>
//! LOSE room=<id>
//! ```
//!
//! The first room is the starting room. `LABEL`, `DESC`, `EXIT`, `OBJECT` and
//! `ENEMY` apply to the most recent `ROOM`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use crate::error::{read_file, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: String,
    pub label: String,
    pub body: String,
    /// Move word to target room id, in declaration order.
    pub exits: Vec<(String, String)>,
    /// Awarded the first time the room is entered by moving.
    pub entry_score: i64,
}

impl Room {
    pub fn exit(&self, word: &str) -> Option<&str> {
        self.exits
            .iter()
            .find(|(w, _)| w == word)
            .map(|(_, target)| target.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSpec {
    pub name: String,
    /// Starting room, or `None` when the player starts out carrying it.
    pub location: Option<String>,
    pub takeable: bool,
    pub take_score: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnemySpec {
    pub name: String,
    pub location: String,
    pub hp: u32,
    pub kill_score: i64,
    pub lethal: bool,
    /// Chance that a surviving lethal enemy kills the player after being hit.
    pub counter: f64,
    /// Hit points are restored whenever the player does anything but attack it.
    pub regen: bool,
    /// Exits of its room that stay closed while it lives.
    pub blocks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WinCondition {
    Score(i64),
    Room(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpec {
    pub rooms: Vec<Room>,
    pub objects: Vec<ObjectSpec>,
    pub enemies: Vec<EnemySpec>,
    pub win: Vec<WinCondition>,
    pub lose_rooms: Vec<String>,
    /// Seed for the simulator's own randomness (enemy counterattacks).
    pub seed: u64,
    /// Sum of every score event reachable from the start, computed at load time.
    pub max_score: i64,
}

impl WorldSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::format(source_name, line, msg);

        let mut world = WorldSpec {
            rooms: Vec::new(),
            objects: Vec::new(),
            enemies: Vec::new(),
            win: Vec::new(),
            lose_rooms: Vec::new(),
            seed: 0,
            max_score: 0,
        };
        // Line numbers of references that can only be checked once every room is known.
        let mut exit_refs: Vec<(usize, String)> = Vec::new();
        let mut room_refs: Vec<(usize, String)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (directive, rest) = line
                .split_once(char::is_whitespace)
                .map(|(d, r)| (d, r.trim()))
                .unwrap_or((line, ""));
            let args: Vec<&str> = rest.split_whitespace().collect();

            match directive {
                "SEED" => {
                    world.seed = rest
                        .parse()
                        .map_err(|_| err(line_no, format!("bad seed {rest:?}")))?;
                }
                "ROOM" => {
                    let id = args
                        .first()
                        .ok_or_else(|| err(line_no, "ROOM needs an id".into()))?;
                    if world.rooms.iter().any(|r| r.id == *id) {
                        return Err(err(line_no, format!("duplicate room id {id:?}")));
                    }
                    let mut entry_score = 0;
                    for attr in &args[1..] {
                        match parse_attr(attr) {
                            ("score", Some(v)) => entry_score = parse_int(v, line_no, &err)?,
                            _ => return Err(err(line_no, format!("unknown ROOM attribute {attr:?}"))),
                        }
                    }
                    world.rooms.push(Room {
                        id: id.to_string(),
                        label: String::new(),
                        body: String::new(),
                        exits: Vec::new(),
                        entry_score,
                    });
                }
                "LABEL" | "DESC" | "EXIT" | "OBJECT" | "ENEMY" => {
                    let room = world
                        .rooms
                        .last_mut()
                        .ok_or_else(|| err(line_no, format!("{directive} before any ROOM")))?;
                    match directive {
                        "LABEL" => room.label = crate::text::normalize_whitespace(rest),
                        "DESC" => {
                            if !room.body.is_empty() {
                                room.body.push(' ');
                            }
                            room.body.push_str(&crate::text::normalize_whitespace(rest));
                        }
                        "EXIT" => {
                            let [word, target] = args[..] else {
                                return Err(err(line_no, "EXIT needs <move-word> <room-id>".into()));
                            };
                            let word = word.to_lowercase();
                            if room.exit(&word).is_some() {
                                return Err(err(line_no, format!("duplicate exit {word:?}")));
                            }
                            room.exits.push((word, target.to_string()));
                            exit_refs.push((line_no, target.to_string()));
                        }
                        "OBJECT" => {
                            let name = args
                                .first()
                                .ok_or_else(|| err(line_no, "OBJECT needs a name".into()))?
                                .to_lowercase();
                            let mut object = ObjectSpec {
                                name,
                                location: Some(room.id.clone()),
                                takeable: false,
                                take_score: 0,
                            };
                            for attr in &args[1..] {
                                match parse_attr(attr) {
                                    ("takeable", None) => object.takeable = true,
                                    ("carried", None) => object.location = None,
                                    ("score", Some(v)) => object.take_score = parse_int(v, line_no, &err)?,
                                    _ => return Err(err(line_no, format!("unknown OBJECT attribute {attr:?}"))),
                                }
                            }
                            world.objects.push(object);
                        }
                        _ => {
                            let name = args
                                .first()
                                .ok_or_else(|| err(line_no, "ENEMY needs a name".into()))?
                                .to_lowercase();
                            let mut enemy = EnemySpec {
                                name,
                                location: room.id.clone(),
                                hp: 0,
                                kill_score: 0,
                                lethal: false,
                                counter: 0.0,
                                regen: false,
                                blocks: Vec::new(),
                            };
                            for attr in &args[1..] {
                                match parse_attr(attr) {
                                    ("hp", Some(v)) => {
                                        enemy.hp = v
                                            .parse()
                                            .map_err(|_| err(line_no, format!("bad hp {v:?}")))?
                                    }
                                    ("score", Some(v)) => enemy.kill_score = parse_int(v, line_no, &err)?,
                                    ("lethal", None) => enemy.lethal = true,
                                    ("regen", None) => enemy.regen = true,
                                    ("counter", Some(v)) => {
                                        enemy.counter = v
                                            .parse()
                                            .ok()
                                            .filter(|p: &f64| (0.0..=1.0).contains(p))
                                            .ok_or_else(|| err(line_no, format!("counter must be in [0, 1], got {v:?}")))?
                                    }
                                    ("blocks", Some(v)) => {
                                        enemy.blocks = v.split(',').map(str::to_lowercase).collect()
                                    }
                                    _ => return Err(err(line_no, format!("unknown ENEMY attribute {attr:?}"))),
                                }
                            }
                            if enemy.hp == 0 {
                                return Err(err(line_no, "ENEMY needs hp=<n> with n > 0".into()));
                            }
                            world.enemies.push(enemy);
                        }
                    }
                }
                "WIN" | "LOSE" => match parse_attr(rest) {
                    ("score", Some(v)) if directive == "WIN" => {
                        world.win.push(WinCondition::Score(parse_int(v, line_no, &err)?))
                    }
                    ("room", Some(v)) => {
                        room_refs.push((line_no, v.to_string()));
                        if directive == "WIN" {
                            world.win.push(WinCondition::Room(v.to_string()));
                        } else {
                            world.lose_rooms.push(v.to_string());
                        }
                    }
                    _ => return Err(err(line_no, format!("bad {directive} condition {rest:?}"))),
                },
                other => return Err(err(line_no, format!("unknown directive {other:?}"))),
            }
        }

        if world.rooms.is_empty() {
            return Err(err(1, "world declares no rooms".into()));
        }
        let ids: HashSet<&str> = world.rooms.iter().map(|r| r.id.as_str()).collect();
        for (line_no, target) in exit_refs.iter().chain(&room_refs) {
            if !ids.contains(target.as_str()) {
                return Err(err(*line_no, format!("unknown room id {target:?}")));
            }
        }
        for room in &mut world.rooms {
            if room.label.is_empty() {
                room.label = room.id.clone();
            }
        }

        world.max_score = world.reachable_score();
        for cond in &world.win {
            if let WinCondition::Score(n) = cond {
                if *n > world.max_score {
                    return Err(err(
                        0,
                        format!("WIN score={n} exceeds the attainable maximum {}", world.max_score),
                    ));
                }
            }
        }
        Ok(world)
    }

    pub fn start_room(&self) -> &Room {
        &self.rooms[0]
    }

    pub fn room_index(&self, id: &str) -> Option<usize> {
        self.rooms.iter().position(|r| r.id == id)
    }

    pub(crate) fn is_lose_room(&self, id: &str) -> bool {
        self.lose_rooms.iter().any(|r| r == id)
    }

    pub(crate) fn is_win_room(&self, id: &str) -> bool {
        self.win
            .iter()
            .any(|c| matches!(c, WinCondition::Room(r) if r == id))
    }

    /// Sweeps every room reachable from the start without passing through a
    /// terminal room, and sums the score events available there. Entering a
    /// winning room ends the game, so only the best such entry counts.
    fn reachable_score(&self) -> i64 {
        let index: HashMap<&str, usize> = self
            .rooms
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.as_str(), i))
            .collect();
        let mut seen = vec![false; self.rooms.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut total = 0;
        let mut best_win_entry = 0;
        while let Some(i) = queue.pop_front() {
            let room = &self.rooms[i];
            if i != 0 {
                if self.is_lose_room(&room.id) {
                    continue;
                }
                if self.is_win_room(&room.id) {
                    best_win_entry = best_win_entry.max(room.entry_score);
                    continue;
                }
                total += room.entry_score;
            }
            total += self
                .objects
                .iter()
                .filter(|o| o.takeable && o.location.as_deref() == Some(&room.id))
                .map(|o| o.take_score)
                .sum::<i64>();
            total += self
                .enemies
                .iter()
                .filter(|e| e.location == room.id)
                .map(|e| e.kill_score)
                .sum::<i64>();
            for (_, target) in &room.exits {
                let j = index[target.as_str()];
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        total + best_win_entry
    }
}

fn parse_attr(attr: &str) -> (&str, Option<&str>) {
    match attr.split_once('=') {
        Some((k, v)) => (k, Some(v)),
        None => (attr, None),
    }
}

fn parse_int(v: &str, line: usize, err: &impl Fn(usize, String) -> Error) -> Result<i64> {
    v.parse().map_err(|_| err(line, format!("expected an integer, got {v:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bundled_closet() {
        let w = WorldSpec::parse(crate::data::CLOSET_WORLD, "closet.world").unwrap();
        assert_eq!(w.rooms.len(), 2);
        assert_eq!(w.start_room().label, "You are in a closet.");
        assert_eq!(w.objects[0].take_score, 10);
        assert_eq!(w.max_score, 15);
    }

    #[test]
    fn unknown_exit_target_names_the_room() {
        let text = "ROOM a\nLABEL A.\nEXIT north nowhere\n";
        let e = WorldSpec::parse(text, "bad.world").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("nowhere"), "{msg}");
        assert!(msg.starts_with("bad.world:3:"), "{msg}");
    }

    #[test]
    fn rejects_orphan_directives_and_junk() {
        assert!(WorldSpec::parse("EXIT north a\n", "w").is_err());
        assert!(WorldSpec::parse("ROOM a\nFLY away\n", "w").is_err());
        assert!(WorldSpec::parse("ROOM a\nENEMY orc\n", "w").is_err());
        assert!(WorldSpec::parse("ROOM a\nROOM a\n", "w").is_err());
        assert!(WorldSpec::parse("# only comments\n", "w").is_err());
    }

    #[test]
    fn max_score_skips_rooms_behind_death() {
        let text = "\
ROOM a
OBJECT coin takeable score=3
EXIT down pit
EXIT east b
ROOM pit
OBJECT gem takeable score=100
ROOM b score=2
ENEMY rat hp=1 score=4
LOSE room=pit
";
        let w = WorldSpec::parse(text, "w").unwrap();
        assert_eq!(w.max_score, 3 + 2 + 4);
    }

    #[test]
    fn win_score_above_maximum_is_rejected() {
        let text = "ROOM a\nOBJECT coin takeable score=3\nWIN score=4\n";
        assert!(WorldSpec::parse(text, "w").is_err());
    }
}
