//! Data files compiled into the crate: a sample pattern database, small
//! fixture embeddings and frequencies, word lists, and the test worlds.

pub const SAMPLE_DB: &str = include_str!("../data/sample.db");
pub const EMBEDDINGS: &str = include_str!("../data/embeddings.txt");
pub const FREQUENCIES: &str = include_str!("../data/frequencies.tsv");
pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const VERBS: &str = include_str!("../data/verbs.txt");

pub const CLOSET_WORLD: &str = include_str!("../data/worlds/closet.world");
pub const BATTLE_WORLD: &str = include_str!("../data/worlds/battle.world");
pub const LABYRINTH_WORLD: &str = include_str!("../data/worlds/labyrinth.world");
pub const DUNGEON_WORLD: &str = include_str!("../data/worlds/dungeon.world");
pub const HILLS_WORLD: &str = include_str!("../data/worlds/hills.world");

/// Bundled worlds by name.
pub const WORLDS: [(&str, &str); 5] = [
    ("closet", CLOSET_WORLD),
    ("battle", BATTLE_WORLD),
    ("labyrinth", LABYRINTH_WORLD),
    ("dungeon", DUNGEON_WORLD),
    ("hills", HILLS_WORLD),
];

pub fn world(name: &str) -> Option<crate::env::WorldSpec> {
    WORLDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| crate::env::WorldSpec::parse(text, &format!("{n}.world")).expect("bundled world parses"))
}
