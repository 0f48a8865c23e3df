//! Episode runner, scoring and suite evaluation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentConfig, Outcome, TurnRecord};
use crate::commands::CommandDb;
use crate::env::{Environment, InterpreterConfig, InterpreterSession, Simulator, WorldSpec};
use crate::error::{Error, Result};
use crate::lexicon::{EmbeddingTable, FrequencyTable, ImportanceModel, Lexicon};

/// Commands per episode unless told otherwise.
pub const DEFAULT_BUDGET: u32 = 1000;

/// Bonus added to any positive normalized result.
pub const POSITIVE_BONUS: f64 = 0.2;

/// `raw / max`, plus [`POSITIVE_BONUS`] when `raw` is positive.
pub fn modified_score(raw: f64, max: f64) -> Result<f64> {
    if !(max > 0.0) {
        return Err(Error::Usage(format!("maximum score must be positive, got {max}")));
    }
    let ratio = raw / max;
    Ok(if raw > 0.0 { ratio + POSITIVE_BONUS } else { ratio })
}

/// Shared read-only data for every agent in a run.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Arc<Lexicon>,
    pub db: Arc<CommandDb>,
}

impl Resources {
    pub fn bundled() -> Self {
        Resources {
            lexicon: Arc::new(Lexicon::bundled()),
            db: Arc::new(CommandDb::bundled()),
        }
    }

    /// Bundled data with any of the given files swapped in.
    pub fn load(db: Option<&Path>, embeddings: Option<&Path>, frequencies: Option<&Path>) -> Result<Self> {
        let mut lexicon = Lexicon::bundled();
        if let Some(path) = embeddings {
            lexicon.embeddings = EmbeddingTable::load(path)?;
        }
        if let Some(path) = frequencies {
            let table = Arc::new(FrequencyTable::load(path)?);
            lexicon.importance = ImportanceModel::InverseFrequency(Arc::clone(&table));
            lexicon.frequencies = table;
        }
        let db = match db {
            Some(path) => CommandDb::load(path)?,
            None => CommandDb::bundled(),
        };
        Ok(Resources {
            lexicon: Arc::new(lexicon),
            db: Arc::new(db),
        })
    }
}

/// Where a game comes from.
#[derive(Debug, Clone)]
pub enum GameSource {
    World(Arc<WorldSpec>),
    Interpreter(InterpreterConfig),
}

#[derive(Debug, Clone)]
pub struct Game {
    pub id: String,
    pub source: GameSource,
}

impl Game {
    pub fn world(id: impl Into<String>, world: WorldSpec) -> Self {
        Game {
            id: id.into(),
            source: GameSource::World(Arc::new(world)),
        }
    }

    /// One of the worlds shipped with the crate.
    pub fn bundled(name: &str) -> Option<Self> {
        crate::data::world(name).map(|w| Game::world(name, w))
    }

    pub fn load_world(path: &Path) -> Result<Self> {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Game::world(id, WorldSpec::load(path)?))
    }

    /// Every `*.world` file in `dir`, sorted by name.
    pub fn load_dir(dir: &Path) -> Result<Vec<Self>> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "world"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(Error::Usage(format!("no .world files in {}", dir.display())));
        }
        paths.iter().map(|p| Game::load_world(p)).collect()
    }

    /// Starts a fresh session and reports the maximum score when known.
    pub fn open(&self) -> Result<(Box<dyn Environment>, Option<i64>)> {
        match &self.source {
            GameSource::World(w) => {
                let (sim, _) = Simulator::start(Arc::clone(w));
                Ok((Box::new(sim), Some(w.max_score)))
            }
            GameSource::Interpreter(config) => {
                let (session, _) = InterpreterSession::start(config.clone())?;
                Ok((Box::new(session), config.max_score))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub game: String,
    pub seed: u64,
    pub raw_score: i64,
    pub max_score: Option<i64>,
    pub modified_score: Option<f64>,
    pub best_observed: i64,
    pub steps_used: u32,
    pub budget: u32,
    pub lives: u32,
    pub won: bool,
    pub replayed: bool,
    /// The environment broke down; `raw_score` is from the last good percept.
    pub failed: bool,
    pub error: Option<String>,
    pub transcript_path: Option<PathBuf>,
}

impl EpisodeReport {
    /// Recomputes `modified_score` from the raw and maximum scores.
    pub fn rescore(&mut self) -> Result<()> {
        self.modified_score = match self.max_score {
            Some(max) => Some(modified_score(self.raw_score as f64, max as f64)?),
            None => None,
        };
        Ok(())
    }
}

/// Plays one episode of `game` with `config`, its seed replaced by `seed`.
pub fn run_episode(
    game: &Game,
    config: &AgentConfig,
    resources: &Resources,
    budget: u32,
    seed: u64,
) -> Result<(EpisodeReport, Outcome)> {
    run_episode_with(game, config, resources, budget, seed, &mut |_| {})
}

pub fn run_episode_with(
    game: &Game,
    config: &AgentConfig,
    resources: &Resources,
    budget: u32,
    seed: u64,
    on_turn: &mut dyn FnMut(&TurnRecord),
) -> Result<(EpisodeReport, Outcome)> {
    if budget == 0 {
        return Err(Error::Usage("step budget must be positive".into()));
    }
    let config = AgentConfig { seed, ..config.clone() };
    let mut agent = Agent::new(config, Arc::clone(&resources.lexicon), Arc::clone(&resources.db))?;
    let (mut env, max_score) = game.open()?;
    let outcome = agent.play_with(env.as_mut(), budget, on_turn)?;
    let mut report = EpisodeReport {
        game: game.id.clone(),
        seed,
        raw_score: outcome.final_score,
        max_score,
        modified_score: None,
        best_observed: outcome.best_observed,
        steps_used: outcome.steps,
        budget,
        lives: outcome.lives,
        won: outcome.won,
        replayed: outcome.replayed,
        failed: outcome.error.is_some(),
        error: outcome.error.clone(),
        transcript_path: None,
    };
    report.rescore()?;
    Ok((report, outcome))
}

/// Writes the transcript of `outcome` to `path` and notes it in `report`.
pub fn write_transcript(report: &mut EpisodeReport, outcome: &Outcome, path: &Path) -> Result<()> {
    std::fs::write(path, outcome.transcript()).map_err(|e| Error::io(path, e))?;
    report.transcript_path = Some(path.to_path_buf());
    Ok(())
}

/// A named set of feature switches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ablation {
    pub name: String,
    pub use_map: bool,
    pub use_battle: bool,
}

impl Ablation {
    pub fn new(use_map: bool, use_battle: bool) -> Self {
        let flag = |on: bool| if on { "on" } else { "off" };
        Ablation {
            name: format!("map={},battle={}", flag(use_map), flag(use_battle)),
            use_map,
            use_battle,
        }
    }

    /// The unchanged configuration.
    pub fn baseline(config: &AgentConfig) -> Self {
        Ablation::new(config.use_map, config.use_battle)
    }

    /// All on/off combinations of the named features (`map`, `battle`).
    pub fn grid(features: &[&str]) -> Result<Vec<Self>> {
        let mut map_options = vec![true];
        let mut battle_options = vec![true];
        for f in features {
            match *f {
                "map" => map_options = vec![true, false],
                "battle" => battle_options = vec![true, false],
                other => return Err(Error::Usage(format!("unknown ablation feature `{other}`"))),
            }
        }
        Ok(map_options
            .iter()
            .flat_map(|&m| battle_options.iter().map(move |&b| Ablation::new(m, b)))
            .collect())
    }

    pub fn apply(&self, config: &AgentConfig) -> AgentConfig {
        AgentConfig {
            use_map: self.use_map,
            use_battle: self.use_battle,
            ..config.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCell {
    pub game: String,
    pub ablation: Ablation,
    pub runs: usize,
    pub mean_raw: f64,
    pub mean_modified: Option<f64>,
    pub reports: Vec<EpisodeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    /// Names the command database variant the suite ran with.
    pub source_tag: String,
    pub budget: u32,
    pub base_seed: u64,
    pub cells: Vec<SuiteCell>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl SuiteReport {
    /// `game<TAB>ablation<TAB>runs<TAB>mean_raw<TAB>mean_modified`, with a header.
    pub fn table(&self) -> String {
        let mut out = String::from("game\tablation\truns\tmean_raw\tmean_modified\n");
        for c in &self.cells {
            let modified = c.mean_modified.map_or("-".to_string(), |m| format!("{m:.4}"));
            let _ = writeln!(out, "{}\t{}\t{}\t{:.4}\t{}", c.game, c.ablation.name, c.runs, c.mean_raw, modified);
        }
        out
    }

    /// Per game, each variant's mean modified score as a percentage of the
    /// best variant's.
    pub fn normalized_table(&self) -> String {
        let mut out = String::from("game\tablation\tpercent_of_best\n");
        let mut games: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !games.contains(&c.game.as_str()) {
                games.push(&c.game);
            }
        }
        for game in games {
            let cells: Vec<&SuiteCell> = self.cells.iter().filter(|c| c.game == game).collect();
            let value = |c: &SuiteCell| c.mean_modified.unwrap_or(c.mean_raw);
            let best = cells.iter().map(|c| value(c)).fold(f64::NEG_INFINITY, f64::max);
            for c in cells {
                let pct = if best > 0.0 { 100.0 * value(c) / best } else { 0.0 };
                let _ = writeln!(out, "{}\t{}\t{:.1}", c.game, c.ablation.name, pct);
            }
        }
        out
    }

    pub fn cell(&self, game: &str, ablation: &str) -> Option<&SuiteCell> {
        self.cells.iter().find(|c| c.game == game && c.ablation.name == ablation)
    }
}

/// Runs `runs` episodes per (game, ablation) cell with seeds
/// `config.seed .. config.seed + runs`. Episodes run in parallel.
pub fn evaluate_suite(
    games: &[Game],
    config: &AgentConfig,
    resources: &Resources,
    runs: usize,
    budget: u32,
    ablations: &[Ablation],
    source_tag: &str,
) -> Result<SuiteReport> {
    if runs == 0 {
        return Err(Error::Usage("runs must be positive".into()));
    }
    config.validate()?;
    let jobs: Vec<(usize, usize, u64)> = (0..games.len())
        .flat_map(|g| (0..ablations.len()).flat_map(move |a| (0..runs as u64).map(move |r| (g, a, r))))
        .collect();
    let results: Vec<Result<EpisodeReport>> = jobs
        .par_iter()
        .map(|&(g, a, r)| {
            let cfg = ablations[a].apply(config);
            run_episode(&games[g], &cfg, resources, budget, config.seed.wrapping_add(r)).map(|(rep, _)| rep)
        })
        .collect();
    let mut reports = results.into_iter();
    let mut cells = Vec::new();
    for game in games {
        for ablation in ablations {
            let reports: Vec<EpisodeReport> = reports.by_ref().take(runs).collect::<Result<_>>()?;
            let mean_modified = reports
                .iter()
                .map(|r| r.modified_score)
                .collect::<Option<Vec<f64>>>()
                .map(mean);
            cells.push(SuiteCell {
                game: game.id.clone(),
                ablation: ablation.clone(),
                runs: reports.len(),
                mean_raw: mean(reports.iter().map(|r| r.raw_score as f64)),
                mean_modified,
                reports,
            });
        }
    }
    Ok(SuiteReport {
        source_tag: source_tag.to_string(),
        budget,
        base_seed: config.seed,
        cells,
    })
}
