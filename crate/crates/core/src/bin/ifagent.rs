use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ifagent::agent::{Agent, AgentConfig};
use ifagent::env::{InterpreterConfig, Simulator};
use ifagent::harness::{
    evaluate_suite, modified_score, run_episode_with, write_transcript, Ablation, EpisodeReport, Game, GameSource,
    Resources, DEFAULT_BUDGET,
};
use ifagent::{Error, Result};

#[derive(Parser)]
#[command(name = "ifagent", version, about = "Plays text adventures on its own")]
struct Cli {
    /// `key = value` agent configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Command pattern database (`pattern<TAB>count[<TAB>battle]`).
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    /// Word vectors (`V D` header, then `word x1 .. xD`).
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    /// Word frequencies (`word<TAB>count`).
    #[arg(long, global = true)]
    frequencies: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one episode and print the transcript.
    Play(GameArgs),
    /// Run a suite of episodes and write the results table.
    Eval(EvalArgs),
    /// Play one episode and print the final map as an edge list.
    MapDump(GameArgs),
    /// Compute modified scores.
    Score(ScoreArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Sim,
    Interpreter,
}

#[derive(Args)]
struct GameArgs {
    /// Bundled world name or `.world` file.
    #[arg(long)]
    world: Option<String>,
    /// Story file for the interpreter backend.
    #[arg(long)]
    story: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Interpreter executable; defaults to $IFAGENT_INTERPRETER.
    #[arg(long)]
    interpreter: Option<PathBuf>,
    /// Extra interpreter arguments placed before the story file.
    #[arg(long = "interpreter-arg", allow_hyphen_values = true)]
    interpreter_args: Vec<String>,
    /// Maximum score of the story, for the modified score.
    #[arg(long)]
    max_score: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u32,
    /// Also write the transcript here.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Write the JSON episode report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Output file (map-dump only); standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of `.world` files, or comma-separated bundled names / files.
    #[arg(long)]
    games: String,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u32,
    #[arg(long)]
    seed: Option<u64>,
    /// Features to switch off in turn: `map`, `battle`.
    #[arg(long, value_delimiter = ',')]
    ablate: Vec<String>,
    /// Table file; standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full JSON suite report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Name of the command database variant, recorded in the report.
    #[arg(long, default_value = "bundled")]
    source_tag: String,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long, requires = "max")]
    raw: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    /// JSON episode reports to rescore.
    reports: Vec<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ifagent: {e}");
            ExitCode::from(match e {
                Error::Usage(_) => 2,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => AgentConfig::load(path)?,
        None => AgentConfig::default(),
    };
    let resources = || Resources::load(cli.db.as_deref(), cli.embeddings.as_deref(), cli.frequencies.as_deref());
    match cli.command {
        Command::Play(args) => {
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let game = resolve_game(&args)?;
            let resources = resources()?;
            let (mut report, outcome) =
                run_episode_with(&game, &config, &resources, args.budget, config.seed, &mut |t| {
                    println!("{}", t.transcript_line())
                })?;
            if let Some(path) = &args.transcript {
                write_transcript(&mut report, &outcome, path)?;
            }
            let modified = report.modified_score.map_or("-".to_string(), |m| format!("{m:.4}"));
            println!(
                "final score {} (max {}, modified {modified}) after {} steps and {} lives",
                report.raw_score,
                report.max_score.map_or("?".to_string(), |m| m.to_string()),
                report.steps_used,
                report.lives
            );
            if let Some(path) = &args.report {
                write_json(path, &report)?;
            }
            if let Some(e) = &report.error {
                return Err(Error::Environment(e.clone()));
            }
            Ok(())
        }
        Command::MapDump(args) => {
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            if !config.use_map {
                return Err(Error::Usage("map-dump needs the map switched on".into()));
            }
            let game = resolve_game(&args)?;
            let GameSource::World(world) = &game.source else {
                return Err(Error::Usage("map-dump supports simulator worlds only".into()));
            };
            let resources = resources()?;
            let mut agent = Agent::new(config, resources.lexicon, resources.db)?;
            let (mut sim, _) = Simulator::start(world.clone());
            agent.play(&mut sim, args.budget)?;
            let dump = agent.map().map(|m| m.dump()).unwrap_or_default();
            emit(args.out.as_deref(), &dump)
        }
        Command::Eval(args) => {
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let games = resolve_games(&args.games)?;
            let features: Vec<&str> = args.ablate.iter().map(String::as_str).collect();
            let ablations = if features.is_empty() {
                vec![Ablation::baseline(&config)]
            } else {
                Ablation::grid(&features)?
            };
            let resources = resources()?;
            let suite = evaluate_suite(&games, &config, &resources, args.runs, args.budget, &ablations, &args.source_tag)?;
            let text = format!("{}\n{}", suite.table(), suite.normalized_table());
            if let Some(path) = &args.report {
                write_json(path, &suite)?;
            }
            emit(args.out.as_deref(), &text)
        }
        Command::Score(args) => {
            if let (Some(raw), Some(max)) = (args.raw, args.max) {
                println!("{:.6}", modified_score(raw, max)?);
            }
            for path in &args.reports {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let mut report: EpisodeReport = serde_json::from_str(&text)
                    .map_err(|e| Error::format(path.display().to_string(), e.line(), e.to_string()))?;
                report.rescore()?;
                let modified = report.modified_score.map_or("-".to_string(), |m| format!("{m:.6}"));
                println!("{}\t{}\t{}\t{}", path.display(), report.game, report.raw_score, modified);
            }
            if args.raw.is_none() && args.reports.is_empty() {
                return Err(Error::Usage("give --raw and --max, or report files".into()));
            }
            Ok(())
        }
    }
}

fn resolve_game(args: &GameArgs) -> Result<Game> {
    let backend = args.backend.unwrap_or(if args.story.is_some() { BackendArg::Interpreter } else { BackendArg::Sim });
    match backend {
        BackendArg::Sim => {
            let name = args
                .world
                .as_deref()
                .ok_or_else(|| Error::Usage("--world is required for the simulator".into()))?;
            world_game(name)
        }
        BackendArg::Interpreter => {
            let story = args
                .story
                .clone()
                .ok_or_else(|| Error::Usage("--story is required for the interpreter".into()))?;
            let mut config = InterpreterConfig::new(args.interpreter.clone(), story.clone())?;
            config.args = args.interpreter_args.clone();
            config.max_score = args.max_score;
            let id = story
                .file_stem()
                .map_or("story".to_string(), |s| s.to_string_lossy().into_owned());
            Ok(Game {
                id,
                source: GameSource::Interpreter(config),
            })
        }
    }
}

fn world_game(name: &str) -> Result<Game> {
    match Game::bundled(name) {
        Some(game) => Ok(game),
        None => Game::load_world(Path::new(name)),
    }
}

fn resolve_games(spec: &str) -> Result<Vec<Game>> {
    let path = Path::new(spec);
    if path.is_dir() {
        return Game::load_dir(path);
    }
    spec.split(',').map(str::trim).filter(|s| !s.is_empty()).map(world_game).collect()
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Usage(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
