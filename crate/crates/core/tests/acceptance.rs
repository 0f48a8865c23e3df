//! One PASS/FAIL line per acceptance criterion. Run with `cargo test --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ifagent::agent::{Agent, AgentConfig, Generator, Outcome};
use ifagent::commands::{roulette_index, Factors, ScoringParams};
use ifagent::env::{Environment, InterpreterConfig, InterpreterSession, INTERPRETER_ENV_VAR};
use ifagent::harness::{modified_score, run_episode, Game, Resources, DEFAULT_BUDGET};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const STORY_ENV_VAR: &str = "IFAGENT_STORY";

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn episode(world: &str, config: &AgentConfig, seed: u64, budget: u32) -> Outcome {
    let game = Game::bundled(world).expect("bundled world");
    run_episode(&game, config, &Resources::bundled(), budget, seed).unwrap().1
}

fn mean_score(world: &str, config: &AgentConfig, seeds: std::ops::Range<u64>) -> f64 {
    let n = seeds.end - seeds.start;
    let total: i64 = seeds
        .into_par_iter()
        .map(|s| episode(world, config, s, DEFAULT_BUDGET).final_score)
        .sum();
    total as f64 / n as f64
}

fn map_oracle() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = Vec::new();
    for i in 0..500 {
        let g = common::RawGraph::random(&mut rng);
        if let Err(e) = common::check_graph(&g, &mut rng) {
            mismatches.push(format!("graph {i}: {e}"));
        }
    }
    let elapsed = started.elapsed();
    verdict(
        mismatches.is_empty() && elapsed < Duration::from_secs(60),
        format!("500 graphs, {} mismatches, {:.2}s {}", mismatches.len(), elapsed.as_secs_f64(), mismatches.join("; ")),
    )
}

fn roulette_statistics() -> Verdict {
    let weights = [1.0, 2.0, 3.0];
    let draws = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts = [0u64; 3];
    for _ in 0..draws {
        counts[roulette_index(&weights, &mut rng).unwrap()] += 1;
    }
    let expected = [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0];
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / draws as f64).collect();
    let max_dev = freq.iter().zip(&expected).map(|(f, e)| (f - e).abs()).fold(0.0, f64::max);
    let chi2: f64 = counts
        .iter()
        .zip(&expected)
        .map(|(&c, e)| {
            let want = e * draws as f64;
            (c as f64 - want).powi(2) / want
        })
        .sum();
    // Two degrees of freedom: the survival function is exp(-x / 2).
    let critical = -2.0 * 0.001f64.ln();
    verdict(
        max_dev <= 0.01 && chi2 < critical,
        format!("freq {freq:.4?}, max deviation {max_dev:.4}, chi2 {chi2:.3} < {critical:.3}"),
    )
}

fn scoring_algebra() -> Verdict {
    let params = ScoringParams {
        overlap_base: 2.0,
        unsupported_base: 3.0,
        ..ScoringParams::default()
    };
    let spot = Factors::new(10.0, 1.0, 1.0, 1.0, 2, 1, &params).score(&params.weights);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut monotone = true;
    for _ in 0..10_000 {
        let b = rng.random_range(1.01..6.0);
        let p = rng.random_range(1.01..6.0);
        let params = ScoringParams {
            overlap_base: b,
            unsupported_base: p,
            ..ScoringParams::default()
        };
        let count = rng.random_range(1.0..1e5);
        let (sim, uniq, imp) = (rng.random_range(0.01..1.0), rng.random_range(1e-5..1.0), rng.random_range(0.01..1.0));
        let (k, m) = (rng.random_range(0..6), rng.random_range(0..6));
        let s = |c: f64, k, m| Factors::new(c, sim, uniq, imp, k, m, &params).score(&params.weights);
        let base = s(count, k, m);
        worst = worst.max(((s(count, k + 1, m) / base) / b - 1.0).abs());
        worst = worst.max(((s(count, k, m + 1) / base) * p - 1.0).abs());
        monotone &= s(count + rng.random_range(0.5..100.0), k, m) > base;
    }
    let target = 40.0 / 3.0;
    verdict(
        (spot - target).abs() <= 1e-12 && worst <= 1e-9 && monotone,
        format!("10*b^2/p = {spot:.6} (want {target:.6}), worst relative error {worst:.1e}, count monotone {monotone}"),
    )
}

fn closet() -> Verdict {
    let config = AgentConfig::default();
    let results: Vec<(bool, u32)> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let out = episode("closet", &config, seed, DEFAULT_BUDGET);
            let took_gun = out.turns.iter().any(|t| t.command == "take gun");
            let went_east = out.turns.iter().any(|t| t.command == "east" || t.command == "go east");
            (out.final_score == 15 && out.steps <= 50 && took_gun && went_east, out.steps)
        })
        .collect();
    let wins = results.iter().filter(|r| r.0).count();
    let steps: Vec<u32> = results.iter().map(|r| r.1).collect();
    verdict(wins >= 9, format!("{wins}/10 seeds at 15/15 within 50 steps, steps {steps:?}"))
}

fn ablations() -> Verdict {
    let on = AgentConfig::default();
    let battle_off = AgentConfig {
        use_battle: false,
        ..AgentConfig::default()
    };
    let map_off = AgentConfig {
        use_map: false,
        ..AgentConfig::default()
    };
    let b_on = mean_score("battle", &on, 0..20);
    let b_off = mean_score("battle", &battle_off, 0..20);
    let m_on = mean_score("labyrinth", &on, 0..20);
    let m_off = mean_score("labyrinth", &map_off, 0..20);
    verdict(
        b_on > b_off && m_on >= m_off,
        format!("battle on {b_on:.2} vs off {b_off:.2}; labyrinth map on {m_on:.2} vs off {m_off:.2}"),
    )
}

fn replay_contract() -> Verdict {
    let config = AgentConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let seeds: Vec<u64> = (0..50).map(|_| rng.random()).collect();
    let results: Vec<(u64, i64, i64, bool, u32)> = seeds
        .par_iter()
        .map(|&seed| {
            let out = episode("dungeon", &config, seed, 300);
            (seed, out.final_score, out.best_observed, out.replayed, out.lives)
        })
        .collect();
    let bad: Vec<String> = results
        .iter()
        .filter(|r| r.1 != r.2)
        .map(|r| format!("seed {}: final {} best {}", r.0, r.1, r.2))
        .collect();
    let replays = results.iter().filter(|r| r.3).count();
    let multi = results.iter().filter(|r| r.4 > 1).count();
    verdict(
        bad.is_empty(),
        format!("50 seeds on dungeon, {} mismatches, {replays} replays, {multi} with deaths {}", bad.len(), bad.join("; ")),
    )
}

/// Scans a transcript for blacklisted commands issued again at the same
/// label before the inventory changed, and for failures left unrecorded
/// without one of the documented exemptions.
fn scan_blacklist(out: &Outcome, move_words: &[String], map_on: bool) -> (Vec<String>, usize) {
    let mut blocked: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut problems = Vec::new();
    let mut reopened = BTreeMap::<String, BTreeSet<String>>::new();
    let mut reissued_after_change = 0;
    let turns: Vec<_> = out.turns.iter().filter(|t| t.generator != Generator::Replay).collect();
    for t in &turns {
        if blocked.get(&t.label).is_some_and(|s| s.contains(&t.command)) {
            problems.push(format!("step {}: '{}' repeated at '{}'", t.step, t.command, t.label));
        }
        if reopened.get(&t.label).is_some_and(|s| s.contains(&t.command)) {
            reissued_after_change += 1;
        }
        if t.inventory_changed {
            for (label, cmds) in std::mem::take(&mut blocked) {
                reopened.entry(label).or_default().extend(cmds);
            }
        }
        if t.blacklisted {
            blocked.entry(t.label.clone()).or_default().insert(t.command.clone());
        } else if t.failed {
            let is_move = move_words.contains(&t.command);
            let exempt = t.generator == Generator::Fallback || t.mode == "battle" || (map_on && is_move);
            if !exempt {
                problems.push(format!("step {}: failure of '{}' not recorded", t.step, t.command));
            }
        }
    }
    (problems, reissued_after_change)
}

fn blacklist_semantics() -> Verdict {
    let worlds = ["closet", "battle", "labyrinth", "dungeon", "hills"];
    let runs: Vec<(String, u64, bool)> = worlds
        .iter()
        .flat_map(|w| (0..10u64).map(move |s| (w.to_string(), s, s % 2 == 0)))
        .collect();
    let results: Vec<(Vec<String>, usize)> = runs
        .par_iter()
        .map(|(world, seed, map_on)| {
            let config = AgentConfig {
                use_map: *map_on,
                ..AgentConfig::default()
            };
            let out = episode(world, &config, *seed, 400);
            let (problems, again) = scan_blacklist(&out, &config.move_words, *map_on);
            (problems.into_iter().map(|p| format!("{world}/{seed}: {p}")).collect(), again)
        })
        .collect();
    let problems: Vec<String> = results.iter().flat_map(|r| r.0.clone()).collect();
    let again: usize = results.iter().map(|r| r.1).sum();
    verdict(
        problems.is_empty(),
        format!(
            "50 episodes, {} violations, {again} commands reissued after an inventory change {}",
            problems.len(),
            problems.iter().take(5).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

fn modified_endpoints() -> Verdict {
    let full = modified_score(15.0, 15.0).unwrap();
    let zero = modified_score(0.0, 15.0).unwrap();
    verdict(full == 1.2 && zero == 0.0, format!("full {full}, zero {zero}"))
}

fn determinism() -> Verdict {
    let config = AgentConfig::default();
    let mut bad = Vec::new();
    for seed in 0..10u64 {
        for world in ["labyrinth", "dungeon"] {
            let a = episode(world, &config, seed, 300);
            let b = episode(world, &config, seed, 300);
            if a.turns != b.turns || a.transcript() != b.transcript() || a.final_score != b.final_score {
                bad.push(format!("{world}/{seed}"));
            }
        }
    }
    verdict(bad.is_empty(), format!("10 seeds x 2 worlds, {} differing: {}", bad.len(), bad.join(", ")))
}

fn interpreter_smoke() -> Verdict {
    let (Some(program), Some(story)) = (std::env::var_os(INTERPRETER_ENV_VAR), std::env::var_os(STORY_ENV_VAR)) else {
        return Verdict::Skip(format!("set {INTERPRETER_ENV_VAR} and {STORY_ENV_VAR} to run"));
    };
    let run = || -> ifagent::Result<(Outcome, u32)> {
        let config = InterpreterConfig::new(Some(PathBuf::from(program)), PathBuf::from(story))?;
        let (mut session, _) = InterpreterSession::start(config)?;
        let res = Resources::bundled();
        let mut agent = Agent::new(AgentConfig::default(), res.lexicon, res.db)?;
        let out = agent.play(&mut session, 100)?;
        Ok((out, session.current().moves))
    };
    match run() {
        Ok((out, moves)) => verdict(
            out.error.is_none() && (out.steps == 100 || out.won) && moves > 0,
            format!("{} steps, error {:?}, move counter {moves}", out.steps, out.error),
        ),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1 map minimization oracle", map_oracle),
        ("2 roulette statistics", roulette_statistics),
        ("3 scoring algebra", scoring_algebra),
        ("4 closet fixture", closet),
        ("5 battle and map ablations", ablations),
        ("6 restart and replay", replay_contract),
        ("7 blacklist semantics", blacklist_semantics),
        ("8 modified score endpoints", modified_endpoints),
        ("9 determinism", determinism),
        ("10 interpreter smoke test", interpreter_smoke),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let v = check();
        let secs = started.elapsed().as_secs_f64();
        match v {
            Verdict::Pass(d) => println!("PASS  {name} ({secs:.1}s): {d}"),
            Verdict::Skip(d) => println!("SKIP  {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1}s): {d}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
