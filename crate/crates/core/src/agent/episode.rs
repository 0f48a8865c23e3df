use serde::{Deserialize, Serialize};

use super::{Agent, Decision, Generator, Mode};
use crate::env::{Environment, Percept};
use crate::mapper::label_of;
use crate::Result;

/// One issued command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    /// 1-based, counted over the whole episode.
    pub step: u32,
    pub life: u32,
    pub generator: Generator,
    pub command: String,
    /// Score after the command.
    pub score: i64,
    pub mode: String,
    /// Label of the area the command was issued in.
    pub label: String,
    pub failed: bool,
    pub blacklisted: bool,
    pub inventory_changed: bool,
}

impl TurnRecord {
    /// `step<TAB>generator<TAB>command<TAB>score<TAB>mode`
    pub fn transcript_line(&self) -> String {
        format!("{}\t{}\t{}\t{}\t{}", self.step, self.generator, self.command, self.score, self.mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Score of the final trial: the agent's result.
    pub final_score: i64,
    /// Highest score seen in any life.
    pub best_observed: i64,
    pub steps: u32,
    pub lives: u32,
    pub won: bool,
    /// Whether the episode ended by replaying the best trajectory.
    pub replayed: bool,
    pub turns: Vec<TurnRecord>,
    /// Set when the environment failed mid-episode.
    pub error: Option<String>,
}

impl Outcome {
    pub fn transcript(&self) -> String {
        self.turns.iter().map(|t| t.transcript_line() + "\n").collect()
    }
}

struct Run<'a> {
    env: &'a mut dyn Environment,
    on_turn: &'a mut dyn FnMut(&TurnRecord),
    turns: Vec<TurnRecord>,
    steps: u32,
    best_observed: i64,
}

impl Run<'_> {
    fn record(&mut self, record: TurnRecord) {
        (self.on_turn)(&record);
        self.turns.push(record);
    }
}

impl Agent {
    /// Plays until the game is won or `budget` commands have been sent.
    /// The environment should be freshly started.
    pub fn play(&mut self, env: &mut dyn Environment, budget: u32) -> Result<Outcome> {
        self.play_with(env, budget, &mut |_| {})
    }

    /// [`Agent::play`], calling `on_turn` after every command.
    pub fn play_with(
        &mut self,
        env: &mut dyn Environment,
        budget: u32,
        on_turn: &mut dyn FnMut(&TurnRecord),
    ) -> Result<Outcome> {
        let mut percept = env.current().clone();
        let inventory = env.query_inventory()?;
        self.begin_life(&percept, inventory);
        let mut run = Run {
            env,
            on_turn,
            turns: Vec::new(),
            steps: 0,
            best_observed: percept.score.max(0),
        };
        let mut lives = 1;
        let mut replayed = false;
        let mut error = None;

        let final_score = loop {
            if percept.won {
                break percept.score;
            }
            let remaining = budget - run.steps;
            let best_len = self.state.best.len();
            if best_len > 0 && remaining as usize <= best_len + self.config.finalize_margin {
                match self.finalize(&mut run, &percept, remaining) {
                    Ok((score, did_replay)) => {
                        replayed = did_replay;
                        break score;
                    }
                    Err(e) => {
                        error = Some(e.to_string());
                        break percept.score;
                    }
                }
            }
            if remaining == 0 {
                // Nothing ever scored: the final trial is an empty one.
                if let Err(e) = run.env.restart() {
                    error = Some(e.to_string());
                }
                break 0;
            }
            if percept.dead {
                self.on_death();
                let restarted = run.env.restart().and_then(|p| Ok((p, run.env.query_inventory()?)));
                match restarted {
                    Ok((p, inv)) => {
                        percept = p;
                        self.begin_life(&percept, inv);
                        lives += 1;
                        continue;
                    }
                    Err(e) => {
                        error = Some(e.to_string());
                        break percept.score;
                    }
                }
            }

            let label = self.current_label();
            let decision = self.next_command();
            let stepped = run.env.step(&decision.command).and_then(|new| {
                let inv = if self.wants_inventory_check(&decision.command) {
                    Some(run.env.query_inventory()?)
                } else {
                    None
                };
                Ok((new, inv))
            });
            let (new, inv) = match stepped {
                Ok(x) => x,
                Err(e) => {
                    error = Some(e.to_string());
                    break percept.score;
                }
            };
            run.steps += 1;
            log::debug!("{} [{}] {} -> {}", run.steps, decision.generator, decision.command, new.description);
            let mode = self.state.mode.name().to_string();
            let obs = self.observe(&percept, &decision, &new, inv);
            run.best_observed = run.best_observed.max(new.score);
            run.record(TurnRecord {
                step: run.steps,
                life: self.state.trajectory.life,
                generator: decision.generator,
                command: decision.command,
                score: new.score,
                mode,
                label,
                failed: obs.failed,
                blacklisted: obs.blacklisted,
                inventory_changed: obs.inventory_changed,
            });
            percept = new;
        };

        Ok(Outcome {
            final_score,
            best_observed: run.best_observed,
            steps: run.steps,
            lives,
            won: percept.won || run.env.current().won,
            replayed,
            turns: run.turns,
            error,
        })
    }

    /// Ends the episode. If the current life already holds the best score
    /// it is the final trial; otherwise the game restarts and the best
    /// trajectory is replayed, cut short at `remaining` commands.
    fn finalize(&mut self, run: &mut Run<'_>, percept: &Percept, remaining: u32) -> Result<(i64, bool)> {
        if percept.score >= self.state.best.final_score {
            return Ok((percept.score, false));
        }
        let mut current = run.env.restart()?;
        self.state.mode = Mode::Final;
        let life = self.state.trajectory.life + 1;
        let commands: Vec<String> = self.state.best.commands().map(str::to_string).collect();
        for command in commands.into_iter().take(remaining as usize) {
            let label = label_of(&current.description);
            let new = run.env.step(&command)?;
            run.steps += 1;
            let decision = Decision {
                command,
                generator: Generator::Replay,
            };
            run.record(TurnRecord {
                step: run.steps,
                life,
                generator: decision.generator,
                command: decision.command,
                score: new.score,
                mode: Mode::Final.name().to_string(),
                label,
                failed: false,
                blacklisted: false,
                inventory_changed: false,
            });
            current = new;
            if current.is_terminal() {
                break;
            }
        }
        Ok((current.score, true))
    }
}
