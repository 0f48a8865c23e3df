//! Adapter for an external Z-machine interpreter running in dumb-terminal mode.
//!
//! Commands go to the child's stdin one per line; a response is everything
//! read from stdout up to the next prompt.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use regex::Regex;

use super::{Backend, Environment, Percept, SessionHandle};
use crate::error::{Error, Result};
use crate::text::normalize_whitespace;

/// Environment variable naming the interpreter binary.
pub const INTERPRETER_ENV_VAR: &str = "IFAGENT_INTERPRETER";

/// Patterns used to pull structure out of raw interpreter output.
#[derive(Debug, Clone)]
pub struct OutputPatterns {
    /// A line matching any of these is a status line and is dropped.
    pub status_lines: Vec<Regex>,
    /// First capture group is the score. Searched on status lines only.
    pub score: Vec<Regex>,
    /// First capture group is the move count. Searched on status lines only.
    pub moves: Vec<Regex>,
    /// `score/moves` pairs as printed by some status bars.
    pub score_moves_pair: Regex,
    pub death: Vec<String>,
    pub win: Vec<String>,
    /// Text that ends every response; stripped from the description.
    pub prompt: String,
}

impl Default for OutputPatterns {
    fn default() -> Self {
        let re = |s: &str| Regex::new(s).expect("static pattern");
        OutputPatterns {
            status_lines: vec![re(r"Score:\s*-?\d+"), re(r"Moves:\s*\d+"), re(r"^\s*\S.*\s{2,}-?\d+/\d+\s*$")],
            score: vec![re(r"Score:\s*(-?\d+)")],
            moves: vec![re(r"Moves:\s*(\d+)"), re(r"Turns:\s*(\d+)")],
            score_moves_pair: re(r"(-?\d+)/(\d+)\s*$"),
            death: vec![
                "*** You have died ***".into(),
                "You have died".into(),
                "*** You are dead ***".into(),
            ],
            win: vec!["*** You have won ***".into()],
            prompt: "> ".into(),
        }
    }
}

/// Turns one raw response into a percept.
///
/// Scores and move counters that are not printed carry over from `prev`.
pub fn parse_interpreter_output(raw: &str, prev: Option<&Percept>, patterns: &OutputPatterns) -> Percept {
    let mut score = prev.map_or(0, |p| p.score);
    let mut moves = prev.map_or(0, |p| p.moves);

    let body = raw.trim_end();
    let prompt = patterns.prompt.trim_end();
    let body = if !prompt.is_empty() {
        body.strip_suffix(prompt).unwrap_or(body)
    } else {
        body
    };

    let mut kept = Vec::new();
    for line in body.lines() {
        if patterns.status_lines.iter().any(|re| re.is_match(line)) {
            let mut found_score = false;
            for re in &patterns.score {
                if let Some(v) = re.captures(line).and_then(|c| c[1].parse().ok()) {
                    score = v;
                    found_score = true;
                }
            }
            let mut found_moves = false;
            for re in &patterns.moves {
                if let Some(v) = re.captures(line).and_then(|c| c[1].parse().ok()) {
                    moves = v;
                    found_moves = true;
                }
            }
            if !found_score && !found_moves {
                if let Some(c) = patterns.score_moves_pair.captures(line) {
                    if let (Ok(s), Ok(m)) = (c[1].parse(), c[2].parse()) {
                        score = s;
                        moves = m;
                    }
                }
            }
        } else {
            kept.push(line);
        }
    }
    let description = normalize_whitespace(&kept.join("\n"));
    let dead = patterns.death.iter().any(|p| raw.contains(p.as_str()));
    let won = !dead && patterns.win.iter().any(|p| raw.contains(p.as_str()));
    Percept {
        description,
        score,
        moves,
        dead,
        won,
        inventory_listing: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartStrategy {
    /// Kill the interpreter and spawn a fresh one.
    Respawn,
    /// Send the reserved `restart` command and confirm.
    Command,
}

#[derive(Debug, Clone)]
pub struct InterpreterConfig {
    pub program: PathBuf,
    /// Arguments passed before the story file, e.g. dumb-mode flags.
    pub args: Vec<String>,
    pub story: PathBuf,
    pub patterns: OutputPatterns,
    pub timeout: Duration,
    pub restart: RestartStrategy,
    pub inventory_command: String,
    pub max_score: Option<i64>,
}

impl InterpreterConfig {
    /// Uses `program` if given, otherwise the [`INTERPRETER_ENV_VAR`] variable.
    pub fn new(program: Option<PathBuf>, story: PathBuf) -> Result<Self> {
        let program = program
            .or_else(|| std::env::var_os(INTERPRETER_ENV_VAR).map(PathBuf::from))
            .ok_or_else(|| {
                Error::Environment(format!("no interpreter given and {INTERPRETER_ENV_VAR} is unset"))
            })?;
        Ok(InterpreterConfig {
            program,
            args: Vec::new(),
            story,
            patterns: OutputPatterns::default(),
            timeout: Duration::from_secs(5),
            restart: RestartStrategy::Respawn,
            inventory_command: "inventory".into(),
            max_score: None,
        })
    }
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    output: Receiver<Vec<u8>>,
}

impl Process {
    fn spawn(config: &InterpreterConfig) -> Result<Self> {
        let mut child = Command::new(&config.program)
            .args(&config.args)
            .arg(&config.story)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Environment(format!("cannot start {}: {e}", config.program.display())))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut buf = [0u8; 4096];
            loop {
                match stdout.read(&mut buf) {
                    Ok(0) | Err(_) => break,
                    Ok(n) => {
                        if tx.send(buf[..n].to_vec()).is_err() {
                            break;
                        }
                    }
                }
            }
        });
        Ok(Process {
            child,
            stdin,
            output: rx,
        })
    }

    fn send(&mut self, line: &str) -> Result<()> {
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| Error::Environment(format!("interpreter input closed: {e}")))
    }

    /// Reads until the output ends with `prompt`, or the process exits.
    fn read_response(&mut self, prompt: &str, timeout: Duration) -> Result<String> {
        let deadline = Instant::now() + timeout;
        let mut bytes = Vec::new();
        loop {
            let text = String::from_utf8_lossy(&bytes);
            if !prompt.is_empty() && text.ends_with(prompt) {
                return Ok(text.into_owned());
            }
            let left = deadline.saturating_duration_since(Instant::now());
            match self.output.recv_timeout(left) {
                Ok(chunk) => bytes.extend_from_slice(&chunk),
                Err(RecvTimeoutError::Disconnected) => {
                    if bytes.is_empty() {
                        return Err(Error::Environment("interpreter exited".into()));
                    }
                    return Ok(String::from_utf8_lossy(&bytes).into_owned());
                }
                Err(RecvTimeoutError::Timeout) => {
                    return Err(Error::Environment(format!(
                        "no prompt {prompt:?} within {timeout:?}; got {:?}",
                        String::from_utf8_lossy(&bytes)
                    )))
                }
            }
        }
    }
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A live interpreter child process.
pub struct InterpreterSession {
    config: InterpreterConfig,
    process: Process,
    handle: SessionHandle,
    last: Percept,
}

impl InterpreterSession {
    pub fn start(config: InterpreterConfig) -> Result<(Self, Percept)> {
        let mut process = Process::spawn(&config)?;
        let raw = process.read_response(&config.patterns.prompt, config.timeout)?;
        let opening = parse_interpreter_output(&raw, None, &config.patterns);
        let session = InterpreterSession {
            config,
            process,
            handle: SessionHandle::new(Backend::Interpreter),
            last: opening.clone(),
        };
        Ok((session, opening))
    }

    fn exchange(&mut self, command: &str) -> Result<String> {
        self.process.send(command)?;
        self.process
            .read_response(&self.config.patterns.prompt, self.config.timeout)
    }
}

/// Parses an inventory listing: one item per line after the header.
pub(crate) fn parse_inventory_listing(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    if lower.contains("empty-handed") || lower.contains("carrying nothing") || lower.contains("have nothing") {
        return Vec::new();
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.ends_with(':') && *l != ">")
        .map(|l| {
            let l = l.trim_end_matches('.').to_lowercase();
            ["a ", "an ", "the ", "some "]
                .iter()
                .find_map(|a| l.strip_prefix(a))
                .map(str::to_string)
                .unwrap_or(l)
        })
        .collect()
}

impl Environment for InterpreterSession {
    fn handle(&self) -> &SessionHandle {
        &self.handle
    }

    fn current(&self) -> &Percept {
        &self.last
    }

    fn step(&mut self, command: &str) -> Result<Percept> {
        if self.last.is_terminal() {
            return Err(Error::Usage("the game is over; restart before stepping".into()));
        }
        let raw = self.exchange(command)?;
        let percept = parse_interpreter_output(&raw, Some(&self.last), &self.config.patterns);
        self.handle.steps += 1;
        self.last = percept.clone();
        Ok(percept)
    }

    fn restart(&mut self) -> Result<Percept> {
        let raw = match self.config.restart {
            RestartStrategy::Respawn => {
                self.process = Process::spawn(&self.config)?;
                self.process
                    .read_response(&self.config.patterns.prompt, self.config.timeout)?
            }
            RestartStrategy::Command => {
                let reply = self.exchange("restart")?;
                if reply.contains('?') {
                    self.exchange("y")?
                } else {
                    reply
                }
            }
        };
        let opening = parse_interpreter_output(&raw, None, &self.config.patterns);
        self.handle.restarted();
        self.last = opening.clone();
        Ok(opening)
    }

    fn query_inventory(&mut self) -> Result<Vec<String>> {
        let command = self.config.inventory_command.clone();
        let raw = self.exchange(&command)?;
        let prompt = self.config.patterns.prompt.trim_end();
        let body = raw.trim_end();
        let body = body.strip_suffix(prompt).unwrap_or(body);
        let lines: Vec<&str> = body
            .lines()
            .filter(|l| !self.config.patterns.status_lines.iter().any(|re| re.is_match(l)))
            .collect();
        // drop the "You are carrying:" header line
        let listing = lines
            .iter()
            .position(|l| l.trim_end().ends_with(':'))
            .map_or(&lines[..], |i| &lines[i + 1..]);
        if lines.iter().any(|l| l.to_lowercase().contains("empty-handed")) {
            return Ok(Vec::new());
        }
        Ok(parse_inventory_listing(&listing.join("\n")))
    }

    fn max_score(&self) -> Option<i64> {
        self.config.max_score
    }
}
