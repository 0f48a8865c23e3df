//! C interface to the agent and its game environments.
//!
//! Every function returns an [`IfaStatus`]; on failure the message is
//! available from [`ifa_last_error`] on the same thread. Strings handed out
//! by the library are owned by the caller and released with
//! [`ifa_string_free`]. Sessions are opaque and released with
//! [`ifa_session_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use ifagent::agent::AgentConfig;
use ifagent::env::{Environment, InterpreterConfig, Percept};
use ifagent::harness::{modified_score, run_episode, Game, GameSource, Resources};
use ifagent::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Usage = 3,
    Format = 4,
    Io = 5,
    Environment = 6,
    NotFound = 7,
    Panic = 8,
}

/// One game response. `description` belongs to the caller.
#[repr(C)]
#[derive(Debug)]
pub struct IfaPercept {
    pub description: *mut c_char,
    pub score: i64,
    pub moves: u32,
    pub dead: bool,
    pub won: bool,
}

/// Summary of one played episode.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IfaEpisode {
    pub final_score: i64,
    pub best_observed: i64,
    /// -1 when the game does not report it.
    pub max_score: i64,
    /// NaN when the maximum score is unknown.
    pub modified_score: f64,
    pub steps: u32,
    pub lives: u32,
    pub won: bool,
    pub replayed: bool,
    /// The environment broke down mid-episode; see the transcript.
    pub failed: bool,
}

/// A game plus agent settings. Manual play through [`ifa_session_step`]
/// and whole agent episodes through [`ifa_session_run`] use separate game
/// instances.
pub struct IfaSession {
    game: Game,
    config: AgentConfig,
    resources: Resources,
    env: Box<dyn Environment>,
    transcript: Option<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(IfaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Format { .. } => IfaStatus::Format,
            Error::Io { .. } => IfaStatus::Io,
            Error::Environment(_) => IfaStatus::Environment,
            Error::Usage(_) => IfaStatus::Usage,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IfaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IfaStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {message}"));
            IfaStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(IfaStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IfaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(IfaStatus::NullArgument, format!("{what} is NULL")))
}

fn owned(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior NUL").into_raw()
}

fn config_from(text: Option<&str>) -> Result<AgentConfig, Failure> {
    let mut config = AgentConfig::default();
    if let Some(text) = text {
        config.apply(text, "config")?;
    }
    config.validate()?;
    Ok(config)
}

fn open_session(game: Game, config: AgentConfig, out: &mut *mut IfaSession) -> Result<(), Failure> {
    let (env, _) = game.open()?;
    let session = IfaSession {
        game,
        config,
        resources: Resources::bundled(),
        env,
        transcript: None,
    };
    *out = Box::into_raw(Box::new(session));
    Ok(())
}

fn fill_percept(p: &Percept, out: &mut IfaPercept) {
    *out = IfaPercept {
        description: owned(&p.description),
        score: p.score,
        moves: p.moves,
        dead: p.dead,
        won: p.won,
    };
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ifa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ifa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ifa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens a simulator session on a bundled world name or a `.world` file.
/// `config` holds `key = value` lines and may be NULL for the defaults.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_open(
    world: *const c_char,
    config: *const c_char,
    out: *mut *mut IfaSession,
) -> IfaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let world = text(world, "world")?;
        let config = config_from(optional_text(config, "config")?)?;
        let game = match Game::bundled(world) {
            Some(g) => g,
            None if Path::new(world).is_file() => Game::load_world(Path::new(world))?,
            None => return Err(Failure(IfaStatus::NotFound, format!("no bundled world or file named {world:?}"))),
        };
        open_session(game, config, out)
    })
}

/// Opens a session on a story file run by an external interpreter.
/// `program` may be NULL to use the `IFAGENT_INTERPRETER` variable;
/// `max_score` below 0 means unknown.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_open_interpreter(
    program: *const c_char,
    story: *const c_char,
    max_score: i64,
    config: *const c_char,
    out: *mut *mut IfaSession,
) -> IfaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let program = optional_text(program, "program")?.map(PathBuf::from);
        let story = PathBuf::from(text(story, "story")?);
        let config = config_from(optional_text(config, "config")?)?;
        let mut interp = InterpreterConfig::new(program, story.clone())?;
        interp.max_score = (max_score >= 0).then_some(max_score);
        let id = story
            .file_stem()
            .map_or("story".to_string(), |s| s.to_string_lossy().into_owned());
        let game = Game {
            id,
            source: GameSource::Interpreter(interp),
        };
        open_session(game, config, out)
    })
}

/// Releases a session. NULL is ignored.
///
/// # Safety
/// `session` must come from `ifa_session_open*` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_free(session: *mut IfaSession) {
    if !session.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(session))));
    }
}

/// The current percept of the manual game, e.g. the opening one.
///
/// # Safety
/// `session` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_current(session: *mut IfaSession, out: *mut IfaPercept) -> IfaStatus {
    guard(|| {
        let s = out_ref(session, "session")?;
        fill_percept(s.env.current(), out_ref(out, "out")?);
        Ok(())
    })
}

/// Sends one command to the manual game.
///
/// # Safety
/// `session` must be live; `command` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_step(
    session: *mut IfaSession,
    command: *const c_char,
    out: *mut IfaPercept,
) -> IfaStatus {
    guard(|| {
        let s = out_ref(session, "session")?;
        let out = out_ref(out, "out")?;
        let command = text(command, "command")?;
        let p = s.env.step(command)?;
        fill_percept(&p, out);
        Ok(())
    })
}

/// Restarts the manual game.
///
/// # Safety
/// `session` must be live; `out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_restart(session: *mut IfaSession, out: *mut IfaPercept) -> IfaStatus {
    guard(|| {
        let s = out_ref(session, "session")?;
        let p = s.env.restart()?;
        if let Some(out) = out.as_mut() {
            fill_percept(&p, out);
        }
        Ok(())
    })
}

/// Lets the agent play a fresh game for at most `budget` commands.
///
/// # Safety
/// `session` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_run(
    session: *mut IfaSession,
    budget: u32,
    seed: u64,
    out: *mut IfaEpisode,
) -> IfaStatus {
    guard(|| {
        let s = out_ref(session, "session")?;
        let out = out_ref(out, "out")?;
        let (report, outcome) = run_episode(&s.game, &s.config, &s.resources, budget, seed)?;
        s.transcript = Some(outcome.transcript());
        *out = IfaEpisode {
            final_score: report.raw_score,
            best_observed: report.best_observed,
            max_score: report.max_score.unwrap_or(-1),
            modified_score: report.modified_score.unwrap_or(f64::NAN),
            steps: report.steps_used,
            lives: report.lives,
            won: report.won,
            replayed: report.replayed,
            failed: report.failed,
        };
        Ok(())
    })
}

/// Transcript of the last [`ifa_session_run`], one tab-separated line per
/// command. Writes NULL to `out` when nothing has been run yet.
///
/// # Safety
/// `session` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_session_transcript(session: *mut IfaSession, out: *mut *mut c_char) -> IfaStatus {
    guard(|| {
        let s = out_ref(session, "session")?;
        let out = out_ref(out, "out")?;
        *out = s.transcript.as_deref().map_or(ptr::null_mut(), owned);
        Ok(())
    })
}

/// `raw / max`, plus 0.2 when `raw` is positive.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifa_modified_score(raw: f64, max: f64, out: *mut f64) -> IfaStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = modified_score(raw, max)?;
        Ok(())
    })
}
