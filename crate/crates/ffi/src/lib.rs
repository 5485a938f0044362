//! C ABI over the simulator and the worst-case oracle.
//!
//! Every function returns an [`RdvStatus`]; results come back through out
//! pointers. Simulations live behind the opaque [`RdvSim`] handle, created by
//! `rdv_sim_new*` and released with [`rdv_sim_free`]. Strings handed out by
//! the library are freed with [`rdv_string_free`]. After a failing call,
//! [`rdv_last_error`] describes the failure on the calling thread.
//!
//! Coordinates are door-normalized: the door is (0,0), `x` in `0..n`, `y` in
//! `0..m`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use grid_rendezvous::adversary::{parse_script, Activation, ResourcePolicy, SsyncAdversary};
use grid_rendezvous::config::{classify_phase, RobotState};
use grid_rendezvous::policy::{CornerGuard, EntryChoice};
use grid_rendezvous::sweep::{seeded_start, AdversaryKind};
use grid_rendezvous::trace_io::to_jsonl;
use grid_rendezvous::verifier::minimax::{worst_case_rounds_with, SearchOptions, WorstRounds};
use grid_rendezvous::{
    ssync_run, Episode, Error, GridSpec, Outcome, Phase, SimParams, StrategyId, Vertex,
};

/// Result code of every call. Values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad dimensions, door, or a vertex outside the grid.
    InvalidGrid = 2,
    /// Bad parameters, enum value, string or script.
    InvalidArgument = 3,
    /// The resource strategy or script produced an illegal or missing move.
    AdversaryFailed = 4,
    EpisodeFinished = 5,
    MalformedTrace = 6,
    StateSpaceExceeded = 7,
    /// A bug inside the library; the handle should be freed.
    Internal = 99,
}

impl From<&Error> for RdvStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionTooSmall { .. }
            | Error::InvalidDoor(_)
            | Error::OutOfGrid(_)
            | Error::LineOutOfGrid(_)
            | Error::NotOnBoundary(_)
            | Error::AtCorner(_)
            | Error::ParallelLines(_) => RdvStatus::InvalidGrid,
            Error::NotActive(_)
            | Error::InvalidParams(_)
            | Error::ScriptParse { .. }
            | Error::InvalidSchedule(_) => RdvStatus::InvalidArgument,
            Error::IllegalScript { .. }
            | Error::ScriptExhausted(_)
            | Error::IllegalResourceMove { .. } => RdvStatus::AdversaryFailed,
            Error::EpisodeFinished => RdvStatus::EpisodeFinished,
            Error::MalformedTrace(_) => RdvStatus::MalformedTrace,
            Error::StateSpaceExceeded(_) => RdvStatus::StateSpaceExceeded,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvAdversary {
    Greedy = 0,
    StayMaxRandom = 1,
    Oscillator = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvEntry {
    Default = 0,
    Alternate = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvCornerGuard {
    AnyCorner = 0,
    FarCorner = 1,
}

/// Episode parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RdvSimConfig {
    pub m: i32,
    pub n: i32,
    pub t_f: u32,
    /// When false, the initial resource vertex is derived from `seed`.
    pub has_g0: bool,
    pub g0_x: i32,
    pub g0_y: i32,
    /// Ignored by `rdv_sim_new_scripted`.
    pub adversary: RdvAdversary,
    pub seed: u64,
    /// 0 selects the default 10·(T_f+1)·(m+n).
    pub max_rounds: u64,
    pub entry: RdvEntry,
    pub corner_guard: RdvCornerGuard,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvProgress {
    Running = 0,
    Rendezvous = 1,
    MaxRoundsExceeded = 2,
    Violation = 3,
    NoEscape = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvRobotStatus {
    Outside = 0,
    Active = 1,
    Terminated = 2,
}

/// A robot; `x` and `y` are -1 while it is outside.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RdvRobot {
    pub status: RdvRobotStatus,
    pub x: i32,
    pub y: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvPhase {
    Entry = 0,
    Boundary = 1,
    Gather = 2,
    Done = 3,
}

/// Configuration at the start of `round`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RdvState {
    pub round: u64,
    pub r1: RdvRobot,
    pub r2: RdvRobot,
    pub res_x: i32,
    pub res_y: i32,
    pub res_fixed: bool,
    pub res_stay: u32,
    pub phase: RdvPhase,
    pub progress: RdvProgress,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdvWorstKind {
    Finite = 0,
    NonTerminating = 1,
    Violation = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RdvWorstCase {
    pub kind: RdvWorstKind,
    /// Valid when `kind` is `Finite`.
    pub rounds: u64,
    pub boundary_worst: u64,
    pub gather_worst: u64,
    pub states_explored: u64,
    /// Start of the witness play.
    pub witness_g0_x: i32,
    pub witness_g0_y: i32,
    pub witness_entry: RdvEntry,
    pub witness_len: u64,
}

/// Opaque simulation handle.
pub struct RdvSim {
    episode: Episode,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: RdvStatus, msg: impl Into<String>) -> RdvStatus {
    set_error(msg);
    status
}

fn lib_err(e: Error) -> RdvStatus {
    fail(RdvStatus::from(&e), e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guarded(f: impl FnOnce() -> RdvStatus) -> RdvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(RdvStatus::Internal, "internal panic"),
    }
}

fn params_from(cfg: &RdvSimConfig, strategy: Option<StrategyId>) -> Result<SimParams, Error> {
    let grid = GridSpec::new(cfg.m, cfg.n)?;
    let strategy = strategy.unwrap_or_else(|| {
        match cfg.adversary {
            RdvAdversary::Greedy => AdversaryKind::Greedy,
            RdvAdversary::StayMaxRandom => AdversaryKind::StayMaxRandom,
            RdvAdversary::Oscillator => AdversaryKind::Oscillator,
        }
        .strategy(&grid, cfg.t_f)
    });
    let g0 = if cfg.has_g0 {
        Vertex::new(cfg.g0_x, cfg.g0_y)
    } else {
        seeded_start(&grid, &strategy, cfg.seed)
    };
    let mut params = SimParams {
        seed: cfg.seed,
        entry: match cfg.entry {
            RdvEntry::Default => EntryChoice::Default,
            RdvEntry::Alternate => EntryChoice::Alternate,
        },
        corner_guard: match cfg.corner_guard {
            RdvCornerGuard::AnyCorner => CornerGuard::AnyCorner,
            RdvCornerGuard::FarCorner => CornerGuard::FarCorner,
        },
        ..SimParams::new(grid, cfg.t_f, g0, strategy)
    };
    if cfg.max_rounds > 0 {
        params.max_rounds = cfg.max_rounds;
    }
    Ok(params)
}

fn create(params: Result<SimParams, Error>, out: *mut *mut RdvSim) -> RdvStatus {
    let episode = match params.and_then(Episode::new) {
        Ok(e) => e,
        Err(e) => return lib_err(e),
    };
    let handle = Box::into_raw(Box::new(RdvSim { episode }));
    // SAFETY: the caller checked `out` for null and promises it is writable.
    unsafe { *out = handle };
    RdvStatus::Ok
}

/// Creates a simulation. `*out` receives the handle on success.
///
/// # Safety
/// `config` must point to a valid `RdvSimConfig` whose enum fields hold
/// declared values, and `out` to writable memory.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_new(
    config: *const RdvSimConfig,
    out: *mut *mut RdvSim,
) -> RdvStatus {
    guarded(|| {
        if config.is_null() || out.is_null() {
            return fail(RdvStatus::NullPointer, "null argument");
        }
        let cfg = unsafe { &*config };
        create(params_from(cfg, None), out)
    })
}

/// Creates a simulation whose resource follows `script`: one move per line,
/// `stay` or `step X Y`, `#` starts a comment.
///
/// # Safety
/// `config` and `script` must be valid, `script` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_new_scripted(
    config: *const RdvSimConfig,
    script: *const c_char,
    out: *mut *mut RdvSim,
) -> RdvStatus {
    guarded(|| {
        if config.is_null() || script.is_null() || out.is_null() {
            return fail(RdvStatus::NullPointer, "null argument");
        }
        let cfg = unsafe { &*config };
        let Ok(text) = unsafe { CStr::from_ptr(script) }.to_str() else {
            return fail(RdvStatus::InvalidArgument, "script is not UTF-8");
        };
        let moves = match parse_script(text) {
            Ok(m) => m,
            Err(e) => return lib_err(e),
        };
        let len = moves.len() as u64;
        let params = params_from(cfg, Some(StrategyId::Scripted { moves })).map(|mut p| {
            if cfg.max_rounds == 0 {
                p.max_rounds = len;
            }
            p
        });
        create(params, out)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must come from `rdv_sim_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_free(sim: *mut RdvSim) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

fn progress(outcome: Option<&Outcome>) -> RdvProgress {
    match outcome {
        None => RdvProgress::Running,
        Some(Outcome::Rendezvous { .. }) => RdvProgress::Rendezvous,
        Some(Outcome::MaxRoundsExceeded { .. }) => RdvProgress::MaxRoundsExceeded,
        Some(Outcome::Violation { .. }) => RdvProgress::Violation,
        Some(Outcome::NoEscape { .. }) => RdvProgress::NoEscape,
    }
}

fn with_sim(sim: *mut RdvSim, f: impl FnOnce(&mut RdvSim) -> RdvStatus) -> RdvStatus {
    guarded(|| {
        if sim.is_null() {
            return fail(RdvStatus::NullPointer, "null handle");
        }
        // SAFETY: non-null handles come from Box::into_raw in `create`.
        f(unsafe { &mut *sim })
    })
}

/// Plays one round. `*out` (may be null) receives the progress afterwards.
///
/// # Safety
/// `sim` must be a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_step(sim: *mut RdvSim, out: *mut RdvProgress) -> RdvStatus {
    with_sim(sim, |s| match s.episode.step() {
        Ok(o) => {
            let p = progress(o);
            if !out.is_null() {
                unsafe { *out = p };
            }
            RdvStatus::Ok
        }
        Err(e) => lib_err(e),
    })
}

/// Plays until the episode ends. `*out` (may be null) receives the result.
///
/// # Safety
/// `sim` must be a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_run(sim: *mut RdvSim, out: *mut RdvProgress) -> RdvStatus {
    with_sim(sim, |s| match s.episode.run() {
        Ok(o) => {
            let p = progress(Some(o));
            if !out.is_null() {
                unsafe { *out = p };
            }
            RdvStatus::Ok
        }
        Err(e) => lib_err(e),
    })
}

fn robot(r: RobotState) -> RdvRobot {
    let (status, pos) = match r {
        RobotState::Outside => (RdvRobotStatus::Outside, None),
        RobotState::Active(v) => (RdvRobotStatus::Active, Some(v)),
        RobotState::Terminated(v) => (RdvRobotStatus::Terminated, Some(v)),
    };
    RdvRobot {
        status,
        x: pos.map_or(-1, |v| v.x),
        y: pos.map_or(-1, |v| v.y),
    }
}

/// Copies the current configuration into `*out`.
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_state(sim: *mut RdvSim, out: *mut RdvState) -> RdvStatus {
    with_sim(sim, |s| {
        if out.is_null() {
            return fail(RdvStatus::NullPointer, "null out pointer");
        }
        let c = s.episode.config();
        let state = RdvState {
            round: c.round,
            r1: robot(c.r1),
            r2: robot(c.r2),
            res_x: c.res.position.x,
            res_y: c.res.position.y,
            res_fixed: c.res.fixed,
            res_stay: c.res.stay_count,
            phase: match classify_phase(c) {
                Phase::Entry => RdvPhase::Entry,
                Phase::Boundary => RdvPhase::Boundary,
                Phase::Gather => RdvPhase::Gather,
                Phase::Done => RdvPhase::Done,
            },
            progress: progress(s.episode.outcome()),
        };
        unsafe { *out = state };
        RdvStatus::Ok
    })
}

/// The finished episode's trace as JSON lines; `InvalidArgument` while the
/// episode is still running. Free the string with `rdv_string_free`.
///
/// # Safety
/// `sim` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_sim_trace_jsonl(sim: *mut RdvSim, out: *mut *mut c_char) -> RdvStatus {
    with_sim(sim, |s| {
        if out.is_null() {
            return fail(RdvStatus::NullPointer, "null out pointer");
        }
        let Some(trace) = s.episode.trace() else {
            return fail(RdvStatus::InvalidArgument, "episode still running");
        };
        let text = CString::new(to_jsonl(&trace)).expect("JSON has no NUL bytes");
        unsafe { *out = text.into_raw() };
        RdvStatus::Ok
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rdv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Exhaustive worst case for one cell.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_worst_case(
    m: i32,
    n: i32,
    t_f: u32,
    branch_entry: bool,
    corner_guard: RdvCornerGuard,
    out: *mut RdvWorstCase,
) -> RdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail(RdvStatus::NullPointer, "null out pointer");
        }
        let opts = SearchOptions {
            branch_entry,
            corner_guard: match corner_guard {
                RdvCornerGuard::AnyCorner => CornerGuard::AnyCorner,
                RdvCornerGuard::FarCorner => CornerGuard::FarCorner,
            },
            ..SearchOptions::default()
        };
        let r = match worst_case_rounds_with(m, n, t_f, &opts) {
            Ok(r) => r,
            Err(e) => return lib_err(e),
        };
        let (kind, rounds) = match r.worst_rounds {
            WorstRounds::Finite { rounds } => (RdvWorstKind::Finite, rounds),
            WorstRounds::NonTerminating => (RdvWorstKind::NonTerminating, 0),
            WorstRounds::Violation { .. } => (RdvWorstKind::Violation, 0),
        };
        let w = &r.witness;
        unsafe {
            *out = RdvWorstCase {
                kind,
                rounds,
                boundary_worst: r.boundary_worst,
                gather_worst: r.gather_worst,
                states_explored: r.states_explored as u64,
                witness_g0_x: w.g0.x,
                witness_g0_y: w.g0.y,
                witness_entry: match w.entry {
                    EntryChoice::Default => RdvEntry::Default,
                    EntryChoice::Alternate => RdvEntry::Alternate,
                },
                witness_len: w.moves.len() as u64,
            }
        };
        RdvStatus::Ok
    })
}

/// Semi-synchronous run against the escaping resource, one robot activated
/// per round in alternation, resource starting at the far corner.
/// `*out` receives the result, `*rounds` (may be null) the last round.
///
/// # Safety
/// `out` must be writable; `rounds` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rdv_ssync_escape(
    m: i32,
    n: i32,
    t_f: u32,
    max_rounds: u64,
    lookahead: u32,
    out: *mut RdvProgress,
    rounds: *mut u64,
) -> RdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail(RdvStatus::NullPointer, "null out pointer");
        }
        let run = || -> Result<(RdvProgress, u64), Error> {
            let grid = GridSpec::new(m, n)?;
            let params = SimParams {
                max_rounds,
                ..SimParams::new(grid, t_f, grid.far_corner(), StrategyId::GreedyEvade)
            };
            let adversary = SsyncAdversary::new(
                vec![Activation::FIRST, Activation::SECOND],
                2,
                ResourcePolicy::Escape { lookahead },
            )?;
            let trace = ssync_run(&params, &adversary)?;
            Ok((progress(Some(&trace.outcome)), trace.last().round))
        };
        match run() {
            Ok((p, r)) => {
                unsafe { *out = p };
                if !rounds.is_null() {
                    unsafe { *rounds = r };
                }
                RdvStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// Message of the last failing call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rdv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn rdv_status_name(status: RdvStatus) -> *const c_char {
    let name: &'static CStr = match status {
        RdvStatus::Ok => c"ok",
        RdvStatus::NullPointer => c"null-pointer",
        RdvStatus::InvalidGrid => c"invalid-grid",
        RdvStatus::InvalidArgument => c"invalid-argument",
        RdvStatus::AdversaryFailed => c"adversary-failed",
        RdvStatus::EpisodeFinished => c"episode-finished",
        RdvStatus::MalformedTrace => c"malformed-trace",
        RdvStatus::StateSpaceExceeded => c"state-space-exceeded",
        RdvStatus::Internal => c"internal",
    };
    name.as_ptr()
}
