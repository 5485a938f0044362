//! The `rendezvous` command line.
//!
//! Exit codes: 0 success (rendezvous, or no capture for `ssync-demo`), 1 bad
//! flags or I/O error, 2 round limit reached, 3 protocol violation, 4 a check
//! failed (`verify`, or a capture or stuck resource in `ssync-demo`).
//!
//! Vertex flags are `x,y` in door-normalized coordinates: the door is (0,0),
//! `x` runs along the `n` columns and `y` along the `m` rows.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::adversary::{
    format_script, parse_script, Activation, ResourcePolicy, SsyncAdversary, StrategyId,
    DEFAULT_ESCAPE_LOOKAHEAD,
};
use crate::engine::{run_episode, ssync_run, Outcome, SimParams};
use crate::grid::{GridSpec, Vertex};
use crate::policy::{CornerGuard, DynamicRendezvous, EntryChoice};
use crate::render::{render_ascii, render_svg, RenderOptions};
use crate::sweep::{seeded_start, AdversaryKind, SweepRow, SweepSpec};
use crate::trace_io::{from_jsonl, to_jsonl};
use crate::verifier::minimax::{worst_case_rounds_with, SearchOptions, WorstCaseResult};
use crate::verifier::report::{bound_report, DEFAULT_ENVELOPE_CONSTANT};
use crate::verifier::{check_invariants, equivariance_suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MAX_ROUNDS: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rendezvous",
    version,
    about = "Two robots, one moving resource, an m x n grid"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one synchronous episode.
    Run(RunArgs),
    /// Run seeded episodes over ranges of grids and write one CSV row each.
    Sweep(SweepArgs),
    /// Exhaustive worst case per cell, reported against C·(T_f+1)·(m+n).
    Worst(WorstArgs),
    /// Semi-synchronous run against the escaping resource.
    SsyncDemo(SsyncArgs),
    /// Check a trace's invariants, or run the built-in suite.
    Verify(VerifyArgs),
    /// Draw one round of a trace.
    Render(RenderArgs),
}

/// Inclusive integer set: `3`, `3..5`, `3..=5` or `3,4,6`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSet(pub Vec<i64>);

impl FromStr for IntSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad number `{t}`: {e}"))
        };
        let values: Vec<i64> = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<Result<_, _>>()?
        };
        if values.is_empty() {
            return Err("empty set".into());
        }
        Ok(IntSet(values))
    }
}

impl IntSet {
    fn dims(&self) -> anyhow::Result<Vec<i32>> {
        self.0
            .iter()
            .map(|&v| i32::try_from(v).context("dimension out of range"))
            .collect()
    }

    fn tfs(&self) -> anyhow::Result<Vec<u32>> {
        self.0
            .iter()
            .map(|&v| u32::try_from(v).context("T_f must be non-negative"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryArg {
    Greedy,
    StayMaxRandom,
    Oscillator,
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntryArg {
    Default,
    Alternate,
}

impl From<EntryArg> for EntryChoice {
    fn from(e: EntryArg) -> Self {
        match e {
            EntryArg::Default => EntryChoice::Default,
            EntryArg::Alternate => EntryChoice::Alternate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CornerGuardArg {
    AnyCorner,
    FarCorner,
}

impl From<CornerGuardArg> for CornerGuard {
    fn from(c: CornerGuardArg) -> Self {
        match c {
            CornerGuardArg::AnyCorner => CornerGuard::AnyCorner,
            CornerGuardArg::FarCorner => CornerGuard::FarCorner,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Door edge the first robot takes when both are open.
    #[arg(long, value_enum, default_value = "default")]
    pub entry: EntryArg,
    /// Corners considered by the boundary rule's hold guard.
    #[arg(long, value_enum, default_value = "any-corner")]
    pub corner_guard: CornerGuardArg,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub m: i32,
    #[arg(long)]
    pub n: i32,
    #[arg(long)]
    pub tf: u32,
    /// Initial resource vertex `x,y`. Defaults to one derived from the seed
    /// (the oscillator's own start for `oscillator`).
    #[arg(long)]
    pub g0: Option<Vertex>,
    #[arg(long, value_enum)]
    pub adversary: AdversaryArg,
    /// Resource script for `--adversary scripted`, one move per line.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to 10·(T_f+1)·(m+n), or the script length when scripted.
    #[arg(long)]
    pub max_rounds: Option<u64>,
    /// Write the trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub m: IntSet,
    #[arg(long)]
    pub n: IntSet,
    #[arg(long)]
    pub tf: IntSet,
    /// Comma-separated: greedy, stay-max-random, oscillator.
    #[arg(long, value_delimiter = ',', default_value = "greedy,stay-max-random")]
    pub adversary: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub episodes: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also run the trace monitors on every episode.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WorstArgs {
    #[arg(long)]
    pub m: IntSet,
    #[arg(long)]
    pub n: IntSet,
    #[arg(long)]
    pub tf: IntSet,
    /// Search only the default entry choice.
    #[arg(long)]
    pub no_branch_entry: bool,
    #[arg(long, value_enum, default_value = "any-corner")]
    pub corner_guard: CornerGuardArg,
    #[arg(long, default_value_t = DEFAULT_ENVELOPE_CONSTANT)]
    pub constant: u64,
    #[arg(long, default_value_t = crate::verifier::minimax::DEFAULT_STATE_LIMIT)]
    pub state_limit: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write each cell's witness as a resource script into this directory.
    #[arg(long)]
    pub witness_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SsyncArgs {
    #[arg(long)]
    pub m: i32,
    #[arg(long)]
    pub n: i32,
    #[arg(long)]
    pub tf: u32,
    #[arg(long, default_value_t = 5000)]
    pub rounds: u64,
    /// Initial resource vertex; the far corner when absent.
    #[arg(long)]
    pub g0: Option<Vertex>,
    /// Rounds the escaping resource looks ahead (0: first allowed move).
    #[arg(long, default_value_t = DEFAULT_ESCAPE_LOOKAHEAD)]
    pub lookahead: u32,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Trace to check. Without it the built-in suite runs.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Episodes per cell in the built-in suite.
    #[arg(long, default_value_t = 20)]
    pub episodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Ascii,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, value_enum, default_value = "ascii")]
    pub format: FormatArg,
    /// Round to draw; the last one when absent.
    #[arg(long)]
    pub round: Option<u64>,
    /// Overlay L, L' and R_Con when the round is an InitGather one.
    #[arg(long)]
    pub frames: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing to `out`
/// and `err`. Returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Worst(a) => cmd_worst(&a, out),
        Command::SsyncDemo(a) => cmd_ssync_demo(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Render(a) => cmd_render(&a, out),
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn outcome_line(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Rendezvous { rounds } => format!("rendezvous rounds={rounds}"),
        Outcome::MaxRoundsExceeded { rounds } => format!("max-rounds-exceeded rounds={rounds}"),
        Outcome::Violation { round, detail } => format!("violation round={round}: {detail}"),
        Outcome::NoEscape { round } => format!("no-escape round={round}"),
    }
}

fn outcome_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Rendezvous { .. } => EXIT_OK,
        Outcome::MaxRoundsExceeded { .. } => EXIT_MAX_ROUNDS,
        Outcome::Violation { .. } => EXIT_VIOLATION,
        Outcome::NoEscape { .. } => EXIT_CHECK_FAILED,
    }
}

/// Parameters of a `run` invocation, validated.
pub fn run_params(a: &RunArgs) -> anyhow::Result<SimParams> {
    let grid = GridSpec::new(a.m, a.n)?;
    let strategy = match a.adversary {
        AdversaryArg::Scripted => {
            let path = a
                .script
                .as_ref()
                .context("--adversary scripted needs --script PATH")?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            StrategyId::Scripted {
                moves: parse_script(&text)?,
            }
        }
        other => {
            if a.script.is_some() {
                bail!("--script is only used with --adversary scripted");
            }
            let kind = match other {
                AdversaryArg::Greedy => AdversaryKind::Greedy,
                AdversaryArg::StayMaxRandom => AdversaryKind::StayMaxRandom,
                _ => AdversaryKind::Oscillator,
            };
            kind.strategy(&grid, a.tf)
        }
    };
    let g0 = match a.g0 {
        Some(v) => v,
        None => seeded_start(&grid, &strategy, a.seed),
    };
    let mut params = SimParams {
        seed: a.seed,
        entry: a.policy.entry.into(),
        corner_guard: a.policy.corner_guard.into(),
        ..SimParams::new(grid, a.tf, g0, strategy)
    };
    params.max_rounds = match (a.max_rounds, &params.strategy) {
        (Some(r), _) => r,
        (None, StrategyId::Scripted { moves }) => moves.len() as u64,
        (None, _) => params.max_rounds,
    };
    params.validate()?;
    Ok(params)
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let params = run_params(a)?;
    let trace = run_episode(&params)?;
    if let Some(path) = &a.trace {
        write_file(path, &to_jsonl(&trace))?;
    }
    writeln!(out, "{}", outcome_line(&trace.outcome))?;
    Ok(outcome_code(&trace.outcome))
}

fn adversary_kinds(names: &[String]) -> anyhow::Result<Vec<AdversaryKind>> {
    names
        .iter()
        .map(|s| Ok(s.trim().parse::<AdversaryKind>()?))
        .collect()
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let spec = SweepSpec {
        m: a.m.dims()?,
        n: a.n.dims()?,
        tf: a.tf.tfs()?,
        adversaries: adversary_kinds(&a.adversary)?,
        episodes: a.episodes,
        seed_base: a.seed_base,
        entry: a.policy.entry.into(),
        corner_guard: a.policy.corner_guard.into(),
    };
    let episodes = spec.episodes()?;
    // open the destination before the work so a bad path fails fast
    let mut file = match &a.out {
        Some(p) => Some(
            std::fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        ),
        None => None,
    };
    let mut csv = csv::Writer::from_writer(Vec::new());
    let (mut total, mut met, mut violations, mut monitor_failures) = (0u64, 0u64, 0u64, 0u64);
    for params in &episodes {
        let trace = run_episode(params)?;
        total += 1;
        match trace.outcome {
            Outcome::Rendezvous { .. } => met += 1,
            Outcome::Violation { .. } => violations += 1,
            _ => {}
        }
        if a.check && !check_invariants(&trace)?.passed() {
            monitor_failures += 1;
        }
        csv.serialize(SweepRow::from_trace(&trace))?;
    }
    let bytes = csv.into_inner()?;
    let mut summary = format!(
        "episodes={total} rendezvous={met} ({:.1}%) violations={violations}",
        100.0 * met as f64 / total.max(1) as f64
    );
    if a.check {
        let _ = write!(summary, " monitor-failures={monitor_failures}");
    }
    match file.as_mut() {
        Some(f) => {
            f.write_all(&bytes)?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(&bytes)?;
            eprintln!("{summary}");
        }
    }
    Ok(if violations > 0 {
        EXIT_VIOLATION
    } else if met < total {
        EXIT_MAX_ROUNDS
    } else if monitor_failures > 0 {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    })
}

/// Script text of a witness, with the replay command in a comment.
pub fn witness_script(r: &WorstCaseResult, script_path: &Path) -> String {
    let w = &r.witness;
    let entry = match w.entry {
        EntryChoice::Default => "default",
        EntryChoice::Alternate => "alternate",
    };
    let guard = match w.corner_guard {
        CornerGuard::AnyCorner => "any-corner",
        CornerGuard::FarCorner => "far-corner",
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# worst case {}x{} tf {}: {}",
        r.m,
        r.n,
        r.t_f,
        match r.worst_rounds.finite() {
            Some(k) => format!("{k} rounds"),
            None => format!("{:?}", r.worst_rounds),
        }
    );
    let _ = writeln!(
        s,
        "# rendezvous run --m {} --n {} --tf {} --g0 {},{} --entry {entry} --corner-guard {guard} --adversary scripted --script {}",
        r.m,
        r.n,
        r.t_f,
        w.g0.x,
        w.g0.y,
        script_path.display()
    );
    s.push_str(&format_script(&w.moves));
    s
}

fn cmd_worst(a: &WorstArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let opts = SearchOptions {
        branch_entry: !a.no_branch_entry,
        corner_guard: a.corner_guard.into(),
        state_limit: a.state_limit,
    };
    if let Some(dir) = &a.witness_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut results = Vec::new();
    for m in a.m.dims()? {
        for n in a.n.dims()? {
            for tf in a.tf.tfs()? {
                let r = worst_case_rounds_with(m, n, tf, &opts)?;
                if let Some(dir) = &a.witness_dir {
                    let path = dir.join(format!("{m}x{n}-tf{tf}.script"));
                    write_file(&path, &witness_script(&r, &path))?;
                }
                results.push(r);
            }
        }
    }
    let report = bound_report(&results, a.constant);
    let csv = report.to_csv();
    match &a.out {
        Some(p) => write_file(p, &csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    let flagged = report.flagged().count();
    let mut line = format!("cells={} flagged={flagged}", report.rows.len());
    if let Some((lo, hi)) = report.ratio_range() {
        let _ = write!(line, " ratio={lo:.3}..{hi:.3} spread={:.2}", hi / lo);
    }
    if a.out.is_some() {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    Ok(EXIT_OK)
}

fn cmd_ssync_demo(a: &SsyncArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let grid = GridSpec::new(a.m, a.n)?;
    let params = SimParams {
        max_rounds: a.rounds,
        ..SimParams::new(
            grid,
            a.tf,
            a.g0.unwrap_or(grid.far_corner()),
            StrategyId::GreedyEvade,
        )
    };
    params.validate()?;
    let adversary = SsyncAdversary::new(
        vec![Activation::FIRST, Activation::SECOND],
        2,
        ResourcePolicy::Escape {
            lookahead: a.lookahead,
        },
    )?;
    let trace = ssync_run(&params, &adversary)?;
    if let Some(path) = &a.trace {
        write_file(path, &to_jsonl(&trace))?;
    }
    Ok(match &trace.outcome {
        Outcome::MaxRoundsExceeded { rounds } => {
            writeln!(out, "no rendezvous after {rounds} rounds")?;
            EXIT_OK
        }
        other => {
            writeln!(out, "{}", outcome_line(other))?;
            match other {
                Outcome::Violation { .. } => EXIT_VIOLATION,
                _ => EXIT_CHECK_FAILED,
            }
        }
    })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    if let Some(path) = &a.trace {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let trace = from_jsonl(&text)?;
        let report = check_invariants(&trace)?;
        write!(out, "{report}")?;
        return Ok(match report.first_failure() {
            None => EXIT_OK,
            Some((monitor, fail)) => {
                writeln!(out, "counterexample: {monitor} at round {}", fail.round)?;
                EXIT_CHECK_FAILED
            }
        });
    }

    let mut ok = true;
    for (m, n) in [(4, 5), (4, 4)] {
        let grid = GridSpec::new(m, n)?;
        let report = equivariance_suite(&grid, &DynamicRendezvous::default());
        writeln!(out, "equivariance {m}x{n}:")?;
        writeln!(out, "{report}")?;
        ok &= report.passed();
    }
    let spec = SweepSpec {
        m: vec![3, 4, 5],
        n: vec![3, 4, 5],
        tf: vec![1, 2],
        adversaries: vec![AdversaryKind::Greedy, AdversaryKind::StayMaxRandom],
        episodes: a.episodes,
        seed_base: 0,
        entry: EntryChoice::Default,
        corner_guard: CornerGuard::AnyCorner,
    };
    let mut failed = 0;
    for params in spec.episodes()? {
        let trace = run_episode(&params)?;
        let report = check_invariants(&trace)?;
        if let Some((monitor, fail)) = report.first_failure() {
            if failed == 0 {
                writeln!(
                    out,
                    "counterexample: {}x{} tf {} {} seed {}: {monitor} at round {}: {}",
                    params.grid.m(),
                    params.grid.n(),
                    params.t_f,
                    params.strategy.name(),
                    params.seed,
                    fail.round,
                    fail.detail
                )?;
            }
            failed += 1;
        }
    }
    writeln!(
        out,
        "monitors: {failed} of {} episodes failed",
        spec.episodes()?.len()
    )?;
    ok &= failed == 0;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_render(a: &RenderArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&a.trace)
        .with_context(|| format!("cannot read {}", a.trace.display()))?;
    let trace = from_jsonl(&text)?;
    let last = trace.records.len() as u64 - 1;
    let round = a.round.unwrap_or(last);
    if round > last {
        bail!("round {round} is past the end of the trace (last round {last})");
    }
    let cfg = &trace.records[round as usize].config;
    let opts = RenderOptions { frames: a.frames };
    let picture = match a.format {
        FormatArg::Ascii => render_ascii(cfg, opts),
        FormatArg::Svg => render_svg(cfg, opts),
    };
    match &a.out {
        Some(p) => write_file(p, &picture)?,
        None => out.write_all(picture.as_bytes())?,
    }
    Ok(EXIT_OK)
}
