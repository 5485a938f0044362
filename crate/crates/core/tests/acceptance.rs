//! Acceptance checks, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_RED` fail against the protocol as written; their
//! lines still print FAIL with the reason, but they do not fail the target.
//! Any other FAIL exits non-zero.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use grid_rendezvous::adversary::SsyncAdversary;
use grid_rendezvous::cli::witness_script;
use grid_rendezvous::config::ResourceState;
use grid_rendezvous::engine::apply_round;
use grid_rendezvous::policy::CornerGuard;
use grid_rendezvous::sweep::{episode_params, AdversaryKind};
use grid_rendezvous::trace_io::{from_jsonl, to_jsonl};
use grid_rendezvous::verifier::minimax::{worst_case_rounds_with, SearchOptions, WorstCaseResult};
use grid_rendezvous::verifier::report::{bound_report, DEFAULT_ENVELOPE_CONSTANT};
use grid_rendezvous::verifier::{check_invariants, equivariance_suite, Monitor, WorstRounds};
use grid_rendezvous::{
    run_episode, ssync_run, Configuration, DynamicRendezvous, GridSpec, Move, Outcome,
    ResourceMove, RobotState, SimParams, StrategyId,
};

use common::v;

const KNOWN_RED: [u32; 3] = [1, 2, 4];

struct Verdict {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Verdict {
            pass,
            summary: summary.into(),
            notes: Vec::new(),
        }
    }

    fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }
}

fn small_sweep(corner_guard: CornerGuard) -> (Vec<WorstCaseResult>, Duration) {
    let opts = SearchOptions {
        branch_entry: true,
        corner_guard,
        ..SearchOptions::default()
    };
    let start = Instant::now();
    let mut results = Vec::new();
    for m in 3..=5 {
        for n in 3..=5 {
            for tf in 1..=3 {
                results.push(
                    worst_case_rounds_with(m, n, tf, &opts).expect("search fits the state limit"),
                );
            }
        }
    }
    (results, start.elapsed())
}

fn describe(r: &WorstCaseResult) -> String {
    let w = &r.witness;
    let path: Vec<String> = w.moves.iter().map(|m| m.to_string()).collect();
    format!(
        "{}x{} tf {}: g0 {} entry {:?}, resource moves {}",
        r.m,
        r.n,
        r.t_f,
        w.g0,
        w.entry,
        path.join(" ")
    )
}

fn all_finite(results: &[WorstCaseResult], elapsed: Duration) -> Verdict {
    let stuck: Vec<&WorstCaseResult> = results
        .iter()
        .filter(|r| r.worst_rounds.finite().is_none())
        .collect();
    let pass = stuck.is_empty() && elapsed < Duration::from_secs(60);
    let mut v = Verdict::new(
        pass,
        format!(
            "{} of {} cells finite in {:.2}s",
            results.len() - stuck.len(),
            results.len(),
            elapsed.as_secs_f64()
        ),
    );
    for r in &stuck {
        v = v.note(format!(
            "{}x{} tf {}: {:?}",
            r.m, r.n, r.t_f, r.worst_rounds
        ));
    }
    if let Some(r) = stuck.first() {
        v = v.note(format!("cycle witness {}", describe(r)));
    }
    v
}

fn within_envelope(results: &[WorstCaseResult]) -> Verdict {
    let report = bound_report(results, DEFAULT_ENVELOPE_CONSTANT);
    let spread = report.ratio_spread().unwrap_or(f64::INFINITY);
    let flagged = report.flagged().count();
    let (lo, hi) = report.ratio_range().unwrap_or((0.0, 0.0));
    Verdict::new(
        flagged == 0 && spread < 3.0,
        format!(
            "{flagged} cells flagged against {}(T_f+1)(m+n), finite ratios {lo:.3}..{hi:.3}, spread {spread:.2}",
            DEFAULT_ENVELOPE_CONSTANT
        ),
    )
}

fn oscillator_lower_bound() -> Verdict {
    let mut worst_margin = i64::MAX;
    let mut failures = Vec::new();
    for m in 3..=10 {
        for n in 3..=10 {
            for tf in 1..=2 {
                let g = GridSpec::new(m, n).unwrap();
                let t = run_episode(&episode_params(g, tf, AdversaryKind::Oscillator, 0)).unwrap();
                let rounds = match t.outcome {
                    Outcome::Rendezvous { rounds } | Outcome::MaxRoundsExceeded { rounds } => {
                        rounds
                    }
                    ref other => {
                        failures.push(format!("{m}x{n} tf {tf}: {other:?}"));
                        continue;
                    }
                };
                let margin = rounds as i64 - (m + n - 1) as i64;
                worst_margin = worst_margin.min(margin);
                if margin < 0 {
                    failures.push(format!("{m}x{n} tf {tf}: {rounds} rounds"));
                }
            }
        }
    }
    let mut v = Verdict::new(
        failures.is_empty(),
        format!("128 cells, smallest rounds - (m+n-1) = {worst_margin}"),
    );
    for f in failures {
        v = v.note(f);
    }
    v
}

fn monitors_hold() -> Verdict {
    let mut total = 0u64;
    let mut failing = [0u64; Monitor::ALL.len()];
    let mut first: Option<String> = None;
    for m in 3..=6 {
        for n in 3..=6 {
            let g = GridSpec::new(m, n).unwrap();
            for tf in 1..=3 {
                for adv in [AdversaryKind::Greedy, AdversaryKind::StayMaxRandom] {
                    for seed in 0..1000 {
                        let t = run_episode(&episode_params(g, tf, adv, seed)).unwrap();
                        let report = check_invariants(&t).unwrap();
                        total += 1;
                        for (k, monitor) in Monitor::ALL.iter().enumerate() {
                            if let Some(f) = report.get(*monitor) {
                                failing[k] += 1;
                                first.get_or_insert_with(|| {
                                    format!(
                                        "first counterexample: {m}x{n} tf {tf} {} seed {seed}, {monitor} at round {}: {}",
                                        adv.name(),
                                        f.round,
                                        f.detail
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let negatives = common::seeded_negatives();
    let rejected = negatives
        .iter()
        .filter(|(monitor, t)| check_invariants(t).unwrap().get(*monitor).is_some())
        .count();
    let clean = failing.iter().all(|&k| k == 0);
    let counts: Vec<String> = Monitor::ALL
        .iter()
        .zip(failing)
        .map(|(m, k)| format!("{}={k}", m.label()))
        .collect();
    let mut v = Verdict::new(
        clean && rejected == negatives.len(),
        format!(
            "{total} episodes, failures per monitor [{}], {rejected}/{} negatives rejected",
            counts.join(" "),
            negatives.len()
        ),
    );
    if let Some(f) = first {
        v = v.note(f);
    }
    v
}

fn ssync_escapes() -> Verdict {
    let adversary = SsyncAdversary::alternating_escape();
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for m in 4..=6 {
        for n in 4..=6 {
            for tf in 1..=2 {
                let g = GridSpec::new(m, n).unwrap();
                let params = SimParams {
                    max_rounds: 5000,
                    ..SimParams::new(g, tf, g.far_corner(), StrategyId::GreedyEvade)
                };
                let start = Instant::now();
                let t = ssync_run(&params, &adversary).unwrap();
                let took = start.elapsed();
                slowest = slowest.max(took);
                let apart = matches!(t.outcome, Outcome::MaxRoundsExceeded { rounds: 5000 })
                    && !t.records.iter().any(|r| r.config.is_done());
                if !apart || took >= Duration::from_secs(5) {
                    failures.push(format!(
                        "{m}x{n} tf {tf}: {:?} in {:.2}s",
                        t.outcome,
                        took.as_secs_f64()
                    ));
                }
            }
        }
    }
    let mut v = Verdict::new(
        failures.is_empty(),
        format!(
            "18 cells held 5000 rounds apart, slowest {:.3}s",
            slowest.as_secs_f64()
        ),
    );
    for f in failures {
        v = v.note(f);
    }
    v
}

fn engine_examples() -> Vec<String> {
    let cfg = |r1, r2, res| Configuration {
        grid: GridSpec::new(5, 5).unwrap(),
        round: 4,
        r1: RobotState::Active(r1),
        r2: RobotState::Active(r2),
        res: ResourceState {
            position: res,
            stay_count: 0,
            fixed: false,
        },
        t_f: 1,
    };
    let mut broken = Vec::new();
    let carry = apply_round(
        &cfg(v(1, 2), v(4, 4), v(2, 2)),
        [Some(Move::Step(v(2, 2))), Some(Move::Stay)],
        ResourceMove::Step(v(1, 2)),
    );
    if !matches!(&carry, Ok((c, _)) if c.r1 == RobotState::Terminated(v(2, 2)) && c.res.fixed && c.res.position == v(2, 2))
    {
        broken.push("carry".to_string());
    }
    let onto = apply_round(
        &cfg(v(1, 2), v(4, 4), v(2, 2)),
        [Some(Move::Step(v(2, 2))), Some(Move::Stay)],
        ResourceMove::Stay,
    );
    if !matches!(&onto, Ok((c, _)) if c.r1 == RobotState::Terminated(v(2, 2)) && c.res.fixed) {
        broken.push("step onto a staying resource".to_string());
    }
    let corner = apply_round(
        &cfg(v(3, 4), v(4, 3), v(4, 4)),
        [Some(Move::Step(v(4, 4))), Some(Move::Step(v(4, 4)))],
        ResourceMove::Stay,
    );
    if !matches!(&corner, Ok((c, _)) if c.is_done()) {
        broken.push("both robots reach a corner resource".to_string());
    }
    broken
}

fn symmetry_and_replay() -> Verdict {
    let policy = DynamicRendezvous::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for (m, n, count) in [(4, 5, 4), (4, 4, 8)] {
        let report = equivariance_suite(&GridSpec::new(m, n).unwrap(), &policy);
        let good = report.passed() && report.symmetries.len() == count;
        ok &= good;
        if !good {
            notes.push(format!(
                "{m}x{n}: {} symmetries, {} failures",
                report.symmetries.len(),
                report.failures.len()
            ));
        }
    }
    let mut replayed = 0;
    for i in 0..100u64 {
        let g = GridSpec::new(3 + (i % 4) as i32, 3 + (i / 4 % 4) as i32).unwrap();
        let adv = if i.is_multiple_of(2) {
            AdversaryKind::Greedy
        } else {
            AdversaryKind::StayMaxRandom
        };
        let params = episode_params(g, 1 + (i % 3) as u32, adv, 7000 + i);
        let text = to_jsonl(&run_episode(&params).unwrap());
        let again = to_jsonl(&run_episode(&from_jsonl(&text).unwrap().params).unwrap());
        if text == again {
            replayed += 1;
        }
    }
    ok &= replayed == 100;
    let broken = engine_examples();
    ok &= broken.is_empty();
    if !broken.is_empty() {
        notes.push(format!("engine examples broken: {}", broken.join(", ")));
    }
    let mut v = Verdict::new(
        ok,
        format!(
            "equivariance on 4x5 and 4x4, {replayed}/100 traces byte-exact, {}/3 engine examples",
            3 - broken.len()
        ),
    );
    for n in notes {
        v = v.note(n);
    }
    v
}

fn run_binary(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_rendezvous"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stdout).trim().to_string(),
    )
}

fn witnesses_replay(results: &[WorstCaseResult], dir: &Path) -> Verdict {
    let (mut exact, mut cycles, mut failures) = (0, 0, Vec::new());
    for r in results {
        let path = dir.join(format!("{}x{}-tf{}.script", r.m, r.n, r.t_f));
        std::fs::write(&path, witness_script(r, &path)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let replay = text.lines().nth(1).unwrap();
        let args: Vec<&str> = replay
            .split_once("rendezvous ")
            .unwrap()
            .1
            .split_whitespace()
            .collect();
        let (code, out) = run_binary(&args);
        let cell = format!("{}x{} tf {}", r.m, r.n, r.t_f);
        match &r.worst_rounds {
            WorstRounds::Finite { rounds } => {
                if code == 0 && out == format!("rendezvous rounds={rounds}") {
                    exact += 1;
                } else {
                    failures.push(format!(
                        "{cell}: expected {rounds}, got exit {code} {out:?}"
                    ));
                }
            }
            WorstRounds::NonTerminating => {
                // the script ends where the play revisits a state
                let t = run_episode(&r.witness.params(GridSpec::new(r.m, r.n).unwrap(), r.t_f))
                    .unwrap();
                let last = t.last().key();
                let closes = t.records[..t.records.len() - 1]
                    .iter()
                    .any(|rec| rec.config.key() == last);
                if code == 2 && closes {
                    cycles += 1;
                } else {
                    failures.push(format!("{cell}: cycle witness did not close (exit {code})"));
                }
            }
            WorstRounds::Violation { detail } => {
                failures.push(format!("{cell}: violation {detail}"))
            }
        }
    }
    let mut v = Verdict::new(
        failures.is_empty(),
        format!("{exact} finite witnesses reproduced exactly, {cycles} cycle witnesses close"),
    );
    for f in failures {
        v = v.note(f);
    }
    v
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let (verbatim, elapsed) = small_sweep(CornerGuard::AnyCorner);
    let (far, far_elapsed) = small_sweep(CornerGuard::FarCorner);

    let far_report = bound_report(&far, DEFAULT_ENVELOPE_CONSTANT);
    let far_info = format!(
        "far-corner guard: {} of {} cells finite in {:.2}s, {} flagged, spread {:.2}",
        far.iter()
            .filter(|r| r.worst_rounds.finite().is_some())
            .count(),
        far.len(),
        far_elapsed.as_secs_f64(),
        far_report.flagged().count(),
        far_report.ratio_spread().unwrap_or(f64::INFINITY)
    );

    let verdicts = [
        (1, all_finite(&verbatim, elapsed).note(far_info.clone())),
        (2, within_envelope(&verbatim).note(far_info)),
        (3, oscillator_lower_bound()),
        (4, monitors_hold()),
        (5, ssync_escapes()),
        (6, symmetry_and_replay()),
        (7, witnesses_replay(&verbatim, dir.path())),
    ];

    let mut unexpected = 0;
    for (k, v) in &verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let known = !v.pass && KNOWN_RED.contains(k);
        println!(
            "{tag} criterion {k}: {}{}",
            v.summary,
            if known { " (known red)" } else { "" }
        );
        for n in &v.notes {
            println!("     {n}");
        }
        if !v.pass && !known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
