//! Structural monitors evaluated over a finished trace.
//!
//! Seven monitors follow the protocol's phase lemmas, labelled (a) to (g); an
//! eighth collects the model rules every trace must obey regardless of the
//! protocol. Phase labels are recomputed from the configurations and must match
//! the stored ones.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{classify_phase, detect_init_gather, Configuration, Phase, RobotId};
use crate::engine::{Outcome, SimParams, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::grid::{Line, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monitor {
    /// (a) Boundary rounds: robots on boundary edges, off corners, on a fixed line.
    BoundaryLines,
    /// (b) Once the resource reaches or crosses PD(R), dist(R) stays at most one.
    DistAfterTrigger,
    /// (c) After that, the resource never reaches or crosses PD(R').
    OtherPdUncrossed,
    /// (d) An InitGather round with both robots active is followed by another.
    InitGatherPersists,
    /// (e) The resource stays inside R_Con and off L1 and L2.
    ResourceOffSideLines,
    /// (f) R_Con never grows and shrinks within 2T_f+1 rounds while larger than 2 in both dimensions.
    ContainingRectShrinks,
    /// (g) A 2x2 R_Con ends in rendezvous at the far corner within T_f+1 rounds.
    FinalCapture,
    /// Resource hops, waiting budget, fixing, robot moves, entry and phase order.
    ModelRules,
}

impl Monitor {
    pub const ALL: [Monitor; 8] = [
        Monitor::BoundaryLines,
        Monitor::DistAfterTrigger,
        Monitor::OtherPdUncrossed,
        Monitor::InitGatherPersists,
        Monitor::ResourceOffSideLines,
        Monitor::ContainingRectShrinks,
        Monitor::FinalCapture,
        Monitor::ModelRules,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Monitor::BoundaryLines => "a",
            Monitor::DistAfterTrigger => "b",
            Monitor::OtherPdUncrossed => "c",
            Monitor::InitGatherPersists => "d",
            Monitor::ResourceOffSideLines => "e",
            Monitor::ContainingRectShrinks => "f",
            Monitor::FinalCapture => "g",
            Monitor::ModelRules => "model",
        }
    }
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).expect("unit variants serialize");
        write!(
            f,
            "({}) {}",
            self.label(),
            name.as_str().unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorFailure {
    pub round: u64,
    pub config: Configuration,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorResult {
    pub monitor: Monitor,
    pub failure: Option<MonitorFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub results: Vec<MonitorResult>,
    /// Whether R_Con also shrank within every T_f+1 window; `None` when no
    /// window applied.
    pub short_window_held: Option<bool>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failure.is_none())
    }

    pub fn get(&self, monitor: Monitor) -> Option<&MonitorFailure> {
        self.results
            .iter()
            .find(|r| r.monitor == monitor)
            .and_then(|r| r.failure.as_ref())
    }

    pub fn first_failure(&self) -> Option<(Monitor, &MonitorFailure)> {
        self.results
            .iter()
            .filter_map(|r| r.failure.as_ref().map(|f| (r.monitor, f)))
            .min_by_key(|(_, f)| f.round)
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            match &r.failure {
                None => writeln!(f, "pass {}", r.monitor)?,
                Some(fail) => writeln!(
                    f,
                    "FAIL {} at round {}: {}",
                    r.monitor, fail.round, fail.detail
                )?,
            }
        }
        Ok(())
    }
}

/// Trace built from bare configurations, labelled by [`classify_phase`]. Used
/// for hand-made traces.
pub fn synthetic_trace(params: SimParams, configs: Vec<Configuration>, outcome: Outcome) -> Trace {
    let records = configs
        .into_iter()
        .enumerate()
        .map(|(i, mut config)| {
            config.round = i as u64;
            TraceRecord {
                config,
                phase: classify_phase(&config),
                events: Vec::new(),
            }
        })
        .collect();
    Trace {
        params,
        ssync: None,
        records,
        outcome,
    }
}

struct Checker<'a> {
    records: &'a [TraceRecord],
    failures: Vec<(Monitor, MonitorFailure)>,
}

impl Checker<'_> {
    fn fail(&mut self, monitor: Monitor, at: usize, detail: String) {
        if self.failures.iter().any(|(m, _)| *m == monitor) {
            return;
        }
        let config = self.records[at].config;
        self.failures.push((
            monitor,
            MonitorFailure {
                round: config.round,
                config,
                detail,
            },
        ));
    }
}

fn both_active(c: &Configuration) -> bool {
    c.r1.is_active() && c.r2.is_active()
}

fn boundary_round(r: &TraceRecord) -> bool {
    r.phase == Phase::Boundary && both_active(&r.config)
}

fn gather_round(r: &TraceRecord) -> bool {
    r.phase == Phase::Gather && both_active(&r.config)
}

const IDS: [RobotId; 2] = [RobotId::First, RobotId::Second];

/// Signed offset of the resource from PD(R), measured along BD(R).
fn pd_offset(c: &Configuration, id: RobotId) -> Option<(Line, i32)> {
    let at = c.robot(id).active()?;
    let bd = c.grid.unique_boundary(at).ok()?;
    Some((bd, bd.along(c.res.position) - bd.along(at)))
}

pub fn check_invariants(trace: &Trace) -> Result<InvariantReport> {
    let records = trace.records.as_slice();
    if records.is_empty() {
        return Err(Error::MalformedTrace("no records".into()));
    }
    for (i, r) in records.iter().enumerate() {
        if r.config.round != i as u64 {
            return Err(Error::MalformedTrace(format!(
                "record {i} has round {}",
                r.config.round
            )));
        }
        let phase = classify_phase(&r.config);
        if phase != r.phase {
            return Err(Error::MalformedTrace(format!(
                "round {i} is labelled {} but is {phase}",
                r.phase
            )));
        }
    }
    let mut ck = Checker {
        records,
        failures: Vec::new(),
    };
    boundary_lines(&mut ck);
    pd_triggers(&mut ck);
    init_gather_persists(&mut ck);
    resource_off_side_lines(&mut ck);
    let short_window_held = containing_rect_shrinks(&mut ck, trace.params.t_f);
    final_capture(&mut ck, trace.params.t_f);
    model_rules(&mut ck, trace);

    let results = Monitor::ALL
        .iter()
        .map(|&monitor| MonitorResult {
            monitor,
            failure: ck
                .failures
                .iter()
                .find(|(m, _)| *m == monitor)
                .map(|(_, f)| f.clone()),
        })
        .collect();
    Ok(InvariantReport {
        results,
        short_window_held,
    })
}

fn boundary_lines(ck: &mut Checker) {
    let mut lines: [Option<Line>; 2] = [None, None];
    for i in 0..ck.records.len() {
        let r = &ck.records[i];
        if !boundary_round(r) {
            continue;
        }
        for (k, id) in IDS.into_iter().enumerate() {
            let at = r.config.robot(id).active().expect("both active");
            match r.config.grid.unique_boundary(at) {
                Err(_) => {
                    ck.fail(
                        Monitor::BoundaryLines,
                        i,
                        format!("{id} at {at} is not on a boundary edge"),
                    );
                }
                Ok(bd) => match lines[k] {
                    Some(prev) if prev != bd => {
                        ck.fail(
                            Monitor::BoundaryLines,
                            i,
                            format!("{id} left {prev} for {bd}"),
                        );
                    }
                    _ => lines[k] = Some(bd),
                },
            }
        }
    }
}

/// Monitors (b) and (c).
fn pd_triggers(ck: &mut Checker) {
    let mut triggered: [Option<usize>; 2] = [None, None];
    let mut prev: Option<usize> = None;
    for i in 0..ck.records.len() {
        if !boundary_round(&ck.records[i]) {
            prev = None;
            continue;
        }
        let c = ck.records[i].config;
        for (k, id) in IDS.into_iter().enumerate() {
            let Some((_, s)) = pd_offset(&c, id) else {
                continue;
            };
            let before = prev
                .and_then(|p| pd_offset(&ck.records[p].config, id))
                .map(|(_, s)| s);
            // Only moves made during a Boundary round count: landing on PD(R)
            // from off it, or jumping from one side to the other.
            let reached = before.is_some_and(|b| b != 0 && (s == 0 || b.signum() == -s.signum()));
            if reached {
                let other = 1 - k;
                if let Some(t) = triggered[other] {
                    if t < i {
                        ck.fail(
                            Monitor::OtherPdUncrossed,
                            i,
                            format!(
                                "resource reached PD({id}) after reaching PD({}) in round {t}",
                                id.other()
                            ),
                        );
                    }
                }
                if triggered[k].is_none() {
                    triggered[k] = Some(i);
                }
            }
            if triggered[k].is_some() && s.unsigned_abs() > 1 {
                ck.fail(
                    Monitor::DistAfterTrigger,
                    i,
                    format!(
                        "dist({id}) = {} after the resource reached PD({id})",
                        s.unsigned_abs()
                    ),
                );
            }
        }
        prev = Some(i);
    }
}

fn init_gather_persists(ck: &mut Checker) {
    for i in 0..ck.records.len().saturating_sub(1) {
        let (a, b) = (&ck.records[i], &ck.records[i + 1]);
        if gather_round(a) && both_active(&b.config) && detect_init_gather(&b.config).is_none() {
            ck.fail(
                Monitor::InitGatherPersists,
                i + 1,
                format!("InitGather from round {i} was lost"),
            );
        }
    }
}

fn resource_off_side_lines(ck: &mut Checker) {
    for i in 0..ck.records.len() {
        let r = &ck.records[i];
        if !gather_round(r) {
            continue;
        }
        let frame = detect_init_gather(&r.config).expect("gather rounds are InitGather");
        let res = r.config.res.position;
        if !frame.r_con.contains(res) {
            ck.fail(
                Monitor::ResourceOffSideLines,
                i,
                format!("resource {res} outside R_Con"),
            );
        }
        let Some(next) = ck.records.get(i + 1) else {
            continue;
        };
        if !both_active(&next.config) {
            continue;
        }
        let res = next.config.res.position;
        if frame.l1.contains(res) || frame.l2.contains(res) {
            ck.fail(
                Monitor::ResourceOffSideLines,
                i + 1,
                format!(
                    "resource moved onto {} or {} of round {i}",
                    frame.l1, frame.l2
                ),
            );
        } else if !frame.r_con.contains(res) {
            ck.fail(
                Monitor::ResourceOffSideLines,
                i + 1,
                format!("resource left R_Con of round {i}"),
            );
        }
    }
}

/// Returns whether every applicable T_f+1 window also shrank.
fn containing_rect_shrinks(ck: &mut Checker, t_f: u32) -> Option<bool> {
    let dims: Vec<Option<(u32, u32)>> = ck
        .records
        .iter()
        .map(|r| {
            gather_round(r)
                .then(|| detect_init_gather(&r.config))
                .flatten()
                .map(|f| (f.r_con.height(), f.r_con.width()))
        })
        .collect();
    for i in 1..dims.len() {
        if let (Some((h0, w0)), Some((h1, w1))) = (dims[i - 1], dims[i]) {
            if h1 > h0 || w1 > w0 {
                ck.fail(
                    Monitor::ContainingRectShrinks,
                    i,
                    format!("R_Con grew from {h0}x{w0} to {h1}x{w1}"),
                );
            }
        }
    }
    let shrinks_within = |window: usize| -> Option<Result<(), usize>> {
        let mut applied = false;
        for i in 0..dims.len() {
            let Some((h, w)) = dims[i] else { continue };
            if h <= 2 || w <= 2 {
                continue;
            }
            let Some(Some((h1, w1))) = dims.get(i + window) else {
                continue;
            };
            applied = true;
            if h1 + w1 >= h + w {
                return Some(Err(i));
            }
        }
        applied.then_some(Ok(()))
    };
    let long = 2 * t_f as usize + 1;
    if let Some(Err(i)) = shrinks_within(long) {
        ck.fail(
            Monitor::ContainingRectShrinks,
            i,
            format!("R_Con did not shrink within {long} rounds"),
        );
    }
    shrinks_within(t_f as usize + 1).map(|r| r.is_ok())
}

fn final_capture(ck: &mut Checker, t_f: u32) {
    let far = ck.records[0].config.grid.far_corner();
    let last = ck.records.len() - 1;
    for i in 0..ck.records.len() {
        let r = &ck.records[i];
        if !gather_round(r) {
            continue;
        }
        let frame = detect_init_gather(&r.config).expect("gather rounds are InitGather");
        if frame.r_con.height() != 2 || frame.r_con.width() != 2 {
            continue;
        }
        let deadline = i + t_f as usize + 1;
        let done = (i + 1..=deadline.min(last)).find(|&k| ck.records[k].config.is_done());
        match done {
            Some(k) if ck.records[k].config.res.position != far => {
                let at = ck.records[k].config.res.position;
                ck.fail(
                    Monitor::FinalCapture,
                    k,
                    format!("rendezvous at {at}, not {far}"),
                );
            }
            Some(_) => {}
            None if last >= deadline => {
                ck.fail(
                    Monitor::FinalCapture,
                    deadline,
                    format!("no rendezvous within {} rounds of a 2x2 R_Con", t_f + 1),
                );
            }
            None => {}
        }
        return;
    }
}

fn phase_rank(p: Phase) -> u8 {
    match p {
        Phase::Entry => 0,
        Phase::Boundary | Phase::Gather => 1,
        Phase::Done => 2,
    }
}

fn model_rules(ck: &mut Checker, trace: &Trace) {
    let t_f = trace.params.t_f;
    let door = trace.params.grid.door();
    let first = ck.records[0].config;
    if first.r1.active() != Some(door)
        || first.r2.position().is_some()
        || first.res.position != trace.params.g0
    {
        ck.fail(
            Monitor::ModelRules,
            0,
            "round 0 is not the initial configuration".into(),
        );
    }
    for i in 0..ck.records.len() {
        let c = ck.records[i].config;
        if !c.res.fixed && c.res.stay_count > t_f {
            ck.fail(
                Monitor::ModelRules,
                i,
                format!("resource waited {} > T_f rounds", c.res.stay_count),
            );
        }
        if let (Some(a), Some(b)) = (c.r1.position(), c.r2.position()) {
            if a == b && a != c.res.position {
                ck.fail(
                    Monitor::ModelRules,
                    i,
                    format!("robots share {a} away from the resource"),
                );
            }
        }
        for id in IDS {
            if let Some(at) = c.robot(id).position() {
                let on_res = at == c.res.position;
                if c.robot(id).is_terminated() != on_res {
                    ck.fail(
                        Monitor::ModelRules,
                        i,
                        format!("{id} at {at} disagrees with the resource about termination"),
                    );
                }
            }
        }
        if i == 0 {
            continue;
        }
        let p = ck.records[i - 1].config;
        let (g0, g1) = (p.res.position, c.res.position);
        if g0.manhattan(g1) > 1 {
            ck.fail(
                Monitor::ModelRules,
                i,
                format!("resource jumped from {g0} to {g1}"),
            );
        }
        if p.res.fixed && (g0 != g1 || !c.res.fixed) {
            ck.fail(Monitor::ModelRules, i, "fixed resource moved".into());
        }
        if !c.res.fixed {
            let expect = if g0 == g1 { p.res.stay_count + 1 } else { 0 };
            if c.res.stay_count != expect {
                ck.fail(
                    Monitor::ModelRules,
                    i,
                    format!("stay count {} should be {expect}", c.res.stay_count),
                );
            }
        }
        for id in IDS {
            match (p.robot(id).position(), c.robot(id).position()) {
                (Some(a), Some(b)) if a.manhattan(b) > 1 => {
                    ck.fail(
                        Monitor::ModelRules,
                        i,
                        format!("{id} jumped from {a} to {b}"),
                    );
                }
                (Some(a), Some(b)) if p.robot(id).is_terminated() && a != b => {
                    ck.fail(Monitor::ModelRules, i, format!("terminated {id} moved"));
                }
                (Some(_), None) => ck.fail(Monitor::ModelRules, i, format!("{id} left the grid")),
                (None, Some(b)) if b != door => {
                    ck.fail(
                        Monitor::ModelRules,
                        i,
                        format!("{id} entered at {b}, not the door"),
                    );
                }
                _ => {}
            }
        }
        let (pp, cp) = (ck.records[i - 1].phase, ck.records[i].phase);
        if phase_rank(cp) < phase_rank(pp) {
            ck.fail(
                Monitor::ModelRules,
                i,
                format!("phase went from {pp} back to {cp}"),
            );
        }
        if pp == Phase::Gather && cp == Phase::Boundary && both_active(&c) {
            ck.fail(
                Monitor::ModelRules,
                i,
                "gather phase fell back to boundary".into(),
            );
        }
        if pp == Phase::Entry && cp != Phase::Entry && both_active(&c) {
            let next_to_door: Vec<Vertex> = c.grid.adjacent(door).collect();
            let placed =
                [c.r1, c.r2].map(|r| r.active().is_some_and(|v| next_to_door.contains(&v)));
            if placed != [true, true] {
                ck.fail(
                    Monitor::ModelRules,
                    i,
                    "entry ended off the door's neighbours".into(),
                );
            }
        }
    }
    if let Outcome::Rendezvous { rounds } = trace.outcome {
        let last = ck.records.len() - 1;
        if !ck.records[last].config.is_done() || rounds != last as u64 {
            ck.fail(
                Monitor::ModelRules,
                last,
                "rendezvous outcome without a finished final record".into(),
            );
        }
    }
}
