//! The synchronous round loop: entry staging, simultaneous moves with the
//! carry rule, termination, and the semi-synchronous variant.

use serde::{Deserialize, Serialize};

use crate::adversary::{
    escape_candidates, is_legal, Activation, ResourceMove, ResourcePolicy, ResourceStrategy,
    SsyncAdversary, StrategyId,
};
use crate::config::{
    classify_phase, robot_view, Configuration, Phase, ResourceState, RobotId, RobotState,
};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Symmetry, Vertex};
use crate::policy::{CornerGuard, DynamicRendezvous, EntryChoice, Move, Policy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimParams {
    pub grid: GridSpec,
    pub t_f: u32,
    pub g0: Vertex,
    pub strategy: StrategyId,
    pub max_rounds: u64,
    pub seed: u64,
    #[serde(default)]
    pub entry: EntryChoice,
    #[serde(default)]
    pub corner_guard: CornerGuard,
}

impl SimParams {
    pub fn new(grid: GridSpec, t_f: u32, g0: Vertex, strategy: StrategyId) -> Self {
        let max_rounds = 10 * (u64::from(t_f) + 1) * (grid.m() + grid.n()) as u64;
        SimParams {
            grid,
            t_f,
            g0,
            strategy,
            max_rounds,
            seed: 0,
            entry: EntryChoice::Default,
            corner_guard: CornerGuard::AnyCorner,
        }
    }

    /// The robot protocol these parameters select.
    pub fn policy(&self) -> DynamicRendezvous {
        DynamicRendezvous {
            entry: self.entry,
            corner_guard: self.corner_guard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_f == 0 {
            return Err(Error::InvalidParams("T_f must be positive".into()));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidParams("max_rounds must be positive".into()));
        }
        if !self.grid.contains(self.g0) {
            return Err(Error::OutOfGrid(self.g0));
        }
        if self.g0 == self.grid.door() {
            return Err(Error::InvalidParams(format!(
                "initial resource {} is the door",
                self.g0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RoundEvent {
    Entered {
        robot: RobotId,
        at: Vertex,
    },
    /// Robot and resource crossed the same edge; both end at `to`.
    EdgeCarry {
        robot: RobotId,
        from: Vertex,
        to: Vertex,
    },
    CoLocated {
        robot: RobotId,
        at: Vertex,
    },
    RobotTerminated {
        robot: RobotId,
        at: Vertex,
    },
    ResourceFixed {
        at: Vertex,
    },
    ProtocolViolation {
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Outcome {
    Rendezvous { rounds: u64 },
    MaxRoundsExceeded { rounds: u64 },
    Violation { round: u64, detail: String },
    NoEscape { round: u64 },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Rendezvous { .. } => "rendezvous",
            Outcome::MaxRoundsExceeded { .. } => "max-rounds-exceeded",
            Outcome::Violation { .. } => "violation",
            Outcome::NoEscape { .. } => "no-escape",
        }
    }
}

/// Snapshot at the start of `config.round`, with the events that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub config: Configuration,
    pub phase: Phase,
    pub events: Vec<RoundEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub params: SimParams,
    /// Present for semi-synchronous runs.
    pub ssync: Option<SsyncAdversary>,
    pub records: Vec<TraceRecord>,
    pub outcome: Outcome,
}

impl Trace {
    pub fn last(&self) -> &Configuration {
        &self
            .records
            .last()
            .expect("traces start with round 0")
            .config
    }

    /// Number of records carrying each phase label: (entry, boundary, gather).
    pub fn phase_lengths(&self) -> (u64, u64, u64) {
        let count = |p: Phase| self.records.iter().filter(|r| r.phase == p).count() as u64;
        (
            count(Phase::Entry),
            count(Phase::Boundary),
            count(Phase::Gather),
        )
    }
}

/// Two robots crossed the same edge or met off the resource.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub detail: String,
}

pub fn init_episode(params: &SimParams) -> Result<Configuration> {
    params.validate()?;
    Ok(Configuration {
        grid: params.grid,
        round: 0,
        r1: RobotState::Active(params.grid.door()),
        r2: RobotState::Outside,
        res: ResourceState {
            position: params.g0,
            stay_count: 0,
            fixed: false,
        },
        t_f: params.t_f,
    })
}

/// The move robot `which` makes, in grid coordinates.
pub fn robot_move(cfg: &Configuration, which: RobotId, policy: &dyn Policy) -> Result<Move> {
    let view = robot_view(cfg, which)?;
    let sym = Symmetry::normalizing(&cfg.grid);
    Ok(policy
        .decide(&view)
        .transformed(sym.inverse(), cfg.grid.m(), cfg.grid.n()))
}

/// Moves of both robots; `None` for robots that are not active.
pub fn robot_moves(cfg: &Configuration, policy: &dyn Policy) -> [Option<Move>; 2] {
    [RobotId::First, RobotId::Second].map(|id| robot_move(cfg, id, policy).ok())
}

/// Resolves one round given every participant's move.
///
/// Resolution order: robot-robot edge swaps are violations; a robot and the
/// resource crossing one edge end together at the robot's destination; all
/// remaining moves apply at once; robots on the resource terminate and fix it;
/// two robots sharing any other vertex is a violation. Finally the second
/// robot is staged at the door if it is free.
pub fn apply_round(
    cfg: &Configuration,
    moves: [Option<Move>; 2],
    res_move: ResourceMove,
) -> std::result::Result<(Configuration, Vec<RoundEvent>), Violation> {
    let ids = [RobotId::First, RobotId::Second];
    let mut events = Vec::new();
    let mut next = *cfg;
    next.round += 1;

    let mut paths: [Option<(Vertex, Vertex)>; 2] = [None, None];
    for (i, id) in ids.into_iter().enumerate() {
        if let (Some(from), Some(mv)) = (cfg.robot(id).active(), moves[i]) {
            let to = mv.target(from);
            if to != from && !from.is_adjacent(to) {
                return Err(Violation {
                    detail: format!("{id} jumped from {from} to {to}"),
                });
            }
            paths[i] = Some((from, to));
        }
    }
    if let [Some((a_from, a_to)), Some((b_from, b_to))] = paths {
        if a_from != a_to && a_from == b_to && a_to == b_from {
            return Err(Violation {
                detail: format!("robots swapped across edge {a_from}-{a_to}"),
            });
        }
    }

    let g = cfg.res.position;
    let g_next = res_move.target(g);
    let mut res_to = g_next;
    let mut carrier = None;
    for (i, id) in ids.into_iter().enumerate() {
        if let Some((from, to)) = paths[i] {
            if from != to && to == g && g_next == from && carrier.is_none() {
                carrier = Some(id);
                res_to = to;
                events.push(RoundEvent::EdgeCarry {
                    robot: id,
                    from,
                    to,
                });
            }
        }
    }

    for (i, id) in ids.into_iter().enumerate() {
        if let Some((_, to)) = paths[i] {
            *next.robot_mut(id) = RobotState::Active(to);
        }
    }
    next.res.position = res_to;

    let was_fixed = cfg.res.fixed;
    for id in ids {
        if let RobotState::Active(at) = next.robot(id) {
            if at == res_to {
                *next.robot_mut(id) = RobotState::Terminated(at);
                if carrier != Some(id) {
                    events.push(RoundEvent::CoLocated { robot: id, at });
                }
                events.push(RoundEvent::RobotTerminated { robot: id, at });
                next.res.fixed = true;
            }
        }
    }
    if let (Some(a), Some(b)) = (next.r1.position(), next.r2.position()) {
        if a == b && a != res_to {
            return Err(Violation {
                detail: format!("robots met at {a} away from the resource"),
            });
        }
    }

    if next.res.fixed {
        next.res.stay_count = 0;
    } else if res_to == g {
        next.res.stay_count += 1;
    } else {
        next.res.stay_count = 0;
    }

    stage_second_robot(&mut next, &mut events);
    if next.res.fixed && !was_fixed {
        events.push(RoundEvent::ResourceFixed {
            at: next.res.position,
        });
    }
    Ok((next, events))
}

fn stage_second_robot(cfg: &mut Configuration, events: &mut Vec<RoundEvent>) {
    let door = cfg.grid.door();
    if cfg.r2 != RobotState::Outside || cfg.r1.position() == Some(door) {
        return;
    }
    events.push(RoundEvent::Entered {
        robot: RobotId::Second,
        at: door,
    });
    if cfg.res.position == door {
        cfg.r2 = RobotState::Terminated(door);
        cfg.res.fixed = true;
        cfg.res.stay_count = 0;
        events.push(RoundEvent::CoLocated {
            robot: RobotId::Second,
            at: door,
        });
        events.push(RoundEvent::RobotTerminated {
            robot: RobotId::Second,
            at: door,
        });
    } else {
        cfg.r2 = RobotState::Active(door);
    }
}

/// Outcome of one engine step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next(Configuration, Vec<RoundEvent>),
    Violation(Violation),
}

fn checked_resource_move(cfg: &Configuration, mv: ResourceMove) -> Result<ResourceMove> {
    if is_legal(cfg, mv) {
        Ok(mv)
    } else {
        Err(Error::IllegalResourceMove {
            round: cfg.round,
            mv,
        })
    }
}

/// One synchronous round: every active robot and the resource decide from the
/// same snapshot, then [`apply_round`] resolves the moves.
pub fn fsync_step(
    cfg: &Configuration,
    strategy: &mut dyn ResourceStrategy,
    policy: &dyn Policy,
) -> Result<Step> {
    if cfg.is_done() {
        return Err(Error::EpisodeFinished);
    }
    let moves = robot_moves(cfg, policy);
    let res_move = checked_resource_move(cfg, strategy.choose(cfg)?)?;
    Ok(match apply_round(cfg, moves, res_move) {
        Ok((next, events)) => Step::Next(next, events),
        Err(v) => Step::Violation(v),
    })
}

fn first_record(cfg: Configuration, door: Vertex) -> TraceRecord {
    TraceRecord {
        config: cfg,
        phase: classify_phase(&cfg),
        events: vec![RoundEvent::Entered {
            robot: RobotId::First,
            at: door,
        }],
    }
}

fn violation_record(cfg: &Configuration, v: &Violation) -> Outcome {
    Outcome::Violation {
        round: cfg.round,
        detail: v.detail.clone(),
    }
}

pub fn run_episode(params: &SimParams) -> Result<Trace> {
    let mut strategy = params.strategy.build(params.seed);
    let policy = params.policy();
    run_episode_with(params, strategy.as_mut(), &policy)
}

/// Outcome of the episode ending in `cfg`, if it has ended.
fn settled(cfg: &Configuration, max_rounds: u64) -> Option<Outcome> {
    if cfg.is_done() {
        Some(Outcome::Rendezvous { rounds: cfg.round })
    } else if cfg.round >= max_rounds {
        Some(Outcome::MaxRoundsExceeded { rounds: cfg.round })
    } else {
        None
    }
}

/// Plays one round onto `records`; returns the outcome if the episode ends.
fn advance(
    records: &mut Vec<TraceRecord>,
    max_rounds: u64,
    strategy: &mut dyn ResourceStrategy,
    policy: &dyn Policy,
) -> Result<Option<Outcome>> {
    let cfg = records.last().expect("records start with round 0").config;
    match fsync_step(&cfg, strategy, policy)? {
        Step::Next(next, events) => {
            records.push(TraceRecord {
                config: next,
                phase: classify_phase(&next),
                events,
            });
            Ok(settled(&next, max_rounds))
        }
        Step::Violation(v) => Ok(Some(violation_record(&cfg, &v))),
    }
}

/// [`run_episode`] with an explicit resource strategy and robot policy.
pub fn run_episode_with(
    params: &SimParams,
    strategy: &mut dyn ResourceStrategy,
    policy: &dyn Policy,
) -> Result<Trace> {
    let cfg = init_episode(params)?;
    let mut records = vec![first_record(cfg, params.grid.door())];
    let mut outcome = settled(&cfg, params.max_rounds);
    while outcome.is_none() {
        outcome = advance(&mut records, params.max_rounds, strategy, policy)?;
    }
    Ok(Trace {
        params: params.clone(),
        ssync: None,
        records,
        outcome: outcome.expect("loop ends with an outcome"),
    })
}

/// A synchronous episode advanced one round at a time.
pub struct Episode {
    params: SimParams,
    strategy: Box<dyn ResourceStrategy>,
    policy: DynamicRendezvous,
    records: Vec<TraceRecord>,
    outcome: Option<Outcome>,
}

impl Episode {
    pub fn new(params: SimParams) -> Result<Self> {
        let cfg = init_episode(&params)?;
        Ok(Episode {
            strategy: params.strategy.build(params.seed),
            policy: params.policy(),
            records: vec![first_record(cfg, params.grid.door())],
            outcome: settled(&cfg, params.max_rounds),
            params,
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn config(&self) -> &Configuration {
        &self
            .records
            .last()
            .expect("records start with round 0")
            .config
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        self.outcome.as_ref()
    }

    /// Plays one round. Fails with `EpisodeFinished` once an outcome exists.
    pub fn step(&mut self) -> Result<Option<&Outcome>> {
        if self.outcome.is_some() {
            return Err(Error::EpisodeFinished);
        }
        self.outcome = advance(
            &mut self.records,
            self.params.max_rounds,
            self.strategy.as_mut(),
            &self.policy,
        )?;
        Ok(self.outcome.as_ref())
    }

    pub fn run(&mut self) -> Result<&Outcome> {
        while self.outcome.is_none() {
            self.step()?;
        }
        Ok(self.outcome.as_ref().expect("loop ends with an outcome"))
    }

    /// The finished trace, or `None` while the episode is still running.
    pub fn trace(&self) -> Option<Trace> {
        Some(Trace {
            params: self.params.clone(),
            ssync: None,
            records: self.records.clone(),
            outcome: self.outcome.clone()?,
        })
    }
}

/// Semi-synchronous run: only robots the adversary activates move; the
/// resource moves every round.
fn ssync_apply(
    cfg: &Configuration,
    active: Activation,
    policy: &dyn Policy,
    res_move: ResourceMove,
) -> std::result::Result<(Configuration, Vec<RoundEvent>), Violation> {
    let mut moves = robot_moves(cfg, policy);
    for (slot, id) in moves.iter_mut().zip([RobotId::First, RobotId::Second]) {
        if !active.contains(id) {
            *slot = slot.map(|_| Move::Stay);
        }
    }
    apply_round(cfg, moves, res_move)
}

/// Escape move for this round: the first allowed move after which the
/// resource can stay free for `depth` more rounds against the same schedule.
/// Falls back to the first allowed move when none survives that long.
fn escape_move(
    cfg: &Configuration,
    adversary: &SsyncAdversary,
    policy: &dyn Policy,
    depth: u32,
) -> Option<ResourceMove> {
    let active = adversary.activation(cfg);
    let candidates = escape_candidates(cfg, active);
    candidates
        .iter()
        .copied()
        .find(|&mv| match ssync_apply(cfg, active, policy, mv) {
            Ok((next, _)) => stays_free(&next, adversary, policy, depth),
            Err(_) => false,
        })
        .or_else(|| candidates.first().copied())
}

fn stays_free(
    cfg: &Configuration,
    adversary: &SsyncAdversary,
    policy: &dyn Policy,
    depth: u32,
) -> bool {
    if cfg.res.fixed {
        return false;
    }
    if depth == 0 {
        return true;
    }
    let active = adversary.activation(cfg);
    escape_candidates(cfg, active).into_iter().any(|mv| {
        ssync_apply(cfg, active, policy, mv)
            .is_ok_and(|(next, _)| stays_free(&next, adversary, policy, depth - 1))
    })
}

pub fn ssync_run(params: &SimParams, adversary: &SsyncAdversary) -> Result<Trace> {
    let mut cfg = init_episode(params)?;
    let policy = params.policy();
    let mut strategy = match adversary.resource() {
        ResourcePolicy::Strategy { strategy } => Some(strategy.build(params.seed)),
        ResourcePolicy::Escape { .. } => None,
    };
    let lookahead = match adversary.resource() {
        ResourcePolicy::Escape { lookahead } => *lookahead,
        ResourcePolicy::Strategy { .. } => 0,
    };
    let mut records = vec![first_record(cfg, params.grid.door())];
    let outcome = loop {
        if cfg.is_done() {
            break Outcome::Rendezvous { rounds: cfg.round };
        }
        if cfg.round >= params.max_rounds {
            break Outcome::MaxRoundsExceeded { rounds: cfg.round };
        }
        let active: Activation = adversary.activation(&cfg);
        let res_move = match strategy.as_mut() {
            Some(s) => s.choose(&cfg)?,
            None => match escape_move(&cfg, adversary, &policy, lookahead) {
                Some(mv) => mv,
                None => break Outcome::NoEscape { round: cfg.round },
            },
        };
        let res_move = checked_resource_move(&cfg, res_move)?;
        match ssync_apply(&cfg, active, &policy, res_move) {
            Ok((next, events)) => {
                cfg = next;
                records.push(TraceRecord {
                    config: cfg,
                    phase: classify_phase(&cfg),
                    events,
                });
            }
            Err(v) => break violation_record(&cfg, &v),
        }
    };
    Ok(Trace {
        params: params.clone(),
        ssync: Some(adversary.clone()),
        records,
        outcome,
    })
}
