//! Exhaustive worst case over every legal resource behaviour.
//!
//! Robots are deterministic, so the game tree branches only on the resource's
//! move (and, at the root, on the initial resource vertex and optionally the
//! entry choice). The state key omits the round counter, so a state revisited
//! on the current search path is a cycle the adversary can repeat forever.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::adversary::{legal_resource_moves, ResourceMove, StrategyId};
use crate::config::{classify_phase, Configuration, Phase, ResourceState, RobotState, StateKey};
use crate::engine::{apply_round, robot_moves, SimParams};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Vertex};
use crate::policy::{CornerGuard, DynamicRendezvous, EntryChoice};

pub const DEFAULT_STATE_LIMIT: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WorstRounds {
    Finite {
        rounds: u64,
    },
    /// The adversary can steer into a cycle; the witness ends by closing it.
    NonTerminating,
    /// Some adversary behaviour drives the robots into a collision.
    Violation {
        detail: String,
    },
}

impl WorstRounds {
    pub fn finite(&self) -> Option<u64> {
        match self {
            WorstRounds::Finite { rounds } => Some(*rounds),
            _ => None,
        }
    }
}

/// A resource script together with the start it applies to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub g0: Vertex,
    pub entry: EntryChoice,
    #[serde(default)]
    pub corner_guard: CornerGuard,
    pub moves: Vec<ResourceMove>,
}

impl Witness {
    /// Engine parameters that replay this witness as a scripted adversary.
    pub fn params(&self, grid: GridSpec, t_f: u32) -> SimParams {
        let strategy = StrategyId::MinimaxWitness {
            moves: self.moves.clone(),
        };
        SimParams {
            max_rounds: self.moves.len().max(1) as u64,
            entry: self.entry,
            corner_guard: self.corner_guard,
            ..SimParams::new(grid, t_f, self.g0, strategy)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstCaseResult {
    pub m: i32,
    pub n: i32,
    pub t_f: u32,
    pub worst_rounds: WorstRounds,
    pub witness: Witness,
    /// Configuration the witness ends in (finite case).
    pub final_key: Option<FinalState>,
    pub states_explored: usize,
    /// Most Boundary-labelled rounds any play can contain.
    pub boundary_worst: u64,
    /// Most Gather-labelled rounds any play can contain.
    pub gather_worst: u64,
}

/// End state of a witness play, for comparison with an engine replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalState {
    pub r1: Vertex,
    pub r2: Vertex,
    pub res: Vertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Value {
    total: u32,
    boundary: u32,
    gather: u32,
}

#[derive(Debug, Clone, Copy)]
enum Node {
    OnPath,
    Solved { value: Value, best: u8 },
}

struct Frame {
    key: StateKey,
    moves: Vec<(ResourceMove, std::result::Result<StateKey, String>)>,
    next: usize,
    value: Value,
    best: u8,
    phase: Phase,
}

enum Failure {
    Cycle(Vec<ResourceMove>),
    Violation(Vec<ResourceMove>, String),
    Limit,
}

struct Search {
    grid: GridSpec,
    t_f: u32,
    policy: DynamicRendezvous,
    memo: HashMap<StateKey, Node>,
    limit: usize,
}

impl Search {
    fn config(&self, key: StateKey) -> Configuration {
        Configuration::from_key(self.grid, self.t_f, 0, key)
    }

    fn frame(&self, key: StateKey) -> Frame {
        let cfg = self.config(key);
        let robots = robot_moves(&cfg, &self.policy);
        let moves = legal_resource_moves(&cfg)
            .into_iter()
            .map(|mv| {
                let next = apply_round(&cfg, robots, mv)
                    .map(|(c, _)| c.key())
                    .map_err(|v| v.detail);
                (mv, next)
            })
            .collect();
        Frame {
            key,
            moves,
            next: 0,
            value: Value::default(),
            best: 0,
            phase: classify_phase(&cfg),
        }
    }

    fn path_moves(stack: &[Frame]) -> Vec<ResourceMove> {
        stack.iter().map(|f| f.moves[f.next].0).collect()
    }

    /// Depth-first longest-path computation from `root`.
    fn solve(&mut self, root: StateKey) -> std::result::Result<Value, Failure> {
        let mut stack: Vec<Frame> = Vec::new();
        let mut ret: Option<Value> = self.lookup(root);
        if ret.is_none() {
            if self.config(root).is_done() {
                return Ok(Value::default());
            }
            self.memo.insert(root, Node::OnPath);
            stack.push(self.frame(root));
        }
        while let Some(top) = stack.last_mut() {
            if let Some(child) = ret.take() {
                // `child` is the value of moves[next].
                let total = child.total + 1;
                if top.next == 0 || total > top.value.total {
                    top.value.total = total;
                    top.best = top.next as u8;
                }
                top.value.boundary = top.value.boundary.max(child.boundary);
                top.value.gather = top.value.gather.max(child.gather);
                top.next += 1;
            }
            let top = stack.last().expect("non-empty");
            if top.next == top.moves.len() {
                let f = stack.pop().expect("non-empty");
                let mut value = f.value;
                match f.phase {
                    Phase::Boundary => value.boundary += 1,
                    Phase::Gather => value.gather += 1,
                    _ => {}
                }
                self.memo.insert(
                    f.key,
                    Node::Solved {
                        value,
                        best: f.best,
                    },
                );
                ret = Some(value);
                continue;
            }
            let child = match &top.moves[top.next].1 {
                Ok(k) => *k,
                Err(detail) => {
                    return Err(Failure::Violation(Self::path_moves(&stack), detail.clone()));
                }
            };
            match self.memo.get(&child) {
                Some(Node::OnPath) => return Err(Failure::Cycle(Self::path_moves(&stack))),
                Some(Node::Solved { value, .. }) => ret = Some(*value),
                None if self.config(child).is_done() => {
                    self.memo.insert(
                        child,
                        Node::Solved {
                            value: Value::default(),
                            best: 0,
                        },
                    );
                    ret = Some(Value::default());
                }
                None => {
                    if self.memo.len() >= self.limit {
                        return Err(Failure::Limit);
                    }
                    self.memo.insert(child, Node::OnPath);
                    let frame = self.frame(child);
                    stack.push(frame);
                }
            }
        }
        Ok(ret.expect("root solved"))
    }

    fn lookup(&self, key: StateKey) -> Option<Value> {
        match self.memo.get(&key) {
            Some(Node::Solved { value, .. }) => Some(*value),
            _ => None,
        }
    }

    /// Follows the stored best moves from `root` to a finished state.
    fn replay(&self, root: StateKey) -> (Vec<ResourceMove>, StateKey) {
        let mut key = root;
        let mut moves = Vec::new();
        while let Some(Node::Solved { best, .. }) = self.memo.get(&key) {
            let cfg = self.config(key);
            if cfg.is_done() {
                break;
            }
            let mv = legal_resource_moves(&cfg)[*best as usize];
            let robots = robot_moves(&cfg, &self.policy);
            let (next, _) =
                apply_round(&cfg, robots, mv).expect("solved states have no violations");
            moves.push(mv);
            key = next.key();
        }
        (moves, key)
    }
}

fn root_key(grid: &GridSpec, g0: Vertex) -> StateKey {
    StateKey {
        r1: RobotState::Active(grid.door()),
        r2: RobotState::Outside,
        res: ResourceState {
            position: g0,
            stay_count: 0,
            fixed: false,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Also search with the alternate entry choice.
    pub branch_entry: bool,
    pub corner_guard: CornerGuard,
    /// Bound on memoized states per entry choice.
    pub state_limit: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            branch_entry: true,
            corner_guard: CornerGuard::AnyCorner,
            state_limit: DEFAULT_STATE_LIMIT,
        }
    }
}

pub fn worst_case_rounds(m: i32, n: i32, t_f: u32, branch_entry: bool) -> Result<WorstCaseResult> {
    let opts = SearchOptions {
        branch_entry,
        ..SearchOptions::default()
    };
    worst_case_rounds_with(m, n, t_f, &opts)
}

pub fn worst_case_rounds_with(
    m: i32,
    n: i32,
    t_f: u32,
    opts: &SearchOptions,
) -> Result<WorstCaseResult> {
    let (branch_entry, corner_guard, limit) =
        (opts.branch_entry, opts.corner_guard, opts.state_limit);
    let grid = GridSpec::new(m, n)?;
    if t_f == 0 {
        return Err(Error::InvalidParams("T_f must be positive".into()));
    }
    let entries: &[EntryChoice] = if branch_entry {
        &[EntryChoice::Default, EntryChoice::Alternate]
    } else {
        &[EntryChoice::Default]
    };
    let mut states = 0;
    let mut best: Option<(Value, Witness, FinalState)> = None;
    let mut boundary_worst = 0;
    let mut gather_worst = 0;
    for &entry in entries {
        let mut search = Search {
            grid,
            t_f,
            policy: DynamicRendezvous {
                entry,
                corner_guard,
            },
            memo: HashMap::new(),
            limit,
        };
        for g0 in grid.vertices().filter(|v| *v != grid.door()) {
            let root = root_key(&grid, g0);
            let failure = match search.solve(root) {
                Ok(value) => {
                    boundary_worst = boundary_worst.max(value.boundary);
                    gather_worst = gather_worst.max(value.gather);
                    if best.as_ref().is_none_or(|(b, ..)| value.total > b.total) {
                        let (moves, end) = search.replay(root);
                        let pos = |r: RobotState| r.position().expect("finished robots are placed");
                        let fin = FinalState {
                            r1: pos(end.r1),
                            r2: pos(end.r2),
                            res: end.res.position,
                        };
                        best = Some((
                            value,
                            Witness {
                                g0,
                                entry,
                                corner_guard,
                                moves,
                            },
                            fin,
                        ));
                    }
                    continue;
                }
                Err(f) => f,
            };
            states += search.memo.len();
            let (worst_rounds, moves) = match failure {
                Failure::Limit => return Err(Error::StateSpaceExceeded(limit)),
                Failure::Cycle(moves) => (WorstRounds::NonTerminating, moves),
                Failure::Violation(moves, detail) => (WorstRounds::Violation { detail }, moves),
            };
            return Ok(WorstCaseResult {
                m,
                n,
                t_f,
                worst_rounds,
                witness: Witness {
                    g0,
                    entry,
                    corner_guard,
                    moves,
                },
                final_key: None,
                states_explored: states,
                boundary_worst: u64::from(boundary_worst),
                gather_worst: u64::from(gather_worst),
            });
        }
        states += search.memo.len();
    }
    let (value, witness, fin) = best.expect("grids have a non-door vertex");
    Ok(WorstCaseResult {
        m,
        n,
        t_f,
        worst_rounds: WorstRounds::Finite {
            rounds: u64::from(value.total),
        },
        witness,
        final_key: Some(fin),
        states_explored: states,
        boundary_worst: u64::from(boundary_worst),
        gather_worst: u64::from(gather_worst),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_episode, Outcome};

    #[test]
    fn three_by_three_is_finite_and_replays() {
        let r = worst_case_rounds(3, 3, 1, true).unwrap();
        let rounds = r.worst_rounds.finite().expect("finite");
        assert_eq!(r.witness.moves.len() as u64, rounds);
        let t = run_episode(&r.witness.params(GridSpec::new(3, 3).unwrap(), 1)).unwrap();
        assert_eq!(t.outcome, Outcome::Rendezvous { rounds });
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            worst_case_rounds(2, 4, 1, false),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(worst_case_rounds(3, 3, 0, false).is_err());
        let opts = SearchOptions {
            state_limit: 10,
            ..SearchOptions::default()
        };
        assert_eq!(
            worst_case_rounds_with(4, 4, 1, &opts),
            Err(Error::StateSpaceExceeded(10))
        );
    }
}
