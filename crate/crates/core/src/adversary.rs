//! Resource behaviour: the legal move set, the built-in strategies, the
//! scripted replay format and the semi-synchronous escape adversary.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Configuration, RobotId, RobotState};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResourceMove {
    Stay,
    Step(Vertex),
}

impl ResourceMove {
    pub fn target(self, from: Vertex) -> Vertex {
        match self {
            ResourceMove::Stay => from,
            ResourceMove::Step(to) => to,
        }
    }
}

/// Script syntax: `stay` or `step x y`.
impl fmt::Display for ResourceMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceMove::Stay => f.write_str("stay"),
            ResourceMove::Step(v) => write!(f, "step {} {}", v.x, v.y),
        }
    }
}

impl FromStr for ResourceMove {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut words = s.split_whitespace();
        match (words.next(), words.next(), words.next(), words.next()) {
            (Some("stay"), None, None, None) => Ok(ResourceMove::Stay),
            (Some("step"), Some(x), Some(y), None) => {
                let x = x.parse().map_err(|e| format!("bad x `{x}`: {e}"))?;
                let y = y.parse().map_err(|e| format!("bad y `{y}`: {e}"))?;
                Ok(ResourceMove::Step(Vertex::new(x, y)))
            }
            _ => Err(format!("expected `stay` or `step x y`, got `{}`", s.trim())),
        }
    }
}

impl Serialize for ResourceMove {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResourceMove {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a move list, one move per line. Blank lines and `#` comments are skipped.
pub fn parse_script(text: &str) -> Result<Vec<ResourceMove>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty())
        .map(|(line, body)| {
            body.parse()
                .map_err(|reason| Error::ScriptParse { line, reason })
        })
        .collect()
}

pub fn format_script(moves: &[ResourceMove]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

/// Moves the resource may make from `cfg`: only `Stay` once fixed; otherwise
/// `Stay` (unless it has already waited `T_f` rounds) and every neighbour.
pub fn legal_resource_moves(cfg: &Configuration) -> Vec<ResourceMove> {
    if cfg.res.fixed {
        return vec![ResourceMove::Stay];
    }
    let mut moves = Vec::with_capacity(5);
    if cfg.res.stay_count < cfg.t_f {
        moves.push(ResourceMove::Stay);
    }
    moves.extend(cfg.grid.adjacent(cfg.res.position).map(ResourceMove::Step));
    moves
}

pub fn is_legal(cfg: &Configuration, mv: ResourceMove) -> bool {
    legal_resource_moves(cfg).contains(&mv)
}

/// Serializable description of a resource strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategyId {
    /// Wait as long as allowed, then step to a uniformly random neighbour.
    StayMaxRandom,
    /// Maximise the minimum hop distance to the active robots.
    GreedyEvade,
    /// Alternate between two adjacent vertices next to the far corner.
    Oscillator {
        p: Vertex,
        q: Vertex,
    },
    Scripted {
        moves: Vec<ResourceMove>,
    },
    /// A script produced by the exhaustive search.
    MinimaxWitness {
        moves: Vec<ResourceMove>,
    },
}

impl StrategyId {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyId::StayMaxRandom => "stay-max-random",
            StrategyId::GreedyEvade => "greedy",
            StrategyId::Oscillator { .. } => "oscillator",
            StrategyId::Scripted { .. } => "scripted",
            StrategyId::MinimaxWitness { .. } => "minimax-witness",
        }
    }

    pub fn build(&self, seed: u64) -> Box<dyn ResourceStrategy> {
        match self {
            StrategyId::StayMaxRandom => Box::new(StayMaxRandom::new(seed)),
            StrategyId::GreedyEvade => Box::new(GreedyEvade),
            StrategyId::Oscillator { p, q } => Box::new(Oscillator::new(*p, *q)),
            StrategyId::Scripted { moves } | StrategyId::MinimaxWitness { moves } => {
                Box::new(Scripted::new(moves.clone()))
            }
        }
    }
}

pub trait ResourceStrategy {
    fn choose(&mut self, cfg: &Configuration) -> Result<ResourceMove>;
}

/// The oscillation pair for the lower-bound construction: the corner
/// diagonally opposite the door and its neighbour along the far column.
pub fn oscillator_strategy(grid: &GridSpec, _t_f: u32) -> StrategyId {
    let p = grid.far_corner();
    let q = Vertex::new(p.x, if p.y == 0 { 1 } else { p.y - 1 });
    StrategyId::Oscillator { p, q }
}

fn min_distance(cfg: &Configuration, to: Vertex) -> u32 {
    cfg.active_positions()
        .map(|r| r.manhattan(to))
        .min()
        .unwrap_or(u32::MAX)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyEvade;

impl GreedyEvade {
    pub fn pick(cfg: &Configuration) -> ResourceMove {
        let here = cfg.res.position;
        let mut best = None;
        let mut best_score = 0;
        for mv in legal_resource_moves(cfg) {
            let score = min_distance(cfg, mv.target(here));
            if best.is_none() || score > best_score {
                best = Some(mv);
                best_score = score;
            }
        }
        best.unwrap_or(ResourceMove::Stay)
    }
}

impl ResourceStrategy for GreedyEvade {
    fn choose(&mut self, cfg: &Configuration) -> Result<ResourceMove> {
        Ok(GreedyEvade::pick(cfg))
    }
}

#[derive(Debug, Clone)]
pub struct StayMaxRandom {
    rng: ChaCha8Rng,
}

impl StayMaxRandom {
    pub fn new(seed: u64) -> Self {
        StayMaxRandom {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl ResourceStrategy for StayMaxRandom {
    fn choose(&mut self, cfg: &Configuration) -> Result<ResourceMove> {
        let legal = legal_resource_moves(cfg);
        if legal.contains(&ResourceMove::Stay) {
            return Ok(ResourceMove::Stay);
        }
        Ok(*legal
            .choose(&mut self.rng)
            .expect("a free resource always has a neighbour"))
    }
}

#[derive(Debug, Clone)]
pub struct Scripted {
    moves: Vec<ResourceMove>,
    next: usize,
}

impl Scripted {
    pub fn new(moves: Vec<ResourceMove>) -> Self {
        Scripted { moves, next: 0 }
    }
}

impl ResourceStrategy for Scripted {
    fn choose(&mut self, cfg: &Configuration) -> Result<ResourceMove> {
        let index = self.next;
        let mv = *self.moves.get(index).ok_or(Error::ScriptExhausted(index))?;
        if !is_legal(cfg, mv) {
            return Err(Error::IllegalScript {
                index,
                round: cfg.round,
                mv,
            });
        }
        self.next += 1;
        Ok(mv)
    }
}

/// Sits on `p` and `q` for `T_f` rounds each, alternating, until some robot
/// comes within one hop; from then on it plays [`GreedyEvade`].
#[derive(Debug, Clone)]
pub struct Oscillator {
    p: Vertex,
    q: Vertex,
    evading: bool,
}

impl Oscillator {
    pub fn new(p: Vertex, q: Vertex) -> Self {
        Oscillator {
            p,
            q,
            evading: false,
        }
    }

    fn scheduled(&self, round: u64, t_f: u32) -> Vertex {
        if (round / u64::from(t_f.max(1))).is_multiple_of(2) {
            self.p
        } else {
            self.q
        }
    }
}

impl ResourceStrategy for Oscillator {
    fn choose(&mut self, cfg: &Configuration) -> Result<ResourceMove> {
        let here = cfg.res.position;
        if !self.evading && min_distance(cfg, here) <= 1 {
            self.evading = true;
        }
        if self.evading || cfg.res.fixed {
            return Ok(GreedyEvade::pick(cfg));
        }
        let legal = legal_resource_moves(cfg);
        let wanted = if here == self.p || here == self.q {
            self.scheduled(cfg.round + 1, cfg.t_f)
        } else {
            self.p
        };
        let mv = if wanted == here {
            ResourceMove::Stay
        } else if here.is_adjacent(wanted) {
            ResourceMove::Step(wanted)
        } else {
            // Walk in: first legal step that gets closer to `p`.
            legal
                .iter()
                .copied()
                .find(|m| m.target(here).manhattan(wanted) < here.manhattan(wanted))
                .unwrap_or(ResourceMove::Stay)
        };
        if legal.contains(&mv) {
            Ok(mv)
        } else {
            let other = if here == self.p { self.q } else { self.p };
            Ok(if here.is_adjacent(other) {
                ResourceMove::Step(other)
            } else {
                GreedyEvade::pick(cfg)
            })
        }
    }
}

/// Set of robots activated in one semi-synchronous round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Activation {
    pub first: bool,
    pub second: bool,
}

impl Activation {
    pub const FIRST: Activation = Activation {
        first: true,
        second: false,
    };
    pub const SECOND: Activation = Activation {
        first: false,
        second: true,
    };
    pub const BOTH: Activation = Activation {
        first: true,
        second: true,
    };

    pub fn contains(self, id: RobotId) -> bool {
        match id {
            RobotId::First => self.first,
            RobotId::Second => self.second,
        }
    }
}

/// How the resource moves under the semi-synchronous scheduler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResourcePolicy {
    /// Step only to vertices no activated robot can reach this round. Among
    /// the allowed moves, the first one that avoids capture for `lookahead`
    /// further rounds is taken (0 takes the first allowed move).
    Escape {
        lookahead: u32,
    },
    Strategy {
        strategy: StrategyId,
    },
}

pub const DEFAULT_ESCAPE_LOOKAHEAD: u32 = 8;

/// Activation schedule plus resource policy for semi-synchronous runs.
///
/// The schedule is a cyclic pattern. Every robot must be activated at least
/// once in every window of `fairness` consecutive rounds, so epochs stay finite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsyncAdversary {
    pattern: Vec<Activation>,
    fairness: usize,
    resource: ResourcePolicy,
}

impl SsyncAdversary {
    pub fn new(
        pattern: Vec<Activation>,
        fairness: usize,
        resource: ResourcePolicy,
    ) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidSchedule("empty activation pattern".into()));
        }
        if fairness == 0 {
            return Err(Error::InvalidSchedule(
                "fairness bound must be positive".into(),
            ));
        }
        for id in [RobotId::First, RobotId::Second] {
            for start in 0..pattern.len() {
                let seen = (0..fairness).any(|k| pattern[(start + k) % pattern.len()].contains(id));
                if !seen {
                    return Err(Error::InvalidSchedule(format!(
                        "{id} is not activated within {fairness} rounds from pattern slot {start}"
                    )));
                }
            }
        }
        Ok(SsyncAdversary {
            pattern,
            fairness,
            resource,
        })
    }

    /// One robot per round, alternating, with the escape policy.
    pub fn alternating_escape() -> Self {
        SsyncAdversary::new(
            vec![Activation::FIRST, Activation::SECOND],
            2,
            ResourcePolicy::Escape {
                lookahead: DEFAULT_ESCAPE_LOOKAHEAD,
            },
        )
        .expect("alternation is 2-fair")
    }

    pub fn fairness(&self) -> usize {
        self.fairness
    }

    pub fn resource(&self) -> &ResourcePolicy {
        &self.resource
    }

    pub fn pattern(&self) -> &[Activation] {
        &self.pattern
    }

    /// Robots activated in `round`, restricted to those on the grid and not
    /// terminated. While the second robot is still outside, the first one is
    /// activated every round.
    pub fn activation(&self, cfg: &Configuration) -> Activation {
        let slot = self.pattern[(cfg.round % self.pattern.len() as u64) as usize];
        let slot = if cfg.r2 == RobotState::Outside {
            Activation::FIRST
        } else {
            slot
        };
        Activation {
            first: slot.first && cfg.r1.is_active(),
            second: slot.second && cfg.r2.is_active(),
        }
    }
}

/// Resource moves the escape construction allows against the robots in
/// `active`, most preferred first.
///
/// A destination is safe when no robot stands on it and no activated robot is
/// adjacent to it. Staying comes first while no robot is adjacent and the
/// waiting budget allows it; then safe neighbours, non-corners first and
/// farther from the robots first. A corner is allowed only when no robot is
/// within two hops of it.
pub fn escape_candidates(cfg: &Configuration, active: Activation) -> Vec<ResourceMove> {
    if cfg.res.fixed {
        return vec![ResourceMove::Stay];
    }
    let here = cfg.res.position;
    let robots: Vec<Vertex> = cfg.active_positions().collect();
    let movers: Vec<Vertex> = [RobotId::First, RobotId::Second]
        .into_iter()
        .filter(|id| active.contains(*id))
        .filter_map(|id| cfg.robot(id).active())
        .collect();
    let safe = |w: Vertex| !robots.contains(&w) && movers.iter().all(|r| r.manhattan(w) > 1);
    let legal = legal_resource_moves(cfg);
    let can_stay = legal.contains(&ResourceMove::Stay) && safe(here);

    let mut out = Vec::new();
    if can_stay && !robots.iter().any(|r| r.is_adjacent(here)) {
        out.push(ResourceMove::Stay);
    }
    let corner_ok = |w: Vertex| !cfg.grid.is_corner(w) || robots.iter().all(|r| r.manhattan(w) > 2);
    let spread = |w: Vertex| {
        robots
            .iter()
            .map(|r| r.manhattan(w))
            .min()
            .unwrap_or(u32::MAX)
    };
    let mut steps: Vec<(ResourceMove, (bool, u32))> = legal
        .iter()
        .filter_map(|&mv| match mv {
            ResourceMove::Step(w) if safe(w) && corner_ok(w) => {
                Some((mv, (!cfg.grid.is_corner(w), spread(w))))
            }
            _ => None,
        })
        .collect();
    // stable: equal scores keep neighbour order
    steps.sort_by_key(|s| std::cmp::Reverse(s.1));
    out.extend(steps.into_iter().map(|(mv, _)| mv));
    if can_stay && !out.contains(&ResourceMove::Stay) {
        out.push(ResourceMove::Stay);
    }
    out
}

/// First allowed escape move, without lookahead.
pub fn ssync_escape(
    cfg: &Configuration,
    active: Activation,
) -> Result<ResourceMove, EscapeFailure> {
    escape_candidates(cfg, active)
        .first()
        .copied()
        .ok_or(EscapeFailure { round: cfg.round })
}

/// The escape policy found no safe move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EscapeFailure {
    pub round: u64,
}
