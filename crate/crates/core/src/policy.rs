//! The oblivious decision rule. Every function here maps a [`RobotView`] to a
//! [`Move`] and nothing else: no memory, no identity, no global orientation.
//!
//! Where the protocol leaves a genuine free choice (which door edge to take
//! first, which shortest path to approach a fixed resource along) the full set
//! of permitted moves is exposed through [`Policy::candidates`] and a
//! deterministic pick is made from it. Equivariance is checked against those
//! sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{boundary_frame_at, entry_guard, init_gather_anchor, RobotView};
use crate::grid::{Axis, Symmetry, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Stay,
    Step(Vertex),
}

impl Move {
    pub fn target(self, from: Vertex) -> Vertex {
        match self {
            Move::Stay => from,
            Move::Step(to) => to,
        }
    }

    pub fn transformed(self, sym: Symmetry, m: i32, n: i32) -> Move {
        match self {
            Move::Stay => Move::Stay,
            Move::Step(v) => Move::Step(sym.apply(v, m, n)),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Stay => f.write_str("stay"),
            Move::Step(v) => write!(f, "step {v}"),
        }
    }
}

/// Which door-adjacent vertex the first robot takes when it has a free choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryChoice {
    /// Smaller coordinate sum first, ties by smaller x.
    #[default]
    Default,
    Alternate,
}

pub trait Policy {
    fn decide(&self, view: &RobotView) -> Move;

    /// Every move the protocol permits in this view. `decide` returns one of them.
    fn candidates(&self, view: &RobotView) -> Vec<Move>;
}

/// Which corners the livelock guard of the boundary rule looks at when
/// asking whether the other robot is next to a corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CornerGuard {
    /// Either corner of the other robot's boundary, as the rule is written.
    #[default]
    AnyCorner,
    /// Only the far corner of the other robot's boundary. The corner shared by
    /// both robots' boundaries (the door) is ignored.
    FarCorner,
}

/// The three-phase rendezvous protocol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DynamicRendezvous {
    pub entry: EntryChoice,
    pub corner_guard: CornerGuard,
}

impl Policy for DynamicRendezvous {
    fn decide(&self, view: &RobotView) -> Move {
        dispatch(view, *self)
    }

    fn candidates(&self, view: &RobotView) -> Vec<Move> {
        if view.me == view.res {
            return vec![Move::Stay];
        }
        match route(view) {
            Route::Entry => entry_options(view),
            Route::Approach => approach_options(view),
            Route::Gather | Route::Boundary => vec![dispatch(view, *self)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Entry,
    Gather,
    Boundary,
    Approach,
}

fn route(view: &RobotView) -> Route {
    let shape = view.shape();
    if !view.other_on_res && entry_guard(|v| shape.is_corner(v), view.me, view.other) {
        return Route::Entry;
    }
    match view.other {
        None => Route::Approach,
        Some(_) if view.other_on_res => Route::Approach,
        Some(other) if init_gather_anchor(view.me, other, view.res).is_some() => Route::Gather,
        Some(_) => Route::Boundary,
    }
}

/// Dispatch with the default entry choice.
pub fn decide(view: &RobotView) -> Move {
    decide_with(view, EntryChoice::Default)
}

pub fn decide_with(view: &RobotView, entry: EntryChoice) -> Move {
    dispatch(
        view,
        DynamicRendezvous {
            entry,
            ..DynamicRendezvous::default()
        },
    )
}

fn dispatch(view: &RobotView, rules: DynamicRendezvous) -> Move {
    if view.me == view.res {
        return Move::Stay;
    }
    match route(view) {
        Route::Entry => decide_entry_with(view, rules.entry),
        Route::Gather => decide_gather(view),
        Route::Boundary | Route::Approach => decide_boundary_with(view, rules.corner_guard),
    }
}

fn entry_options(view: &RobotView) -> Vec<Move> {
    if !view.at_door {
        return vec![Move::Stay];
    }
    let shape = view.shape();
    let mut free: Vec<Vertex> = shape
        .adjacent(view.me)
        .filter(|w| Some(*w) != view.other)
        .collect();
    free.sort_by_key(|w| (w.x + w.y, w.x));
    if free.is_empty() {
        vec![Move::Stay]
    } else {
        free.into_iter().map(Move::Step).collect()
    }
}

pub fn decide_entry(view: &RobotView) -> Move {
    decide_entry_with(view, EntryChoice::Default)
}

/// Entry phase. From the door: take a free door edge. Next to a corner holding
/// the other robot: wait.
pub fn decide_entry_with(view: &RobotView, entry: EntryChoice) -> Move {
    let options = entry_options(view);
    match (entry, options.as_slice()) {
        (EntryChoice::Alternate, [_, second]) => *second,
        (_, [first, ..]) => *first,
        (_, []) => Move::Stay,
    }
}

/// Boundary phase: slide along the door boundary toward the resource's
/// projection, holding back near corners so the pair does not livelock.
pub fn decide_boundary(view: &RobotView) -> Move {
    decide_boundary_with(view, CornerGuard::AnyCorner)
}

pub fn decide_boundary_with(view: &RobotView, guard: CornerGuard) -> Move {
    let other = match view.other {
        Some(o) if !view.other_on_res => o,
        _ => return approach_path_step(view),
    };
    let shape = view.shape();
    let Some(bd) = shape.unique_boundary(view.me) else {
        return Move::Stay;
    };
    let me = boundary_frame_at(bd, view.me, view.res);
    let Some(next) = me.toward else {
        // On PD(r): both neighbours on the boundary are equally near.
        return Move::Stay;
    };
    let Some(other_bd) = shape.unique_boundary(other) else {
        return Move::Stay;
    };
    let other_dist = boundary_frame_at(other_bd, other, view.res).dist;

    if other_dist != 0 {
        let other_near_corner = match (guard, bd.axis == other_bd.axis) {
            (CornerGuard::FarCorner, false) => {
                let shared = match bd.axis {
                    Axis::Row => Vertex::new(other_bd.index, bd.index),
                    Axis::Col => Vertex::new(bd.index, other_bd.index),
                };
                shape
                    .adjacent(other)
                    .any(|w| w != shared && shape.is_corner(w) && other_bd.contains(w))
            }
            _ => shape.adjacent_to_corner_on(other_bd, other),
        };
        if !shape.is_corner(next) && (!other_near_corner || me.dist != 1) {
            return Move::Step(next);
        }
        Move::Stay
    } else if me.dist > 1 {
        Move::Step(next)
    } else {
        Move::Stay
    }
}

/// Gather phase: the robot on a line with the resource walks along it; the
/// other robot steps parallel to that line onto the resource's perpendicular.
pub fn decide_gather(view: &RobotView) -> Move {
    let other = match view.other {
        Some(o) if !view.other_on_res => o,
        _ => return approach_path_step(view),
    };
    let shape = view.shape();
    match view.me.line_to(view.res) {
        Some(line) => {
            if !view.me.is_adjacent(view.res) {
                Move::Step(view.me.step_toward(view.res, line.axis))
            } else if shape.is_corner(view.res) && other.is_adjacent(view.res) {
                Move::Step(view.res)
            } else {
                Move::Stay
            }
        }
        None => match other.line_to(view.res) {
            Some(line) => Move::Step(view.me.step_toward(view.res, line.axis)),
            None => Move::Stay,
        },
    }
}

fn approach_options(view: &RobotView) -> Vec<Move> {
    let shape = view.shape();
    let here = view.me.manhattan(view.res);
    let options: Vec<Move> = shape
        .adjacent(view.me)
        .filter(|w| w.manhattan(view.res) < here && (*w == view.res || !shape.is_corner(*w)))
        .map(Move::Step)
        .collect();
    if options.is_empty() {
        vec![Move::Stay]
    } else {
        options
    }
}

/// One step along a shortest path to the (fixed) resource that never enters a
/// corner other than the resource's own vertex.
///
/// The axis with the larger remaining gap goes first, rows on ties; if that
/// lands on a foreign corner the other axis is used instead.
pub fn approach_path_step(view: &RobotView) -> Move {
    let (me, res) = (view.me, view.res);
    if me == res {
        return Move::Stay;
    }
    let shape = view.shape();
    let (gx, gy) = (me.x.abs_diff(res.x), me.y.abs_diff(res.y));
    let primary = if gy > gx { Axis::Col } else { Axis::Row };
    let first = me.step_toward(res, primary);
    let blocked = |w: Vertex| shape.is_corner(w) && w != res;
    let secondary_gap = if primary == Axis::Row { gy } else { gx };
    if blocked(first) && secondary_gap != 0 {
        Move::Step(me.step_toward(res, primary.other()))
    } else {
        Move::Step(first)
    }
}
