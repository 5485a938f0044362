//! Round state of an episode and the structural classifiers computed from it:
//! robot views, the phase dispatch, InitGather detection and the frames used by
//! the protocol and the monitors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, GridSpec, Line, Rect, Symmetry, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobotId {
    First,
    Second,
}

impl RobotId {
    pub fn other(self) -> RobotId {
        match self {
            RobotId::First => RobotId::Second,
            RobotId::Second => RobotId::First,
        }
    }
}

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RobotId::First => "r1",
            RobotId::Second => "r2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobotStatus {
    Outside,
    Active,
    Terminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RobotState {
    /// Not yet entered through the door.
    Outside,
    Active(Vertex),
    /// Co-located with the resource; never moves again.
    Terminated(Vertex),
}

impl RobotState {
    pub fn status(self) -> RobotStatus {
        match self {
            RobotState::Outside => RobotStatus::Outside,
            RobotState::Active(_) => RobotStatus::Active,
            RobotState::Terminated(_) => RobotStatus::Terminated,
        }
    }

    pub fn position(self) -> Option<Vertex> {
        match self {
            RobotState::Outside => None,
            RobotState::Active(v) | RobotState::Terminated(v) => Some(v),
        }
    }

    pub fn active(self) -> Option<Vertex> {
        match self {
            RobotState::Active(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_active(self) -> bool {
        matches!(self, RobotState::Active(_))
    }

    pub fn is_terminated(self) -> bool {
        matches!(self, RobotState::Terminated(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResourceState {
    pub position: Vertex,
    /// Completed consecutive rounds spent alone on `position`.
    pub stay_count: u32,
    pub fixed: bool,
}

/// Ground truth at the start of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub grid: GridSpec,
    pub round: u64,
    pub r1: RobotState,
    pub r2: RobotState,
    pub res: ResourceState,
    pub t_f: u32,
}

/// Everything in a [`Configuration`] except the round counter. The dynamics are
/// stationary, so this is the state the exhaustive search memoizes on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateKey {
    pub r1: RobotState,
    pub r2: RobotState,
    pub res: ResourceState,
}

impl Configuration {
    pub fn robot(&self, which: RobotId) -> RobotState {
        match which {
            RobotId::First => self.r1,
            RobotId::Second => self.r2,
        }
    }

    pub fn robot_mut(&mut self, which: RobotId) -> &mut RobotState {
        match which {
            RobotId::First => &mut self.r1,
            RobotId::Second => &mut self.r2,
        }
    }

    pub fn key(&self) -> StateKey {
        StateKey {
            r1: self.r1,
            r2: self.r2,
            res: self.res,
        }
    }

    pub fn from_key(grid: GridSpec, t_f: u32, round: u64, key: StateKey) -> Self {
        Configuration {
            grid,
            round,
            r1: key.r1,
            r2: key.r2,
            res: key.res,
            t_f,
        }
    }

    pub fn is_done(&self) -> bool {
        self.r1.is_terminated() && self.r2.is_terminated()
    }

    /// Positions of robots that are on the grid and not terminated.
    pub fn active_positions(&self) -> impl Iterator<Item = Vertex> {
        [self.r1, self.r2]
            .into_iter()
            .filter_map(RobotState::active)
    }

    /// The configuration with the two robot labels exchanged.
    pub fn swapped(&self) -> Self {
        Configuration {
            r1: self.r2,
            r2: self.r1,
            ..*self
        }
    }
}

/// What a single oblivious robot observes in its LOOK phase.
///
/// Positions are expressed in the door-normalized frame of the grid. The policy
/// may only use them through frame-independent predicates; the equivariance
/// suite enforces this. The door itself is visible only through `at_door`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RobotView {
    pub m: i32,
    pub n: i32,
    pub me: Vertex,
    pub at_door: bool,
    pub other: Option<Vertex>,
    pub other_on_res: bool,
    pub res: Vertex,
}

impl RobotView {
    /// The grid as far as the robot can tell: dimensions only. The door field
    /// is a placeholder at the origin and must not be consulted.
    pub(crate) fn shape(&self) -> GridShape {
        GridShape {
            m: self.m,
            n: self.n,
        }
    }

    /// Image of this view under a grid symmetry.
    pub fn transformed(&self, sym: Symmetry) -> RobotView {
        let (m, n) = sym.target_dims(self.m, self.n);
        let f = |v: Vertex| sym.apply(v, self.m, self.n);
        RobotView {
            m,
            n,
            me: f(self.me),
            at_door: self.at_door,
            other: self.other.map(f),
            other_on_res: self.other_on_res,
            res: f(self.res),
        }
    }
}

/// Door-free grid geometry, the part of [`GridSpec`] a robot may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GridShape {
    pub m: i32,
    pub n: i32,
}

impl GridShape {
    pub fn contains(&self, v: Vertex) -> bool {
        (0..self.n).contains(&v.x) && (0..self.m).contains(&v.y)
    }

    pub fn is_corner(&self, v: Vertex) -> bool {
        (v.x == 0 || v.x == self.n - 1) && (v.y == 0 || v.y == self.m - 1)
    }

    pub fn adjacent(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        [(-1, 0), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .map(move |(dx, dy)| Vertex::new(v.x + dx, v.y + dy))
            .filter(move |w| self.contains(*w))
    }

    /// The boundary line through `v` when `v` is a boundary vertex other than a corner.
    pub fn unique_boundary(&self, v: Vertex) -> Option<Line> {
        let on_x = v.x == 0 || v.x == self.n - 1;
        let on_y = v.y == 0 || v.y == self.m - 1;
        match (on_x, on_y) {
            (true, false) => Some(Line::col(v.x)),
            (false, true) => Some(Line::row(v.y)),
            _ => None,
        }
    }

    pub fn adjacent_to_corner_on(&self, boundary: Line, v: Vertex) -> bool {
        let len = match boundary.axis {
            Axis::Row => self.n,
            Axis::Col => self.m,
        };
        let along = boundary.along(v);
        along == 1 || along == len - 2
    }
}

/// The robot on a line with the resource in an InitGather configuration,
/// together with that line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Anchor {
    /// `true` when the first argument of [`init_gather_anchor`] is the anchor.
    pub first: bool,
    pub line: Line,
}

/// InitGather test on raw positions.
///
/// Holds iff the robots share no grid line, some robot is collinear with the
/// resource on a line `L`, and the other robot is within perpendicular
/// distance one of the line through the resource perpendicular to `L`. When
/// both robots are collinear with the resource the one on a row is reported.
pub(crate) fn init_gather_anchor(a: Vertex, b: Vertex, res: Vertex) -> Option<Anchor> {
    if a.shares_line(b) {
        return None;
    }
    let qualifies = |anchor: Vertex, other: Vertex| {
        let line = anchor.line_to(res)?;
        let perp = line.perpendicular_through(res);
        (perp.distance(other) <= 1).then_some(line)
    };
    let first = qualifies(a, b).map(|line| Anchor { first: true, line });
    let second = qualifies(b, a).map(|line| Anchor { first: false, line });
    match (first, second) {
        (Some(x), Some(y)) => Some(if y.line.axis == Axis::Row && x.line.axis != Axis::Row {
            y
        } else {
            x
        }),
        (x, y) => x.or(y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryFrame {
    /// The boundary line the robot stands on.
    pub bd: Line,
    /// The line through the robot perpendicular to `bd`.
    pub pd: Line,
    pub dist: u32,
    /// Neighbour on `bd` one step closer to the resource's projection.
    pub toward: Option<Vertex>,
}

pub(crate) fn boundary_frame_at(bd: Line, robot: Vertex, res: Vertex) -> BoundaryFrame {
    let dist = bd.along(robot).abs_diff(bd.along(res));
    let toward = (dist != 0).then(|| robot.step_toward(res, bd.axis));
    BoundaryFrame {
        bd,
        pd: bd.perpendicular_through(robot),
        dist,
        toward,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatherFrame {
    pub anchor: RobotId,
    /// Line through the anchor and the resource.
    pub l: Line,
    /// Line through the resource perpendicular to `l`.
    pub lp: Line,
    /// Line through the anchor perpendicular to `l`.
    pub l1: Line,
    /// Line through the other robot parallel to `l`.
    pub l2: Line,
    /// Containing rectangle: cut out by `l1` and `l2`, on the resource's side.
    pub r_con: Rect,
}

impl GatherFrame {
    /// The lines parallel to `lp` at hop one on either side: `(near, far)`
    /// relative to the anchor.
    pub fn side_lines(&self, anchor_pos: Vertex) -> (Line, Line) {
        let dir = -self.lp.offset(anchor_pos).signum();
        let shift = |d: i32| Line {
            axis: self.lp.axis,
            index: self.lp.index + d,
        };
        (shift(-dir), shift(dir))
    }
}

fn containing_rect(grid: &GridSpec, l1: Line, l2: Line, res: Vertex) -> Rect {
    let (vertical, horizontal) = if l1.axis == Axis::Col {
        (l1, l2)
    } else {
        (l2, l1)
    };
    let far = grid.far_corner();
    let span = |line: i32, at: i32, max: i32, far: i32| {
        let forward = at > line || (at == line && far > line);
        if forward {
            (line, max)
        } else {
            (0, line)
        }
    };
    Rect {
        x: span(vertical.index, res.x, grid.n() - 1, far.x),
        y: span(horizontal.index, res.y, grid.m() - 1, far.y),
    }
}

/// The view robot `which` computes in its LOOK phase.
pub fn robot_view(cfg: &Configuration, which: RobotId) -> Result<RobotView> {
    let me = cfg.robot(which).active().ok_or(Error::NotActive(which))?;
    let grid = &cfg.grid;
    let sym = Symmetry::normalizing(grid);
    let f = |v: Vertex| sym.apply(v, grid.m(), grid.n());
    let other = cfg.robot(which.other()).position();
    Ok(RobotView {
        m: grid.m(),
        n: grid.n(),
        me: f(me),
        at_door: me == grid.door(),
        other: other.map(f),
        other_on_res: other == Some(cfg.res.position),
        res: f(cfg.res.position),
    })
}

/// The InitGather frame of a configuration, if it is one.
pub fn detect_init_gather(cfg: &Configuration) -> Option<GatherFrame> {
    let (a, b) = (cfg.r1.active()?, cfg.r2.active()?);
    let res = cfg.res.position;
    let anchor = init_gather_anchor(a, b, res)?;
    let (id, anchor_pos, other_pos) = if anchor.first {
        (RobotId::First, a, b)
    } else {
        (RobotId::Second, b, a)
    };
    let l = anchor.line;
    let l1 = l.perpendicular_through(anchor_pos);
    let l2 = l.parallel_through(other_pos);
    Some(GatherFrame {
        anchor: id,
        l,
        lp: l.perpendicular_through(res),
        l1,
        l2,
        r_con: containing_rect(&cfg.grid, l1, l2, res),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Entry,
    Boundary,
    Gather,
    Done,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Entry => "entry",
            Phase::Boundary => "boundary",
            Phase::Gather => "gather",
            Phase::Done => "done",
        })
    }
}

/// Entry guard on raw positions: some robot sits on a corner and the other is
/// either absent or adjacent to it. Termination is checked by the callers.
pub(crate) fn entry_guard(
    is_corner: impl Fn(Vertex) -> bool,
    me: Vertex,
    other: Option<Vertex>,
) -> bool {
    match other {
        None => is_corner(me),
        Some(o) => (is_corner(me) || is_corner(o)) && me.is_adjacent(o),
    }
}

pub fn classify_phase(cfg: &Configuration) -> Phase {
    if cfg.is_done() {
        return Phase::Done;
    }
    let none_terminated = !cfg.r1.is_terminated() && !cfg.r2.is_terminated();
    if none_terminated {
        let grid = cfg.grid;
        let mut robots = cfg.active_positions();
        if let Some(first) = robots.next() {
            if entry_guard(|v| grid.is_corner(v), first, robots.next()) {
                return Phase::Entry;
            }
        }
    }
    if detect_init_gather(cfg).is_some() {
        Phase::Gather
    } else {
        Phase::Boundary
    }
}

/// Door boundary frame of an active robot standing on a boundary edge.
pub fn boundary_frame(cfg: &Configuration, which: RobotId) -> Result<BoundaryFrame> {
    let robot = cfg.robot(which).active().ok_or(Error::NotActive(which))?;
    let bd = cfg.grid.unique_boundary(robot)?;
    Ok(boundary_frame_at(bd, robot, cfg.res.position))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    pub(crate) fn cfg(
        m: i32,
        n: i32,
        r1: RobotState,
        r2: RobotState,
        res: Vertex,
    ) -> Configuration {
        Configuration {
            grid: GridSpec::new(m, n).unwrap(),
            round: 0,
            r1,
            r2,
            res: ResourceState {
                position: res,
                stay_count: 0,
                fixed: false,
            },
            t_f: 1,
        }
    }

    use RobotState::{Active, Outside, Terminated};

    #[test]
    fn view_examples() {
        let c = cfg(5, 5, Active(v(0, 0)), Outside, v(3, 3));
        let view = robot_view(&c, RobotId::First).unwrap();
        assert_eq!(view.me, v(0, 0));
        assert!(view.at_door);
        assert_eq!(view.other, None);
        assert_eq!(view.res, v(3, 3));

        let c = cfg(5, 5, Active(v(0, 1)), Active(v(1, 0)), v(3, 3));
        let view = robot_view(&c, RobotId::First).unwrap();
        assert!(!view.at_door);
        assert_eq!(view.other, Some(v(1, 0)));
        assert!(!view.other_on_res);

        let c = cfg(5, 5, Active(v(0, 1)), Terminated(v(4, 4)), v(4, 4));
        let view = robot_view(&c, RobotId::First).unwrap();
        assert_eq!(view.other, Some(v(4, 4)));
        assert!(view.other_on_res);

        assert_eq!(
            robot_view(&c, RobotId::Second),
            Err(Error::NotActive(RobotId::Second))
        );
    }

    #[test]
    fn view_is_door_normalized() {
        let mut c = cfg(4, 5, Active(v(4, 3)), Outside, v(1, 1));
        c.grid = crate::grid::build_grid(4, 5, v(4, 3)).unwrap();
        let view = robot_view(&c, RobotId::First).unwrap();
        assert_eq!(view.me, v(0, 0));
        assert!(view.at_door);
        assert_eq!(view.res, v(3, 2));
    }

    #[test]
    fn init_gather_examples() {
        let c = cfg(6, 6, Active(v(0, 3)), Active(v(4, 0)), v(4, 3));
        let frame = detect_init_gather(&c).expect("both robots collinear with res");
        assert_eq!(frame.anchor, RobotId::First, "row-collinear robot anchors");
        assert_eq!(frame.l, Line::row(3));
        assert_eq!(frame.lp, Line::col(4));
        assert_eq!(frame.l1, Line::col(0));
        assert_eq!(frame.l2, Line::row(0));
        assert_eq!(
            frame.r_con,
            Rect {
                x: (0, 5),
                y: (0, 5)
            }
        );

        let c = cfg(6, 6, Active(v(0, 3)), Active(v(0, 5)), v(4, 3));
        assert_eq!(detect_init_gather(&c), None);
        let c = cfg(6, 6, Active(v(0, 3)), Active(v(2, 0)), v(4, 3));
        assert_eq!(detect_init_gather(&c), None);
        let c = cfg(6, 6, Active(v(0, 3)), Active(v(3, 0)), v(4, 3));
        let frame = detect_init_gather(&c).unwrap();
        assert_eq!(frame.anchor, RobotId::First);
        assert_eq!(
            frame.r_con,
            Rect {
                x: (0, 5),
                y: (0, 5)
            }
        );
    }

    #[test]
    fn r_con_shrinks_with_the_lines() {
        let c = cfg(6, 6, Active(v(2, 4)), Active(v(4, 3)), v(5, 4));
        let frame = detect_init_gather(&c).unwrap();
        assert_eq!(frame.anchor, RobotId::First);
        assert_eq!(
            frame.r_con,
            Rect {
                x: (2, 5),
                y: (3, 5)
            }
        );
        let (near, far) = frame.side_lines(v(2, 4));
        assert_eq!((near, far), (Line::col(4), Line::col(6)));
    }

    #[test]
    fn phase_examples() {
        let c = cfg(5, 5, Active(v(0, 0)), Outside, v(3, 3));
        assert_eq!(classify_phase(&c), Phase::Entry);
        let c = cfg(5, 5, Active(v(0, 1)), Active(v(0, 0)), v(3, 3));
        assert_eq!(classify_phase(&c), Phase::Entry);
        let c = cfg(5, 5, Active(v(0, 1)), Active(v(1, 0)), v(3, 3));
        assert_eq!(classify_phase(&c), Phase::Boundary);
        let c = cfg(5, 5, Terminated(v(3, 3)), Terminated(v(3, 3)), v(3, 3));
        assert_eq!(classify_phase(&c), Phase::Done);
        let c = cfg(5, 5, Active(v(0, 2)), Active(v(3, 0)), v(3, 2));
        assert_eq!(classify_phase(&c), Phase::Gather);
    }

    #[test]
    fn boundary_frame_examples() {
        let c = cfg(5, 5, Active(v(0, 2)), Active(v(2, 0)), v(3, 4));
        let f = boundary_frame(&c, RobotId::First).unwrap();
        assert_eq!(f.bd, Line::col(0));
        assert_eq!(f.pd, Line::row(2));
        assert_eq!(f.dist, 2);
        assert_eq!(f.toward, Some(v(0, 3)));

        let c = cfg(5, 5, Active(v(2, 0)), Active(v(0, 2)), v(2, 3));
        let f = boundary_frame(&c, RobotId::First).unwrap();
        assert_eq!(f.dist, 0);
        assert_eq!(f.toward, None);

        let c = cfg(5, 5, Active(v(1, 1)), Active(v(0, 2)), v(2, 3));
        assert_eq!(
            boundary_frame(&c, RobotId::First),
            Err(Error::NotOnBoundary(v(1, 1)))
        );
        let c = cfg(5, 5, Active(v(4, 0)), Active(v(0, 2)), v(2, 3));
        assert_eq!(
            boundary_frame(&c, RobotId::First),
            Err(Error::AtCorner(v(4, 0)))
        );
    }

    /// All placements of two active robots and a free resource.
    fn triples(m: i32, n: i32) -> Vec<Configuration> {
        let g = GridSpec::new(m, n).unwrap();
        let mut out = Vec::new();
        for a in g.vertices() {
            for b in g.vertices() {
                for r in g.vertices() {
                    if a != b && r != a && r != b {
                        out.push(cfg(m, n, Active(a), Active(b), r));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn init_gather_is_anonymous_and_equivariant() {
        for (m, n) in [(4, 4), (4, 5)] {
            for c in triples(m, n) {
                let frame = detect_init_gather(&c);
                let swapped = detect_init_gather(&c.swapped());
                assert_eq!(frame.is_some(), swapped.is_some());
                for sym in Symmetry::ALL {
                    let (m2, n2) = sym.target_dims(m, n);
                    let f = |u: Vertex| sym.apply(u, m, n);
                    let mut image = cfg(
                        m2,
                        n2,
                        Active(f(c.r1.active().unwrap())),
                        Active(f(c.r2.active().unwrap())),
                        f(c.res.position),
                    );
                    image.grid = sym.apply_grid(&c.grid);
                    let img_frame = detect_init_gather(&image);
                    assert_eq!(frame.is_some(), img_frame.is_some(), "{sym:?}");
                    if let (Some(fr), Some(ifr)) = (frame, img_frame) {
                        // The containing rectangle is independent of the anchor
                        // choice, so it must map exactly.
                        let corners =
                            [v(fr.r_con.x.0, fr.r_con.y.0), v(fr.r_con.x.1, fr.r_con.y.1)];
                        let mapped = Rect::from_corners(f(corners[0]), f(corners[1]));
                        assert_eq!(mapped, ifr.r_con, "{sym:?} {c:?}");
                    }
                }
            }
        }
    }
}
