//! Grid construction and the geometric vocabulary shared by the protocol and
//! the verifier: vertex classes, boundary and perpendicular lines, projected
//! distances, quadrants and the symmetry group of the rectangle.
//!
//! Coordinates follow the usual embedding: `x` is the column in `[0, n)` and
//! `y` the row in `[0, m)`. Robots never see these numbers as a shared frame;
//! the policy is tested to be equivariant under every [`Symmetry`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Vertex { x, y }
    }

    /// Hop distance on the grid graph.
    pub fn manhattan(self, other: Vertex) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Vertex) -> bool {
        self.manhattan(other) == 1
    }

    /// True when both vertices lie on a common row or column.
    pub fn shares_line(self, other: Vertex) -> bool {
        self.x == other.x || self.y == other.y
    }

    /// The grid line through both vertices, if they are distinct and collinear.
    pub fn line_to(self, other: Vertex) -> Option<Line> {
        if self == other {
            None
        } else if self.y == other.y {
            Some(Line::row(self.y))
        } else if self.x == other.x {
            Some(Line::col(self.x))
        } else {
            None
        }
    }

    /// Unit step from `self` toward `target` along one axis.
    pub(crate) fn step_toward(self, target: Vertex, axis: Axis) -> Vertex {
        match axis {
            Axis::Row => Vertex::new(self.x + (target.x - self.x).signum(), self.y),
            Axis::Col => Vertex::new(self.x, self.y + (target.y - self.y).signum()),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl std::str::FromStr for Vertex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
        let x = x
            .trim()
            .parse()
            .map_err(|e| format!("bad x in `{s}`: {e}"))?;
        let y = y
            .trim()
            .parse()
            .map_err(|e| format!("bad y in `{s}`: {e}"))?;
        Ok(Vertex { x, y })
    }
}

/// Orientation of a grid line. A `Row` line holds `y` fixed and runs along x;
/// a `Col` line holds `x` fixed and runs along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Row,
    Col,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Row => Axis::Col,
            Axis::Col => Axis::Row,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line {
    pub axis: Axis,
    pub index: i32,
}

impl Line {
    pub const fn row(y: i32) -> Self {
        Line {
            axis: Axis::Row,
            index: y,
        }
    }

    pub const fn col(x: i32) -> Self {
        Line {
            axis: Axis::Col,
            index: x,
        }
    }

    pub fn contains(self, v: Vertex) -> bool {
        match self.axis {
            Axis::Row => v.y == self.index,
            Axis::Col => v.x == self.index,
        }
    }

    /// The line through `v` perpendicular to `self`.
    pub fn perpendicular_through(self, v: Vertex) -> Line {
        match self.axis {
            Axis::Row => Line::col(v.x),
            Axis::Col => Line::row(v.y),
        }
    }

    /// The line through `v` parallel to `self`.
    pub fn parallel_through(self, v: Vertex) -> Line {
        match self.axis {
            Axis::Row => Line::row(v.y),
            Axis::Col => Line::col(v.x),
        }
    }

    /// Coordinate of `v` measured along the line.
    pub fn along(self, v: Vertex) -> i32 {
        match self.axis {
            Axis::Row => v.x,
            Axis::Col => v.y,
        }
    }

    /// Signed offset of `v` from the line, measured perpendicular to it.
    pub fn offset(self, v: Vertex) -> i32 {
        match self.axis {
            Axis::Row => v.y - self.index,
            Axis::Col => v.x - self.index,
        }
    }

    /// Perpendicular hop distance of `v` to the line.
    pub fn distance(self, v: Vertex) -> u32 {
        self.offset(v).unsigned_abs()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axis {
            Axis::Row => write!(f, "Row {}", self.index),
            Axis::Col => write!(f, "Col {}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    Corner,
    Boundary,
    Interior,
}

/// Inclusive axis-aligned rectangle of vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: (i32, i32),
    pub y: (i32, i32),
}

impl Rect {
    pub fn from_corners(a: Vertex, b: Vertex) -> Self {
        Rect {
            x: (a.x.min(b.x), a.x.max(b.x)),
            y: (a.y.min(b.y), a.y.max(b.y)),
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (self.x.0..=self.x.1).contains(&v.x) && (self.y.0..=self.y.1).contains(&v.y)
    }

    /// Number of vertices along x.
    pub fn width(&self) -> u32 {
        (self.x.1 - self.x.0 + 1) as u32
    }

    /// Number of vertices along y.
    pub fn height(&self) -> u32 {
        (self.y.1 - self.y.0 + 1) as u32
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (self.y.0..=self.y.1)
            .flat_map(move |y| (self.x.0..=self.x.1).map(move |x| Vertex::new(x, y)))
    }
}

/// The four regions cut out by the perpendicular lines of the two robots,
/// labelled with the door mapped to the north-west corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantPartition {
    pub pd_r: Line,
    pub pd_r2: Line,
    pub ne: Rect,
    pub nw: Rect,
    pub se: Rect,
    pub sw: Rect,
}

impl QuadrantPartition {
    pub fn quadrants(&self) -> [Rect; 4] {
        [self.ne, self.nw, self.se, self.sw]
    }
}

/// A validated `m x n` grid with its door corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    m: i32,
    n: i32,
    door: Vertex,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    m: i32,
    n: i32,
    door: Vertex,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        build_grid(raw.m, raw.n, raw.door)
    }
}

impl From<GridSpec> for RawGrid {
    fn from(g: GridSpec) -> Self {
        RawGrid {
            m: g.m,
            n: g.n,
            door: g.door,
        }
    }
}

/// Validates dimensions and door placement.
pub fn build_grid(m: i32, n: i32, door: Vertex) -> Result<GridSpec> {
    if m < 3 || n < 3 {
        return Err(Error::DimensionTooSmall { m, n });
    }
    let grid = GridSpec { m, n, door };
    if !grid.contains(door) || !grid.is_corner(door) {
        return Err(Error::InvalidDoor(door));
    }
    Ok(grid)
}

const STEPS: [(i32, i32); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

impl GridSpec {
    /// Grid with the door at the origin.
    pub fn new(m: i32, n: i32) -> Result<Self> {
        build_grid(m, n, Vertex::new(0, 0))
    }

    /// Number of rows.
    pub fn m(&self) -> i32 {
        self.m
    }

    /// Number of columns.
    pub fn n(&self) -> i32 {
        self.n
    }

    pub fn door(&self) -> Vertex {
        self.door
    }

    pub fn vertex_count(&self) -> usize {
        (self.m * self.n) as usize
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (0..self.n).contains(&v.x) && (0..self.m).contains(&v.y)
    }

    pub fn line_in_grid(&self, line: Line) -> bool {
        match line.axis {
            Axis::Row => (0..self.m).contains(&line.index),
            Axis::Col => (0..self.n).contains(&line.index),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.m).flat_map(move |y| (0..self.n).map(move |x| Vertex::new(x, y)))
    }

    /// Dense index of a vertex, row-major.
    pub fn index_of(&self, v: Vertex) -> usize {
        (v.y * self.n + v.x) as usize
    }

    pub fn vertex_at(&self, index: usize) -> Vertex {
        let i = index as i32;
        Vertex::new(i % self.n, i / self.n)
    }

    pub fn corners(&self) -> [Vertex; 4] {
        let (xm, ym) = (self.n - 1, self.m - 1);
        [
            Vertex::new(0, 0),
            Vertex::new(xm, 0),
            Vertex::new(0, ym),
            Vertex::new(xm, ym),
        ]
    }

    pub fn is_corner(&self, v: Vertex) -> bool {
        (v.x == 0 || v.x == self.n - 1) && (v.y == 0 || v.y == self.m - 1)
    }

    /// The corner diagonally opposite the door.
    pub fn far_corner(&self) -> Vertex {
        Vertex::new(self.n - 1 - self.door.x, self.m - 1 - self.door.y)
    }

    /// Neighbours in the fixed order -x, +x, -y, +y. Assumes `v` is in the grid.
    pub fn adjacent(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        STEPS
            .iter()
            .map(move |&(dx, dy)| Vertex::new(v.x + dx, v.y + dy))
            .filter(move |w| self.contains(*w))
    }

    pub fn neighbors(&self, v: Vertex) -> Result<Vec<Vertex>> {
        self.check(v)?;
        Ok(self.adjacent(v).collect())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacent(v).count()
    }

    pub fn classify_vertex(&self, v: Vertex) -> Result<VertexKind> {
        self.check(v)?;
        Ok(self.kind(v))
    }

    pub(crate) fn kind(&self, v: Vertex) -> VertexKind {
        let on_x = v.x == 0 || v.x == self.n - 1;
        let on_y = v.y == 0 || v.y == self.m - 1;
        match (on_x, on_y) {
            (true, true) => VertexKind::Corner,
            (true, false) | (false, true) => VertexKind::Boundary,
            (false, false) => VertexKind::Interior,
        }
    }

    /// Whether `v` is a boundary vertex (corners included).
    pub fn is_boundary(&self, v: Vertex) -> bool {
        self.kind(v) != VertexKind::Interior
    }

    pub fn is_boundary_line(&self, line: Line) -> bool {
        match line.axis {
            Axis::Row => line.index == 0 || line.index == self.m - 1,
            Axis::Col => line.index == 0 || line.index == self.n - 1,
        }
    }

    /// Every grid boundary line through `v`: none for interior vertices, one for
    /// edge vertices, two for corners.
    pub fn boundary_lines(&self, v: Vertex) -> Vec<Line> {
        let mut lines = Vec::with_capacity(2);
        if v.x == 0 || v.x == self.n - 1 {
            lines.push(Line::col(v.x));
        }
        if v.y == 0 || v.y == self.m - 1 {
            lines.push(Line::row(v.y));
        }
        lines
    }

    /// The boundary line through a non-corner boundary vertex.
    pub fn unique_boundary(&self, v: Vertex) -> Result<Line> {
        self.check(v)?;
        match self.boundary_lines(v).as_slice() {
            [line] => Ok(*line),
            [] => Err(Error::NotOnBoundary(v)),
            _ => Err(Error::AtCorner(v)),
        }
    }

    /// Distance along `boundary` between `robot` and the foot of the
    /// perpendicular dropped from `res` onto that boundary.
    pub fn project_dist_along_boundary(
        &self,
        boundary: Line,
        robot: Vertex,
        res: Vertex,
    ) -> Result<u32> {
        self.check(robot)?;
        self.check(res)?;
        if !self.is_boundary_line(boundary) || !boundary.contains(robot) {
            return Err(Error::NotOnBoundary(robot));
        }
        Ok(boundary.along(robot).abs_diff(boundary.along(res)))
    }

    /// Whether `v` is next to a corner along `boundary`.
    pub fn adjacent_to_corner_on(&self, boundary: Line, v: Vertex) -> bool {
        let len = match boundary.axis {
            Axis::Row => self.n,
            Axis::Col => self.m,
        };
        let along = boundary.along(v);
        along == 1 || along == len - 2
    }

    pub fn quadrant_partition(&self, pd_r: Line, pd_r2: Line) -> Result<QuadrantPartition> {
        for line in [pd_r, pd_r2] {
            if !self.line_in_grid(line) {
                return Err(Error::LineOutOfGrid(line));
            }
        }
        if pd_r.axis == pd_r2.axis {
            return Err(Error::ParallelLines(pd_r.axis));
        }
        let (row, col) = if pd_r.axis == Axis::Row {
            (pd_r, pd_r2)
        } else {
            (pd_r2, pd_r)
        };

        // Work in the frame where the door is the north-west corner (0,0),
        // then map each rectangle back.
        let sym = Symmetry::normalizing(self);
        let pivot = sym.apply(Vertex::new(col.index, row.index), self.m, self.n);
        let (b, a) = (pivot.x, pivot.y);
        let (xm, ym) = (self.n - 1, self.m - 1);
        let back = |x: (i32, i32), y: (i32, i32)| {
            let p = sym.apply(Vertex::new(x.0, y.0), self.m, self.n);
            let q = sym.apply(Vertex::new(x.1, y.1), self.m, self.n);
            Rect::from_corners(p, q)
        };
        Ok(QuadrantPartition {
            pd_r,
            pd_r2,
            nw: back((0, b), (0, a)),
            ne: back((b, xm), (0, a)),
            sw: back((0, b), (a, ym)),
            se: back((b, xm), (a, ym)),
        })
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::OutOfGrid(v))
        }
    }
}

/// An element of the dihedral group acting on an `m x n` rectangle.
///
/// The four elements that do not swap axes are automorphisms of every grid;
/// the other four map an `m x n` grid onto an `n x m` one and are
/// automorphisms only when `m == n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Identity,
    FlipX,
    FlipY,
    Rot180,
    Transpose,
    AntiTranspose,
    Rot90,
    Rot270,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::FlipX,
        Symmetry::FlipY,
        Symmetry::Rot180,
        Symmetry::Transpose,
        Symmetry::AntiTranspose,
        Symmetry::Rot90,
        Symmetry::Rot270,
    ];

    pub fn swaps_axes(self) -> bool {
        matches!(
            self,
            Symmetry::Transpose | Symmetry::AntiTranspose | Symmetry::Rot90 | Symmetry::Rot270
        )
    }

    /// Symmetries that map the `m x n` grid onto itself.
    pub fn automorphisms(m: i32, n: i32) -> Vec<Symmetry> {
        Symmetry::ALL
            .into_iter()
            .filter(|s| m == n || !s.swaps_axes())
            .collect()
    }

    /// The axis-preserving symmetry sending the door of `grid` to (0,0).
    pub fn normalizing(grid: &GridSpec) -> Symmetry {
        let d = grid.door();
        match (d.x == 0, d.y == 0) {
            (true, true) => Symmetry::Identity,
            (false, true) => Symmetry::FlipX,
            (true, false) => Symmetry::FlipY,
            (false, false) => Symmetry::Rot180,
        }
    }

    /// Dimensions `(m, n)` of the image grid.
    pub fn target_dims(self, m: i32, n: i32) -> (i32, i32) {
        if self.swaps_axes() {
            (n, m)
        } else {
            (m, n)
        }
    }

    /// Image of `v`, where `v` lives on an `m x n` grid.
    pub fn apply(self, v: Vertex, m: i32, n: i32) -> Vertex {
        let (xm, ym) = (n - 1, m - 1);
        let (x, y) = (v.x, v.y);
        let (x, y) = match self {
            Symmetry::Identity => (x, y),
            Symmetry::FlipX => (xm - x, y),
            Symmetry::FlipY => (x, ym - y),
            Symmetry::Rot180 => (xm - x, ym - y),
            Symmetry::Transpose => (y, x),
            Symmetry::AntiTranspose => (ym - y, xm - x),
            Symmetry::Rot90 => (ym - y, x),
            Symmetry::Rot270 => (y, xm - x),
        };
        Vertex::new(x, y)
    }

    pub fn inverse(self) -> Symmetry {
        match self {
            Symmetry::Rot90 => Symmetry::Rot270,
            Symmetry::Rot270 => Symmetry::Rot90,
            s => s,
        }
    }

    pub fn apply_line(self, line: Line, m: i32, n: i32) -> Line {
        // Image of two points on the line determines the image line.
        let (a, b) = match line.axis {
            Axis::Row => (Vertex::new(0, line.index), Vertex::new(1, line.index)),
            Axis::Col => (Vertex::new(line.index, 0), Vertex::new(line.index, 1)),
        };
        self.apply(a, m, n)
            .line_to(self.apply(b, m, n))
            .expect("symmetries map lines to lines")
    }

    /// Image of the grid itself; the door follows the map.
    pub fn apply_grid(self, grid: &GridSpec) -> GridSpec {
        let (m, n) = self.target_dims(grid.m(), grid.n());
        build_grid(m, n, self.apply(grid.door(), grid.m(), grid.n()))
            .expect("symmetric image of a valid grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn build_grid_examples() {
        let g = build_grid(4, 5, v(0, 0)).unwrap();
        assert_eq!(g.vertex_count(), 20);
        assert_eq!(g.door(), v(0, 0));
        let g = build_grid(3, 3, v(2, 2)).unwrap();
        assert_eq!(g.door(), v(2, 2));
        assert_eq!(g.far_corner(), v(0, 0));
        assert_eq!(
            build_grid(2, 5, v(0, 0)),
            Err(Error::DimensionTooSmall { m: 2, n: 5 })
        );
        assert_eq!(
            build_grid(5, 2, v(0, 0)),
            Err(Error::DimensionTooSmall { m: 5, n: 2 })
        );
        assert_eq!(build_grid(4, 5, v(1, 0)), Err(Error::InvalidDoor(v(1, 0))));
        assert_eq!(build_grid(4, 5, v(9, 9)), Err(Error::InvalidDoor(v(9, 9))));
    }

    #[test]
    fn classify_examples() {
        let g = GridSpec::new(4, 5).unwrap();
        assert_eq!(g.classify_vertex(v(0, 0)), Ok(VertexKind::Corner));
        assert_eq!(g.classify_vertex(v(0, 2)), Ok(VertexKind::Boundary));
        assert_eq!(g.classify_vertex(v(2, 2)), Ok(VertexKind::Interior));
        assert_eq!(g.classify_vertex(v(5, 0)), Err(Error::OutOfGrid(v(5, 0))));
    }

    #[test]
    fn neighbor_examples() {
        let g = GridSpec::new(4, 5).unwrap();
        assert_eq!(g.neighbors(v(0, 0)).unwrap(), vec![v(1, 0), v(0, 1)]);
        assert_eq!(
            g.neighbors(v(2, 0)).unwrap(),
            vec![v(1, 0), v(3, 0), v(2, 1)]
        );
        assert_eq!(
            g.neighbors(v(2, 2)).unwrap(),
            vec![v(1, 2), v(3, 2), v(2, 1), v(2, 3)]
        );
        assert!(g.neighbors(v(-1, 0)).is_err());
    }

    #[test]
    fn kind_agrees_with_degree_exhaustively() {
        for m in 3..=8 {
            for n in 3..=8 {
                let g = GridSpec::new(m, n).unwrap();
                for u in g.vertices() {
                    let expected = match g.degree(u) {
                        2 => VertexKind::Corner,
                        3 => VertexKind::Boundary,
                        4 => VertexKind::Interior,
                        d => panic!("degree {d}"),
                    };
                    assert_eq!(g.classify_vertex(u).unwrap(), expected, "{m}x{n} {u}");
                }
            }
        }
    }

    #[test]
    fn projected_distance_examples() {
        let g = GridSpec::new(5, 5).unwrap();
        assert_eq!(
            g.project_dist_along_boundary(Line::col(0), v(0, 2), v(3, 4)),
            Ok(2)
        );
        assert_eq!(
            g.project_dist_along_boundary(Line::row(0), v(2, 0), v(2, 3)),
            Ok(0)
        );
        let g = GridSpec::new(4, 5).unwrap();
        assert_eq!(
            g.project_dist_along_boundary(Line::col(0), v(0, 1), v(4, 1)),
            Ok(0)
        );
        assert_eq!(
            g.project_dist_along_boundary(Line::col(0), v(1, 1), v(4, 1)),
            Err(Error::NotOnBoundary(v(1, 1)))
        );
        assert_eq!(
            g.project_dist_along_boundary(Line::col(2), v(2, 1), v(4, 1)),
            Err(Error::NotOnBoundary(v(2, 1)))
        );
    }

    #[test]
    fn projected_distance_is_reflection_invariant() {
        for (m, n) in [(3, 3), (4, 5), (6, 4)] {
            let g = GridSpec::new(m, n).unwrap();
            for robot in g.vertices() {
                for boundary in g.boundary_lines(robot) {
                    for res in g.vertices() {
                        let d = g.project_dist_along_boundary(boundary, robot, res).unwrap();
                        for s in [Symmetry::FlipX, Symmetry::FlipY, Symmetry::Rot180] {
                            let b2 = s.apply_line(boundary, m, n);
                            let d2 = g
                                .project_dist_along_boundary(
                                    b2,
                                    s.apply(robot, m, n),
                                    s.apply(res, m, n),
                                )
                                .unwrap();
                            assert_eq!(d, d2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quadrant_examples() {
        let g = GridSpec::new(5, 5).unwrap();
        let q = g.quadrant_partition(Line::row(1), Line::col(1)).unwrap();
        assert_eq!(
            q.se,
            Rect {
                x: (1, 4),
                y: (1, 4)
            }
        );
        assert_eq!(
            q.nw,
            Rect {
                x: (0, 1),
                y: (0, 1)
            }
        );
        let q = g.quadrant_partition(Line::row(4), Line::col(4)).unwrap();
        assert_eq!(
            q.se,
            Rect {
                x: (4, 4),
                y: (4, 4)
            }
        );
        assert_eq!(
            g.quadrant_partition(Line::row(1), Line::row(2)),
            Err(Error::ParallelLines(Axis::Row))
        );
    }

    #[test]
    fn quadrant_labels_follow_the_door() {
        let g = build_grid(5, 5, v(4, 4)).unwrap();
        let q = g.quadrant_partition(Line::row(3), Line::col(3)).unwrap();
        // Door at (4,4) is the north-west corner, so north-west is the small
        // block next to it.
        assert_eq!(
            q.nw,
            Rect {
                x: (3, 4),
                y: (3, 4)
            }
        );
        assert_eq!(
            q.se,
            Rect {
                x: (0, 3),
                y: (0, 3)
            }
        );
    }

    #[test]
    fn quadrants_cover_with_overlap_only_on_lines() {
        for (m, n) in [(3, 3), (4, 5), (5, 4), (6, 6)] {
            for door in GridSpec::new(m, n).unwrap().corners() {
                let g = build_grid(m, n, door).unwrap();
                for a in 0..m {
                    for b in 0..n {
                        let (row, col) = (Line::row(a), Line::col(b));
                        let q = g.quadrant_partition(row, col).unwrap();
                        for u in g.vertices() {
                            let hits = q.quadrants().iter().filter(|r| r.contains(u)).count();
                            assert!(hits >= 1, "{u} uncovered");
                            if hits > 1 {
                                assert!(
                                    row.contains(u) || col.contains(u),
                                    "{u} overlaps off the lines"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn symmetries_are_bijections_with_inverses() {
        for (m, n) in [(3, 3), (4, 5)] {
            let g = GridSpec::new(m, n).unwrap();
            for s in Symmetry::ALL {
                let (m2, n2) = s.target_dims(m, n);
                let img = build_grid(m2, n2, v(0, 0)).unwrap();
                let mut seen = std::collections::HashSet::new();
                for u in g.vertices() {
                    let w = s.apply(u, m, n);
                    assert!(img.contains(w));
                    assert!(seen.insert(w));
                    assert_eq!(s.inverse().apply(w, m2, n2), u);
                    for x in g.adjacent(u) {
                        assert!(w.is_adjacent(s.apply(x, m, n)));
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_parses_from_flag_syntax() {
        assert_eq!("3,4".parse::<Vertex>(), Ok(v(3, 4)));
        assert_eq!("(1, 2)".parse::<Vertex>(), Ok(v(1, 2)));
        assert!("3".parse::<Vertex>().is_err());
    }
}
