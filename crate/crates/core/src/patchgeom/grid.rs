use std::fmt;

use crate::assembly::Edge;

/// Number of cells along each side of the reference grid.
pub const GRID_SIZE: i32 = 4;
/// The grid point the patch vertex is placed on.
pub const CENTER: (i32, i32) = (2, 2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// A unit edge of the integer grid.
///
/// Horizontal `(x, y)` is `[x, x+1] × {y}`; vertical `(x, y)` is `{x} × [y, y+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridEdge {
    pub dir: Direction,
    pub x: i32,
    pub y: i32,
}

impl GridEdge {
    pub fn h(x: i32, y: i32) -> GridEdge {
        GridEdge { dir: Direction::Horizontal, x, y }
    }

    pub fn v(x: i32, y: i32) -> GridEdge {
        GridEdge { dir: Direction::Vertical, x, y }
    }

    pub fn endpoints(self) -> ((i32, i32), (i32, i32)) {
        match self.dir {
            Direction::Horizontal => ((self.x, self.y), (self.x + 1, self.y)),
            Direction::Vertical => ((self.x, self.y), (self.x, self.y + 1)),
        }
    }

    /// The unit edge between two adjacent grid points.
    pub fn between(a: (i32, i32), b: (i32, i32)) -> Option<GridEdge> {
        match (b.0 - a.0, b.1 - a.1) {
            (1, 0) | (-1, 0) => Some(GridEdge::h(a.0.min(b.0), a.1)),
            (0, 1) | (0, -1) => Some(GridEdge::v(a.0, a.1.min(b.1))),
            _ => None,
        }
    }

    /// The two cells sharing this edge.
    pub fn cells(self) -> [Cell; 2] {
        match self.dir {
            Direction::Horizontal => [Cell::new(self.x, self.y - 1), Cell::new(self.x, self.y)],
            Direction::Vertical => [Cell::new(self.x - 1, self.y), Cell::new(self.x, self.y)],
        }
    }

    pub fn touches(self, p: (i32, i32)) -> bool {
        let (a, b) = self.endpoints();
        a == p || b == p
    }

    /// Whether the edge lies inside the reference grid rather than on its border.
    pub fn is_grid_interior(self) -> bool {
        let n = GRID_SIZE;
        match self.dir {
            Direction::Horizontal => (0..n).contains(&self.x) && (1..n).contains(&self.y),
            Direction::Vertical => (1..n).contains(&self.x) && (0..n).contains(&self.y),
        }
    }

    pub fn transformed(self, g: Orientation) -> GridEdge {
        let (a, b) = self.endpoints();
        GridEdge::between(g.apply(a), g.apply(b)).expect("isometries keep unit edges")
    }

    /// `count` points evenly spaced strictly inside the edge.
    pub fn sample_points(self, count: usize) -> Vec<(f64, f64)> {
        let ((x0, y0), (x1, y1)) = self.endpoints();
        (1..=count)
            .map(|k| {
                let t = k as f64 / (count + 1) as f64;
                (x0 as f64 + t * (x1 - x0) as f64, y0 as f64 + t * (y1 - y0) as f64)
            })
            .collect()
    }
}

impl fmt::Display for GridEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.dir {
            Direction::Horizontal => 'h',
            Direction::Vertical => 'v',
        };
        write!(f, "{d}({},{})", self.x, self.y)
    }
}

/// The unit square `[i, i+1] × [j, j+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub i: i32,
    pub j: i32,
}

impl Cell {
    pub fn new(i: i32, j: i32) -> Cell {
        Cell { i, j }
    }

    /// The side of this cell in local counterclockwise numbering.
    pub fn edge(self, local: Edge) -> GridEdge {
        match local {
            Edge::E1 => GridEdge::v(self.i + 1, self.j),
            Edge::E2 => GridEdge::h(self.i, self.j + 1),
            Edge::E3 => GridEdge::v(self.i, self.j),
            Edge::E4 => GridEdge::h(self.i, self.j),
        }
    }

    pub fn edges(self) -> [GridEdge; 4] {
        Edge::ALL.map(|e| self.edge(e))
    }

    /// Local name of `edge` on this cell, if it is one of its sides.
    pub fn local_name(self, edge: GridEdge) -> Option<Edge> {
        Edge::ALL.into_iter().find(|e| self.edge(*e) == edge)
    }

    pub fn corners(self) -> [(i32, i32); 4] {
        [(self.i, self.j), (self.i + 1, self.j), (self.i + 1, self.j + 1), (self.i, self.j + 1)]
    }

    /// The neighbour sharing `edge`, which must be a side of this cell.
    pub fn across(self, edge: GridEdge) -> Cell {
        let [a, b] = edge.cells();
        if a == self {
            b
        } else {
            a
        }
    }

    pub fn translated(self, di: i32, dj: i32) -> Cell {
        Cell::new(self.i + di, self.j + dj)
    }

    pub fn transformed(self, g: Orientation) -> Cell {
        let pts = self.corners().map(|p| g.apply(p));
        let i = pts.iter().map(|p| p.0).min().expect("four corners");
        let j = pts.iter().map(|p| p.1).min().expect("four corners");
        Cell::new(i, j)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// A symmetry of the grid fixing the patch vertex: a counterclockwise rotation
/// by `quarter_turns` right angles, followed by a mirror in the vertical line
/// through the vertex when `mirrored`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    pub quarter_turns: u8,
    pub mirrored: bool,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { quarter_turns: 0, mirrored: false };

    pub fn all() -> [Orientation; 8] {
        let mut out = [Orientation::IDENTITY; 8];
        for (k, g) in out.iter_mut().enumerate() {
            *g = Orientation { quarter_turns: (k % 4) as u8, mirrored: k >= 4 };
        }
        out
    }

    pub fn apply(self, p: (i32, i32)) -> (i32, i32) {
        let (mut x, mut y) = (p.0 - CENTER.0, p.1 - CENTER.1);
        for _ in 0..self.quarter_turns {
            (x, y) = (-y, x);
        }
        if self.mirrored {
            x = -x;
        }
        (x + CENTER.0, y + CENTER.1)
    }

    pub fn inverse(self) -> Orientation {
        let probe = [(3, 2), (2, 3)];
        Orientation::all()
            .into_iter()
            .find(|h| probe.iter().all(|p| h.apply(self.apply(*p)) == *p))
            .expect("the symmetry group is closed under inverses")
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rot{}", 90 * self.quarter_turns as u32)?;
        if self.mirrored {
            write!(f, "+mirror")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_24_interior_edges() {
        let mut count = 0;
        for x in -1..=GRID_SIZE + 1 {
            for y in -1..=GRID_SIZE + 1 {
                count += GridEdge::h(x, y).is_grid_interior() as usize;
                count += GridEdge::v(x, y).is_grid_interior() as usize;
            }
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn orientations_form_a_group() {
        let all = Orientation::all();
        for g in all {
            assert_eq!(g.apply(CENTER), CENTER);
            let inv = g.inverse();
            for p in [(0, 0), (4, 1), (3, 2)] {
                assert_eq!(inv.apply(g.apply(p)), p);
            }
        }
        let images: std::collections::BTreeSet<_> = all.iter().map(|g| (g.apply((3, 2)), g.apply((2, 4)))).collect();
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn cell_and_edge_transforms_agree() {
        let c = Cell::new(3, 1);
        for g in Orientation::all() {
            let tc = c.transformed(g);
            let mut mapped: Vec<GridEdge> = c.edges().iter().map(|e| e.transformed(g)).collect();
            let mut direct: Vec<GridEdge> = tc.edges().to_vec();
            mapped.sort();
            direct.sort();
            assert_eq!(mapped, direct);
        }
    }

    #[test]
    fn local_sides() {
        let c = Cell::new(1, 2);
        assert_eq!(c.edge(Edge::E1), GridEdge::v(2, 2));
        assert_eq!(c.edge(Edge::E4), GridEdge::h(1, 2));
        assert_eq!(c.across(GridEdge::v(2, 2)), Cell::new(2, 2));
        assert_eq!(c.local_name(GridEdge::h(1, 3)), Some(Edge::E2));
        assert_eq!(GridEdge::between((2, 4), (2, 3)), Some(GridEdge::v(2, 3)));
    }
}
