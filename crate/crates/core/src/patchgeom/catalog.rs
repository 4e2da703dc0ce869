use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::grid::{Cell, GridEdge, Orientation, CENTER, GRID_SIZE};
use crate::error::{Error, Result};

const CATALOG_DATA: &str = include_str!("../../data/patches.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Interior,
    Boundary,
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexKind::Interior => "interior",
            VertexKind::Boundary => "boundary",
        })
    }
}

/// A union of grid cells around the vertex, with its boundary split into
/// Dirichlet and Neumann edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedPatch {
    pub id: u8,
    pub vertex_kind: VertexKind,
    cells: BTreeSet<Cell>,
    ext_dirichlet: BTreeSet<GridEdge>,
}

impl RefinedPatch {
    pub fn new(
        id: u8,
        vertex_kind: VertexKind,
        cells: BTreeSet<Cell>,
        ext_dirichlet: BTreeSet<GridEdge>,
    ) -> Result<RefinedPatch> {
        let patch = RefinedPatch { id, vertex_kind, cells, ext_dirichlet };
        patch.validate()?;
        Ok(patch)
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    fn edge_counts(&self) -> BTreeMap<GridEdge, usize> {
        let mut counts = BTreeMap::new();
        for c in &self.cells {
            for e in c.edges() {
                *counts.entry(e).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Edges shared by two cells of the patch.
    pub fn interior_edges(&self) -> BTreeSet<GridEdge> {
        self.edge_counts().into_iter().filter(|(_, n)| *n == 2).map(|(e, _)| e).collect()
    }

    pub fn boundary_edges(&self) -> BTreeSet<GridEdge> {
        self.edge_counts().into_iter().filter(|(_, n)| *n == 1).map(|(e, _)| e).collect()
    }

    pub fn ext_dirichlet(&self) -> &BTreeSet<GridEdge> {
        &self.ext_dirichlet
    }

    pub fn ext_neumann(&self) -> BTreeSet<GridEdge> {
        self.boundary_edges().difference(&self.ext_dirichlet).copied().collect()
    }

    /// The image of the patch under a symmetry of the grid.
    pub fn transformed(&self, g: Orientation) -> RefinedPatch {
        RefinedPatch {
            id: self.id,
            vertex_kind: self.vertex_kind,
            cells: self.cells.iter().map(|c| c.transformed(g)).collect(),
            ext_dirichlet: self.ext_dirichlet.iter().map(|e| e.transformed(g)).collect(),
        }
    }

    /// Same cells and same boundary split.
    pub fn same_shape(&self, other: &RefinedPatch) -> bool {
        self.cells == other.cells && self.ext_dirichlet == other.ext_dirichlet
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(format!("patch {}: {msg}", self.id)));
        if self.cells.is_empty() {
            return fail("no cells".into());
        }
        if let Some(c) = self.cells.iter().find(|c| !(0..GRID_SIZE).contains(&c.i) || !(0..GRID_SIZE).contains(&c.j)) {
            return fail(format!("cell {c} lies outside the grid"));
        }
        if !self.cells.iter().any(|c| c.corners().contains(&CENTER)) {
            return fail("the vertex is not a corner of any cell".into());
        }
        let boundary = self.boundary_edges();
        if let Some(e) = self.ext_dirichlet.iter().find(|e| !boundary.contains(e)) {
            return fail(format!("Dirichlet edge {e} is not on the patch boundary"));
        }
        let around = [Cell::new(1, 1), Cell::new(2, 1), Cell::new(1, 2), Cell::new(2, 2)];
        match self.vertex_kind {
            VertexKind::Interior => {
                if !self.ext_dirichlet.is_empty() {
                    return fail("an interior vertex has no Dirichlet edges".into());
                }
                if !around.iter().all(|c| self.cells.contains(c)) {
                    return fail("an interior vertex must be surrounded by cells".into());
                }
            }
            VertexKind::Boundary => {
                if !self.ext_dirichlet.iter().any(|e| e.touches(CENTER)) {
                    return fail("the Dirichlet boundary must pass through the vertex".into());
                }
                if around.iter().all(|c| self.cells.contains(c)) {
                    return fail("a boundary vertex cannot be surrounded by cells".into());
                }
            }
        }
        Ok(())
    }
}

/// The traversal numbering of the grid together with the catalogued patch types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    numbering: BTreeMap<GridEdge, u8>,
    patches: Vec<RefinedPatch>,
}

impl Catalog {
    pub fn new(numbering: BTreeMap<GridEdge, u8>, patches: Vec<RefinedPatch>) -> Result<Catalog> {
        let interior: BTreeSet<GridEdge> = (0..=GRID_SIZE)
            .flat_map(|x| (0..=GRID_SIZE).flat_map(move |y| [GridEdge::h(x, y), GridEdge::v(x, y)]))
            .filter(|e| e.is_grid_interior())
            .collect();
        let keys: BTreeSet<GridEdge> = numbering.keys().copied().collect();
        if keys != interior {
            return Err(Error::InvalidInput("the numbering must cover exactly the interior grid edges".into()));
        }
        let numbers: BTreeSet<u8> = numbering.values().copied().collect();
        let expected: BTreeSet<u8> = (1..=interior.len() as u8).collect();
        if numbers != expected {
            return Err(Error::InvalidInput(format!("edge numbers must be 1..{} without repetition", interior.len())));
        }
        let ids: BTreeSet<u8> = patches.iter().map(|p| p.id).collect();
        if ids.len() != patches.len() {
            return Err(Error::InvalidInput("duplicate patch id".into()));
        }
        for p in &patches {
            p.validate()?;
        }
        Ok(Catalog { numbering, patches })
    }

    pub fn numbering(&self) -> &BTreeMap<GridEdge, u8> {
        &self.numbering
    }

    pub fn number(&self, e: GridEdge) -> Option<u8> {
        self.numbering.get(&e).copied()
    }

    pub fn patches(&self) -> &[RefinedPatch] {
        &self.patches
    }

    pub fn patch(&self, id: u8) -> Option<&RefinedPatch> {
        self.patches.iter().find(|p| p.id == id)
    }

    /// The catalogued type of `patch` and an orientation mapping that type onto it.
    pub fn identify(&self, patch: &RefinedPatch) -> Option<(&RefinedPatch, Orientation)> {
        self.patches.iter().find_map(|cand| {
            Orientation::all().into_iter().find(|g| cand.transformed(*g).same_shape(patch)).map(|g| (cand, g))
        })
    }

    /// Exchanges the traversal numbers of two edges.
    pub fn with_swapped_numbers(&self, a: GridEdge, b: GridEdge) -> Result<Catalog> {
        let (na, nb) = match (self.number(a), self.number(b)) {
            (Some(na), Some(nb)) => (na, nb),
            _ => return Err(Error::InvalidArgument(format!("{a} or {b} is not a numbered edge"))),
        };
        let mut numbering = self.numbering.clone();
        numbering.insert(a, nb);
        numbering.insert(b, na);
        Catalog::new(numbering, self.patches.clone())
    }
}

/// The built-in catalog of 13 refined patch types.
pub fn patch_catalog() -> Catalog {
    parse_catalog(CATALOG_DATA).expect("the built-in catalog is valid")
}

/// The text of the built-in catalog file.
pub fn catalog_source() -> &'static str {
    CATALOG_DATA
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_point(tok: &str, line: usize) -> Result<(i32, i32)> {
    let (x, y) = tok.split_once(',').ok_or_else(|| parse_err(line, format!("expected x,y, got `{tok}`")))?;
    let num = |s: &str| s.trim().parse::<i32>().map_err(|_| parse_err(line, format!("bad coordinate `{s}`")));
    Ok((num(x)?, num(y)?))
}

fn polyline_edges(points: &[(i32, i32)], line: usize) -> Result<Vec<GridEdge>> {
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.0 != b.0 && a.1 != b.1 {
            return Err(parse_err(line, format!("segment {a:?}-{b:?} is not along a grid line")));
        }
        let steps = (b.0 - a.0).abs().max((b.1 - a.1).abs());
        let (dx, dy) = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
        for k in 0..steps {
            let p = (a.0 + k * dx, a.1 + k * dy);
            let q = (p.0 + dx, p.1 + dy);
            out.push(GridEdge::between(p, q).expect("unit step"));
        }
    }
    Ok(out)
}

struct PatchDraft {
    id: u8,
    kind: VertexKind,
    start_line: usize,
    rows: Vec<String>,
    dirichlet: BTreeSet<GridEdge>,
}

impl PatchDraft {
    fn finish(self) -> Result<RefinedPatch> {
        if self.rows.len() != GRID_SIZE as usize {
            return Err(parse_err(
                self.start_line,
                format!("patch {} has {} grid rows, expected {GRID_SIZE}", self.id, self.rows.len()),
            ));
        }
        let mut cells = BTreeSet::new();
        for (r, row) in self.rows.iter().enumerate() {
            let j = GRID_SIZE - 1 - r as i32;
            for (i, ch) in row.chars().enumerate() {
                if ch == '#' {
                    cells.insert(Cell::new(i as i32, j));
                }
            }
        }
        RefinedPatch::new(self.id, self.kind, cells, self.dirichlet)
            .map_err(|e| parse_err(self.start_line, e.to_string()))
    }
}

/// Parses the plain-text catalog format documented in the built-in data file.
pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let mut numbering = BTreeMap::new();
    let mut patches = Vec::new();
    let mut draft: Option<PatchDraft> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let is_grid_row = raw.trim().chars().all(|c| c == '#' || c == '.') && !raw.trim().is_empty();
        if let Some(d) = draft.as_mut() {
            if is_grid_row {
                let row = raw.trim();
                if row.len() != GRID_SIZE as usize {
                    return Err(parse_err(line, format!("grid row `{row}` must have {GRID_SIZE} cells")));
                }
                d.rows.push(row.to_string());
                continue;
            }
        }
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "number" => {
                if draft.is_some() {
                    return Err(parse_err(line, "edge numbers must precede the patches"));
                }
                if toks.len() != 5 {
                    return Err(parse_err(line, "expected `number k h|v x y`"));
                }
                let k: u8 = toks[1].parse().map_err(|_| parse_err(line, "bad edge number"))?;
                let x: i32 = toks[3].parse().map_err(|_| parse_err(line, "bad x"))?;
                let y: i32 = toks[4].parse().map_err(|_| parse_err(line, "bad y"))?;
                let e = match toks[2] {
                    "h" => GridEdge::h(x, y),
                    "v" => GridEdge::v(x, y),
                    other => return Err(parse_err(line, format!("edge direction `{other}`"))),
                };
                if numbering.insert(e, k).is_some() {
                    return Err(parse_err(line, format!("edge {e} numbered twice")));
                }
            }
            "patch" => {
                if draft.is_some() {
                    return Err(parse_err(line, "previous patch is missing `end`"));
                }
                if toks.len() != 3 {
                    return Err(parse_err(line, "expected `patch <id> <interior|boundary>`"));
                }
                let id: u8 = toks[1].parse().map_err(|_| parse_err(line, "bad patch id"))?;
                let kind = match toks[2] {
                    "interior" => VertexKind::Interior,
                    "boundary" => VertexKind::Boundary,
                    other => return Err(parse_err(line, format!("vertex kind `{other}`"))),
                };
                draft = Some(PatchDraft { id, kind, start_line: line, rows: Vec::new(), dirichlet: BTreeSet::new() });
            }
            "dirichlet" => {
                let d = draft.as_mut().ok_or_else(|| parse_err(line, "`dirichlet` outside a patch"))?;
                let pts = toks[1..].iter().map(|t| parse_point(t, line)).collect::<Result<Vec<_>>>()?;
                if pts.len() < 2 {
                    return Err(parse_err(line, "a polyline needs at least two points"));
                }
                d.dirichlet.extend(polyline_edges(&pts, line)?);
            }
            "end" => {
                let d = draft.take().ok_or_else(|| parse_err(line, "`end` outside a patch"))?;
                patches.push(d.finish()?);
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    if let Some(d) = draft {
        return Err(parse_err(d.start_line, format!("patch {} is missing `end`", d.id)));
    }
    Catalog::new(numbering, patches).map_err(|e| parse_err(0, e.to_string()))
}
