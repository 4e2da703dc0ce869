use std::collections::BTreeSet;
use std::fmt;

use super::catalog::{Catalog, RefinedPatch, VertexKind};
use super::grid::{Cell, Direction, GridEdge, Orientation};
use crate::assembly::{Edge, EdgeSet};
use crate::error::{Error, Result};

/// The five admissible local Dirichlet configurations of an owner square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Situation {
    /// Right, top and left sides.
    A,
    /// Top, left and bottom sides.
    B,
    /// Top and left sides.
    C,
    /// Top side only, left side Neumann.
    D,
    /// Left side only, top side Neumann.
    E,
}

impl Situation {
    pub const ALL: [Situation; 5] = [Situation::A, Situation::B, Situation::C, Situation::D, Situation::E];

    pub fn local_dirichlet(self) -> EdgeSet {
        use Edge::*;
        EdgeSet::from_edges(match self {
            Situation::A => &[E1, E2, E3],
            Situation::B => &[E2, E3, E4],
            Situation::C => &[E2, E3],
            Situation::D => &[E2],
            Situation::E => &[E3],
        })
    }

    pub fn label(self) -> char {
        match self {
            Situation::A => 'a',
            Situation::B => 'b',
            Situation::C => 'c',
            Situation::D => 'd',
            Situation::E => 'e',
        }
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraversalStep {
    pub number: u8,
    pub edge: GridEdge,
    /// The square above (horizontal edge) or to the left (vertical edge).
    pub owner: Cell,
}

/// Interior edges of a catalogued patch in increasing traversal number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Traversal {
    /// The catalogued type, in the reference frame.
    pub patch: RefinedPatch,
    /// Maps the reference frame onto the frame of the patch that was passed in.
    pub orientation: Orientation,
    pub steps: Vec<TraversalStep>,
}

impl Traversal {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Enumerates interior edges of a (possibly rotated or mirrored) catalogued
/// patch. The patch is first brought back to its catalogued frame, so the
/// traversal is always taken in the reference numbering.
pub fn interior_edge_traversal(catalog: &Catalog, patch: &RefinedPatch) -> Result<Traversal> {
    let (canonical, orientation) = catalog
        .identify(patch)
        .ok_or_else(|| Error::InvalidInput(format!("patch {} matches no catalogued type", patch.id)))?;
    let mut steps = Vec::new();
    for edge in canonical.interior_edges() {
        let number =
            catalog.number(edge).ok_or_else(|| Error::InvalidInput(format!("interior edge {edge} has no number")))?;
        let owner = match edge.dir {
            Direction::Horizontal => Cell::new(edge.x, edge.y),
            Direction::Vertical => Cell::new(edge.x - 1, edge.y),
        };
        steps.push(TraversalStep { number, edge, owner });
    }
    steps.sort_by_key(|s| s.number);
    Ok(Traversal { patch: canonical.clone(), orientation, steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepOutcome {
    Classified(Situation),
    /// No local Dirichlet edge at all.
    Empty,
    /// Nonempty but none of the five situations.
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDirichletInfo {
    /// One-based step index.
    pub step: usize,
    pub number: u8,
    pub owner: Cell,
    pub local: EdgeSet,
    pub outcome: StepOutcome,
}

/// All patch Dirichlet edges at step `i`: the exterior Dirichlet edges and
/// every interior edge traversed after step `i`.
pub fn patch_dirichlet_edges(trav: &Traversal, i: usize) -> BTreeSet<GridEdge> {
    let mut set = trav.patch.ext_dirichlet().clone();
    set.extend(trav.steps.iter().skip(i).map(|s| s.edge));
    set
}

pub fn classify(local: EdgeSet, owner: Cell, neumann: &BTreeSet<GridEdge>) -> StepOutcome {
    if local.is_empty() {
        return StepOutcome::Empty;
    }
    let n = |e: Edge| neumann.contains(&owner.edge(e));
    for s in Situation::ALL {
        if local != s.local_dirichlet() {
            continue;
        }
        let ok = match s {
            Situation::D => n(Edge::E3),
            Situation::E => n(Edge::E2),
            _ => true,
        };
        if ok {
            return StepOutcome::Classified(s);
        }
    }
    StepOutcome::Unclassified
}

/// Local Dirichlet sides of the owner square at one-based step `i`.
pub fn local_dirichlet_edges(trav: &Traversal, i: usize) -> Result<LocalDirichletInfo> {
    if i == 0 || i > trav.len() {
        return Err(Error::InvalidArgument(format!("step {i} outside 1..={}", trav.len())));
    }
    let step = trav.steps[i - 1];
    let dirichlet = patch_dirichlet_edges(trav, i);
    let local = EdgeSet::from_edges(
        &Edge::ALL.into_iter().filter(|e| dirichlet.contains(&step.owner.edge(*e))).collect::<Vec<_>>(),
    );
    let outcome = classify(local, step.owner, &trav.patch.ext_neumann());
    Ok(LocalDirichletInfo { step: i, number: step.number, owner: step.owner, local, outcome })
}

/// Whether step `i` is one the extension argument must handle.
pub fn is_valid_step(trav: &Traversal, i: usize) -> bool {
    i >= 1 && (i < trav.len() || (i == trav.len() && trav.patch.vertex_kind == VertexKind::Boundary))
}
