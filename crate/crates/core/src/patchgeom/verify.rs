use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::catalog::{Catalog, RefinedPatch, VertexKind};
use super::extension::{configuration_cells, extension_grams, extension_operator, interfaces, vanishing_boundary};
use super::grid::{Cell, GridEdge, Orientation};
use super::traversal::{
    interior_edge_traversal, is_valid_step, local_dirichlet_edges, patch_dirichlet_edges, LocalDirichletInfo,
    Situation, StepOutcome, Traversal,
};
use crate::assembly::ProductSpace;
use crate::error::Result;
use crate::satcoeff::max_generalized_eigenvalue;

pub const CONTINUITY_TOLERANCE: f64 = 1e-11;
pub const DIRICHLET_TOLERANCE: f64 = 1e-12;
/// Allowed relative growth of the extension norm across the tested degrees.
pub const TREND_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub orientation: Orientation,
    pub info: LocalDirichletInfo,
    /// Whether the step is one the extension argument must handle.
    pub valid: bool,
    /// Edges the extension would have to vanish on but does not.
    pub violations: Vec<GridEdge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraversalReport {
    pub patch_id: u8,
    pub vertex_kind: VertexKind,
    pub interior_edges: usize,
    pub orientations: usize,
    pub records: Vec<StepRecord>,
}

impl TraversalReport {
    /// Valid steps not matching any of the five situations.
    pub fn unclassified(&self) -> Vec<&StepRecord> {
        self.records.iter().filter(|r| r.valid && !matches!(r.info.outcome, StepOutcome::Classified(_))).collect()
    }

    /// Classified steps whose extension is not admissible in the patch.
    pub fn inadmissible(&self) -> Vec<&StepRecord> {
        self.records.iter().filter(|r| !r.violations.is_empty()).collect()
    }

    /// Steps with an empty local Dirichlet set, which must be exactly the last
    /// step of interior-vertex patches.
    pub fn empty_set_as_expected(&self) -> bool {
        self.records.iter().all(|r| {
            let last = r.info.step == self.interior_edges;
            let expect_empty = last && self.vertex_kind == VertexKind::Interior;
            (r.info.outcome == StepOutcome::Empty) == expect_empty
        })
    }

    pub fn classified_count(&self) -> usize {
        self.records.iter().filter(|r| r.valid && matches!(r.info.outcome, StepOutcome::Classified(_))).count()
    }

    pub fn valid_count(&self) -> usize {
        self.records.iter().filter(|r| r.valid).count()
    }

    pub fn passes(&self) -> bool {
        self.unclassified().is_empty() && self.inadmissible().is_empty() && self.empty_set_as_expected()
    }
}

/// Edges on which the extension at step `i` must vanish but does not.
pub fn extension_violations(trav: &Traversal, i: usize, situation: Situation) -> Vec<GridEdge> {
    let owner = trav.steps[i - 1].owner;
    let shift = |c: Cell| c.translated(owner.i, owner.j);
    let patch_cells = trav.patch.cells();
    let support: BTreeSet<Cell> =
        configuration_cells(situation).into_iter().map(shift).filter(|c| patch_cells.contains(c)).collect();
    let vanishing: BTreeSet<GridEdge> = vanishing_boundary(situation)
        .into_iter()
        .map(|e| GridEdge { x: e.x + owner.i, y: e.y + owner.j, ..e })
        .collect();
    let dirichlet = patch_dirichlet_edges(trav, i);
    let mut out = BTreeSet::new();
    for c in &support {
        for e in c.edges() {
            let other = c.across(e);
            let cut = patch_cells.contains(&other) && !support.contains(&other);
            if (dirichlet.contains(&e) || cut) && !vanishing.contains(&e) {
                out.insert(e);
            }
        }
    }
    out.into_iter().collect()
}

/// Classifies every traversal step of `patch` in all eight orientations.
pub fn verify_traversal(catalog: &Catalog, patch: &RefinedPatch) -> Result<TraversalReport> {
    let mut records = Vec::new();
    let mut interior_edges = 0;
    for g in Orientation::all() {
        let trav = interior_edge_traversal(catalog, &patch.transformed(g))?;
        interior_edges = trav.len();
        for i in 1..=trav.len() {
            let info = local_dirichlet_edges(&trav, i)?;
            let valid = is_valid_step(&trav, i);
            let violations = match info.outcome {
                StepOutcome::Classified(s) if valid => extension_violations(&trav, i, s),
                _ => Vec::new(),
            };
            records.push(StepRecord { orientation: g, info, valid, violations });
        }
    }
    Ok(TraversalReport {
        patch_id: patch.id,
        vertex_kind: patch.vertex_kind,
        interior_edges,
        orientations: Orientation::all().len(),
        records,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionCheck {
    pub situation: Situation,
    pub degrees: Vec<usize>,
    /// `sup |Ev| / |v|` at each degree.
    pub operator_norms: Vec<f64>,
    /// Largest `|Ev| / |v|` among the random samples at each degree.
    pub sampled_max_ratio: Vec<f64>,
    pub restriction_error: f64,
    pub continuity_error: f64,
    pub dirichlet_error: f64,
}

impl ExtensionCheck {
    pub fn bound(&self) -> f64 {
        self.operator_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn samples_within_norm(&self) -> bool {
        self.sampled_max_ratio.iter().zip(&self.operator_norms).all(|(s, n)| *s <= n * (1.0 + 1e-10))
    }

    /// The norm at no degree exceeds the norm at the lowest degree by more
    /// than [`TREND_TOLERANCE`].
    pub fn trend_ok(&self) -> bool {
        match self.operator_norms.first() {
            Some(first) => self.operator_norms.iter().all(|n| n.is_finite() && *n <= first * (1.0 + TREND_TOLERANCE)),
            None => false,
        }
    }

    pub fn passes(&self) -> bool {
        self.restriction_error <= DIRICHLET_TOLERANCE
            && self.continuity_error <= CONTINUITY_TOLERANCE
            && self.dirichlet_error <= DIRICHLET_TOLERANCE
            && self.samples_within_norm()
            && self.trend_ok()
    }
}

/// Measures the extension of `situation` over `degrees` with `samples` random
/// polynomials per degree.
pub fn check_extension(
    situation: Situation,
    degrees: RangeInclusive<usize>,
    samples: usize,
    seed: u64,
) -> Result<ExtensionCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = ExtensionCheck {
        situation,
        degrees: Vec::new(),
        operator_norms: Vec::new(),
        sampled_max_ratio: Vec::new(),
        restriction_error: 0.0,
        continuity_error: 0.0,
        dirichlet_error: 0.0,
    };
    let owner = Cell::new(0, 0);
    let cells = configuration_cells(situation);
    for degree in degrees {
        let (space, b, a) = extension_grams(situation, degree)?;
        let norm = max_generalized_eigenvalue(&b, &a)?.value.sqrt();
        let mut best: f64 = 0.0;
        for k in 0..samples {
            let c = nalgebra::DVector::from_fn(space.dim(), |_, _| rng.random_range(-1.0..1.0));
            let ratio = (c.dot(&(&b * &c)) / c.dot(&(&a * &c))).sqrt();
            best = best.max(ratio);
            if k >= 3 {
                continue;
            }
            let ext = extension_operator(situation, &space, c.as_slice())?;
            for s in 1..6 {
                for t in 1..6 {
                    let (x, y) = (s as f64 / 6.0, t as f64 / 6.0);
                    let diff = ext.value(owner, x, y).expect("owner square") - ext.original_value(x, y);
                    check.restriction_error = check.restriction_error.max(diff.abs());
                }
            }
            for (edge, p, q) in interfaces(situation) {
                for (x, y) in edge.sample_points(7) {
                    let jump =
                        ext.value(p, x, y).expect("interface cell") - ext.value(q, x, y).expect("interface cell");
                    check.continuity_error = check.continuity_error.max(jump.abs());
                }
            }
            for edge in vanishing_boundary(situation) {
                let cell =
                    edge.cells().into_iter().find(|c| cells.contains(c)).expect("boundary edge of the configuration");
                for (x, y) in edge.sample_points(7) {
                    let v = ext.value(cell, x, y).expect("configuration cell");
                    check.dirichlet_error = check.dirichlet_error.max(v.abs());
                }
            }
        }
        check.degrees.push(degree);
        check.operator_norms.push(norm);
        check.sampled_max_ratio.push(best);
    }
    Ok(check)
}

/// Everything the patch suite checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSuiteReport {
    pub traversals: Vec<TraversalReport>,
    pub extensions: Vec<ExtensionCheck>,
}

impl PatchSuiteReport {
    pub fn classification_passes(&self) -> bool {
        self.traversals.iter().all(|r| r.unclassified().is_empty())
    }

    pub fn empty_sets_pass(&self) -> bool {
        self.traversals.iter().all(TraversalReport::empty_set_as_expected)
    }

    pub fn admissibility_passes(&self) -> bool {
        self.traversals.iter().all(|r| r.inadmissible().is_empty())
    }

    pub fn extensions_pass(&self) -> bool {
        self.extensions.len() == Situation::ALL.len() && self.extensions.iter().all(ExtensionCheck::passes)
    }

    pub fn passes(&self) -> bool {
        self.classification_passes() && self.empty_sets_pass() && self.admissibility_passes() && self.extensions_pass()
    }
}

/// Default degree range and sample count for the extension measurements.
pub const EXTENSION_DEGREES: RangeInclusive<usize> = 2..=12;
pub const EXTENSION_SAMPLES: usize = 500;

pub fn verify_patches(catalog: &Catalog) -> Result<PatchSuiteReport> {
    let traversals = catalog.patches().par_iter().map(|p| verify_traversal(catalog, p)).collect::<Result<Vec<_>>>()?;
    let extensions = Situation::ALL
        .par_iter()
        .enumerate()
        .map(|(k, s)| check_extension(*s, EXTENSION_DEGREES, EXTENSION_SAMPLES, 0x5eed + k as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(PatchSuiteReport { traversals, extensions })
}
