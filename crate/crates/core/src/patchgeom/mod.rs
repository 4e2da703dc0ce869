//! Refined patches on the 4×4 reference grid, their interior-edge traversal,
//! and the reflection extensions used at each traversal step.

mod catalog;
mod extension;
mod grid;
mod traversal;
mod verify;

pub use catalog::{catalog_source, parse_catalog, patch_catalog, Catalog, RefinedPatch, VertexKind};
pub use extension::{
    configuration_cells, extension_grams, extension_norm, extension_operator, interfaces, vanishing_boundary,
    Extension, TRACE_TOLERANCE,
};
pub use grid::{Cell, Direction, GridEdge, Orientation, CENTER, GRID_SIZE};
pub use traversal::{
    classify, interior_edge_traversal, is_valid_step, local_dirichlet_edges, patch_dirichlet_edges, LocalDirichletInfo,
    Situation, StepOutcome, Traversal, TraversalStep,
};
pub use verify::{
    check_extension, extension_violations, verify_patches, verify_traversal, ExtensionCheck, PatchSuiteReport,
    StepRecord, TraversalReport, CONTINUITY_TOLERANCE, DIRICHLET_TOLERANCE, EXTENSION_DEGREES, EXTENSION_SAMPLES,
    TREND_TOLERANCE,
};
