//! Tensor-product polynomial spaces on the reference square `[-1, 1]²`, their
//! stiffness matrices and the load matrices of the three functional families.
//!
//! Members are ordered with the x index outer and the y index inner; the same
//! convention is used for Legendre pairs indexing load-matrix rows.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::basis1d::{
    boundary_trace, build_basis_1d, gram_matrices, Basis1D, BasisKind, BoundaryCondition1D, Endpoint,
};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_rule, QuadRule};

/// An edge of the reference square, numbered counterclockwise from the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    /// `x = +1`
    E1,
    /// `y = +1`
    E2,
    /// `x = -1`
    E3,
    /// `y = -1`
    E4,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::E1, Edge::E2, Edge::E3, Edge::E4];

    /// Zero-based position in counterclockwise order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Edge {
        Edge::ALL[i % 4]
    }

    /// The edge reached after `quarter_turns` counterclockwise rotations.
    pub fn rotated(self, quarter_turns: usize) -> Edge {
        Edge::from_index(self.index() + quarter_turns)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.index() + 1)
    }
}

/// A subset of the four edges of the square.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(u8);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);
    pub const ALL: EdgeSet = EdgeSet(0b1111);

    pub fn from_edges(edges: &[Edge]) -> EdgeSet {
        edges.iter().fold(EdgeSet::EMPTY, |s, e| s.with(*e))
    }

    pub fn with(self, e: Edge) -> EdgeSet {
        EdgeSet(self.0 | (1 << e.index()))
    }

    pub fn contains(self, e: Edge) -> bool {
        self.0 & (1 << e.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Edge> {
        Edge::ALL.into_iter().filter(move |e| self.contains(*e))
    }

    pub fn union(self, other: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 | other.0)
    }

    pub fn rotated(self, quarter_turns: usize) -> EdgeSet {
        EdgeSet::from_edges(&self.iter().map(|e| e.rotated(quarter_turns)).collect::<Vec<_>>())
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl FromStr for EdgeSet {
    type Err = Error;

    /// Parses lists such as `e1,e3`, `{e2, e3}` or an empty string.
    fn from_str(s: &str) -> Result<EdgeSet> {
        let trimmed = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut set = EdgeSet::EMPTY;
        for tok in trimmed.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let e = match tok.to_ascii_lowercase().as_str() {
                "e1" | "1" => Edge::E1,
                "e2" | "2" => Edge::E2,
                "e3" | "3" => Edge::E3,
                "e4" | "4" => Edge::E4,
                _ => return Err(Error::InvalidInput(format!("unknown edge `{tok}`"))),
            };
            if set.contains(e) {
                return Err(Error::InvalidInput(format!("edge `{tok}` listed twice")));
            }
            set = set.with(e);
        }
        Ok(set)
    }
}

/// A product of two 1D bases, possibly with the constant `χ₀ ⊗ χ₀` removed.
pub trait ProductSpace {
    fn x_basis(&self) -> &Basis1D;
    fn y_basis(&self) -> &Basis1D;

    /// Whether the first product element is excluded from the space.
    fn drops_first(&self) -> bool {
        false
    }

    fn dim(&self) -> usize {
        self.x_basis().len() * self.y_basis().len() - self.drops_first() as usize
    }

    /// The (x index, y index) pair of member `m`.
    fn member(&self, m: usize) -> (usize, usize) {
        let full = m + self.drops_first() as usize;
        let ny = self.y_basis().len();
        (full / ny, full % ny)
    }

    /// Value of member `m` at `(x, y)`.
    fn eval_member(&self, m: usize, x: f64, y: f64) -> f64 {
        let (i, j) = self.member(m);
        self.x_basis().eval(i, x) * self.y_basis().eval(j, y)
    }

    /// Gradient of member `m` at `(x, y)`.
    fn grad_member(&self, m: usize, x: f64, y: f64) -> [f64; 2] {
        let (i, j) = self.member(m);
        let (bx, by) = (self.x_basis(), self.y_basis());
        [bx.eval_deriv(i, x) * by.eval(j, y), bx.eval(i, x) * by.eval_deriv(j, y)]
    }
}

/// Tensor-product polynomials vanishing on a set of edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace {
    pub edges: EdgeSet,
    pub x_basis: Basis1D,
    pub y_basis: Basis1D,
}

impl ProductSpace for TensorSpace {
    fn x_basis(&self) -> &Basis1D {
        &self.x_basis
    }
    fn y_basis(&self) -> &Basis1D {
        &self.y_basis
    }
}

/// `X ⊗ X` without `χ₀ ⊗ χ₀`: the degree-r polynomials modulo constants.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSpaceC {
    pub x_basis: Basis1D,
    pub y_basis: Basis1D,
}

impl ProductSpace for QuotientSpaceC {
    fn x_basis(&self) -> &Basis1D {
        &self.x_basis
    }
    fn y_basis(&self) -> &Basis1D {
        &self.y_basis
    }
    fn drops_first(&self) -> bool {
        true
    }
}

pub fn tensor_space(edges: EdgeSet, degree: usize) -> Result<TensorSpace> {
    let xbc = BoundaryCondition1D::new(edges.contains(Edge::E3), edges.contains(Edge::E1));
    let ybc = BoundaryCondition1D::new(edges.contains(Edge::E4), edges.contains(Edge::E2));
    Ok(TensorSpace {
        edges,
        x_basis: build_basis_1d(BasisKind::BabuskaShen, xbc, degree)?,
        y_basis: build_basis_1d(BasisKind::BabuskaShen, ybc, degree)?,
    })
}

pub fn quotient_space(degree: usize) -> Result<QuotientSpaceC> {
    let x = build_basis_1d(BasisKind::MeanZeroX, BoundaryCondition1D::NONE, degree)?;
    Ok(QuotientSpaceC { x_basis: x.clone(), y_basis: x })
}

/// A symmetric matrix held either sparsely (stiffness) or densely (dual Grams).
#[derive(Debug, Clone, PartialEq)]
pub enum SymMatrix {
    Sparse(CscMatrix<f64>),
    Dense(DMatrix<f64>),
}

impl SymMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Sparse(m) => m.nrows(),
            SymMatrix::Dense(m) => m.nrows(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            SymMatrix::Sparse(m) => m.nnz(),
            SymMatrix::Dense(m) => m.iter().filter(|v| **v != 0.0).count(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SymMatrix::Sparse(m) => DMatrix::from(m),
            SymMatrix::Dense(m) => m.clone(),
        }
    }

    pub fn as_sparse(&self) -> Option<&CscMatrix<f64>> {
        match self {
            SymMatrix::Sparse(m) => Some(m),
            SymMatrix::Dense(_) => None,
        }
    }

    pub fn as_dense(&self) -> Option<&DMatrix<f64>> {
        match self {
            SymMatrix::Dense(m) => Some(m),
            SymMatrix::Sparse(_) => None,
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let d = self.to_dense();
        let scale = d.amax().max(f64::MIN_POSITIVE);
        (&d - d.transpose()).amax() / scale
    }
}

/// A Gauss rule exact for products of polynomials of degrees `a` and `b`.
fn product_rule(a: usize, b: usize) -> QuadRule {
    gauss_legendre_rule(a.max(b) + 2).expect("node count is positive")
}

fn symmetric_grams(basis: &Basis1D) -> (DMatrix<f64>, DMatrix<f64>) {
    let (m, s) = gram_matrices(basis, basis, &basis.default_rule()).expect("default rule is exact");
    ((&m + m.transpose()) * 0.5, (&s + s.transpose()) * 0.5)
}

fn nonzeros(m: &DMatrix<f64>, n: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0.0 || n[(i, j)] != 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// `A = S¹ ⊗ M² + M¹ ⊗ S²`, assembled sparsely.
pub fn stiffness_matrix<S: ProductSpace>(space: &S) -> SymMatrix {
    let (mx, sx) = symmetric_grams(space.x_basis());
    let (my, sy) = symmetric_grams(space.y_basis());
    let ny = space.y_basis().len();
    let shift = space.drops_first() as usize;
    let n = space.dim();
    let xs = nonzeros(&mx, &sx);
    let ys = nonzeros(&my, &sy);
    let mut coo = CooMatrix::new(n, n);
    for &(i, k) in &xs {
        for &(j, l) in &ys {
            let (row, col) = (i * ny + j, k * ny + l);
            if row < shift || col < shift {
                continue;
            }
            let v = sx[(i, k)] * my[(j, l)] + mx[(i, k)] * sy[(j, l)];
            if v != 0.0 {
                coo.push(row - shift, col - shift, v);
            }
        }
    }
    SymMatrix::Sparse(CscMatrix::from(&coo))
}

fn legendre_basis(p: usize) -> Result<Basis1D> {
    build_basis_1d(BasisKind::Legendre, BoundaryCondition1D::NONE, p)
}

fn l2_products(row: &Basis1D, col: &Basis1D) -> DMatrix<f64> {
    let rule = product_rule(row.max_degree(), col.max_degree());
    gram_matrices(row, col, &rule).expect("rule is exact").0
}

/// Rows: Legendre pairs `φ_i ⊗ φ_j`, `0 <= i, j <= p`, i outer. Columns: members of `space`.
pub fn load_matrix_a(space: &TensorSpace, p: usize) -> Result<DMatrix<f64>> {
    let phi = legendre_basis(p)?;
    let lx = l2_products(&phi, &space.x_basis);
    let ly = l2_products(&phi, &space.y_basis);
    Ok(lx.kronecker(&ly))
}

/// Rows: `φ_k` on the right edge, `0 <= k <= p`.
pub fn load_matrix_b(space: &TensorSpace, p: usize) -> Result<DMatrix<f64>> {
    if space.edges.contains(Edge::E1) {
        return Err(Error::InvalidArgument(format!(
            "edge functionals live on e1, which is constrained in {}",
            space.edges
        )));
    }
    let phi = legendre_basis(p)?;
    let trace = boundary_trace(&space.x_basis, Endpoint::Plus1);
    let ly = l2_products(&phi, &space.y_basis);
    Ok(DMatrix::from_row_slice(1, trace.len(), &trace).kronecker(&ly))
}

/// Rows: `φ_k` on the right edge, `1 <= k <= p` (mean-free edge functionals).
pub fn load_matrix_c(space: &QuotientSpaceC, p: usize) -> Result<DMatrix<f64>> {
    if p == 0 {
        return Err(Error::InvalidArgument("family C needs p >= 1".into()));
    }
    let phi = legendre_basis(p)?;
    let trace = boundary_trace(&space.x_basis, Endpoint::Plus1);
    let ly = l2_products(&phi, &space.y_basis);
    let full = DMatrix::from_row_slice(1, trace.len(), &trace).kronecker(&ly.rows(1, p).into_owned());
    Ok(full.columns(1, full.ncols() - 1).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn edge_set_parsing() {
        let s: EdgeSet = "e2,e3".parse().unwrap();
        assert!(s.contains(Edge::E2) && s.contains(Edge::E3) && s.len() == 2);
        assert_eq!("{e1, e2, e3, e4}".parse::<EdgeSet>().unwrap(), EdgeSet::ALL);
        assert_eq!("".parse::<EdgeSet>().unwrap(), EdgeSet::EMPTY);
        assert!("e5".parse::<EdgeSet>().is_err());
        assert!("e1,e1".parse::<EdgeSet>().is_err());
        assert_eq!(s.to_string(), "{e2,e3}");
        assert_eq!(EdgeSet::from_edges(&[Edge::E1]).rotated(3), EdgeSet::from_edges(&[Edge::E4]));
    }

    #[test]
    fn dimensions() {
        for r in 2..8 {
            assert_eq!(tensor_space(EdgeSet::ALL, r).unwrap().dim(), (r - 1) * (r - 1));
            assert_eq!(tensor_space(EdgeSet::from_edges(&[Edge::E1]), r).unwrap().dim(), r * (r + 1));
            assert_eq!(quotient_space(r).unwrap().dim(), (r + 1) * (r + 1) - 1);
        }
        assert!(matches!(tensor_space(EdgeSet::ALL, 1), Err(Error::EmptySpace(_))));
    }

    #[test]
    fn flags_follow_edges() {
        let s = tensor_space("e2,e3".parse().unwrap(), 4).unwrap();
        assert_eq!(s.x_basis.bc(), BoundaryCondition1D::new(true, false));
        assert_eq!(s.y_basis.bc(), BoundaryCondition1D::new(false, true));
    }

    #[test]
    fn smallest_interior_stiffness() {
        let a = stiffness_matrix(&tensor_space(EdgeSet::ALL, 2).unwrap()).to_dense();
        assert_eq!(a.shape(), (1, 1));
        assert_abs_diff_eq!(a[(0, 0)], 0.8, epsilon = 1e-14);
    }

    #[test]
    fn stiffness_is_exactly_symmetric() {
        for e in 0..16u8 {
            let edges = EdgeSet(e);
            let a = stiffness_matrix(&tensor_space(edges, 7).unwrap());
            assert_eq!(a.asymmetry(), 0.0, "{edges}");
        }
        assert_eq!(stiffness_matrix(&quotient_space(6).unwrap()).asymmetry(), 0.0);
    }

    #[test]
    fn quotient_stiffness_is_definite() {
        let a = stiffness_matrix(&quotient_space(2).unwrap()).to_dense();
        assert_eq!(a.shape(), (8, 8));
        let eig = a.symmetric_eigenvalues();
        assert!(eig.min() > 1e-3);
    }

    #[test]
    fn load_a_known_entry_and_shape() {
        let s = tensor_space(EdgeSet::ALL, 2).unwrap();
        let l = load_matrix_a(&s, 1).unwrap();
        assert_eq!(l.shape(), (4, 1));
        // ⟨φ0, ξ2⟩² on the (0,0) row.
        assert_abs_diff_eq!(l[(0, 0)], 1.0 / 3.0, epsilon = 1e-14);
        let phi = legendre_basis(1).unwrap();
        let one_d = l2_products(&phi, &s.x_basis);
        assert_abs_diff_eq!(one_d[(0, 0)], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn load_b_rows_and_zero_columns() {
        let s = tensor_space(EdgeSet::from_edges(&[Edge::E2]), 6).unwrap();
        let l = load_matrix_b(&s, 3).unwrap();
        assert_eq!(l.shape(), (4, s.dim()));
        for m in 0..s.dim() {
            let (i, _) = s.member(m);
            let col_zero = l.column(m).iter().all(|v| *v == 0.0);
            // Only ξ̃₁ (index 1 in x) is nonzero at x = 1.
            if i != 1 {
                assert!(col_zero, "member {m}");
            }
        }
        assert!(load_matrix_b(&tensor_space(EdgeSet::from_edges(&[Edge::E1]), 4).unwrap(), 2).is_err());
    }

    #[test]
    fn load_c_shape_and_constant_columns() {
        let q = quotient_space(4).unwrap();
        let l = load_matrix_c(&q, 3).unwrap();
        assert_eq!(l.shape(), (3, 24));
        for m in 0..q.dim() {
            if q.member(m).1 == 0 {
                assert!(l.column(m).iter().all(|v| v.abs() < 1e-15));
            }
        }
    }
}
