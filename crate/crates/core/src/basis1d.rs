//! One-dimensional polynomial bases on `[-1, 1]` and their Gram matrices.
//!
//! Three families are provided:
//!
//! * the L2-orthonormal Legendre basis `φ_k = sqrt(k + 1/2) L_k`;
//! * the integrated-Legendre (Babuška-Shen) basis
//!   `ξ_k = (L_{k-2} - L_k) / sqrt(4k - 2)`, `k >= 2`, which is orthonormal in the
//!   H1 seminorm and vanishes at both endpoints, supplemented by the linear
//!   functions `ξ_1 = (1 - x)/sqrt(2)` (vanishes at +1) and `ξ̃_1 = (1 + x)/sqrt(2)`
//!   (vanishes at -1) where the boundary conditions allow them;
//! * the family `X = {χ_0, ξ_1 - m_1, ..., ξ_r - m_r}` with `χ_0 = 1/sqrt(2)` and
//!   `m_k` the mean of `ξ_k`, so that every element but `χ_0` has zero mean.
//!
//! Every function is stored by its Legendre coefficients.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::legendre;
use crate::quadrature::{gauss_legendre_rule, QuadRule};

/// Gram entries below this fraction of `‖f‖ ‖g‖` are snapped to exact zero.
pub const SNAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Legendre,
    BabuskaShen,
    MeanZeroX,
}

/// Homogeneous Dirichlet conditions at the two endpoints of `[-1, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct BoundaryCondition1D {
    pub dirichlet_at_minus1: bool,
    pub dirichlet_at_plus1: bool,
}

impl BoundaryCondition1D {
    pub const NONE: Self = Self { dirichlet_at_minus1: false, dirichlet_at_plus1: false };
    pub const BOTH: Self = Self { dirichlet_at_minus1: true, dirichlet_at_plus1: true };

    pub fn new(dirichlet_at_minus1: bool, dirichlet_at_plus1: bool) -> Self {
        Self { dirichlet_at_minus1, dirichlet_at_plus1 }
    }

    pub fn count(&self) -> usize {
        self.dirichlet_at_minus1 as usize + self.dirichlet_at_plus1 as usize
    }
}

/// Which named function a basis element is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFunction {
    /// `φ_k`
    Legendre(usize),
    /// `ξ_1`, vanishing at `+1`.
    Xi1,
    /// `ξ̃_1`, vanishing at `-1`.
    Xi1Tilde,
    /// `ξ_k` for `k >= 2`.
    Xi(usize),
    /// `χ_0 = 1/sqrt(2)`.
    Chi0,
    /// `ξ_k` minus its mean, `k >= 1`.
    XiMeanFree(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basis1D {
    kind: BasisKind,
    max_degree: usize,
    bc: BoundaryCondition1D,
    labels: Vec<BasisFunction>,
    coeffs: Vec<Vec<f64>>,
}

/// Legendre coefficients of `ξ_k` for `k >= 2`.
pub fn xi_coeffs(k: usize) -> Vec<f64> {
    debug_assert!(k >= 2);
    let s = 1.0 / ((4 * k - 2) as f64).sqrt();
    let mut c = vec![0.0; k + 1];
    c[k - 2] = s;
    c[k] = -s;
    c
}

fn xi1_coeffs() -> Vec<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![h, -h]
}

fn xi1_tilde_coeffs() -> Vec<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![h, h]
}

/// Legendre coefficients of `φ_k`.
pub fn phi_coeffs(k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k + 1];
    c[k] = (k as f64 + 0.5).sqrt();
    c
}

/// Builds a basis of the given kind up to degree `r`.
///
/// Babuška-Shen membership of the linear supplements: `ξ_1` is present unless
/// the space is constrained at `-1`, `ξ̃_1` unless it is constrained at `+1`.
pub fn build_basis_1d(kind: BasisKind, bc: BoundaryCondition1D, r: usize) -> Result<Basis1D> {
    if r == 0 {
        return Err(Error::InvalidArgument("basis degree must be at least 1".into()));
    }
    if kind != BasisKind::BabuskaShen && bc != BoundaryCondition1D::NONE {
        return Err(Error::InvalidArgument(format!(
            "boundary conditions only apply to the Babuška-Shen basis, got {kind:?}"
        )));
    }
    let mut labels = Vec::new();
    let mut coeffs = Vec::new();
    match kind {
        BasisKind::Legendre => {
            for k in 0..=r {
                labels.push(BasisFunction::Legendre(k));
                coeffs.push(phi_coeffs(k));
            }
        }
        BasisKind::BabuskaShen => {
            if !bc.dirichlet_at_minus1 {
                labels.push(BasisFunction::Xi1);
                coeffs.push(xi1_coeffs());
            }
            if !bc.dirichlet_at_plus1 {
                labels.push(BasisFunction::Xi1Tilde);
                coeffs.push(xi1_tilde_coeffs());
            }
            for k in 2..=r {
                labels.push(BasisFunction::Xi(k));
                coeffs.push(xi_coeffs(k));
            }
        }
        BasisKind::MeanZeroX => {
            labels.push(BasisFunction::Chi0);
            coeffs.push(vec![std::f64::consts::FRAC_1_SQRT_2]);
            for k in 1..=r {
                let mut c = if k == 1 { xi1_coeffs() } else { xi_coeffs(k) };
                // Subtract the mean, i.e. half the integral over the interval.
                c[0] -= 0.5 * legendre::integral(&c);
                labels.push(BasisFunction::XiMeanFree(k));
                coeffs.push(c);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptySpace(format!("{kind:?} basis of degree {r} with both endpoints constrained")));
    }
    Ok(Basis1D { kind, max_degree: r, bc, labels, coeffs })
}

impl Basis1D {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn bc(&self) -> BoundaryCondition1D {
        self.bc
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[BasisFunction] {
        &self.labels
    }

    pub fn coeffs(&self, i: usize) -> &[f64] {
        &self.coeffs[i]
    }

    pub fn position(&self, f: BasisFunction) -> Option<usize> {
        self.labels.iter().position(|l| *l == f)
    }

    pub fn eval(&self, i: usize, x: f64) -> f64 {
        legendre::eval_series(&self.coeffs[i], x)
    }

    pub fn eval_deriv(&self, i: usize, x: f64) -> f64 {
        legendre::eval_series(&legendre::derivative_coeffs(&self.coeffs[i]), x)
    }

    /// A Gauss rule exact for all products of two members (`max_degree + 2` nodes).
    pub fn default_rule(&self) -> QuadRule {
        gauss_legendre_rule(self.max_degree + 2).expect("node count is positive")
    }

    /// Values of all members at the nodes of `rule`, row `i` holding member `i`.
    fn tabulate(&self, rule: &QuadRule, derivative: bool) -> DMatrix<f64> {
        let kmax = self.max_degree;
        let mut out = DMatrix::zeros(self.len(), rule.len());
        let derivs: Vec<Vec<f64>> =
            if derivative { self.coeffs.iter().map(|c| legendre::derivative_coeffs(c)).collect() } else { Vec::new() };
        for (q, &x) in rule.nodes.iter().enumerate() {
            let l = legendre::legendre_eval_all(kmax, x);
            for i in 0..self.len() {
                let c = if derivative { &derivs[i] } else { &self.coeffs[i] };
                out[(i, q)] = c.iter().zip(&l).map(|(a, b)| a * b).sum();
            }
        }
        out
    }
}

/// L2 Gram `M[i][j] = ∫ row_i col_j` and H1-seminorm Gram `S[i][j] = ∫ row_i' col_j'`.
///
/// Entries below [`SNAP_TOLERANCE`] relative to the product of the two norms are set to zero.
pub fn gram_matrices(
    row_basis: &Basis1D,
    col_basis: &Basis1D,
    rule: &QuadRule,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let needed = row_basis.max_degree + col_basis.max_degree;
    if rule.exact_degree() < needed {
        return Err(Error::InvalidArgument(format!(
            "a {}-point rule is exact to degree {}, products need degree {needed}",
            rule.len(),
            rule.exact_degree()
        )));
    }
    let weighted = |mut m: DMatrix<f64>| {
        for (q, w) in rule.weights.iter().enumerate() {
            m.column_mut(q).scale_mut(*w);
        }
        m
    };
    let vr = row_basis.tabulate(rule, false);
    let vc = col_basis.tabulate(rule, false);
    let dr = row_basis.tabulate(rule, true);
    let dc = col_basis.tabulate(rule, true);
    let mut mass = weighted(vr.clone()) * vc.transpose();
    let mut stiff = weighted(dr.clone()) * dc.transpose();
    snap(&mut mass, &norms(&vr, rule), &norms(&vc, rule));
    snap(&mut stiff, &norms(&dr, rule), &norms(&dc, rule));
    Ok((mass, stiff))
}

/// `sqrt(Σ_q w_q f_i(x_q)²)` for each tabulated row.
fn norms(values: &DMatrix<f64>, rule: &QuadRule) -> Vec<f64> {
    values.row_iter().map(|r| r.iter().zip(&rule.weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt()).collect()
}

fn snap(m: &mut DMatrix<f64>, row_norms: &[f64], col_norms: &[f64]) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)].abs() <= SNAP_TOLERANCE * row_norms[i] * col_norms[j] {
                m[(i, j)] = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Minus1,
    Plus1,
}

/// Values of every member at an endpoint of `[-1, 1]`.
pub fn boundary_trace(basis: &Basis1D, endpoint: Endpoint) -> Vec<f64> {
    basis.coeffs.iter().map(|c| legendre::eval_series_at_endpoint(c, endpoint == Endpoint::Plus1)).collect()
}
