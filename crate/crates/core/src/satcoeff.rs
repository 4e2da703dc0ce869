//! Discrete saturation coefficients as largest generalized eigenvalues of
//! pairs of dual Gram matrices.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use rayon::prelude::*;

use crate::assembly::{
    load_matrix_a, load_matrix_b, load_matrix_c, quotient_space, stiffness_matrix, tensor_space, Edge, EdgeSet,
    ProductSpace, SymMatrix,
};
use crate::error::{Error, Result};

/// Right-hand sides solved per block in [`schur_dual_gram`].
const RHS_BLOCK: usize = 16;
/// Relative smallest-eigenvalue threshold below which a denominator Gram is rejected.
pub const ILL_POSED_THRESHOLD: f64 = 1e-12;
/// Relative gap under which the top eigenvalue is reported as repeated.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Element functionals tested against Legendre products on the square.
    A,
    /// Edge functionals on `e1`.
    B,
    /// Mean-free edge functionals on `e1` over polynomials modulo constants.
    C,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            other => Err(Error::InvalidInput(format!("unknown family `{other}`"))),
        }
    }
}

/// The edge sets admissible for family B.
pub fn family_b_edge_sets() -> [EdgeSet; 4] {
    [
        EdgeSet::from_edges(&[Edge::E2]),
        EdgeSet::from_edges(&[Edge::E3]),
        EdgeSet::from_edges(&[Edge::E2, Edge::E3]),
        EdgeSet::from_edges(&[Edge::E2, Edge::E3, Edge::E4]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    pub family: Family,
    pub edges: EdgeSet,
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl ProblemSpec {
    pub fn new(family: Family, edges: EdgeSet, p: usize, q: usize, r: usize) -> ProblemSpec {
        ProblemSpec { family, edges, p, q, r }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::InvalidInput("p must be at least 1".into()));
        }
        if self.q < self.p || self.r < self.q {
            return Err(Error::InvalidInput(format!(
                "degrees must satisfy p <= q <= r, got p={}, q={}, r={}",
                self.p, self.q, self.r
            )));
        }
        match self.family {
            Family::A if self.edges.is_empty() => {
                Err(Error::InvalidInput("family A needs at least one Dirichlet edge".into()))
            }
            Family::B if !family_b_edge_sets().contains(&self.edges) => Err(Error::InvalidInput(format!(
                "family B edge set must be one of {{e2}}, {{e3}}, {{e2,e3}}, {{e2,e3,e4}}, got {}",
                self.edges
            ))),
            Family::C if !self.edges.is_empty() => Err(Error::InvalidInput("family C takes no edge set".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} p={} q={} r={}", self.family, self.edges, self.p, self.q, self.r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationResult {
    pub spec: ProblemSpec,
    pub mu: f64,
    pub dim_h: usize,
    pub dim_v: usize,
    pub dim_f: usize,
    /// Relative residual `‖R_H F − μ² R_V F‖ / (‖R_H‖ ‖F‖)` of the returned eigenpair.
    pub residual: f64,
    pub wall_seconds: f64,
    /// The largest eigenvalue is (numerically) repeated.
    pub degenerate: bool,
    /// A maximizing functional, in the coefficients of the load-matrix rows.
    pub functional: DVector<f64>,
}

/// The stiffness and load matrices of one family on one space.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub stiffness: SymMatrix,
    pub load: DMatrix<f64>,
}

impl DiscreteProblem {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }
}

/// Assembles the stiffness and load matrices for `family` at the given degree.
pub fn discretize(family: Family, edges: EdgeSet, p: usize, degree: usize) -> Result<DiscreteProblem> {
    match family {
        Family::A | Family::B => {
            let space = tensor_space(edges, degree)?;
            let load = if family == Family::A { load_matrix_a(&space, p)? } else { load_matrix_b(&space, p)? };
            Ok(DiscreteProblem { stiffness: stiffness_matrix(&space), load })
        }
        Family::C => {
            let space = quotient_space(degree)?;
            debug_assert_eq!(space.dim(), (degree + 1).pow(2) - 1);
            Ok(DiscreteProblem { stiffness: stiffness_matrix(&space), load: load_matrix_c(&space, p)? })
        }
    }
}

/// `R = L A⁻¹ Lᵀ`, with one Cholesky factorization of `A` shared by all right-hand sides.
pub fn schur_dual_gram(load: &DMatrix<f64>, stiffness: &SymMatrix) -> Result<DMatrix<f64>> {
    schur_dual_gram_until(load, stiffness, None)
}

/// As [`schur_dual_gram`], giving up once `deadline` has passed.
pub fn schur_dual_gram_until(
    load: &DMatrix<f64>,
    stiffness: &SymMatrix,
    deadline: Option<(Instant, f64)>,
) -> Result<DMatrix<f64>> {
    if load.ncols() != stiffness.dim() {
        return Err(Error::InvalidArgument(format!(
            "load has {} columns but the stiffness matrix has dimension {}",
            load.ncols(),
            stiffness.dim()
        )));
    }
    let chol = match stiffness {
        SymMatrix::Sparse(a) => CscCholesky::factor(a).map_err(|_| Error::SingularStiffness)?,
        SymMatrix::Dense(a) => {
            let csc = nalgebra_sparse::CscMatrix::from(a);
            CscCholesky::factor(&csc).map_err(|_| Error::SingularStiffness)?
        }
    };
    let rhs = load.transpose();
    let nf = load.nrows();
    let starts: Vec<usize> = (0..nf).step_by(RHS_BLOCK).collect();
    let blocks: Vec<DMatrix<f64>> = starts
        .par_iter()
        .map(|&start| {
            if let Some((at, budget)) = deadline {
                if Instant::now() > at {
                    return Err(Error::BudgetExceeded { budget_seconds: budget });
                }
            }
            let width = RHS_BLOCK.min(nf - start);
            let x = chol.solve(rhs.columns(start, width));
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularStiffness);
            }
            Ok(load * x)
        })
        .collect::<Result<_>>()?;
    let mut r = DMatrix::zeros(nf, nf);
    for (start, block) in starts.iter().zip(blocks) {
        r.columns_mut(*start, block.ncols()).copy_from(&block);
    }
    Ok((&r + r.transpose()) * 0.5)
}

/// Result of [`max_generalized_eigenvalue`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigen {
    /// The largest `λ` with `R_H F = λ R_V F`.
    pub value: f64,
    /// The second largest eigenvalue, if there is one.
    pub next: Option<f64>,
    pub vector: DVector<f64>,
    pub residual: f64,
}

/// Largest eigenvalue of `R_H F = λ R_V F` for symmetric `R_H` and positive definite `R_V`.
pub fn max_generalized_eigenvalue(rh: &DMatrix<f64>, rv: &DMatrix<f64>) -> Result<GeneralizedEigen> {
    if rh.shape() != rv.shape() || !rh.is_square() || rh.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "need two square matrices of equal size, got {:?} and {:?}",
            rh.shape(),
            rv.shape()
        )));
    }
    let threshold = ILL_POSED_THRESHOLD * rv.trace().abs();
    let min_eig = rv.clone().symmetric_eigenvalues().min();
    if min_eig.is_nan() || min_eig < threshold {
        return Err(Error::IllPosedDenominator { min_eigenvalue: min_eig, threshold });
    }
    let chol = rv.clone().cholesky().ok_or(Error::IllPosedDenominator { min_eigenvalue: min_eig, threshold })?;
    let l = chol.l();
    let linv_rh = l.solve_lower_triangular(rh).expect("Cholesky factor is nonsingular");
    let c = l.solve_lower_triangular(&linv_rh.transpose()).expect("Cholesky factor is nonsingular");
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]));
    let top = order[0];
    let value = eig.eigenvalues[top];
    let next = order.get(1).map(|i| eig.eigenvalues[*i]);
    let y = eig.eigenvectors.column(top).into_owned();
    let mut f = l.transpose().solve_upper_triangular(&y).expect("Cholesky factor is nonsingular");
    f /= f.norm();
    let scale = rh.norm().max(rv.norm() * value.abs()).max(f64::MIN_POSITIVE);
    let residual = (rh * &f - rv * &f * value).norm() / scale;
    Ok(GeneralizedEigen { value, next, vector: f, residual })
}

pub fn saturation_coefficient(spec: &ProblemSpec) -> Result<SaturationResult> {
    saturation_coefficient_with_budget(spec, None)
}

/// As [`saturation_coefficient`], failing with [`Error::BudgetExceeded`] past `budget_seconds`.
pub fn saturation_coefficient_with_budget(spec: &ProblemSpec, budget_seconds: Option<f64>) -> Result<SaturationResult> {
    spec.validate()?;
    let start = Instant::now();
    let deadline = budget_seconds.map(|b| (start + std::time::Duration::from_secs_f64(b.max(0.0)), b));
    let h = discretize(spec.family, spec.edges, spec.p, spec.r)?;
    let v = discretize(spec.family, spec.edges, spec.p, spec.q)?;
    let rh = schur_dual_gram_until(&h.load, &h.stiffness, deadline)?;
    let rv = schur_dual_gram_until(&v.load, &v.stiffness, deadline)?;
    let eig = max_generalized_eigenvalue(&rh, &rv)?;
    let degenerate = eig.next.is_some_and(|n| (eig.value - n).abs() <= DEGENERACY_TOLERANCE * eig.value.abs());
    Ok(SaturationResult {
        spec: *spec,
        mu: eig.value.max(0.0).sqrt(),
        dim_h: h.dim(),
        dim_v: v.dim(),
        dim_f: h.load.nrows(),
        residual: eig.residual,
        wall_seconds: start.elapsed().as_secs_f64(),
        degenerate,
        functional: eig.vector,
    })
}

/// Rules mapping a degree `p` to the coarse-space degree `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QStrategy {
    /// `q = p + 4`
    PlusFour,
    /// `q = p + ⌈p/7⌉`
    PlusCeilP7,
    /// `q = 2p`
    Double,
}

impl QStrategy {
    pub const ALL: [QStrategy; 3] = [QStrategy::PlusFour, QStrategy::PlusCeilP7, QStrategy::Double];

    pub fn q(self, p: usize) -> usize {
        q_strategy(self, p)
    }

    pub fn name(self) -> &'static str {
        match self {
            QStrategy::PlusFour => "plus-four",
            QStrategy::PlusCeilP7 => "plus-ceil-p7",
            QStrategy::Double => "double",
        }
    }
}

impl fmt::Display for QStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<QStrategy> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        match norm.as_str() {
            "plus-four" | "plusfour" | "p+4" => Ok(QStrategy::PlusFour),
            "plus-ceil-p7" | "plusceilp7" | "p+ceil(p/7)" => Ok(QStrategy::PlusCeilP7),
            "double" | "2p" => Ok(QStrategy::Double),
            _ => Err(Error::InvalidInput(format!("unknown q strategy `{s}`"))),
        }
    }
}

pub fn q_strategy(strategy: QStrategy, p: usize) -> usize {
    match strategy {
        QStrategy::PlusFour => p + 4,
        QStrategy::PlusCeilP7 => p + p.div_ceil(7),
        QStrategy::Double => 2 * p,
    }
}

/// Dual norm of the functional with row coefficients `f`, by a dense Galerkin solve.
///
/// Independent of [`schur_dual_gram`]; intended for cross-checking.
pub fn dual_norm_oracle(f: &DVector<f64>, problem: &DiscreteProblem) -> Result<f64> {
    if f.len() != problem.load.nrows() {
        return Err(Error::InvalidArgument(format!(
            "functional has {} coefficients, expected {}",
            f.len(),
            problem.load.nrows()
        )));
    }
    let a = problem.stiffness.to_dense();
    let rhs = problem.load.transpose() * f;
    let u = a.clone().lu().solve(&rhs).ok_or(Error::SingularStiffness)?;
    Ok(u.dot(&(a * &u)).max(0.0).sqrt())
}

/// The ten canonical reference problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReferenceProblem {
    E1,
    E2,
    E3,
    E4,
    E5,
    F1,
    F2,
    F3,
    F4,
    C,
}

impl ReferenceProblem {
    pub const ALL: [ReferenceProblem; 10] = [
        ReferenceProblem::E1,
        ReferenceProblem::E2,
        ReferenceProblem::E3,
        ReferenceProblem::E4,
        ReferenceProblem::E5,
        ReferenceProblem::F1,
        ReferenceProblem::F2,
        ReferenceProblem::F3,
        ReferenceProblem::F4,
        ReferenceProblem::C,
    ];

    pub fn family(self) -> Family {
        use ReferenceProblem::*;
        match self {
            E1 | E2 | E3 | E4 | E5 => Family::A,
            F1 | F2 | F3 | F4 => Family::B,
            C => Family::C,
        }
    }

    pub fn edges(self) -> EdgeSet {
        use Edge::*;
        let list: &[Edge] = match self {
            ReferenceProblem::E1 => &[E1],
            ReferenceProblem::E2 => &[E1, E2],
            ReferenceProblem::E3 => &[E1, E3],
            ReferenceProblem::E4 => &[E1, E2, E3],
            ReferenceProblem::E5 => &[E1, E2, E3, E4],
            ReferenceProblem::F1 => &[E2],
            ReferenceProblem::F2 => &[E3],
            ReferenceProblem::F3 => &[E2, E3],
            ReferenceProblem::F4 => &[E2, E3, E4],
            ReferenceProblem::C => &[],
        };
        EdgeSet::from_edges(list)
    }

    pub fn name(self) -> &'static str {
        use ReferenceProblem::*;
        match self {
            E1 => "E1",
            E2 => "E2",
            E3 => "E3",
            E4 => "E4",
            E5 => "E5",
            F1 => "F1",
            F2 => "F2",
            F3 => "F3",
            F4 => "F4",
            C => "C",
        }
    }

    pub fn spec(self, p: usize, q: usize, r: usize) -> ProblemSpec {
        ProblemSpec::new(self.family(), self.edges(), p, q, r)
    }
}

impl fmt::Display for ReferenceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceProblem {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReferenceProblem> {
        let t = s.trim().to_ascii_uppercase();
        ReferenceProblem::ALL
            .into_iter()
            .find(|p| p.name() == t)
            .ok_or_else(|| Error::InvalidInput(format!("unknown reference problem `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn q_strategies() {
        assert_eq!(q_strategy(QStrategy::PlusFour, 12), 16);
        assert_eq!(q_strategy(QStrategy::PlusCeilP7, 14), 16);
        assert_eq!(q_strategy(QStrategy::PlusCeilP7, 15), 18);
        assert_eq!(q_strategy(QStrategy::Double, 8), 16);
        for s in QStrategy::ALL {
            assert_eq!(s.name().parse::<QStrategy>().unwrap(), s);
        }
    }

    #[test]
    fn spec_validation() {
        let e1 = EdgeSet::from_edges(&[Edge::E1]);
        assert!(ProblemSpec::new(Family::A, e1, 4, 8, 16).validate().is_ok());
        assert!(ProblemSpec::new(Family::A, EdgeSet::EMPTY, 4, 8, 16).validate().is_err());
        assert!(ProblemSpec::new(Family::A, e1, 4, 3, 16).validate().is_err());
        assert!(ProblemSpec::new(Family::A, e1, 4, 8, 7).validate().is_err());
        assert!(ProblemSpec::new(Family::A, e1, 0, 8, 16).validate().is_err());
        assert!(ProblemSpec::new(Family::B, e1, 4, 8, 16).validate().is_err());
        assert!(ProblemSpec::new(Family::C, e1, 4, 8, 16).validate().is_err());
        for f in family_b_edge_sets() {
            assert!(ProblemSpec::new(Family::B, f, 2, 4, 8).validate().is_ok());
        }
    }

    #[test]
    fn scalar_dual_gram() {
        let a = SymMatrix::Dense(DMatrix::from_element(1, 1, 4.0));
        let l = DMatrix::from_element(1, 1, 3.0);
        assert_abs_diff_eq!(schur_dual_gram(&l, &a).unwrap()[(0, 0)], 9.0 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn indefinite_stiffness_is_rejected() {
        let a = SymMatrix::Dense(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        let l = DMatrix::identity(2, 2);
        assert_eq!(schur_dual_gram(&l, &a), Err(Error::SingularStiffness));
    }

    #[test]
    fn simple_generalized_eigenvalues() {
        let id = DMatrix::<f64>::identity(2, 2);
        let r = max_generalized_eigenvalue(&DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])), &id).unwrap();
        assert_abs_diff_eq!(r.value, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.vector[0].abs(), 1.0, epsilon = 1e-14);
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        assert_abs_diff_eq!(max_generalized_eigenvalue(&m, &m).unwrap().value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_denominator_is_reported() {
        let rv = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let err = max_generalized_eigenvalue(&DMatrix::identity(2, 2), &rv).unwrap_err();
        assert!(matches!(err, Error::IllPosedDenominator { .. }));
    }

    #[test]
    fn too_small_coarse_space_is_ill_posed() {
        // q = p + 1 cannot resolve every degree-p functional.
        let spec = ReferenceProblem::E5.spec(4, 5, 10);
        assert!(matches!(saturation_coefficient(&spec), Err(Error::IllPosedDenominator { .. })));
    }

    #[test]
    fn equal_spaces_give_one() {
        for prob in ReferenceProblem::ALL {
            let res = saturation_coefficient(&prob.spec(2, 5, 5)).unwrap();
            assert_abs_diff_eq!(res.mu, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn oracle_edge_cases() {
        let prob = discretize(Family::A, EdgeSet::ALL, 2, 5).unwrap();
        let zero = DVector::zeros(9);
        assert_eq!(dual_norm_oracle(&zero, &prob).unwrap(), 0.0);
        let f = DVector::from_fn(9, |i, _| (i as f64 * 0.7).sin());
        let one = dual_norm_oracle(&f, &prob).unwrap();
        assert_abs_diff_eq!(dual_norm_oracle(&(&f * 2.0), &prob).unwrap(), 2.0 * one, epsilon = 1e-13);
        assert!(dual_norm_oracle(&DVector::zeros(3), &prob).is_err());
    }

    #[test]
    fn budget_zero_is_exceeded() {
        let spec = ReferenceProblem::E1.spec(4, 8, 16);
        assert!(matches!(saturation_coefficient_with_budget(&spec, Some(0.0)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn reference_problem_names() {
        assert_eq!(ReferenceProblem::ALL.len(), 10);
        for p in ReferenceProblem::ALL {
            assert_eq!(p.name().parse::<ReferenceProblem>().unwrap(), p);
            assert!(p.spec(2, 4, 8).validate().is_ok());
        }
    }
}
