//! Extensions of polynomials on the owner square `[0,1]²` to the neighbouring
//! squares by reflection, optionally damped by a linear decay factor.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use super::grid::{Cell, GridEdge};
use super::traversal::Situation;
use crate::assembly::{stiffness_matrix, tensor_space, ProductSpace, TensorSpace};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_rule;
use crate::satcoeff::max_generalized_eigenvalue;

/// Tolerance for the local Dirichlet conditions of an input polynomial,
/// relative to the 1-norm of its coefficients.
pub const TRACE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decay {
    None,
    /// `2 - x`: one on `x = 1`, zero on `x = 2`.
    Rightward,
    /// `1 + y`: one on `y = 0`, zero on `y = -1`.
    Downward,
}

/// How one square of the configuration is obtained from the owner square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Piece {
    cell: Cell,
    mirror_x: bool,
    mirror_y: bool,
    decay: Decay,
}

fn piece(i: i32, j: i32, decay: Decay) -> Piece {
    Piece { cell: Cell::new(i, j), mirror_x: i == 1, mirror_y: j == -1, decay }
}

fn pieces(s: Situation) -> Vec<Piece> {
    use Decay::*;
    let owner = piece(0, 0, None);
    match s {
        Situation::A => vec![owner, piece(0, -1, None)],
        Situation::B => vec![owner, piece(1, 0, None)],
        Situation::C => vec![owner, piece(1, 0, None), piece(0, -1, None), piece(1, -1, None)],
        Situation::D => vec![owner, piece(1, 0, Rightward), piece(0, -1, None), piece(1, -1, Rightward)],
        Situation::E => vec![owner, piece(1, 0, None), piece(0, -1, Downward), piece(1, -1, Downward)],
    }
}

/// Squares carrying the extension, the owner square `(0,0)` first.
pub fn configuration_cells(s: Situation) -> Vec<Cell> {
    pieces(s).into_iter().map(|p| p.cell).collect()
}

fn edge_counts(cells: &[Cell]) -> BTreeMap<GridEdge, usize> {
    let mut counts = BTreeMap::new();
    for c in cells {
        for e in c.edges() {
            *counts.entry(e).or_insert(0) += 1;
        }
    }
    counts
}

/// Boundary edges of the configuration on which the extension vanishes.
pub fn vanishing_boundary(s: Situation) -> BTreeSet<GridEdge> {
    let free: &[GridEdge] = match s {
        Situation::D => &[GridEdge::v(0, 0), GridEdge::v(0, -1)],
        Situation::E => &[GridEdge::h(0, 1), GridEdge::h(1, 1)],
        _ => &[],
    };
    edge_counts(&configuration_cells(s))
        .into_iter()
        .filter(|(e, n)| *n == 1 && !free.contains(e))
        .map(|(e, _)| e)
        .collect()
}

/// Edges shared by two squares of the configuration, with both squares.
pub fn interfaces(s: Situation) -> Vec<(GridEdge, Cell, Cell)> {
    let cells = configuration_cells(s);
    edge_counts(&cells)
        .into_iter()
        .filter(|(_, n)| *n == 2)
        .map(|(e, _)| {
            let [a, b] = e.cells();
            (e, a, b)
        })
        .collect()
}

/// Value and gradient (in configuration coordinates) of `u ∘ reflection · decay`,
/// where `u` returns the value and gradient of a function on the owner square.
fn eval_piece(p: &Piece, x: f64, y: f64, u: impl Fn(f64, f64) -> (f64, [f64; 2])) -> (f64, [f64; 2]) {
    let (sx, dx) = if p.mirror_x { (2.0 - x, -1.0) } else { (x, 1.0) };
    let (sy, dy) = if p.mirror_y { (-y, -1.0) } else { (y, 1.0) };
    let (val, g) = u(sx, sy);
    let g = [g[0] * dx, g[1] * dy];
    let (phi, dphi) = match p.decay {
        Decay::None => (1.0, [0.0, 0.0]),
        Decay::Rightward => (2.0 - x, [-1.0, 0.0]),
        Decay::Downward => (1.0 + y, [0.0, 1.0]),
    };
    (phi * val, [phi * g[0] + val * dphi[0], phi * g[1] + val * dphi[1]])
}

/// Value and gradient of member `m` of `space`, mapped from `[-1,1]²` onto `[0,1]²`.
fn member_on_unit_square(space: &TensorSpace, m: usize, x: f64, y: f64) -> (f64, [f64; 2]) {
    let (s, t) = (2.0 * x - 1.0, 2.0 * y - 1.0);
    let g = space.grad_member(m, s, t);
    (space.eval_member(m, s, t), [2.0 * g[0], 2.0 * g[1]])
}

/// A polynomial on the owner square together with its extension.
#[derive(Debug, Clone)]
pub struct Extension {
    pub situation: Situation,
    space: TensorSpace,
    coeffs: Vec<f64>,
    pieces: Vec<Piece>,
}

/// Extends `v = Σ coeffs[m] · member m` from the owner square.
///
/// `v` must vanish on the local Dirichlet sides of `situation`.
pub fn extension_operator(situation: Situation, space: &TensorSpace, coeffs: &[f64]) -> Result<Extension> {
    if coeffs.len() != space.dim() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for a space of dimension {}",
            coeffs.len(),
            space.dim()
        )));
    }
    let ext = Extension { situation, space: space.clone(), coeffs: coeffs.to_vec(), pieces: pieces(situation) };
    let scale = coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
    let owner = Cell::new(0, 0);
    for side in situation.local_dirichlet().iter() {
        for (x, y) in owner.edge(side).sample_points(5) {
            let v = ext.value(owner, x, y).expect("owner square is part of every configuration");
            if v.abs() > TRACE_TOLERANCE * scale {
                return Err(Error::InvalidInput(format!(
                    "polynomial does not vanish on side {side} required by situation {situation} (|v| = {:.3e})",
                    v.abs()
                )));
            }
        }
    }
    Ok(ext)
}

impl Extension {
    pub fn cells(&self) -> Vec<Cell> {
        self.pieces.iter().map(|p| p.cell).collect()
    }

    /// Polynomial degree in each variable on the squares carrying the extension.
    pub fn degree(&self) -> usize {
        let base = self.space.x_basis.max_degree();
        base + self.pieces.iter().any(|p| p.decay != Decay::None) as usize
    }

    fn original(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let mut val = 0.0;
        let mut g = [0.0, 0.0];
        for (m, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let (vm, gm) = member_on_unit_square(&self.space, m, x, y);
            val += c * vm;
            g[0] += c * gm[0];
            g[1] += c * gm[1];
        }
        (val, g)
    }

    /// Value of the polynomial `v` itself at a point of the owner square.
    pub fn original_value(&self, x: f64, y: f64) -> f64 {
        self.original(x, y).0
    }

    /// Value of the extension's polynomial piece on `cell` at `(x, y)`.
    /// `None` when `cell` is not part of the configuration.
    pub fn value(&self, cell: Cell, x: f64, y: f64) -> Option<f64> {
        self.value_and_gradient(cell, x, y).map(|r| r.0)
    }

    pub fn gradient(&self, cell: Cell, x: f64, y: f64) -> Option<[f64; 2]> {
        self.value_and_gradient(cell, x, y).map(|r| r.1)
    }

    fn value_and_gradient(&self, cell: Cell, x: f64, y: f64) -> Option<(f64, [f64; 2])> {
        let p = self.pieces.iter().find(|p| p.cell == cell)?;
        Some(eval_piece(p, x, y, |sx, sy| self.original(sx, sy)))
    }

    /// `|Ev|²` over all squares of the configuration.
    pub fn seminorm_squared(&self) -> f64 {
        let rule = gauss_legendre_rule(self.degree() + 2).expect("positive node count");
        let mut total = 0.0;
        for p in &self.pieces {
            let (xs, wx) = rule.mapped(p.cell.i as f64, (p.cell.i + 1) as f64);
            let (ys, wy) = rule.mapped(p.cell.j as f64, (p.cell.j + 1) as f64);
            for (x, a) in xs.iter().zip(&wx) {
                for (y, b) in ys.iter().zip(&wy) {
                    let g = eval_piece(p, *x, *y, |sx, sy| self.original(sx, sy)).1;
                    total += a * b * (g[0] * g[0] + g[1] * g[1]);
                }
            }
        }
        total
    }

    /// `|v|²` on the owner square.
    pub fn original_seminorm_squared(&self) -> f64 {
        let rule = gauss_legendre_rule(self.degree() + 2).expect("positive node count");
        let (xs, w) = rule.mapped(0.0, 1.0);
        let mut total = 0.0;
        for (x, a) in xs.iter().zip(&w) {
            for (y, b) in xs.iter().zip(&w) {
                let g = self.original(*x, *y).1;
                total += a * b * (g[0] * g[0] + g[1] * g[1]);
            }
        }
        total
    }
}

/// Seminorm Gram matrices of the extension map on `tensor_space(local Dirichlet sides, degree)`:
/// `(B, A)` with `cᵀBc = |Ev|²` and `cᵀAc = |v|²`.
pub fn extension_grams(situation: Situation, degree: usize) -> Result<(TensorSpace, DMatrix<f64>, DMatrix<f64>)> {
    let space = tensor_space(situation.local_dirichlet(), degree)?;
    let n = space.dim();
    let rule = gauss_legendre_rule(degree + 3).expect("positive node count");
    let mut b = DMatrix::zeros(n, n);
    for p in pieces(situation) {
        let (xs, wx) = rule.mapped(p.cell.i as f64, (p.cell.i + 1) as f64);
        let (ys, wy) = rule.mapped(p.cell.j as f64, (p.cell.j + 1) as f64);
        let npts = xs.len() * ys.len();
        let mut gx = DMatrix::zeros(npts, n);
        let mut gy = DMatrix::zeros(npts, n);
        for (ix, (x, a)) in xs.iter().zip(&wx).enumerate() {
            for (iy, (y, c)) in ys.iter().zip(&wy).enumerate() {
                let row = ix * ys.len() + iy;
                let sw = (a * c).sqrt();
                for m in 0..n {
                    let g = eval_piece(&p, *x, *y, |sx, sy| member_on_unit_square(&space, m, sx, sy)).1;
                    gx[(row, m)] = sw * g[0];
                    gy[(row, m)] = sw * g[1];
                }
            }
        }
        b += gx.transpose() * &gx + gy.transpose() * &gy;
    }
    let a = stiffness_matrix(&space).to_dense();
    Ok((space, (&b + b.transpose()) * 0.5, a))
}

/// `sup |Ev| / |v|` over polynomials of the given degree.
pub fn extension_norm(situation: Situation, degree: usize) -> Result<f64> {
    let (_, b, a) = extension_grams(situation, degree)?;
    Ok(max_generalized_eigenvalue(&b, &a)?.value.sqrt())
}
