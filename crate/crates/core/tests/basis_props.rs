use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use refsat::basis1d::{
    boundary_trace, build_basis_1d, gram_matrices, BasisFunction, BasisKind, BoundaryCondition1D, Endpoint,
};
use refsat::legendre::legendre_eval_all;
use refsat::quadrature::gauss_legendre_rule;

/// Legendre polynomial by the three-term recurrence, independent of the library's tables.
fn legendre(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = ((2 * k + 1) as f64 * x * b - k as f64 * a) / (k + 1) as f64;
        a = b;
        b = c;
    }
    b
}

fn bc_strategy() -> impl Strategy<Value = BoundaryCondition1D> {
    (any::<bool>(), any::<bool>()).prop_map(|(a, b)| BoundaryCondition1D::new(a, b))
}

#[test]
fn recurrence_matches_table() {
    for x in [-1.0, -0.3, 0.0, 0.71, 1.0] {
        let tab = legendre_eval_all(20, x);
        for (n, v) in tab.iter().enumerate() {
            assert_abs_diff_eq!(*v, legendre(n, x), epsilon = 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn legendre_basis_is_orthonormal(r in 1usize..40) {
        let b = build_basis_1d(BasisKind::Legendre, BoundaryCondition1D::NONE, r).unwrap();
        let (m, _) = gram_matrices(&b, &b, &b.default_rule()).unwrap();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((m[(i, j)] - want).abs() < 1e-12, "M[{i}][{j}] = {}", m[(i, j)]);
            }
        }
    }

    #[test]
    fn interior_shen_functions_have_identity_stiffness(r in 2usize..48, bc in bc_strategy()) {
        let b = build_basis_1d(BasisKind::BabuskaShen, bc, r).unwrap();
        let (m, s) = gram_matrices(&b, &b, &b.default_rule()).unwrap();
        let interior: Vec<usize> =
            (0..b.len()).filter(|&i| matches!(b.labels()[i], BasisFunction::Xi(_))).collect();
        for &i in &interior {
            for &j in &interior {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((s[(i, j)] - want).abs() < 1e-12);
                let (BasisFunction::Xi(k), BasisFunction::Xi(l)) = (b.labels()[i], b.labels()[j]) else { unreachable!() };
                if k.abs_diff(l) != 0 && k.abs_diff(l) != 2 {
                    prop_assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
        prop_assert!((&m - m.transpose()).amax() < 1e-14);
    }

    #[test]
    fn legendre_against_shen_is_sparse(k in 0usize..=62, m in 2usize..=64) {
        let phi = build_basis_1d(BasisKind::Legendre, BoundaryCondition1D::NONE, 62).unwrap();
        let xi = build_basis_1d(BasisKind::BabuskaShen, BoundaryCondition1D::BOTH, 64).unwrap();
        let (g, _) = gram_matrices(&phi, &xi, &gauss_legendre_rule(70).unwrap()).unwrap();
        let i = phi.position(BasisFunction::Legendre(k)).unwrap();
        let j = xi.position(BasisFunction::Xi(m)).unwrap();
        // ⟨√(k+½) L_k, (L_{m-2} - L_m)/√(4m-2)⟩ from ∫ L_k² = 2/(2k+1).
        let scale = (k as f64 + 0.5).sqrt() / (4.0 * m as f64 - 2.0).sqrt() * 2.0 / (2 * k + 1) as f64;
        let want = if k + 2 == m { scale } else if k == m { -scale } else { 0.0 };
        prop_assert!((g[(i, j)] - want).abs() < 1e-13, "<phi_{k}, xi_{m}> = {} vs {want}", g[(i, j)]);
        if want == 0.0 {
            prop_assert_eq!(g[(i, j)], 0.0);
        }
    }

    #[test]
    fn shen_function_is_scaled_antiderivative(k in 2usize..40, x in -1.0f64..1.0) {
        let b = build_basis_1d(BasisKind::BabuskaShen, BoundaryCondition1D::BOTH, k).unwrap();
        let i = b.position(BasisFunction::Xi(k)).unwrap();
        let rule = gauss_legendre_rule(k + 2).unwrap();
        let (nodes, weights) = rule.mapped(-1.0, x);
        let integral: f64 = nodes.iter().zip(&weights).map(|(t, w)| w * legendre(k - 1, *t)).sum();
        let want = -(k as f64 - 0.5).sqrt() * integral;
        prop_assert!((b.eval(i, x) - want).abs() < 1e-12);
        prop_assert!((b.eval_deriv(i, x) + (k as f64 - 0.5).sqrt() * legendre(k - 1, x)).abs() < 1e-10);
    }

    #[test]
    fn traces_respect_boundary_conditions(r in 1usize..30, bc in bc_strategy()) {
        prop_assume!(r > 1 || bc.count() < 2);
        let b = build_basis_1d(BasisKind::BabuskaShen, bc, r).unwrap();
        let minus = boundary_trace(&b, Endpoint::Minus1);
        let plus = boundary_trace(&b, Endpoint::Plus1);
        for i in 0..b.len() {
            prop_assert!((minus[i] - b.eval(i, -1.0)).abs() < 1e-13);
            prop_assert!((plus[i] - b.eval(i, 1.0)).abs() < 1e-13);
            if bc.dirichlet_at_minus1 {
                prop_assert!(minus[i].abs() < 1e-13);
            }
            if bc.dirichlet_at_plus1 {
                prop_assert!(plus[i].abs() < 1e-13);
            }
        }
        let nonzero = |t: &[f64]| t.iter().filter(|v| v.abs() > 1e-13).count();
        prop_assert_eq!(nonzero(&minus), usize::from(!bc.dirichlet_at_minus1));
        prop_assert_eq!(nonzero(&plus), usize::from(!bc.dirichlet_at_plus1));
        prop_assert_eq!(b.len(), r + 1 - bc.count());
    }

    #[test]
    fn mean_free_basis_has_zero_mean_after_constant(r in 1usize..30) {
        let b = build_basis_1d(BasisKind::MeanZeroX, BoundaryCondition1D::NONE, r).unwrap();
        let rule = b.default_rule();
        prop_assert_eq!(b.labels()[0], BasisFunction::Chi0);
        prop_assert!((rule.integrate(|x| b.eval(0, x)) - 2f64.sqrt()).abs() < 1e-13);
        for i in 1..b.len() {
            prop_assert!(rule.integrate(|x| b.eval(i, x)).abs() < 1e-13);
        }
        prop_assert_eq!(b.len(), r + 1);
    }
}
