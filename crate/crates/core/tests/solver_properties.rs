use aqcpqc::derivatives::{gradient_cost, hessian_cost, third_derivative_cost};
use aqcpqc::shift_solver::{
    min_eigenvalue, min_norm_solution, null_space, remainder_bound, resource_estimate, RemainderConstants, SolverMode,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn symmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let x = DMatrix::from_iterator(n, n, entries.iter().copied());
    (&x + x.transpose()) * 0.5
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n * n)
}

/// Symmetric matrix of rank `r` from `r` random outer products.
fn low_rank(n: usize, r: usize, factors: &[f64]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for k in 0..r {
        let v = DVector::from_iterator(n, factors[k * n..(k + 1) * n].iter().copied());
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        a += &v * v.transpose() * sign;
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn minimum_eigenvalue_is_concave(x in entries(5), y in entries(5), t in 0.0f64..=1.0) {
        let (x, y) = (symmetric(5, &x), symmetric(5, &y));
        let mixed = &x * t + &y * (1.0 - t);
        let lhs = min_eigenvalue(&mixed).unwrap().0;
        let rhs = t * min_eigenvalue(&x).unwrap().0 + (1.0 - t) * min_eigenvalue(&y).unwrap().0;
        prop_assert!(lhs >= rhs - 1e-10, "{lhs} < {rhs}");
    }

    #[test]
    fn affine_family_minimum_eigenvalue_is_concave(
        a in entries(4), d1 in entries(4), d2 in entries(4),
        c in prop::collection::vec(-1.0f64..1.0, 4), t in 0.0f64..=1.0,
    ) {
        let (a, d1, d2) = (symmetric(4, &a), symmetric(4, &d1), symmetric(4, &d2));
        let f = |c1: f64, c2: f64| min_eigenvalue(&(&a + &d1 * c1 + &d2 * c2)).unwrap().0;
        let mid = f(t * c[0] + (1.0 - t) * c[2], t * c[1] + (1.0 - t) * c[3]);
        prop_assert!(mid >= t * f(c[0], c[1]) + (1.0 - t) * f(c[2], c[3]) - 1e-10);
    }

    #[test]
    fn min_norm_solution_solves_consistent_systems(
        factors in prop::collection::vec(-1.5f64..1.5, 6 * 4),
        rank in 1usize..=4,
        z in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let a = low_rank(6, rank, &factors);
        let q = &a * DVector::from_vec(z);
        let sol = min_norm_solution(&a, &q, 1e-9).unwrap();
        prop_assert!(sol.residual < 1e-8, "residual {}", sol.residual);
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_null_space(
        factors in prop::collection::vec(-1.5f64..1.5, 6 * 3),
        rank in 1usize..=3,
        q in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let a = low_rank(6, rank, &factors);
        let q = DVector::from_vec(q);
        let sol = min_norm_solution(&a, &q, 1e-9).unwrap();
        let basis = null_space(&a, 1e-9).unwrap();
        prop_assert!(basis.dim() >= 6 - rank);
        for v in &basis.vectors {
            prop_assert!(v.dot(&sol.epsilon).abs() < 1e-8);
        }
    }
}

#[test]
fn remainder_bound_substitution() {
    assert_eq!(remainder_bound(0.0, 2.0, 1.0, 0.1, 3.0, 2.0), 0.0);
    assert!((remainder_bound(0.1, 2.0, 1.0, 0.1, 3.0, 2.0) - 0.052).abs() < 1e-15);
}

#[test]
fn remainder_bound_inverts_at_worked_tolerance() {
    let tol = 1e-5;
    let c = RemainderConstants { l0: 2.0, cmax: 1.0, lambda: 0.1, l1: 3.0, bmax: 2.0 };
    let radius = c.max_shift_norm(tol);
    let expected = tol / (2.0 * (c.l0 * c.cmax + c.lambda * c.l1 * c.bmax));
    assert!((radius * radius - expected).abs() < 1e-18);
    assert!((c.bound(radius) - tol).abs() < 1e-18);
    assert!(c.bound(radius * 1.001) > tol);
}

#[test]
fn resource_counts_match_closed_forms() {
    for m in [1usize, 4, 6, 12] {
        let m64 = m as u64;
        let check = 2 * m64 + 2 * m64 * (m64 + 1) + 2 * m64 * (m64 + 1);
        assert_eq!(resource_estimate(m, 0, SolverMode::Check, 0), check);
        assert_eq!(resource_estimate(m, 3, SolverMode::Check, 0), check);
        let affine = gradient_cost(m) + 2 * hessian_cost(m) + third_derivative_cost(m);
        assert_eq!(resource_estimate(m, 2, SolverMode::Affine, 0), affine);
    }
    assert_eq!(third_derivative_cost(3), 8 * 10);
    assert_eq!(resource_estimate(0, 0, SolverMode::Check, 0), 0);
}
