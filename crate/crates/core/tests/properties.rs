use proptest::prelude::*;

use numrad::bounds::{
    bound_cor2, bound_cor3, bound_cor5, bound_eq5, bound_eq6, bound_nilpotent, bound_th1, bound_th2, bound_th3,
    BoundContext,
};
use numrad::harness::{random_matrix, random_unit_vector, MatrixKind};
use numrad::radius::{default_tolerance, numerical_radius_lower_bound};
use numrad::vecineq::{check_buzano, check_mixed_schwarz, check_th7_pointwise};
use numrad::{abs_op, inner, lambda_max, numerical_radius, operator_norm, Complex, Matrix, Vector};

fn kind() -> impl Strategy<Value = MatrixKind> {
    prop::sample::select(MatrixKind::ALL.to_vec())
}

/// Matrices with entries drawn directly by proptest.
fn entry_matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n).prop_map(move |v| {
            Matrix::new(n, v.into_iter().map(|(re, im)| Complex::new(re, im)).collect()).unwrap()
        })
    })
}

fn ensemble_matrix() -> impl Strategy<Value = Matrix> {
    (2..=5usize, kind(), any::<u64>()).prop_map(|(n, k, s)| random_matrix(n, k, s).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n)
        .prop_map(|v| Vector::new(v.into_iter().map(|(re, im)| Complex::new(re, im)).collect()).unwrap())
}

fn tol_for(m: &Matrix) -> f64 {
    default_tolerance(operator_norm(m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_involution(m in entry_matrix(5)) {
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn adjoint_moves_across_the_inner_product((m, x, y) in (1..=5usize).prop_flat_map(|n| {
        (entry_matrix(n).prop_filter("dim", move |m| m.dim() == n), vector(n), vector(n))
    })) {
        let lhs = inner(&m.apply(&x).unwrap(), &y).unwrap();
        let rhs = inner(&x, &m.adjoint().apply(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * m.frobenius_norm() * x.norm() * y.norm() + 1e-300);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric((x, y) in (1..=6usize).prop_flat_map(|n| (vector(n), vector(n)))) {
        let a = inner(&x, &y).unwrap();
        let b = inner(&y, &x).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-15 * x.norm() * y.norm());
    }

    #[test]
    fn powers_add(m in entry_matrix(4), a in 0u32..=4, b in 0u32..=4) {
        let whole = m.pow(a + b);
        let split = m.pow(a).matmul(&m.pow(b)).unwrap();
        let err = whole.sub(&split).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-10 * whole.frobenius_norm().max(1.0));
    }

    #[test]
    fn operator_norm_is_submultiplicative(a in ensemble_matrix(), s in any::<u64>()) {
        let b = random_matrix(a.dim(), MatrixKind::Ginibre, s).unwrap();
        let ab = operator_norm(&a.matmul(&b).unwrap()).unwrap();
        prop_assert!(ab <= operator_norm(&a).unwrap() * operator_norm(&b).unwrap() + 1e-9);
    }

    #[test]
    fn adjoint_preserves_operator_norm(m in entry_matrix(5)) {
        let d = (operator_norm(&m).unwrap() - operator_norm(&m.adjoint()).unwrap()).abs();
        prop_assert!(d <= 1e-10 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn abs_adjoint_identity(t in ensemble_matrix()) {
        let lhs = operator_norm(&t.matmul(&abs_op(&t.adjoint()).unwrap()).unwrap()).unwrap();
        let rhs = operator_norm(&t.pow(2)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }

    #[test]
    fn abs_op_top_eigenvalue_is_the_norm(m in entry_matrix(5)) {
        let top = lambda_max(&abs_op(&m).unwrap()).unwrap();
        prop_assert!((top - operator_norm(&m).unwrap()).abs() <= 1e-9 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn radius_sandwich(m in entry_matrix(5)) {
        let tol = tol_for(&m);
        let norm = operator_norm(&m).unwrap();
        let r = numerical_radius(&m, tol).unwrap();
        prop_assert!(r.certified_error <= tol);
        prop_assert!(norm / 2.0 - tol <= r.value && r.value <= norm + tol);
    }

    #[test]
    fn radius_of_normal_is_norm(n in 2..=6usize, s in any::<u64>()) {
        let m = random_matrix(n, MatrixKind::Normal, s).unwrap();
        let tol = tol_for(&m);
        prop_assert!((numerical_radius(&m, tol).unwrap().value - operator_norm(&m).unwrap()).abs() <= 2.0 * tol);
    }

    #[test]
    fn radius_is_unitarily_invariant(m in ensemble_matrix(), s in any::<u64>()) {
        let u = random_matrix(m.dim(), MatrixKind::Unitary, s).unwrap();
        let rotated = u.adjoint().matmul(&m).unwrap().matmul(&u).unwrap();
        let tol = tol_for(&m);
        let a = numerical_radius(&m, tol).unwrap().value;
        let b = numerical_radius(&rotated, tol).unwrap().value;
        prop_assert!((a - b).abs() <= 2.0 * tol);
    }

    #[test]
    fn power_inequality(m in ensemble_matrix()) {
        let norm = operator_norm(&m).unwrap();
        let w = numerical_radius(&m, tol_for(&m)).unwrap().value;
        for n in 2..=5u32 {
            let p = m.pow(n);
            let wn = numerical_radius(&p, default_tolerance(norm.powi(n as i32))).unwrap().value;
            prop_assert!(wn <= w.powi(n as i32) + 1e-7 * norm.powi(n as i32).max(1.0));
        }
    }

    #[test]
    fn monte_carlo_never_exceeds_the_radius(m in ensemble_matrix(), s in any::<u64>()) {
        let tol = tol_for(&m);
        prop_assert!(numerical_radius_lower_bound(&m, 200, s) <= numerical_radius(&m, tol).unwrap().value + tol);
    }

    #[test]
    fn radius_is_homogeneous(m in ensemble_matrix(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let c = Complex::new(re, im);
        let tol = tol_for(&m);
        let scaled = m.scale(c);
        let w = numerical_radius(&m, tol).unwrap().value;
        let wc = numerical_radius(&scaled, tol * c.norm().max(1e-3)).unwrap().value;
        prop_assert!((wc - c.norm() * w).abs() <= 2.0 * tol * c.norm().max(1e-3));
    }

    #[test]
    fn min_forms_dominate_their_parts(m in ensemble_matrix()) {
        let tol = tol_for(&m);
        let cor2 = bound_cor2(&m, tol).unwrap();
        for other in [bound_eq5(&m, tol), bound_eq6(&m, tol)] {
            prop_assert!(cor2.value <= other.unwrap().value + 1e-10);
        }
        // th2 trades ||T||^3/2 for the smaller ||T*T+TT*|| ||T||/4
        let n = operator_norm(&m).unwrap();
        let relaxed = (0.5 * cor2.component("w(TT*T)").unwrap() + 0.5 * n.powi(3)).cbrt();
        prop_assert!(bound_th2(&m, tol).unwrap().value <= relaxed + 1e-10);
        let cor3 = bound_cor3(&m, tol).unwrap().value;
        prop_assert!(cor3 <= bound_th1(&m, tol).unwrap().value.min(bound_th3(&m, tol).unwrap().value) + 1e-10);
    }

    #[test]
    fn cor5_dominance(m in ensemble_matrix(), n in 2usize..=5) {
        let tol = tol_for(&m);
        let norm = operator_norm(&m).unwrap();
        let b = bound_cor5(&m, n, tol).unwrap().value;
        prop_assert!(b.powi(n as i32) <= norm.powi(n as i32) + 1e-9 * norm.powi(n as i32).max(1.0));
    }

    #[test]
    fn nilpotent_forms_are_ordered(n in 2..=6usize, s in any::<u64>()) {
        let m = random_matrix(n, MatrixKind::Nilpotent, s).unwrap();
        let (tight, relaxed) = bound_nilpotent(&m, tol_for(&m)).unwrap();
        prop_assert!(tight.value <= relaxed.value + 1e-10);
    }

    #[test]
    fn equality_propagates_for_normal(n in 2..=5usize, s in any::<u64>()) {
        let m = random_matrix(n, MatrixKind::Normal, s).unwrap();
        let norm = operator_norm(&m).unwrap();
        let mut ctx = BoundContext::new(&m, 1e-10 * norm.powi(3).max(1.0)).unwrap();
        for key in ["w(TT*T)", "w(T^2T*)", "w(T*T^2)"] {
            prop_assert!((ctx.radius(key).unwrap() - norm.powi(3)).abs() <= 1e-7 * norm.powi(3).max(1.0));
        }
        for key in ["w(T|T|)", "w(T*|T*|)", "w(T|T*|)", "w(T*|T|)"] {
            prop_assert!((ctx.radius(key).unwrap() - norm.powi(2)).abs() <= 1e-7 * norm.powi(2).max(1.0));
        }
    }

    #[test]
    fn buzano_scales_with_its_vectors(
        (x, y) in (2..=5usize).prop_flat_map(|n| (vector(n), vector(n))),
        s in any::<u64>(),
        re in 0.1..4.0f64,
        im in -4.0..4.0f64,
    ) {
        prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3);
        let e = random_unit_vector(x.dim(), s);
        let c = Complex::new(re, im);
        let base = check_buzano(&x, &y, &e, 0.0).unwrap();
        let scaled = check_buzano(&x.scale(c), &y, &e, 0.0).unwrap();
        prop_assert!((scaled.lhs - c.norm() * base.lhs).abs() <= 1e-12 * c.norm() * base.rhs);
        prop_assert!((scaled.rhs - c.norm() * base.rhs).abs() <= 1e-12 * c.norm() * base.rhs);
    }

    #[test]
    fn mixed_schwarz_forms_are_nonnegative(m in ensemble_matrix(), s in any::<u64>()) {
        let x = random_unit_vector(m.dim(), s);
        let y = random_unit_vector(m.dim(), s ^ 0x5555);
        let r = check_mixed_schwarz(&m, &x, &y, 1e-12).unwrap();
        prop_assert!(r.rhs >= -1e-12);
        prop_assert!(r.holds);
    }

    #[test]
    fn pointwise_power_bound_stays_below_cor5(m in ensemble_matrix(), s in any::<u64>(), n in 2usize..=5) {
        let tol = tol_for(&m);
        let bound = bound_cor5(&m, n, tol).unwrap().value;
        let scale = operator_norm(&m).unwrap().powi(n as i32).max(1.0);
        for k in 0..20 {
            let x = random_unit_vector(m.dim(), s.wrapping_add(k));
            let c = check_th7_pointwise(&m, &x, n, 1e-12 * scale).unwrap();
            prop_assert!(c.holds);
            prop_assert!(c.lhs <= bound.powi(n as i32) + 1e-7 * scale);
        }
    }
}
