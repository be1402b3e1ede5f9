//! Known-answer checks for the independent oracles in `common`.

mod common;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;

use common::{
    ball_directions, ball_two_point, eig_sorted, first_crossing, m, seeded, trs_oracle, trs_sampled, v, Branch,
    RandomInstance,
};

#[test]
fn trs_oracle_known_cases() {
    let diag = |d: &[f64]| DMatrix::from_diagonal(&v(d));
    // Convex, zero linear term.
    assert_abs_diff_eq!(trs_oracle(&diag(&[1.0, 2.0]), &v(&[0.0, 0.0])), 0.0, epsilon = 1e-12);
    // Interior minimizer y = -g.
    assert_abs_diff_eq!(trs_oracle(&diag(&[1.0, 1.0]), &v(&[0.5, 0.0])), -0.25, epsilon = 1e-12);
    // Boundary minimizer y = (-1, 0).
    assert_abs_diff_eq!(trs_oracle(&diag(&[1.0, 1.0]), &v(&[3.0, 0.0])), -5.0, epsilon = 1e-10);
    // Hard case: g ⟂ bottom eigenvector.
    assert_abs_diff_eq!(trs_oracle(&diag(&[-1.0, 1.0]), &v(&[0.0, 0.0])), -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(trs_oracle(&diag(&[-1.0, 1.0]), &v(&[0.0, 0.5])), -1.125, epsilon = 1e-10);
    // Nonconvex, easy case along one axis: min of -2y² + 2y on [-1, 1].
    assert_abs_diff_eq!(trs_oracle(&diag(&[-2.0, 1.0]), &v(&[1.0, 0.0])), -4.0, epsilon = 1e-10);
}

#[test]
fn trs_oracle_beats_sampling() {
    let mut r = seeded(5);
    for _ in 0..30 {
        let q = common::gauss_sym(&mut r, 3);
        let g = common::gauss_vec(&mut r, 3);
        let exact = trs_oracle(&q, &g);
        let sampled = trs_sampled(&q, &g, &mut r, 20000);
        assert!(exact <= sampled + 1e-9);
        assert!(sampled - exact < 5e-2, "{exact} vs {sampled}");
    }
}

#[test]
fn ball_two_point_radical_plane() {
    // Deleted ball covers the top cap; the hull is the unit ball below
    // z = (1 + ‖c‖² - r²)/(2‖c‖).
    let c = v(&[0.0, 0.0, 0.9]);
    let r = 0.5;
    let plane = (1.0 + 0.81 - 0.25) / 1.8;
    let dirs = ball_directions(&c, &mut seeded(1), 200);
    assert!(ball_two_point(&v(&[0.0, 0.0, plane - 0.02]), &c, r, &dirs));
    assert!(!ball_two_point(&v(&[0.0, 0.0, plane + 0.02]), &c, r, &dirs));
    assert!(!ball_two_point(&v(&[0.0, 0.0, 1.1]), &c, r, &dirs));
    assert!(ball_two_point(&v(&[0.0, 0.0, -0.5]), &c, r, &dirs));
}

#[test]
fn branch_margin_signs() {
    let a = DMatrix::from_diagonal(&v(&[1.0, 1.0, -1.0]));
    let b = Branch::new(&a, &v(&[0.0, 0.0, 1.0]));
    assert_abs_diff_eq!(b.margin(&v(&[0.0, 0.0, 1.0])), 1.0, epsilon = 1e-12);
    assert!(b.margin(&v(&[0.0, 0.0, -1.0])) < 0.0);
    assert!(b.margin(&v(&[1.0, 0.0, 0.0])) < 0.0);
    assert_abs_diff_eq!(b.margin(&v(&[1.0, 0.0, 1.0])), 0.0, epsilon = 1e-12);
}

#[test]
fn first_crossing_cases() {
    let a = m(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let y = first_crossing(&a, &v(&[0.0, 1.0]), &v(&[2.0, 1.0])).unwrap();
    assert!((y - v(&[1.0, 1.0])).amax() < 1e-12);
    assert!(first_crossing(&a, &v(&[0.0, 1.0]), &v(&[0.5, 1.0])).is_none());
    assert!(first_crossing(&a, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).is_none());
}

#[test]
fn eig_sorted_ascending() {
    let (vals, vecs) = eig_sorted(&m(&[&[2.0, 1.0], &[1.0, 2.0]]));
    assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(vecs.column(0)[0].abs(), 0.5f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn random_instance_invariants() {
    let mut r = seeded(9);
    for n in 3..7 {
        let ri = RandomInstance::generate(&mut r, n);
        let (a0, xb) = (ri.a0(), &ri.xbar);
        assert_abs_diff_eq!(xb.dot(&(&a0 * xb)), -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(xb.dot(&(&ri.a1 * xb)), -1.0, epsilon = 1e-9);
        assert!((ri.b0_mat.transpose() * xb).amax() < 1e-9);
        for _ in 0..100 {
            let x = ri.sample_f0(&mut r, false);
            assert!(x.dot(&(&a0 * &x)) <= 1e-9 * x.norm_squared());
            assert!(ri.b0.dot(&x) > 0.0);
        }
        for x in ri.sample_s(&mut r, 50) {
            assert!(x.dot(&(&ri.a1 * &x)) <= 1e-9 * x.norm_squared().max(1.0));
        }
    }
}
