mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;

use common::*;
use socdc::conditions::{
    check_cond4, dual_sweep, find_interior_point, Cond2Verdict, Cond4Verdict, Cond5Verdict,
};
use socdc::cutgen::build_cut;
use socdc::spectral::sym_eigen;
use socdc::{Options, SymMatrix};

fn lambda_min(a0: &DMatrix<f64>, a1: &DMatrix<f64>, t: f64) -> f64 {
    eig_sorted(&(a0 * (1.0 - t) + a1 * t)).0[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witnesses_recheck(seed in any::<u64>(), n in 3usize..7) {
        let gen = RandomInstance::generate(&mut seeded(seed), n);
        let inst = gen.instance(Options { seed, ..Options::default() }).unwrap();
        let cut = build_cut(&inst).unwrap();
        let a0 = gen.a0();
        let xb = cut.report.xbar().unwrap();
        prop_assert!(xb.dot(&(&a0 * xb)) < 0.0 && xb.dot(&(&gen.a1 * xb)) < 0.0);
        prop_assert!(gen.b0.dot(xb) > 0.0);
        let scale = a0.amax().max(gen.a1.amax()).max(1.0);
        if let Some(d) = cut.report.cond4_witness() {
            let r = (cut.a_s.matrix() * d).norm() / d.norm();
            prop_assert!(r <= 1e-8 * scale, "‖A_s d‖ = {}", r);
            prop_assert!(d.dot(&(&gen.a1 * d)) < 0.0);
        }
    }

    #[test]
    fn apex_witness_lies_in_h0(seed in any::<u64>(), n in 3usize..6) {
        let gen = RandomInstance::generate(&mut seeded(seed), n);
        // Hyperplane through the interior direction keeps H¹ ∩ F0+ nonempty.
        let h = gen.xbar.clone() / gen.xbar.norm_squared();
        let inst = socdc::cutgen::ConeInstance::from_bb(
            gen.b0_mat.clone(),
            gen.b0.clone(),
            SymMatrix::new(gen.a1.clone()).unwrap(),
            Some(h.clone()),
            Options { seed, ..Options::default() },
        ).unwrap();
        let cut = build_cut(&inst).unwrap();
        if let Some(Cond5Verdict::VerifiedApex { d }) = &cut.report.cond5 {
            prop_assert!(h.dot(d).abs() <= 1e-9 * h.norm() * d.norm());
            prop_assert!(d.dot(&(&gen.a1 * d)) < 0.0);
        }
        if let Some(Cond5Verdict::FalsifiedBySample { x }) = &cut.report.cond5 {
            prop_assert!(x.dot(&(&gen.a1 * x)) > 0.0);
        }
    }

    #[test]
    fn dual_certificates_are_sound(seed in any::<u64>(), n in 2usize..5) {
        let mut r = seeded(seed);
        let a0 = gauss_sym(&mut r, n);
        let a1 = gauss_sym(&mut r, n);
        let s0 = SymMatrix::new(a0.clone()).unwrap();
        let s1 = SymMatrix::new(a1.clone()).unwrap();
        let verdict = find_interior_point(&s0, &s1, None, &Options { seed, ..Options::default() }).unwrap();
        match verdict {
            Cond2Verdict::Infeasible { t_star, .. } => {
                let lm = lambda_min(&a0, &a1, t_star);
                prop_assert!(lm >= -1e-9 * a0.amax().max(a1.amax()).max(1.0), "λ_min = {}", lm);
                for _ in 0..100_000 {
                    let x = gauss_vec(&mut r, n);
                    let nx = x.norm_squared();
                    let tol = 1e-9 * nx;
                    prop_assert!(!(x.dot(&(&a0 * &x)) < -tol && x.dot(&(&a1 * &x)) < -tol));
                }
            }
            Cond2Verdict::Found { x } => {
                prop_assert!(x.dot(&(&a0 * &x)) < 0.0 && x.dot(&(&a1 * &x)) < 0.0);
            }
            Cond2Verdict::Indeterminate => {}
        }
    }

    #[test]
    fn lambda_min_is_concave(seed in any::<u64>(), n in 2usize..6, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let mut r = seeded(seed);
        let a0 = gauss_sym(&mut r, n);
        let a1 = gauss_sym(&mut r, n);
        let s0 = SymMatrix::new(a0.clone()).unwrap();
        let s1 = SymMatrix::new(a1.clone()).unwrap();
        let lib = |t: f64| sym_eigen(&SymMatrix::pencil(&s0, &s1, t)).unwrap().min();
        let mid = lib(0.5 * (a + b));
        prop_assert!(mid >= 0.5 * (lib(a) + lib(b)) - 1e-10);
        prop_assert!((lib(a) - lambda_min(&a0, &a1, a)).abs() <= 1e-10 * (1.0 + a0.amax() + a1.amax()));
        let (t_star, best) = dual_sweep(&s0, &s1).unwrap();
        prop_assert!((0.0..=1.0).contains(&t_star));
        for k in 0..=20 {
            prop_assert!(best >= lambda_min(&a0, &a1, k as f64 / 20.0) - 1e-6);
        }
    }

    #[test]
    fn no_witness_at_s_one(seed in any::<u64>(), n in 2usize..6) {
        let mut r = seeded(seed);
        let a1 = SymMatrix::new(gauss_sym(&mut r, n)).unwrap();
        let v = check_cond4(&a1, &a1, 1.0, 1e-9).unwrap();
        prop_assert!(matches!(v, Cond4Verdict::NotApplicable));
    }
}
