mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use socdc::cutgen::build_cut;
use socdc::socr::Region;
use socdc::Options;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cut_matrix_and_orientation(seed in any::<u64>(), n in 3usize..7) {
        let gen = RandomInstance::generate(&mut seeded(seed), n);
        let inst = gen.instance(Options { seed, ..Options::default() }).unwrap();
        let cut = build_cut(&inst).unwrap();
        let a0 = gen.a0();
        let scale = a0.amax().max(gen.a1.amax()).max(1.0);
        let expect = &a0 * (1.0 - cut.s) + &gen.a1 * cut.s;
        prop_assert!((cut.a_s.matrix() - expect).amax() <= 1e-12 * scale);
        let (vals, _) = eig_sorted(cut.a_s.matrix());
        let band = 1e-9 * vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        prop_assert_eq!(vals.iter().filter(|v| **v < -band).count(), 1);
        let cone = cut.cone().unwrap();
        prop_assert!(cone.b().dot(&cut.xbar) >= 0.0);
        let reg = cone.classify(&cut.xbar, 1e-9).region;
        prop_assert!(matches!(reg, Region::InteriorPlus | Region::BoundaryPlus), "{:?}", reg);
        if cut.s > 0.0 && cut.s < 1.0 {
            prop_assert!(vals.iter().any(|v| v.abs() <= band), "A_s nonsingular: {:?}", vals);
        }
    }

    #[test]
    fn nonsingular_before_s(seed in any::<u64>(), n in 3usize..7) {
        let gen = RandomInstance::generate(&mut seeded(seed), n);
        let inst = gen.instance(Options { seed, ..Options::default() }).unwrap();
        let cut = build_cut(&inst).unwrap();
        let a0 = gen.a0();
        let mut r = seeded(seed ^ 1);
        for _ in 0..10 {
            // Stay clear of the end points, where A_t may be near singular.
            let t = cut.s * r.gen_range(0.01..0.99);
            let (vals, _) = eig_sorted(&(&a0 * (1.0 - t) + &gen.a1 * t));
            let band = 1e-9 * vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let neg = vals.iter().filter(|v| **v < -band).count();
            let zero = vals.iter().filter(|v| v.abs() <= band).count();
            prop_assert_eq!((neg, zero, n - neg - zero), (1, 0, n - 1), "t = {}", t);
        }
    }

    #[test]
    fn valid_on_sampled_points(seed in any::<u64>(), n in 3usize..7) {
        let gen = RandomInstance::generate(&mut seeded(seed), n);
        let inst = gen.instance(Options { seed, ..Options::default() }).unwrap();
        let cut = build_cut(&inst).unwrap();
        let branch = Branch::new(cut.a_s.matrix(), &gen.xbar);
        let scale = cut.a_s.max_abs().max(1.0);
        let mut r = seeded(seed ^ 2);
        for x in gen.sample_s(&mut r, 10_000) {
            prop_assert!(branch.margin(&x) >= -1e-9 * scale, "x = {:?}", x);
        }
    }

    #[test]
    fn deterministic_for_a_seed(seed in any::<u64>(), n in 3usize..6) {
        let gen = RandomInstance::generate(&mut seeded(seed), n);
        let opts = Options { seed, ..Options::default() };
        let a = build_cut(&gen.instance(opts).unwrap()).unwrap();
        let b = build_cut(&gen.instance(opts).unwrap()).unwrap();
        prop_assert_eq!(a.s.to_bits(), b.s.to_bits());
        prop_assert_eq!(a.a_s, b.a_s);
        prop_assert_eq!(a.xbar, b.xbar);
    }
}
