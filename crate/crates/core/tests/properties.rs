use anisoframe::corpus::{self, GammaShape};
use anisoframe::geometry::{partition_check, BoxWindow};
use anisoframe::interpolation::{KFunctional, SpaceDesc, SpacePair, SplitFamily};
use anisoframe::rnla::{greedy_approximant, sigma_curve, sigma_exact, ErrorSpace, Oracle};
use anisoframe::spaces::{besov_norm, lorentz_norm, tl_norm, TlMethod};
use anisoframe::{CoeffSeq, Complex64, IndexSet, SpaceParams, WeightSeq};
use proptest::prelude::*;

fn shape() -> GammaShape {
    GammaShape {
        coarse_rate: 0.1,
        ..Default::default()
    }
}

fn seq(seed: u64, size: usize) -> CoeffSeq {
    corpus::random_sequence(&mut corpus::rng(seed), size, &shape())
}

fn q_exp() -> impl Strategy<Value = f64> {
    prop_oneof![0.5..4.0f64, Just(f64::INFINITY)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_monotone_under_adding_a_cube(seed in any::<u64>(), size in 1usize..20, s in -1.0..1.0f64, p in 0.5..4.0f64, q in q_exp()) {
        let c = seq(seed, size + 1);
        let par = SpaceParams::new(s, p, q).unwrap();
        let last = c.support().iter().last().cloned().unwrap();
        let smaller = c.without(&IndexSet::try_from_iter([last]).unwrap());
        prop_assert!(besov_norm(&smaller, &par) <= besov_norm(&c, &par) * (1.0 + 1e-12));
        let f_small = tl_norm(&smaller, &par, TlMethod::ExactOverlay).unwrap();
        let f_big = tl_norm(&c, &par, TlMethod::ExactOverlay).unwrap();
        prop_assert!(f_small <= f_big * (1.0 + 1e-12));
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), size in 1usize..20, k in -4i32..5, s in -1.0..1.0f64, p in 0.5..4.0f64, q in q_exp()) {
        let c = seq(seed, size);
        let lambda = (k as f64).exp2();
        let scaled = c.scaled(Complex64::new(-lambda, 0.0));
        let par = SpaceParams::new(s, p, q).unwrap();
        let b0 = besov_norm(&c, &par);
        prop_assert!((besov_norm(&scaled, &par) - lambda * b0).abs() <= 1e-12 * lambda * b0);
        let f0 = tl_norm(&c, &par, TlMethod::ExactOverlay).unwrap();
        let f1 = tl_norm(&scaled, &par, TlMethod::ExactOverlay).unwrap();
        prop_assert!((f1 - lambda * f0).abs() <= 1e-12 * lambda * f0);
        let u = WeightSeq::power(s);
        let l0 = lorentz_norm(&c, &u, 0.5, p, q).unwrap();
        let l1 = lorentz_norm(&scaled, &u, 0.5, p, q).unwrap();
        prop_assert!((l1 - lambda * l0).abs() <= 1e-12 * lambda * l0);
    }

    #[test]
    fn quasi_triangle_inequality(a in any::<u64>(), b in any::<u64>(), s in -1.0..1.0f64, p in 0.5..4.0f64, q in q_exp()) {
        let (x, y) = (seq(a, 10), seq(b, 10));
        let sum = x.add(&y).unwrap();
        let par = SpaceParams::new(s, p, q).unwrap();
        let c = par.quasi_triangle_constant();
        let bound = c * (besov_norm(&x, &par) + besov_norm(&y, &par));
        prop_assert!(besov_norm(&sum, &par) <= bound * (1.0 + 1e-12));
        let tl = |v: &CoeffSeq| tl_norm(v, &par, TlMethod::ExactOverlay).unwrap();
        prop_assert!(tl(&sum) <= c * (tl(&x) + tl(&y)) * (1.0 + 1e-12));
    }

    #[test]
    fn sigma_is_nonincreasing_and_below_greedy(seed in any::<u64>(), size in 1usize..9, beta in -0.5..1.5f64, p in 0.7..3.0f64) {
        let c = corpus::random_sequence(&mut corpus::rng(seed), size, &GammaShape::default());
        let space = ErrorSpace::Besov(SpaceParams::new(0.1, p, p).unwrap());
        let exact = sigma_curve(&c, &space, beta, Oracle::Exact).unwrap();
        let greedy = sigma_curve(&c, &space, beta, Oracle::Greedy).unwrap();
        for w in exact.points.windows(2) {
            prop_assert!(w[1].t > w[0].t && w[1].sigma < w[0].sigma);
        }
        prop_assert_eq!(exact.points.last().unwrap().sigma, 0.0);
        for g in &greedy.points {
            prop_assert!(exact.at(g.t) <= g.sigma);
            prop_assert_eq!(sigma_exact(&c, &space, beta, g.t).unwrap(), exact.at(g.t));
            prop_assert!(greedy_approximant(&c, &space, beta, g.t).unwrap().1 <= g.sigma);
        }
        prop_assert_eq!(exact.points[0].sigma, greedy.points[0].sigma);
    }

    #[test]
    fn k_bound_is_monotone_and_swap_symmetric(seed in any::<u64>(), size in 1usize..8, t in -6.0..6.0f64) {
        let c = corpus::random_sequence(&mut corpus::rng(seed), size, &GammaShape::default());
        let pair = SpacePair::new(
            SpaceDesc::Besov(SpaceParams::new(0.0, 1.0, 1.0).unwrap()),
            SpaceDesc::Besov(SpaceParams::new(0.8, 2.0, 2.0).unwrap()),
        );
        let k = KFunctional::new(&c, &pair, SplitFamily::Threshold).unwrap();
        let ks = KFunctional::new(&c, &pair.swapped(), SplitFamily::Threshold).unwrap();
        let t = t.exp2();
        let v = k.value(t).unwrap();
        prop_assert!(k.value(2.0 * t).unwrap() >= v);
        let w = t * ks.value(1.0 / t).unwrap();
        prop_assert!((v - w).abs() <= 1e-12 * v);
    }
}

#[test]
fn translated_windows_are_tiled() {
    let win = BoxWindow::cube(2, -3, 1).unwrap();
    for cone in 1..=2u8 {
        for l in [-4i64, -1, 0, 3, 4] {
            let r = partition_check(cone, 2, &[l], &win).unwrap();
            assert!(r.ok, "cone {cone} shear {l}: {r:?}");
        }
    }
}
