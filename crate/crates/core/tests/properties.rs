use num::{BigInt, BigRational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sjc_core::grassmann::{Grassmann, Parity};
use sjc_core::index::{build_dbar_sphere, numeric_index, sphere_operators};
use sjc_core::report::sample::{random_flat_superfield, FlatCase};
use sjc_core::report::{bochner_classify, moduli_dimension, BochnerInput, ModuliDimQuery};
use sjc_core::superfield::{
    apply_d, apply_dbar, flat_sjc_residual, real_components, HoloComponents,
};
use sjc_core::{FlatTargetJ, SuperField};

const N_GEN: usize = 5;

type G = Grassmann<BigRational>;

fn rat(c: i32) -> BigRational {
    BigRational::from_integer(BigInt::from(c))
}

fn element() -> impl Strategy<Value = G> {
    prop::collection::vec((0u32..1 << N_GEN, -4i32..=4), 0..8).prop_map(|terms| {
        let mut g = G::zero(N_GEN);
        for (m, c) in terms {
            g.add_term(m, rat(c));
        }
        g
    })
}

fn homogeneous() -> impl Strategy<Value = G> {
    (element(), any::<bool>()).prop_map(|(g, odd)| {
        let grades = (0..=N_GEN as u32).filter(|k| (k % 2 == 1) == odd);
        grades.fold(G::zero(N_GEN), |acc, k| &acc + &g.grade(k))
    })
}

fn sign(p: Parity, q: Parity) -> BigRational {
    if p == Parity::Odd && q == Parity::Odd {
        rat(-1)
    } else {
        rat(1)
    }
}

fn parity_of(g: &G) -> Parity {
    if g.is_zero() {
        Parity::Even
    } else {
        g.parity()
    }
}

proptest! {
    #[test]
    fn ring_laws(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &G::one(N_GEN), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn supercommutativity(a in homogeneous(), b in homogeneous()) {
        let s = sign(parity_of(&a), parity_of(&b));
        prop_assert_eq!(&a * &b, (&b * &a).scale(&s));
    }

    #[test]
    fn odd_squares_vanish(a in homogeneous()) {
        if parity_of(&a) == Parity::Odd {
            prop_assert!((&a * &a).is_zero());
        }
    }

    #[test]
    fn souls_are_nilpotent(a in element()) {
        let (_, soul) = a.body_soul();
        prop_assert!(soul.pow(N_GEN as u32 + 1).is_zero());
    }

    #[test]
    fn leibniz(a in homogeneous(), b in element(), i in 1..=N_GEN) {
        let lhs = (&a * &b).left_derive(i).unwrap();
        let s = if parity_of(&a) == Parity::Odd { rat(-1) } else { rat(1) };
        let rhs = &(&a.left_derive(i).unwrap() * &b) + &(&a * &b.left_derive(i).unwrap()).scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn body_is_multiplicative(a in element(), b in element()) {
        prop_assert_eq!((&a * &b).body(), a.body() * b.body());
    }
}

fn flat_sample(seed: u64, case: usize) -> (FlatCase, SuperField<sjc_core::Exact>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let case = FlatCase::ALL[case % FlatCase::ALL.len()];
    (case, random_flat_superfield(&mut rng, 2, case))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_algebra(seed in any::<u64>(), case in 0usize..6) {
        let (_, f) = flat_sample(seed, case);
        prop_assert_eq!(apply_d(&apply_d(&f)), f.d_z());
        prop_assert_eq!(apply_dbar(&apply_dbar(&f)), f.d_zbar());
        prop_assert!(apply_d(&apply_dbar(&f)).add(&apply_dbar(&apply_d(&f))).is_zero());
    }

    #[test]
    fn residual_vanishes_iff_holomorphic(seed in any::<u64>(), case in 0usize..6) {
        let (case, phi) = flat_sample(seed, case);
        let residual = flat_sjc_residual(&real_components(std::slice::from_ref(&phi)), &FlatTargetJ::standard(1)).unwrap();
        let c = HoloComponents::of(&phi);
        let components = c.h.is_zero() && c.k.is_zero() && c.f.d_zbar().is_zero() && c.g.d_zbar().is_zero();
        prop_assert_eq!(residual.iter().all(SuperField::is_zero), components);
        prop_assert_eq!(components, case.is_holomorphic());
    }

    #[test]
    fn components_reassemble(seed in any::<u64>(), case in 0usize..6) {
        let (_, phi) = flat_sample(seed, case);
        prop_assert_eq!(HoloComponents::of(&phi).assemble(), phi);
    }

    #[test]
    fn bochner_sigma_reflection(p in 0u32..4, sigma in 0.1f64..10.0, lo in 0.0f64..1.0, width in 0.0f64..1.0) {
        let plus = bochner_classify(&BochnerInput::new(p, sigma, lo, lo + width).unwrap()).unwrap();
        let minus = bochner_classify(&BochnerInput::new(p, -sigma, lo, lo + width).unwrap()).unwrap();
        prop_assert_eq!(minus, plus.swapped());
    }

    #[test]
    fn moduli_even_minus_odd(n in 1u32..8, genus in 0u32..6, c1a in -20i64..20, dimx in 0u32..10) {
        let d = moduli_dimension(&ModuliDimQuery { n, genus, c1a, dimx });
        prop_assert_eq!(d.relative.even - d.relative.odd, 2 * i64::from(n) * (1 - i64::from(genus)));
        prop_assert_eq!(d.total.odd - d.relative.odd, i64::from(dimx));
        prop_assert_eq!(d.total.even, d.relative.even);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dbar_index_is_cutoff_stable(k in -3i64..=4, extra in 0usize..4) {
        let m = k.unsigned_abs() as usize + 3;
        let a = numeric_index(&build_dbar_sphere(k, m).unwrap(), 1e-8).unwrap();
        let b = numeric_index(&build_dbar_sphere(k, m + extra).unwrap(), 1e-8).unwrap();
        prop_assert!(a.conclusive && b.conclusive);
        prop_assert_eq!((a.kernel_dim, a.cokernel_dim), (b.kernel_dim, b.cokernel_dim));
        prop_assert_eq!(a.index, k + 1);
    }

    #[test]
    fn index_is_additive_over_splittings(split in prop::collection::vec(0i64..=2, 1..=3)) {
        let cutoff = 2 * *split.iter().max().unwrap() as usize + 4;
        let total = sphere_operators(&split, cutoff).unwrap();
        let mut sum = 0;
        for &k in &split {
            let one = sphere_operators(&[k], cutoff).unwrap();
            sum += numeric_index(&one.d_phi, 1e-8).unwrap().real_index;
        }
        let r = numeric_index(&total.d_phi, 1e-8).unwrap();
        prop_assert!(r.conclusive);
        prop_assert_eq!(r.real_index, sum);
        prop_assert_eq!(r.real_index, split.iter().map(|k| 2 * (k + 1)).sum::<i64>());
    }
}
