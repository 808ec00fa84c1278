//! Seeded random inputs for the suites.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::component::{
    random_odd_spinor, ComponentMap, Directions, Gravitino, ReducedPatch, Spinor,
};
use crate::grassmann::{Grassmann, Parity};
use crate::scalar::{exact, Exact, Rational};
use crate::superfield::{HoloComponents, PolyFn, SuperField};
use crate::target::CurvatureTensor;

/// How a random flat-model superfield `Φ^#Z = f + θg + θ̄h + θθ̄k` is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatCase {
    Holomorphic,
    /// `h ≠ 0`.
    ThetaBar,
    /// `k ≠ 0`.
    Top,
    /// `∂_{z̄} f ≠ 0`.
    AntiBody,
    /// `∂_{z̄} g ≠ 0`.
    AntiOdd,
    /// All four conditions broken.
    Generic,
}

impl FlatCase {
    pub const ALL: [FlatCase; 6] = [
        FlatCase::Holomorphic,
        FlatCase::ThetaBar,
        FlatCase::Top,
        FlatCase::AntiBody,
        FlatCase::AntiOdd,
        FlatCase::Generic,
    ];

    pub fn is_holomorphic(self) -> bool {
        self == FlatCase::Holomorphic
    }
}

fn small<R: Rng>(rng: &mut R) -> Exact {
    exact(rng.gen_range(-3..=3), rng.gen_range(-3..=3))
}

fn nonzero<R: Rng>(rng: &mut R) -> Exact {
    loop {
        let c = small(rng);
        if c != exact(0, 0) {
            return c;
        }
    }
}

fn zpow(a: u32, b: u32) -> PolyFn<Exact> {
    let mut p = PolyFn::constant(exact(1, 0));
    for _ in 0..a {
        p = p.mul(&PolyFn::z());
    }
    for _ in 0..b {
        p = p.mul(&PolyFn::zbar());
    }
    p
}

fn holomorphic_poly<R: Rng>(rng: &mut R) -> PolyFn<Exact> {
    let coeffs: Vec<Exact> = (0..rng.gen_range(1..=4)).map(|_| small(rng)).collect();
    PolyFn::z_poly(&coeffs)
}

fn any_poly<R: Rng>(rng: &mut R) -> PolyFn<Exact> {
    let mut p = zpow(rng.gen_range(0..=2), rng.gen_range(0..=1)).scale(&nonzero(rng));
    for _ in 0..2 {
        p = p.add(&zpow(rng.gen_range(0..=2), rng.gen_range(0..=2)).scale(&small(rng)));
    }
    if p.is_zero() {
        PolyFn::constant(exact(1, 0))
    } else {
        p
    }
}

fn masks(n_gen: usize, parity: Parity) -> Vec<u32> {
    (0u32..1 << n_gen)
        .filter(|m| Parity::of_mask(*m) == parity)
        .collect()
}

/// η-free superfield `Σ_m p_m(z) λ^m` over base monomials of the given parity.
fn grassmann_poly<R: Rng>(
    rng: &mut R,
    n_gen: usize,
    parity: Parity,
    poly: impl Fn(&mut R) -> PolyFn<Exact>,
) -> SuperField<Exact> {
    let parts: Vec<_> = masks(n_gen, parity)
        .into_iter()
        .map(|m| (0, m, poly(rng)))
        .collect();
    SuperField::from_parts(n_gen, parity, parts).expect("masks are in range")
}

/// A single nonzero term `c · z^a z̄^b · λ^m`.
fn bump<R: Rng>(rng: &mut R, n_gen: usize, parity: Parity, min_zbar: u32) -> SuperField<Exact> {
    let ms = masks(n_gen, parity);
    let m = ms[rng.gen_range(0..ms.len())];
    let p = zpow(rng.gen_range(0..=2), rng.gen_range(min_zbar..=min_zbar + 1)).scale(&nonzero(rng));
    SuperField::from_parts(n_gen, parity, [(0, m, p)]).expect("mask in range")
}

/// Random `Φ^#Z` of the given case over `n_gen ≥ 1` generators.
pub fn random_flat_superfield<R: Rng>(
    rng: &mut R,
    n_gen: usize,
    case: FlatCase,
) -> SuperField<Exact> {
    let zero = |p| SuperField::zero(n_gen, p);
    let mut c = HoloComponents {
        f: grassmann_poly(rng, n_gen, Parity::Even, holomorphic_poly),
        g: grassmann_poly(rng, n_gen, Parity::Odd, holomorphic_poly),
        h: zero(Parity::Odd),
        k: zero(Parity::Even),
    };
    match case {
        FlatCase::Holomorphic => {}
        FlatCase::ThetaBar => c.h = bump(rng, n_gen, Parity::Odd, 0),
        FlatCase::Top => c.k = bump(rng, n_gen, Parity::Even, 0),
        FlatCase::AntiBody => c.f = c.f.add(&bump(rng, n_gen, Parity::Even, 1)),
        FlatCase::AntiOdd => c.g = c.g.add(&bump(rng, n_gen, Parity::Odd, 1)),
        FlatCase::Generic => {
            c.f = c.f.add(&bump(rng, n_gen, Parity::Even, 1));
            c.g = c.g.add(&bump(rng, n_gen, Parity::Odd, 1));
            c.h = grassmann_poly(rng, n_gen, Parity::Odd, any_poly);
            c.k = grassmann_poly(rng, n_gen, Parity::Even, any_poly);
        }
    }
    c.assemble()
}

/// Random real even superfield with arbitrary `η` dependence, `deg ≤ 3`.
pub fn random_real_even_superfield<R: Rng>(rng: &mut R, n_gen: usize) -> SuperField<Exact> {
    let mut parts = Vec::new();
    for eta in 0u32..4 {
        for base in 0u32..1 << n_gen {
            if (eta.count_ones() + base.count_ones()) % 2 == 1 || rng.gen_bool(0.4) {
                continue;
            }
            let mut p = PolyFn::zero();
            for _ in 0..2 {
                let a = rng.gen_range(0..=2);
                let b = rng.gen_range(0..=3 - a);
                p.add_term(a, b, exact(rng.gen_range(-3..=3), 0));
            }
            parts.push((eta, base, p));
        }
    }
    SuperField::from_parts(n_gen, Parity::Even, parts).expect("even parts")
}

/// Random admissible curvature tensor with a random covariant derivative.
pub fn random_curvature_with_nabla<R: Rng>(rng: &mut R, dim: usize) -> CurvatureTensor {
    let r = CurvatureTensor::random_admissible(dim, 2, rng);
    let slices = (0..dim)
        .map(|_| CurvatureTensor::random_admissible(dim, 1, rng))
        .collect();
    r.with_nabla(slices).expect("one slice per direction")
}

/// Random odd spinor with exact rational coefficients.
pub fn random_exact_spinor<R: Rng>(rng: &mut R, dim: usize, n_gen: usize) -> Spinor<Rational> {
    random_odd_spinor(dim, n_gen, rng)
}

/// Holomorphic linear drift `φ = A x` with `A` complex linear for the standard `J`.
pub fn holomorphic_drift<R: Rng>(rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    let mut drift = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let (a, b) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        drift.push([a, b]);
        drift.push([-b, a]);
    }
    drift
}

/// Random trigonometric polynomial with modes `|k_i| ≤ kmax`.
fn wave<R: Rng>(rng: &mut R, kmax: i32) -> impl Fn(f64, f64) -> f64 {
    let terms: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let k = (
                rng.gen_range(-kmax..=kmax) as f64,
                rng.gen_range(-kmax..=kmax) as f64,
            );
            (
                k.0,
                k.1,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();
    move |x, y| {
        terms
            .iter()
            .map(|(a, b, c, s)| c * (2.0 * PI * (a * x + b * y) + s).cos())
            .sum()
    }
}

fn random_grassmann<R: Rng>(rng: &mut R, n_gen: usize, parity: Parity, w: f64) -> Grassmann<f64> {
    let mut g = Grassmann::zero(n_gen);
    for m in masks(n_gen, parity) {
        if m != 0 || parity == Parity::Even {
            g.add_term(m, w * rng.gen_range(-1.0..1.0));
        }
    }
    g
}

/// Random variations `(ξ, ζ, σ, ρ)` of a map into a `dim`-dimensional target with Fourier modes `|k_i| ≤ kmax`.
pub fn random_directions<R: Rng>(
    rng: &mut R,
    patch: &ReducedPatch,
    dim: usize,
    n_gen: usize,
    kmax: i32,
) -> Directions {
    let n = patch.len();
    let xi_w: Vec<_> = (0..dim).map(|_| wave(rng, kmax)).collect();
    let xi = (0..n)
        .map(|p| {
            let (x, y) = patch.coords(p);
            xi_w.iter().map(|w| w(x, y)).collect()
        })
        .collect();
    let field = |parity: Parity, rng: &mut R| -> Vec<Vec<Grassmann<f64>>> {
        let w = wave(rng, kmax);
        let base: Vec<Grassmann<f64>> = (0..dim)
            .map(|_| random_grassmann(rng, n_gen, parity, 1.0))
            .collect();
        let flat: Vec<Grassmann<f64>> = (0..dim)
            .map(|_| random_grassmann(rng, n_gen, parity, 0.5))
            .collect();
        (0..n)
            .map(|p| {
                let (x, y) = patch.coords(p);
                let s = w(x, y);
                base.iter()
                    .zip(&flat)
                    .map(|(b, f)| &b.scale(&s) + f)
                    .collect()
            })
            .collect()
    };
    let z3 = field(Parity::Odd, rng);
    let z4 = field(Parity::Odd, rng);
    let zeta = z3.into_iter().zip(z4).map(|(a, b)| [a, b]).collect();
    let sigma = field(Parity::Even, rng);
    let mut rho = Gravitino::zero(n, n_gen);
    let ws: Vec<_> = (0..4).map(|_| wave(rng, kmax)).collect();
    let cs: Vec<_> = (0..4)
        .map(|_| random_grassmann(rng, n_gen, Parity::Odd, 1.0))
        .collect();
    for p in 0..n {
        let (x, y) = patch.coords(p);
        for k in 0..2 {
            for a in 0..2 {
                rho.chi[p][k][a] = cs[2 * k + a].scale(&ws[2 * k + a](x, y));
            }
        }
    }
    Directions {
        xi: Some(xi),
        zeta: Some(zeta),
        sigma: Some(sigma),
        rho: Some(rho),
    }
}

/// Holomorphic linear map into `ℂⁿ` with vanishing odd fields.
pub fn holomorphic_linear_map<R: Rng>(
    rng: &mut R,
    patch: &ReducedPatch,
    n: usize,
    n_gen: usize,
) -> ComponentMap {
    let mut map = ComponentMap::zero(patch.len(), 2 * n, n_gen);
    map.drift = holomorphic_drift(rng, n);
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superfield::holomorphy_equivalence_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_cases_have_their_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..60 {
            let case = FlatCase::ALL[i % 6];
            let phi = random_flat_superfield(&mut rng, 2, case);
            assert_eq!(phi.parity(), Parity::Even);
            assert_eq!(
                holomorphy_equivalence_check(&[phi]).unwrap(),
                case.is_holomorphic(),
                "{case:?}"
            );
        }
    }

    #[test]
    fn real_even_superfields_are_real_and_even() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let f = random_real_even_superfield(&mut rng, 2);
            assert!(f.is_real());
            assert_eq!(f.parity(), Parity::Even);
        }
    }

    #[test]
    fn drift_is_complex_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = holomorphic_drift(&mut rng, 2);
        for c in 0..2 {
            assert_eq!(d[2 * c][0], d[2 * c + 1][1]);
            assert_eq!(d[2 * c][1], -d[2 * c + 1][0]);
        }
    }
}
