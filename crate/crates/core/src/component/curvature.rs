//! The cubic curvature contraction `SR^N(ψ)` and the Fierz-type identities it satisfies.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::scalar::Scalar;
use crate::target::CurvatureTensor;

use super::spin::SpinConventions;
use super::{gvec_axpy, gvec_max_abs, gvec_sub, gvec_zero, GVec, Spinor};

/// `R(X, Y)Z^e = Σ r_{abcd} n^{de} X^a Y^b Z^c` with the Grassmann product taken in the order `X, Y, Z`.
/// `ninv = None` means `n = δ`.
pub fn curvature_apply<T: Scalar>(
    r: &CurvatureTensor,
    ninv: Option<&DMatrix<f64>>,
    x: &GVec<T>,
    y: &GVec<T>,
    z: &GVec<T>,
) -> GVec<T> {
    let dim = r.dim();
    let n_gen = x[0].n_gen();
    let mut xy = vec![vec![Grassmann::zero(n_gen); dim]; dim];
    for a in 0..dim {
        if x[a].is_zero() {
            continue;
        }
        for b in 0..dim {
            if !y[b].is_zero() {
                xy[a][b] = &x[a] * &y[b];
            }
        }
    }
    // s[c][d] = Σ_ab r_abcd x^a y^b
    let mut lowered = gvec_zero::<T>(dim, n_gen);
    for c in 0..dim {
        if z[c].is_zero() {
            continue;
        }
        for d in 0..dim {
            let mut s = Grassmann::zero(n_gen);
            for a in 0..dim {
                for b in 0..dim {
                    let e = r.get(a, b, c, d);
                    if e != 0.0 && !xy[a][b].is_zero() {
                        s.axpy(&T::from_f64(e), &xy[a][b]);
                    }
                }
            }
            if !s.is_zero() {
                lowered[d] = &lowered[d] + &(&s * &z[c]);
            }
        }
    }
    match ninv {
        None => lowered,
        Some(m) => super::mat_apply(m, &lowered),
    }
}

/// `SR_α = ε^{μν} R(ψ_α, ψ_μ)ψ_ν = R(ψ_α, ψ_3)ψ_4 − R(ψ_α, ψ_4)ψ_3`.
pub fn sr_contraction<T: Scalar>(
    psi: &Spinor<T>,
    r: &CurvatureTensor,
    ninv: Option<&DMatrix<f64>>,
) -> Spinor<T> {
    let f = |a: usize| {
        gvec_sub(
            &curvature_apply(r, ninv, &psi[a], &psi[0], &psi[1]),
            &curvature_apply(r, ninv, &psi[a], &psi[1], &psi[0]),
        )
    };
    [f(0), f(1)]
}

/// `(∇_{ψ_ρ} R)(X, Y)Z` with `∇_{ψ_ρ} R = Σ_e ψ_ρ^e ∇_e R`; the factor `ψ_ρ^e` stands first.
fn nabla_apply<T: Scalar>(
    r: &CurvatureTensor,
    rho: &GVec<T>,
    x: &GVec<T>,
    y: &GVec<T>,
    z: &GVec<T>,
) -> GVec<T> {
    let dim = r.dim();
    let n_gen = x[0].n_gen();
    let mut out = gvec_zero::<T>(dim, n_gen);
    for (e, pe) in rho.iter().enumerate() {
        if pe.is_zero() {
            continue;
        }
        let t = r.nabla_slice(e).expect("∇R attached");
        let v = curvature_apply(&t, None, x, y, z);
        for b in 0..dim {
            out[b] = &out[b] + &(pe * &v[b]);
        }
    }
    out
}

/// `ε^{κλ} (∇_{ψ_ρ} R)(ψ_α, ψ_κ)ψ_λ` for `α = 3, 4`.
pub fn nabla_sr_contraction<T: Scalar>(
    psi: &Spinor<T>,
    rho: usize,
    r: &CurvatureTensor,
) -> Spinor<T> {
    let f = |a: usize| {
        gvec_sub(
            &nabla_apply(r, &psi[rho], &psi[a], &psi[0], &psi[1]),
            &nabla_apply(r, &psi[rho], &psi[a], &psi[1], &psi[0]),
        )
    };
    [f(0), f(1)]
}

/// Random odd spinor with small integer coefficients on odd monomials of degree 1 and 3.
pub fn random_odd_spinor<T: Scalar, R: Rng>(dim: usize, n_gen: usize, rng: &mut R) -> Spinor<T> {
    let mut make = || -> GVec<T> {
        (0..dim)
            .map(|_| {
                let mut g = Grassmann::zero(n_gen);
                for mask in 1u32..(1 << n_gen) {
                    if mask.count_ones() % 2 == 1 {
                        let c = rng.gen_range(-3i64..=3);
                        if c != 0 {
                            g.add_term(mask, T::from_i64(c));
                        }
                    }
                }
                g
            })
            .collect()
    };
    [make(), make()]
}

/// Maximum coefficient deviations of the two Fierz chains, separately for `R` and `∇R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FierzReport {
    pub chain1: f64,
    pub chain2: f64,
    pub nabla_chain1: Option<f64>,
    pub nabla_chain2: Option<f64>,
}

impl FierzReport {
    pub fn max_chain1(&self) -> f64 {
        self.chain1.max(self.nabla_chain1.unwrap_or(0.0))
    }

    pub fn max_chain2(&self) -> f64 {
        self.chain2.max(self.nabla_chain2.unwrap_or(0.0))
    }
}

/// Evaluates both equality chains for every `(μ, ν, σ)`:
///
/// `6R(ψ_μ,ψ_ν)ψ_σ = 2(Γ^t_{μν}γ_{tσ}^τ − δ_{μν}I_σ^τ)SR_τ` (chain 1) and
/// `6R(ψ_μ,ψ_ν)ψ_σ = (δ_{νσ}I_ν^τ − Γ^t_{νσ}γ_{tμ}^τ)SR_τ` (chain 2).
pub fn fierz_check<T: Scalar>(
    r: &CurvatureTensor,
    psi: &Spinor<T>,
    with_derivative: bool,
) -> Result<FierzReport> {
    r.check_symmetries(1e-12)?;
    let n_gen = psi[0][0].n_gen();
    if with_derivative {
        if !r.has_nabla() {
            return Err(Error::Precondition(
                "∇R check needs a derivative tensor".into(),
            ));
        }
        if n_gen < 4 {
            return Err(Error::Precondition(format!(
                "∇R check needs at least 4 generators, got {n_gen}"
            )));
        }
    }
    let sr = sr_contraction(psi, r, None);
    let (chain1, chain2) = chains(psi, &sr, |x, y, z| curvature_apply(r, None, x, y, z));
    let (nabla_chain1, nabla_chain2) = if with_derivative {
        let mut c1 = 0.0f64;
        let mut c2 = 0.0f64;
        for rho in 0..2 {
            let nsr = nabla_sr_contraction(psi, rho, r);
            let (a, b) = chains(psi, &nsr, |x, y, z| nabla_apply(r, &psi[rho], x, y, z));
            c1 = c1.max(a);
            c2 = c2.max(b);
        }
        (Some(c1), Some(c2))
    } else {
        (None, None)
    };
    Ok(FierzReport {
        chain1,
        chain2,
        nabla_chain1,
        nabla_chain2,
    })
}

fn chains<T: Scalar>(
    psi: &Spinor<T>,
    sr: &Spinor<T>,
    apply: impl Fn(&GVec<T>, &GVec<T>, &GVec<T>) -> GVec<T>,
) -> (f64, f64) {
    let sc = SpinConventions::standard();
    let dim = psi[0].len();
    let n_gen = psi[0][0].n_gen();
    let delta = |a: usize, b: usize| if a == b { 1i64 } else { 0 };
    let mut c1 = 0.0f64;
    let mut c2 = 0.0f64;
    for mu in 0..2 {
        for nu in 0..2 {
            for sigma in 0..2 {
                let lhs: GVec<T> = apply(&psi[mu], &psi[nu], &psi[sigma])
                    .iter()
                    .map(|g| g.scale(&T::from_i64(6)))
                    .collect();
                let mut mid = gvec_zero::<T>(dim, n_gen);
                let mut right = gvec_zero::<T>(dim, n_gen);
                for tau in 0..2 {
                    let mut a = -delta(mu, nu) * sc.i[sigma][tau];
                    let mut b = delta(nu, sigma) * sc.i[nu][tau];
                    for t in 0..2 {
                        a += sc.big_gamma[t][mu][nu] * sc.gamma[t][sigma][tau];
                        b -= sc.big_gamma[t][nu][sigma] * sc.gamma[t][mu][tau];
                    }
                    gvec_axpy(&mut mid, 2.0 * a as f64, &sr[tau]);
                    gvec_axpy(&mut right, b as f64, &sr[tau]);
                }
                c1 = c1.max(gvec_max_abs(&gvec_sub(&lhs, &mid)));
                c2 = c2.max(gvec_max_abs(&gvec_sub(&lhs, &right)));
            }
        }
    }
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::target::{const_hsc_curvature, standard_j};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_curvature_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_odd_spinor::<Exact, _>(2, 4, &mut rng);
        let r = CurvatureTensor::zero(2);
        let sr = sr_contraction(&psi, &r, None);
        assert!(sr.iter().flatten().all(|g| g.is_zero()));
        let rep = fierz_check(&r, &psi, false).unwrap();
        assert_eq!((rep.chain1, rep.chain2), (0.0, 0.0));
    }

    #[test]
    fn vanishing_psi4_kills_sr() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut psi = random_odd_spinor::<Exact, _>(4, 4, &mut rng);
        psi[1] = gvec_zero(4, 4);
        let r = CurvatureTensor::random_admissible(4, 2, &mut rng);
        let sr = sr_contraction(&psi, &r, None);
        assert!(sr.iter().flatten().all(|g| g.is_zero()));
    }

    #[test]
    fn output_is_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_odd_spinor::<Exact, _>(2, 4, &mut rng);
        let r = CurvatureTensor::random_admissible(2, 2, &mut rng);
        for g in sr_contraction(&psi, &r, None).iter().flatten() {
            for (mask, _) in g.terms() {
                assert!(mask.count_ones() >= 3 && mask.count_ones() % 2 == 1);
            }
        }
    }

    /// Independent oracle: SR_3 = −3R(ψ3,ψ4)ψ3 and SR_4 = 3R(ψ3,ψ4)ψ4.
    #[test]
    fn matches_closed_form_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let psi = random_odd_spinor::<Exact, _>(2, 4, &mut rng);
            let r = CurvatureTensor::random_admissible(2, 2, &mut rng);
            let sr = sr_contraction(&psi, &r, None);
            let a = curvature_apply(&r, None, &psi[0], &psi[1], &psi[0]);
            let b = curvature_apply(&r, None, &psi[0], &psi[1], &psi[1]);
            let three = Exact::from_i64(3);
            assert_eq!(
                sr[0],
                a.iter()
                    .map(|g| g.scale(&-three.clone()))
                    .collect::<Vec<_>>()
            );
            assert_eq!(sr[1], b.iter().map(|g| g.scale(&three)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn first_chain_holds_for_const_hsc() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let id = DMatrix::identity(4, 4);
        let r = const_hsc_curvature(4.0, &id, &standard_j(2));
        let psi = random_odd_spinor::<Exact, _>(4, 4, &mut rng);
        let rep = fierz_check(&r, &psi, false).unwrap();
        assert_eq!(rep.chain1, 0.0);
    }

    #[test]
    fn derivative_variant_needs_four_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = CurvatureTensor::random_admissible(2, 1, &mut rng);
        let slices = (0..2)
            .map(|_| CurvatureTensor::random_admissible(2, 1, &mut rng))
            .collect();
        let r = r.with_nabla(slices).unwrap();
        let psi = random_odd_spinor::<Exact, _>(2, 2, &mut rng);
        assert!(matches!(
            fierz_check(&r, &psi, true),
            Err(Error::Precondition(_))
        ));
        let psi = random_odd_spinor::<Exact, _>(2, 4, &mut rng);
        let rep = fierz_check(&r, &psi, true).unwrap();
        assert_eq!(rep.nabla_chain1, Some(0.0));
    }

    #[test]
    fn asymmetric_tensor_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bad = CurvatureTensor::from_fn(2, |a, b, _, _| if a < b { 1.0 } else { 0.0 });
        let psi = random_odd_spinor::<Exact, _>(2, 4, &mut rng);
        assert!(matches!(
            fierz_check(&bad, &psi, false),
            Err(Error::CurvatureSymmetry(_))
        ));
    }
}
