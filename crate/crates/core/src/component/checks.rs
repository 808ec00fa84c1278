//! Conformal covariance and finite-difference linearization of the component expressions.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::target::TargetGeometry;

use super::equations::{
    prop_components, residual_components, twisted_dirac, Components, PointGeometry,
};
use super::fields::{ComponentMap, Gravitino};
use super::grid::ReducedPatch;
use super::spin::{project_pq, vee_q};
use super::{gvec_from_f64, gvec_scale, one_plus_ij, pair_scale, GVec, Spinor};

/// Tolerance for spectral (band-limited) grids.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Tolerance when finite differences are used.
pub const FD_TOL: f64 = 1e-4;
/// Relative tolerance of the linearization check.
pub const LINEARIZATION_TOL: f64 = 1e-6;

/// One block compared against its prediction: passes when `error ≤ tol·(1 + magnitude)`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BlockComparison {
    pub name: String,
    pub error: f64,
    pub magnitude: f64,
    pub tol: f64,
    pub pass: bool,
}

impl BlockComparison {
    fn new(name: String, error: f64, magnitude: f64, tol: f64) -> Self {
        let pass = error <= tol * (1.0 + magnitude);
        BlockComparison {
            name,
            error,
            magnitude,
            tol,
            pass,
        }
    }
}

const BLOCKS: [&str; 4] = ["c1", "c2", "c3", "c4"];

fn compare(prefix: &str, got: &Components, want: &Components, tol: f64) -> Vec<BlockComparison> {
    let err = got.sub(want).max_abs();
    let mag = want.max_abs();
    (0..4)
        .map(|i| BlockComparison::new(format!("{prefix}{}", BLOCKS[i]), err[i], mag[i], tol))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    /// `μ`-weights applied to `(C1, C2, λ²C3, C4)` at the first grid point.
    pub weights: [f64; 4],
    pub blocks: Vec<BlockComparison>,
}

impl WeylReport {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(|b| b.pass)
    }
}

fn rescale_fields(map: &ComponentMap, chi: &Gravitino, mu: &[f64]) -> (ComponentMap, Gravitino) {
    let mut m = map.clone();
    let mut c = chi.clone();
    for (p, u) in mu.iter().enumerate() {
        m.psi[p] = pair_scale(&m.psi[p], 1.0 / u);
        m.f[p] = gvec_scale(&m.f[p], 1.0 / (u * u));
        for row in c.chi[p].iter_mut() {
            for e in row.iter_mut() {
                *e = e.scale(&(1.0 / u));
            }
        }
    }
    (m, c)
}

/// Compares the components after `λ ↦ μλ`, `ψ ↦ ψ/μ`, `F ↦ F/μ²`, `χ ↦ χ/μ` with the
/// rescaled originals: `C1·μ^{-1}`, `C2·μ^{-2}`, `λ²C3` unchanged, `C4·μ^{-3}`.
pub fn weyl_covariance_check(
    patch: &ReducedPatch,
    model: &dyn TargetGeometry,
    map: &ComponentMap,
    chi: &Gravitino,
    mu: &[f64],
) -> Result<WeylReport> {
    if mu.len() != patch.len() {
        return Err(Error::Shape(format!(
            "μ has {} values, grid has {}",
            mu.len(),
            patch.len()
        )));
    }
    let patch2 = patch.rescaled(mu)?;
    let (map2, chi2) = rescale_fields(map, chi, mu);
    let c = prop_components(patch, model, map, chi)?;
    let c2 = prop_components(&patch2, model, &map2, &chi2)?;
    let pow = |k: i32| -> Vec<f64> { mu.iter().map(|u| u.powi(k)).collect() };
    let one = vec![1.0; mu.len()];
    let lam2 = |pt: &ReducedPatch| -> Vec<f64> { pt.lambda().iter().map(|l| l * l).collect() };
    let (l1, l2) = (lam2(patch), lam2(&patch2));
    let want = c
        .weighted([&one, &one, &l1, &one])
        .weighted([&pow(-1), &pow(-2), &one, &pow(-3)]);
    let got = c2.weighted([&one, &one, &l2, &one]);
    let tol = if patch.is_spectral() && patch2.is_spectral() {
        SPECTRAL_TOL
    } else {
        FD_TOL
    };
    Ok(WeylReport {
        weights: [1.0 / mu[0], mu[0].powi(-2), 1.0, mu[0].powi(-3)],
        blocks: compare("", &got, &want, tol),
    })
}

/// Variations of `(φ, ψ, F, χ)` at a base point `(φ, 0, 0, 0)`.
#[derive(Clone, Debug, Default)]
pub struct Directions {
    /// `ξ`: periodic variation of `φ`, `[p][b]`.
    pub xi: Option<Vec<Vec<f64>>>,
    /// `ζ`: variation of `ψ`.
    pub zeta: Option<Vec<Spinor>>,
    /// `σ`: variation of `F`.
    pub sigma: Option<Vec<GVec>>,
    /// `ρ`: variation of `χ`.
    pub rho: Option<Gravitino>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearizationReport {
    pub base_residual: f64,
    pub step: f64,
    pub blocks: Vec<BlockComparison>,
}

impl LinearizationReport {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(|b| b.pass)
    }
}

/// Richardson-extrapolated central difference of `C(base + t·dir)` at `t = 0`.
fn richardson(eval: &dyn Fn(f64) -> Result<Components>, h: f64) -> Result<Components> {
    let central =
        |s: f64| -> Result<Components> { Ok(eval(s)?.combine(&eval(-s)?, 0.5 / s, -0.5 / s)) };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok(fine.combine(&coarse, 4.0 / 3.0, -1.0 / 3.0))
}

/// Finite-difference check of the differential at a `J`-holomorphic `φ` with `ψ = F = χ = 0`.
///
/// Predicted responses: `ζ ↦ (½(1+I⊗J)ζ, 0, 0, −½(1+I⊗J)𝐷̸ζ)`, `σ ↦ (0, ¼σ, 0, 0)`,
/// `ξ ↦ (0, 0, −½(1+I⊗J)∇ξ, 0)`, `ρ ↦ (0, 0, 0, 2⟨∨Qρ, dφ⟩)`.
pub fn linearization_fd_check(
    patch: &ReducedPatch,
    model: &dyn TargetGeometry,
    map: &ComponentMap,
    dirs: &Directions,
    h: f64,
) -> Result<LinearizationReport> {
    let n = patch.len();
    let n_gen = map.n_gen;
    let zero_chi = Gravitino::zero(n, n_gen);
    if map.psi.iter().flatten().flatten().any(|g| !g.is_zero())
        || map.f.iter().flatten().any(|g| !g.is_zero())
    {
        return Err(Error::Precondition(
            "base point must have ψ = 0 and F = 0".into(),
        ));
    }
    let base = residual_components(patch, model, map, &zero_chi)?;
    let base_residual = base.max_abs().iter().fold(0.0, |a: f64, b| a.max(*b));
    let pre_tol = if patch.is_spectral() {
        SPECTRAL_TOL
    } else {
        FD_TOL
    };
    if base_residual > pre_tol {
        return Err(Error::Precondition(format!(
            "φ is not J-holomorphic: residual {base_residual:e}"
        )));
    }
    let zero = prop_components(patch, model, map, &zero_chi)?.combine(&base, 0.0, 0.0);
    let dim = model.dim();
    let geos: Vec<PointGeometry> = (0..n)
        .map(|p| PointGeometry::at(model, &map.phi_at(patch, p)))
        .collect::<Result<_>>()?;
    let dphi = map.dphi(patch);
    let lam2: Vec<f64> = patch.lambda().iter().map(|l| l.powi(-2)).collect();
    let mut blocks = Vec::new();

    if let Some(xi) = &dirs.xi {
        let eval = |t: f64| {
            let mut m = map.clone();
            for (v, d) in m.phi.iter_mut().zip(xi) {
                for (a, b) in v.iter_mut().zip(d) {
                    *a += t * b;
                }
            }
            prop_components(patch, model, &m, &zero_chi)
        };
        let got = richardson(&eval, h)?;
        let mut want = zero.clone();
        let dxi: Vec<Vec<f64>> = (0..2)
            .flat_map(|k| {
                (0..dim).map(move |b| (k, b)).map(|(k, b)| {
                    let col: Vec<f64> = xi.iter().map(|v| v[b]).collect();
                    patch.deriv(&col, k)
                })
            })
            .collect();
        for p in 0..n {
            let cov: [GVec; 2] = std::array::from_fn(|k| {
                let g = DMatrix::from_fn(dim, dim, |b, c| {
                    (0..dim)
                        .map(|a| geos[p].christoffel[b][a][c] * dphi[k][p][a])
                        .sum::<f64>()
                });
                let v: Vec<f64> = (0..dim)
                    .map(|b| {
                        lam2[p]
                            * (dxi[k * dim + b][p]
                                + (0..dim).map(|c| g[(b, c)] * xi[p][c]).sum::<f64>())
                    })
                    .collect();
                gvec_from_f64(&v, n_gen)
            });
            want.c3[p] = pair_scale(&one_plus_ij(&cov, &geos[p].j, 1.0), -0.5);
        }
        blocks.extend(compare("xi/", &got, &want, LINEARIZATION_TOL));
    }

    if let Some(zeta) = &dirs.zeta {
        let eval = |t: f64| {
            let mut m = map.clone();
            m.psi = zeta.iter().map(|s| pair_scale(s, t)).collect();
            prop_components(patch, model, &m, &zero_chi)
        };
        let got = richardson(&eval, h)?;
        let mut want = zero.clone();
        let mut m = map.clone();
        m.psi = zeta.clone();
        let dz = twisted_dirac(patch, model, &m)?;
        for p in 0..n {
            want.c1[p] = pair_scale(&one_plus_ij(&zeta[p], &geos[p].j, 1.0), 0.5);
            want.c4[p] = pair_scale(&one_plus_ij(&dz[p], &geos[p].j, 1.0), -0.5);
        }
        blocks.extend(compare("zeta/", &got, &want, LINEARIZATION_TOL));
    }

    if let Some(sigma) = &dirs.sigma {
        let eval = |t: f64| {
            let mut m = map.clone();
            m.f = sigma.iter().map(|s| gvec_scale(s, t)).collect();
            prop_components(patch, model, &m, &zero_chi)
        };
        let got = richardson(&eval, h)?;
        let mut want = zero.clone();
        for p in 0..n {
            want.c2[p] = gvec_scale(&sigma[p], 0.25);
        }
        blocks.extend(compare("sigma/", &got, &want, LINEARIZATION_TOL));
    }

    if let Some(rho) = &dirs.rho {
        let eval = |t: f64| {
            let mut c = rho.clone();
            for pt in c.chi.iter_mut() {
                for row in pt.iter_mut() {
                    for e in row.iter_mut() {
                        *e = e.scale(&t);
                    }
                }
            }
            prop_components(patch, model, map, &c)
        };
        let got = richardson(&eval, h)?;
        let mut want = zero.clone();
        for p in 0..n {
            let (_, q) = project_pq(&rho.chi[p]);
            let df: [GVec; 2] = std::array::from_fn(|k| {
                let v: Vec<f64> = dphi[k][p].iter().map(|x| x * lam2[p]).collect();
                gvec_from_f64(&v, n_gen)
            });
            want.c4[p] = pair_scale(&vee_q(&q, &df), 2.0);
        }
        blocks.extend(compare("rho/", &got, &want, LINEARIZATION_TOL));
    }

    Ok(LinearizationReport {
        base_residual,
        step: h,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Grassmann;
    use crate::target::AlmostKahlerModel;
    use std::f64::consts::PI;

    fn gen(n: usize, i: usize) -> Grassmann<f64> {
        Grassmann::generator(n, i).unwrap()
    }

    fn holomorphic(m: usize, n_gen: usize) -> ComponentMap {
        let mut map = ComponentMap::zero(m * m, 2, n_gen);
        map.drift = vec![[1.25, 0.5], [-0.5, 1.25]];
        map
    }

    fn wave(patch: &ReducedPatch, p: usize, a: f64, b: f64) -> f64 {
        let (x1, x2) = patch.coords(p);
        (2.0 * PI * (a * x1 + b * x2)).sin() + 0.3 * (2.0 * PI * x2).cos()
    }

    fn directions(patch: &ReducedPatch, n_gen: usize) -> Directions {
        let n = patch.len();
        let xi = (0..n)
            .map(|p| vec![wave(patch, p, 1.0, 0.0), wave(patch, p, 1.0, 2.0)])
            .collect();
        let zeta = (0..n)
            .map(|p| {
                let w = wave(patch, p, 2.0, -1.0);
                [
                    vec![gen(n_gen, 1).scale(&w), gen(n_gen, 2)],
                    vec![gen(n_gen, 2).scale(&(0.5 * w)), gen(n_gen, 1).scale(&-w)],
                ]
            })
            .collect();
        let sigma = (0..n)
            .map(|p| {
                vec![
                    (&gen(n_gen, 1) * &gen(n_gen, 2)).scale(&wave(patch, p, 0.0, 1.0)),
                    Grassmann::scalar(n_gen, 0.5),
                ]
            })
            .collect();
        let mut rho = Gravitino::zero(n, n_gen);
        for p in 0..n {
            let w = wave(patch, p, 1.0, 1.0);
            rho.chi[p] = [
                [gen(n_gen, 1).scale(&w), gen(n_gen, 2)],
                [gen(n_gen, 2).scale(&-2.0), gen(n_gen, 1).scale(&(1.0 - w))],
            ];
        }
        Directions {
            xi: Some(xi),
            zeta: Some(zeta),
            sigma: Some(sigma),
            rho: Some(rho),
        }
    }

    #[test]
    fn flat_linearization_matches_blocks() {
        let patch = ReducedPatch::flat(16).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let map = holomorphic(16, 2);
        let r = linearization_fd_check(&patch, &model, &map, &directions(&patch, 2), 1e-2).unwrap();
        for b in &r.blocks {
            assert!(b.pass, "{b:?}");
        }
        assert_eq!(r.blocks.len(), 16);
    }

    #[test]
    fn non_holomorphic_base_is_rejected() {
        let patch = ReducedPatch::flat(8).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let mut map = holomorphic(8, 2);
        map.drift[1] = [0.5, -1.25];
        let err =
            linearization_fd_check(&patch, &model, &map, &Directions::default(), 1e-2).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn constant_rescaling_has_exact_weights() {
        let m = 8;
        let patch = ReducedPatch::flat(m).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let mut map = holomorphic(m, 3);
        let mut chi = Gravitino::zero(m * m, 3);
        for p in 0..m * m {
            let w = wave(&patch, p, 1.0, 1.0);
            map.psi[p] = [
                vec![gen(3, 1).scale(&w), gen(3, 2)],
                vec![gen(3, 3), gen(3, 1).scale(&-w)],
            ];
            map.f[p] = vec![
                (&gen(3, 1) * &gen(3, 2)).scale(&w),
                Grassmann::scalar(3, 1.5),
            ];
            chi.chi[p] = [
                [gen(3, 2), gen(3, 3).scale(&w)],
                [gen(3, 1), gen(3, 2).scale(&0.5)],
            ];
        }
        let r = weyl_covariance_check(&patch, &model, &map, &chi, &vec![2.0; m * m]).unwrap();
        assert_eq!(r.weights, [0.5, 0.25, 1.0, 0.125]);
        assert!(r.passed(), "{r:?}");
        let id = weyl_covariance_check(&patch, &model, &map, &chi, &vec![1.0; m * m]).unwrap();
        assert!(id.blocks.iter().all(|b| b.error == 0.0));
    }

    #[test]
    fn varying_rescaling_preserves_solutions() {
        let m = 32;
        let patch = ReducedPatch::flat(m).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let map = holomorphic(m, 2);
        let mu: Vec<f64> = (0..m * m)
            .map(|p| 1.0 + 0.2 * wave(&patch, p, 1.0, 0.0))
            .collect();
        let r =
            weyl_covariance_check(&patch, &model, &map, &Gravitino::zero(m * m, 2), &mu).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
