//! Twisted Dirac operator and the component expressions of `D̄_J Φ` on a grid.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grassmann::{Grassmann, Parity};
use crate::target::{Christoffel, CurvatureTensor, TargetGeometry};

use super::curvature::sr_contraction;
use super::fields::{ComponentMap, Gravitino};
use super::grid::ReducedPatch;
use super::spin::{
    delta_gamma, lower_spinor, m2_mul, pair_q_psi, q_norm_sq, vee_q, SpinConventions,
};
use super::{
    apply_m2, gmat_apply, gvec_axpy, gvec_from_f64, gvec_max_abs, gvec_zero, mat_apply,
    one_plus_ij, pair_add, pair_axpy, pair_max_abs, pair_scale, spinor_zero, Form, GMat, GVec,
    GravitinoPoint, Spinor,
};

/// Target data evaluated at `φ(x)`.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub y: Vec<f64>,
    pub j: DMatrix<f64>,
    pub christoffel: Christoffel,
    pub nabla_j: Vec<DMatrix<f64>>,
    pub nabla2_j: Vec<Vec<DMatrix<f64>>>,
    pub curvature: CurvatureTensor,
    /// Inverse metric; `None` when the metric is the identity.
    pub ninv: Option<DMatrix<f64>>,
}

impl PointGeometry {
    pub fn at(model: &dyn TargetGeometry, y: &[f64]) -> Result<Self> {
        model.check_domain(y)?;
        let n = model.metric(y);
        let dim = model.dim();
        let ninv = if (&n - DMatrix::identity(dim, dim)).amax() == 0.0 {
            None
        } else {
            Some(
                n.clone()
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidModel("singular metric".into()))?,
            )
        };
        Ok(PointGeometry {
            y: y.to_vec(),
            j: model.j(y),
            christoffel: model.christoffel(y),
            nabla_j: model.nabla_j(y),
            nabla2_j: model.nabla2_j(y),
            curvature: model.curvature(y),
            ninv,
        })
    }

    /// `Σ_a Γ^b_{ac} v^a` as a matrix in `[b][c]`.
    pub fn gamma_along(&self, v: &[f64]) -> DMatrix<f64> {
        let dim = v.len();
        DMatrix::from_fn(dim, dim, |b, c| {
            (0..dim).map(|a| self.christoffel[b][a][c] * v[a]).sum()
        })
    }

    /// `Σ_a v^a ∇_a J` for a real vector.
    pub fn nabla_j_along(&self, v: &[f64]) -> DMatrix<f64> {
        let dim = v.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (a, va) in v.iter().enumerate() {
            m += &self.nabla_j[a] * *va;
        }
        m
    }
}

/// Everything the component expressions need on the grid.
struct FieldData {
    geos: Vec<PointGeometry>,
    /// `∂_k φ^b`, `[k][p][b]`.
    dphi: [Vec<Vec<f64>>; 2],
    lam2: Vec<f64>,
}

impl FieldData {
    fn new(patch: &ReducedPatch, model: &dyn TargetGeometry, map: &ComponentMap) -> Result<Self> {
        map.validate(patch, model)?;
        let geos = (0..patch.len())
            .map(|p| PointGeometry::at(model, &map.phi_at(patch, p)))
            .collect::<Result<_>>()?;
        let lam2 = patch.lambda().iter().map(|l| l.powi(-2)).collect();
        Ok(FieldData {
            geos,
            dphi: map.dphi(patch),
            lam2,
        })
    }

    /// `dφ_k = λ^{-2} ∂_k φ` at point `p`.
    fn dphi_frame(&self, p: usize, n_gen: usize) -> Form {
        let f = |k: usize| {
            let v: Vec<f64> = self.dphi[k][p].iter().map(|x| x * self.lam2[p]).collect();
            gvec_from_f64(&v, n_gen)
        };
        [f(0), f(1)]
    }
}

/// `𝔧_μ[b][c] = Σ_a ψ_μ^a (∇_a J)[b][c]`.
pub fn j_endomorphism(psi: &Spinor, geo: &PointGeometry) -> [GMat; 2] {
    let dim = geo.j.nrows();
    let n_gen = psi[0][0].n_gen();
    let one = |mu: usize| -> GMat {
        let mut m = vec![vec![Grassmann::zero(n_gen); dim]; dim];
        for (a, x) in psi[mu].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, row) in m.iter_mut().enumerate() {
                for (c, e) in row.iter_mut().enumerate() {
                    let v = geo.nabla_j[a][(b, c)];
                    if v != 0.0 {
                        *e = &*e + &x.scale(&v);
                    }
                }
            }
        }
        m
    };
    [one(0), one(1)]
}

fn gmat_is_zero(m: &GMat) -> bool {
    m.iter().flatten().all(Grassmann::is_zero)
}

fn gmat_mul(a: &GMat, b: &GMat) -> GMat {
    let dim = a.len();
    let n_gen = a[0][0].n_gen();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|k| {
                    let mut acc = Grassmann::zero(n_gen);
                    for j in 0..dim {
                        if !a[i][j].is_zero() && !b[j][k].is_zero() {
                            acc = &acc + &(&a[i][j] * &b[j][k]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Grid twisted Dirac operator
/// `(𝐷̸ψ)_β = ½ ω_k (γ_k I)_β^α ψ_α − (γ_k)_β^α ∇_k ψ_α`, with
/// `∇_k ψ^b = λ^{-2}(∂_k ψ^b + Γ^b_{ac} ∂_k φ^a ψ^c)`.
pub fn twisted_dirac(
    patch: &ReducedPatch,
    model: &dyn TargetGeometry,
    map: &ComponentMap,
) -> Result<Vec<Spinor>> {
    let data = FieldData::new(patch, model, map)?;
    Ok(dirac_with(patch, &data, &map.psi))
}

fn dirac_with(patch: &ReducedPatch, data: &FieldData, psi: &[Spinor]) -> Vec<Spinor> {
    let sc = SpinConventions::standard();
    let n = patch.len();
    let dim = data.dphi[0][0].len();
    let n_gen = psi[0][0][0].n_gen();
    // dpsi[k][α][b][p]
    let mut dpsi = vec![vec![vec![Vec::new(); dim]; 2]; 2];
    for (k, dk) in dpsi.iter_mut().enumerate() {
        for (alpha, da) in dk.iter_mut().enumerate() {
            for (b, db) in da.iter_mut().enumerate() {
                let col: Vec<Grassmann<f64>> = psi.iter().map(|s| s[alpha][b].clone()).collect();
                *db = patch.deriv_grassmann(&col, k);
            }
        }
    }
    let omega = patch.spin_connection();
    let gi = [m2_mul(&sc.gamma[0], &sc.i), m2_mul(&sc.gamma[1], &sc.i)];
    (0..n)
        .map(|p| {
            let mut out = spinor_zero(dim, n_gen);
            for k in 0..2 {
                let g = data.geos[p].gamma_along(&data.dphi[k][p]);
                let nab: Spinor = std::array::from_fn(|alpha| {
                    let d: GVec = (0..dim).map(|b| dpsi[k][alpha][b][p].clone()).collect();
                    let conn = mat_apply(&g, &psi[p][alpha]);
                    super::gvec_scale(&super::gvec_add(&d, &conn), data.lam2[p])
                });
                pair_axpy(&mut out, -1.0, &apply_m2(&sc.gamma[k], &nab));
                pair_axpy(&mut out, 0.5 * omega[k][p], &apply_m2(&gi[k], &psi[p]));
            }
            out
        })
        .collect()
}

/// `∂̄_J φ = ½(1 + I⊗J) dφ` with `dφ_k = λ^{-2} ∂_k φ`.
pub fn dbar_phi(
    patch: &ReducedPatch,
    model: &dyn TargetGeometry,
    map: &ComponentMap,
) -> Result<Vec<Form>> {
    let data = FieldData::new(patch, model, map)?;
    Ok((0..patch.len())
        .map(|p| {
            pair_scale(
                &one_plus_ij(&data.dphi_frame(p, map.n_gen), &data.geos[p].j, 1.0),
                0.5,
            )
        })
        .collect())
}

/// Four grid fields: spinor, target vector, one-form, spinor.
#[derive(Clone, Debug, PartialEq)]
pub struct Components {
    pub c1: Vec<Spinor>,
    pub c2: Vec<GVec>,
    pub c3: Vec<Form>,
    pub c4: Vec<Spinor>,
}

impl Components {
    pub fn max_abs(&self) -> [f64; 4] {
        let m = |v: &[[GVec; 2]]| v.iter().fold(0.0, |a: f64, s| a.max(pair_max_abs(s)));
        [
            m(&self.c1),
            self.c2.iter().fold(0.0, |a: f64, s| a.max(gvec_max_abs(s))),
            m(&self.c3),
            m(&self.c4),
        ]
    }

    /// Parity of each block, `None` for an identically zero block.
    pub fn parities(&self) -> [Option<Parity>; 4] {
        fn join<'a>(it: impl Iterator<Item = &'a Grassmann<f64>>) -> Option<Parity> {
            let mut out = None;
            for g in it.filter(|g| !g.is_zero()) {
                let p = g.parity();
                out = match out {
                    None => Some(p),
                    Some(q) if q == p => Some(q),
                    Some(_) => Some(Parity::Mixed),
                };
            }
            out
        }
        let pairs = |v: &[[GVec; 2]]| join(v.iter().flatten().flatten());
        [
            pairs(&self.c1),
            join(self.c2.iter().flatten()),
            pairs(&self.c3),
            pairs(&self.c4),
        ]
    }

    /// `self − other`, block by block.
    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, 1.0, -1.0)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        let pairs = |x: &[[GVec; 2]], y: &[[GVec; 2]]| -> Vec<[GVec; 2]> {
            x.iter()
                .zip(y)
                .map(|(s, t)| pair_add(&pair_scale(s, a), &pair_scale(t, b)))
                .collect()
        };
        Components {
            c1: pairs(&self.c1, &other.c1),
            c2: self
                .c2
                .iter()
                .zip(&other.c2)
                .map(|(s, t)| super::gvec_add(&super::gvec_scale(s, a), &super::gvec_scale(t, b)))
                .collect(),
            c3: pairs(&self.c3, &other.c3),
            c4: pairs(&self.c4, &other.c4),
        }
    }

    /// Multiplies every point of every block by a grid function, one per block.
    pub fn weighted(&self, w: [&[f64]; 4]) -> Self {
        let pairs = |x: &[[GVec; 2]], w: &[f64]| -> Vec<[GVec; 2]> {
            x.iter().zip(w).map(|(s, c)| pair_scale(s, *c)).collect()
        };
        Components {
            c1: pairs(&self.c1, w[0]),
            c2: self
                .c2
                .iter()
                .zip(w[1])
                .map(|(s, c)| super::gvec_scale(s, *c))
                .collect(),
            c3: pairs(&self.c3, w[2]),
            c4: pairs(&self.c4, w[3]),
        }
    }

    /// Pointwise max-norm of each block, rows `p,x1,x2,c1,c2,c3,c4`.
    pub fn to_csv(&self, patch: &ReducedPatch) -> String {
        let mut s = String::from("p,x1,x2,c1,c2,c3,c4\n");
        for p in 0..self.c1.len() {
            let (x1, x2) = patch.coords(p);
            s.push_str(&format!(
                "{p},{x1},{x2},{:e},{:e},{:e},{:e}\n",
                pair_max_abs(&self.c1[p]),
                gvec_max_abs(&self.c2[p]),
                pair_max_abs(&self.c3[p]),
                pair_max_abs(&self.c4[p])
            ));
        }
        s
    }
}

/// `T_k = Σ ε^{νμ} (γ_k)_ν^α J 𝔧_μ ψ_α`, the expansion of `Tr_{g_S*}(γ ⊗ 𝔧J)ψ`.
fn t_term(jj: &[GMat; 2], psi: &Spinor, geo: &PointGeometry) -> Form {
    let sc = SpinConventions::standard();
    let dim = psi[0].len();
    let n_gen = psi[0][0].n_gen();
    let mut out = [gvec_zero(dim, n_gen), gvec_zero(dim, n_gen)];
    if jj.iter().all(gmat_is_zero) {
        return out;
    }
    for (k, o) in out.iter_mut().enumerate() {
        for nu in 0..2 {
            for mu in 0..2 {
                let e = sc.eps[nu][mu];
                if e == 0 {
                    continue;
                }
                for alpha in 0..2 {
                    let g = sc.gamma[k][nu][alpha];
                    if g != 0 {
                        let v = mat_apply(&geo.j, &gmat_apply(&jj[mu], &psi[alpha]));
                        gvec_axpy(o, (e * g) as f64, &v);
                    }
                }
            }
        }
    }
    out
}

fn chi_psi(chi: &GravitinoPoint, psi: &Spinor) -> Form {
    pair_q_psi(chi, psi)
}

fn blank(patch: &ReducedPatch, dim: usize, n_gen: usize) -> Components {
    let n = patch.len();
    Components {
        c1: vec![spinor_zero(dim, n_gen); n],
        c2: vec![gvec_zero(dim, n_gen); n],
        c3: vec![spinor_zero(dim, n_gen); n],
        c4: vec![spinor_zero(dim, n_gen); n],
    }
}

fn check_chi(patch: &ReducedPatch, map: &ComponentMap, chi: &Gravitino) -> Result<()> {
    if chi.chi.len() != patch.len() {
        return Err(Error::Shape(format!(
            "χ has {} points, grid has {}",
            chi.chi.len(),
            patch.len()
        )));
    }
    if chi.n_gen != map.n_gen {
        return Err(Error::GeneratorMismatch {
            left: map.n_gen,
            right: chi.n_gen,
        });
    }
    if let Some(g) = chi
        .chi
        .iter()
        .flatten()
        .flatten()
        .find(|g| !g.is_zero() && g.parity() != Parity::Odd)
    {
        return Err(Error::Parity(format!("χ is not odd: {g}")));
    }
    Ok(())
}

/// The four component fields of `D̄_J Φ`:
///
/// * `C1 = ½(1 + I⊗J)ψ`
/// * `C2 = ¼F − ⅛ ε^{αμ}(δ_α^β + I_α^β J) J 𝔧_μ ψ_β`
/// * `C3 = −½(1 + I⊗J)(dφ + ⟨χ,ψ⟩ − ¼T)`
/// * `C4 = −½(1 + I⊗J)(𝐷̸ψ − 2⟨∨Qχ,dφ⟩ + ‖Qχ‖²ψ + δ_γχ⊗F − ⅙SR(ψ) + ½(J𝔧₃₄ − ¼ε^{μν}𝔧_μ𝔧_ν)ψ
///   + ½ γ_k^{βα} J𝔧_α(dφ + ⟨χ,ψ⟩)_k − ½𝔧JF)`
pub fn prop_components(
    patch: &ReducedPatch,
    model: &dyn TargetGeometry,
    map: &ComponentMap,
    chi: &Gravitino,
) -> Result<Components> {
    check_chi(patch, map, chi)?;
    let data = FieldData::new(patch, model, map)?;
    let dirac = dirac_with(patch, &data, &map.psi);
    let (_, q) = chi.project();
    let sc = SpinConventions::standard();
    let dim = model.dim();
    let n_gen = map.n_gen;
    let mut out = blank(patch, dim, n_gen);
    for p in 0..patch.len() {
        let geo = &data.geos[p];
        let j = &geo.j;
        let psi = &map.psi[p];
        let f = &map.f[p];
        let jj = j_endomorphism(psi, geo);
        let kahler_p = jj.iter().all(gmat_is_zero) && geo.nabla_j.iter().all(|m| m.amax() == 0.0);
        out.c1[p] = pair_scale(&one_plus_ij(psi, j, 1.0), 0.5);

        let mut c2 = super::gvec_scale(f, 0.25);
        if !kahler_p {
            for alpha in 0..2 {
                for mu in 0..2 {
                    let e = sc.eps[alpha][mu];
                    if e == 0 {
                        continue;
                    }
                    for beta in 0..2 {
                        let v = mat_apply(j, &gmat_apply(&jj[mu], &psi[beta]));
                        if alpha == beta {
                            gvec_axpy(&mut c2, -0.125 * e as f64, &v);
                        }
                        let ib = sc.i[alpha][beta];
                        if ib != 0 {
                            gvec_axpy(&mut c2, -0.125 * (e * ib) as f64, &mat_apply(j, &v));
                        }
                    }
                }
            }
        }
        out.c2[p] = c2;

        let dphi = data.dphi_frame(p, n_gen);
        let v = pair_add(&dphi, &chi_psi(&chi.chi[p], psi));
        let t = t_term(&jj, psi, geo);
        let mut c3 = v.clone();
        pair_axpy(&mut c3, -0.25, &t);
        out.c3[p] = pair_scale(&one_plus_ij(&c3, j, 1.0), -0.5);

        let mut inner = dirac[p].clone();
        pair_axpy(&mut inner, -2.0, &vee_q(&q.chi[p], &dphi));
        inner = pair_add(&inner, &q_norm_sq(&q.chi[p], psi));
        let s = lower_spinor(&delta_gamma(&chi.chi[p]));
        for beta in 0..2 {
            if !s[beta].is_zero() {
                let sf: GVec = f.iter().map(|x| &s[beta] * x).collect();
                inner[beta] = super::gvec_add(&inner[beta], &sf);
            }
        }
        pair_axpy(
            &mut inner,
            -1.0 / 6.0,
            &sr_contraction(psi, &geo.curvature, geo.ninv.as_ref()),
        );
        if !kahler_p {
            let x = j_mixed(geo, psi, f, &jj);
            let xpsi = [gmat_apply(&x, &psi[0]), gmat_apply(&x, &psi[1])];
            pair_axpy(&mut inner, 0.5, &xpsi);
            for beta in 0..2 {
                for k in 0..2 {
                    for alpha in 0..2 {
                        let g = sc.gamma[k][beta][alpha];
                        if g != 0 {
                            let w = mat_apply(j, &gmat_apply(&jj[alpha], &v[k]));
                            gvec_axpy(&mut inner[beta], 0.5 * g as f64, &w);
                        }
                    }
                }
                let jf = mat_apply(j, f);
                gvec_axpy(&mut inner[beta], -0.5, &gmat_apply(&jj[beta], &jf));
            }
        }
        out.c4[p] = pair_scale(&one_plus_ij(&inner, j, 1.0), -0.5);
    }
    Ok(out)
}

/// `J𝔧₃₄ − ¼ε^{μν}𝔧_μ𝔧_ν` with `𝔧₃₄ = ∇_F J − ½ ε^{μν} ψ_μ^a ψ_ν^b ∇²_{ab} J`.
fn j_mixed(geo: &PointGeometry, psi: &Spinor, f: &GVec, jj: &[GMat; 2]) -> GMat {
    let dim = geo.j.nrows();
    let n_gen = psi[0][0].n_gen();
    let mut j34 = vec![vec![Grassmann::zero(n_gen); dim]; dim];
    let add = |m: &mut GMat, coef: &Grassmann<f64>, mat: &DMatrix<f64>, s: f64| {
        if coef.is_zero() {
            return;
        }
        for (b, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                let v = mat[(b, c)] * s;
                if v != 0.0 {
                    *e = &*e + &coef.scale(&v);
                }
            }
        }
    };
    for a in 0..dim {
        add(&mut j34, &f[a], &geo.nabla_j[a], 1.0);
        for b in 0..dim {
            let pp = &(&psi[0][a] * &psi[1][b]) - &(&psi[1][a] * &psi[0][b]);
            add(&mut j34, &pp, &geo.nabla2_j[a][b], -0.5);
        }
    }
    let jreal: GMat = (0..dim)
        .map(|b| {
            (0..dim)
                .map(|c| Grassmann::scalar(n_gen, geo.j[(b, c)]))
                .collect()
        })
        .collect();
    let mut out = gmat_mul(&jreal, &j34);
    let comm = {
        let a = gmat_mul(&jj[0], &jj[1]);
        let b = gmat_mul(&jj[1], &jj[0]);
        a.iter()
            .zip(&b)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u - v).collect())
            .collect::<GMat>()
    };
    for (row, crow) in out.iter_mut().zip(&comm) {
        for (e, c) in row.iter_mut().zip(crow) {
            *e = &*e - &c.scale(&0.25);
        }
    }
    out
}

/// The component equations in residual form:
///
/// * `R1 = (1 + I⊗J)ψ`
/// * `R2 = F`
/// * `R3 = ∂̄_J φ + ⟨Qχ,ψ⟩ + ¼T`
/// * `R4 = 𝐷̸ψ − 2⟨∨Qχ,dφ⟩ + ‖Qχ‖²ψ − ⅓SR(ψ)`
pub fn residual_components(
    patch: &ReducedPatch,
    model: &dyn TargetGeometry,
    map: &ComponentMap,
    chi: &Gravitino,
) -> Result<Components> {
    check_chi(patch, map, chi)?;
    let data = FieldData::new(patch, model, map)?;
    let dirac = dirac_with(patch, &data, &map.psi);
    let (_, q) = chi.project();
    let dim = model.dim();
    let mut out = blank(patch, dim, map.n_gen);
    for p in 0..patch.len() {
        let geo = &data.geos[p];
        let psi = &map.psi[p];
        out.c1[p] = one_plus_ij(psi, &geo.j, 1.0);
        out.c2[p] = map.f[p].clone();
        let dphi = data.dphi_frame(p, map.n_gen);
        let mut c3 = pair_scale(&one_plus_ij(&dphi, &geo.j, 1.0), 0.5);
        c3 = pair_add(&c3, &pair_q_psi(&q.chi[p], psi));
        let jj = j_endomorphism(psi, geo);
        pair_axpy(&mut c3, 0.25, &t_term(&jj, psi, geo));
        out.c3[p] = c3;
        let mut c4 = dirac[p].clone();
        pair_axpy(&mut c4, -2.0, &vee_q(&q.chi[p], &dphi));
        c4 = pair_add(&c4, &q_norm_sq(&q.chi[p], psi));
        pair_axpy(
            &mut c4,
            -1.0 / 3.0,
            &sr_contraction(psi, &geo.curvature, geo.ninv.as_ref()),
        );
        out.c4[p] = c4;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::{standard_j, AlmostKahlerModel};
    use std::f64::consts::PI;

    fn gen(n: usize, i: usize) -> Grassmann<f64> {
        Grassmann::generator(n, i).unwrap()
    }

    /// Holomorphic linear map `φ = a·z` into `ℂ` on the torus, as drift.
    fn holomorphic_map(m: usize, n_gen: usize, a: (f64, f64)) -> ComponentMap {
        let mut map = ComponentMap::zero(m * m, 2, n_gen);
        // φ⁰ + iφ¹ = (a0 + i a1)(x¹ + i x²)
        map.drift = vec![[a.0, -a.1], [a.1, a.0]];
        map
    }

    #[test]
    fn constant_data_has_zero_residual() {
        let patch = ReducedPatch::flat(8).unwrap();
        let model = AlmostKahlerModel::flat(2);
        let mut map = ComponentMap::zero(64, 4, 2);
        for v in map.phi.iter_mut() {
            *v = vec![0.3, -1.0, 2.0, 0.5];
        }
        let r = residual_components(&patch, &model, &map, &Gravitino::zero(64, 2)).unwrap();
        assert_eq!(r.max_abs(), [0.0; 4]);
    }

    #[test]
    fn holomorphic_phi_is_a_solution() {
        let patch = ReducedPatch::flat(16).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let map = holomorphic_map(16, 2, (1.5, -0.5));
        let r = residual_components(&patch, &model, &map, &Gravitino::zero(256, 2)).unwrap();
        assert!(r.max_abs().iter().all(|x| *x < 1e-12), "{:?}", r.max_abs());
        let anti = {
            let mut m = map.clone();
            m.drift = vec![[1.0, 0.0], [0.0, -1.0]];
            m
        };
        let r = residual_components(&patch, &model, &anti, &Gravitino::zero(256, 2)).unwrap();
        assert!(r.max_abs()[2] > 0.5);
    }

    #[test]
    fn plane_wave_matches_fourier_symbol() {
        let m = 16;
        let patch = ReducedPatch::flat(m).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let mut map = ComponentMap::zero(m * m, 2, 1);
        let l = gen(1, 1);
        let (k1, k2) = (2.0, -1.0);
        let c = [[0.5, -1.0], [2.0, 0.25]];
        for p in 0..m * m {
            let (x1, x2) = patch.coords(p);
            let s = (2.0 * PI * (k1 * x1 + k2 * x2)).sin();
            for alpha in 0..2 {
                for b in 0..2 {
                    map.psi[p][alpha][b] = l.scale(&(c[alpha][b] * s));
                }
            }
        }
        let d = twisted_dirac(&patch, &model, &map).unwrap();
        let sc = SpinConventions::standard();
        for p in 0..m * m {
            let (x1, x2) = patch.coords(p);
            let cs = (2.0 * PI * (k1 * x1 + k2 * x2)).cos();
            for beta in 0..2 {
                for b in 0..2 {
                    let mut want = 0.0;
                    for (k, kk) in [k1, k2].into_iter().enumerate() {
                        for alpha in 0..2 {
                            want -=
                                sc.gamma[k][beta][alpha] as f64 * 2.0 * PI * kk * cs * c[alpha][b];
                        }
                    }
                    assert!((d[p][beta][b].coeff(1) - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn holomorphic_section_on_conformal_patch() {
        // ψ_α = c_α / λ with ψ₄ = Jψ₃ solves the equations for a constant map.
        let m = 32;
        let patch = ReducedPatch::from_fn(m, |x, y| {
            1.0 + 0.1 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos()
        })
        .unwrap();
        let model = AlmostKahlerModel::flat(1);
        let j = standard_j(1);
        let mut map = ComponentMap::zero(m * m, 2, 2);
        let c3: GVec = vec![gen(2, 1), gen(2, 2).scale(&-2.0)];
        let c4 = mat_apply(&j, &c3);
        for p in 0..m * m {
            let w = 1.0 / patch.lambda()[p];
            map.psi[p] = [
                super::super::gvec_scale(&c3, w),
                super::super::gvec_scale(&c4, w),
            ];
        }
        let r = residual_components(&patch, &model, &map, &Gravitino::zero(m * m, 2)).unwrap();
        let mx = r.max_abs();
        assert!(mx[0] < 1e-14 && mx[1] == 0.0 && mx[2] == 0.0, "{mx:?}");
        assert!(mx[3] < 1e-4, "{mx:?}");
    }

    #[test]
    fn parities_of_blocks() {
        let m = 8;
        let patch = ReducedPatch::flat(m).unwrap();
        let model = AlmostKahlerModel::fubini_study_cp1();
        let mut map = ComponentMap::zero(m * m, 2, 3);
        let mut chi = Gravitino::zero(m * m, 3);
        for p in 0..m * m {
            let (x1, x2) = patch.coords(p);
            map.phi[p] = vec![0.2 * (2.0 * PI * x1).sin(), 0.1 * (2.0 * PI * x2).cos()];
            map.psi[p][0][1] = gen(3, 1).scale(&(1.0 + x1));
            map.psi[p][1][0] = gen(3, 2).scale(&x2);
            map.f[p][0] = (&gen(3, 1) * &gen(3, 3)).scale(&0.5);
            chi.chi[p][0][1] = gen(3, 3);
        }
        let r = residual_components(&patch, &model, &map, &chi).unwrap();
        let par = r.parities();
        assert_eq!(
            par,
            [
                Some(Parity::Odd),
                Some(Parity::Even),
                Some(Parity::Even),
                Some(Parity::Odd)
            ]
        );
        let c = prop_components(&patch, &model, &map, &chi).unwrap();
        assert_eq!(c.parities(), par);
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let patch = ReducedPatch::flat(4).unwrap();
        let model = AlmostKahlerModel::flat(1);
        let map = ComponentMap::zero(16, 4, 1);
        assert!(matches!(
            residual_components(&patch, &model, &map, &Gravitino::zero(16, 1)),
            Err(Error::Shape(_))
        ));
        let map = ComponentMap::zero(16, 2, 1);
        assert!(matches!(
            residual_components(&patch, &model, &map, &Gravitino::zero(9, 1)),
            Err(Error::Shape(_))
        ));
    }

    /// Flat `ℝ⁴` with a point-dependent orthogonal `J`, so `∇J = ∂J ≠ 0`.
    struct Twisted;

    impl Twisted {
        fn rot(y: &[f64]) -> DMatrix<f64> {
            let (c, s) = (y[0].cos(), y[0].sin());
            let mut r = DMatrix::identity(4, 4);
            r[(1, 1)] = c;
            r[(1, 2)] = -s;
            r[(2, 1)] = s;
            r[(2, 2)] = c;
            r
        }
    }

    impl TargetGeometry for Twisted {
        fn dim(&self) -> usize {
            4
        }
        fn check_domain(&self, _y: &[f64]) -> Result<()> {
            Ok(())
        }
        fn j(&self, y: &[f64]) -> DMatrix<f64> {
            let r = Self::rot(y);
            &r * standard_j(2) * r.transpose()
        }
        fn metric(&self, _y: &[f64]) -> DMatrix<f64> {
            DMatrix::identity(4, 4)
        }
        fn christoffel(&self, _y: &[f64]) -> Christoffel {
            vec![vec![vec![0.0; 4]; 4]; 4]
        }
        fn nabla_j(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
            let r = Self::rot(y);
            let (c, s) = (y[0].cos(), y[0].sin());
            let mut dr = DMatrix::zeros(4, 4);
            dr[(1, 1)] = -s;
            dr[(1, 2)] = -c;
            dr[(2, 1)] = c;
            dr[(2, 2)] = -s;
            let j0 = standard_j(2);
            let mut out = vec![DMatrix::zeros(4, 4); 4];
            out[0] = &dr * &j0 * r.transpose() + &r * &j0 * dr.transpose();
            out
        }
        fn nabla2_j(&self, _y: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
            vec![vec![DMatrix::zeros(4, 4); 4]; 4]
        }
        fn curvature(&self, _y: &[f64]) -> CurvatureTensor {
            CurvatureTensor::zero(4)
        }
    }

    #[test]
    fn j_endomorphism_anticommutes_with_j() {
        let model = Twisted;
        let geo = PointGeometry::at(&model, &[0.7, 0.0, 0.0, 0.0]).unwrap();
        let psi: Spinor = [
            vec![gen(2, 1), gen(2, 2), gen(2, 1).scale(&0.5), gen(2, 2)],
            vec![gen(2, 2).scale(&-1.0), gen(2, 1), gen(2, 2), gen(2, 1)],
        ];
        let jj = j_endomorphism(&psi, &geo);
        assert!(!gmat_is_zero(&jj[0]));
        for m in &jj {
            for c in 0..4 {
                let col: GVec = (0..4).map(|b| m[b][c].clone()).collect();
                let left = mat_apply(&geo.j, &col);
                // (𝔧J)[·][c] = Σ_d 𝔧[·][d] J[d][c]
                let mut right = gvec_zero::<f64>(4, 2);
                for d in 0..4 {
                    let coldd: GVec = (0..4).map(|b| m[b][d].clone()).collect();
                    gvec_axpy(&mut right, geo.j[(d, c)], &coldd);
                }
                assert!(gvec_max_abs(&super::super::gvec_add(&left, &right)) < 1e-8);
            }
        }
        let flat = PointGeometry::at(&AlmostKahlerModel::flat(2), &[0.0; 4]).unwrap();
        assert!(j_endomorphism(&psi, &flat).iter().all(gmat_is_zero));
    }

    #[test]
    fn dirac_commutes_with_ij_up_to_nabla_j() {
        let m = 32;
        let patch = ReducedPatch::new(m, vec![1.2; m * m]).unwrap();
        let model = Twisted;
        let mut map = ComponentMap::zero(m * m, 4, 2);
        for p in 0..m * m {
            let (x1, x2) = patch.coords(p);
            map.phi[p] = vec![
                0.4 * (2.0 * PI * x1).sin(),
                0.0,
                0.3 * (2.0 * PI * x2).cos(),
                0.0,
            ];
            for b in 0..4 {
                map.psi[p][0][b] = gen(2, 1).scale(&((2.0 * PI * (x1 + b as f64 * x2)).cos()));
                map.psi[p][1][b] = gen(2, 2).scale(&((2.0 * PI * x2).sin() * (b as f64 - 1.5)));
            }
        }
        let data = FieldData::new(&patch, &model, &map).unwrap();
        let d = dirac_with(&patch, &data, &map.psi);
        let sc = SpinConventions::standard();
        for s in [1.0, -1.0] {
            let twisted: Vec<Spinor> = (0..m * m)
                .map(|p| one_plus_ij(&map.psi[p], &data.geos[p].j, -s))
                .collect();
            let dt = dirac_with(&patch, &data, &twisted);
            for p in 0..m * m {
                let geo = &data.geos[p];
                let lhs = super::super::gvec_sub(&one_plus_ij(&d[p], &geo.j, s)[0], &dt[p][0]);
                let lhs1 = super::super::gvec_sub(&one_plus_ij(&d[p], &geo.j, s)[1], &dt[p][1]);
                // ∓ γ^k I (∇_k J) ψ with ∇_k J = λ^{-2} ∂_k φ^a ∇_a J
                let mut rhs = spinor_zero(4, 2);
                for k in 0..2 {
                    let nj = geo.nabla_j_along(&data.dphi[k][p]) * data.lam2[p];
                    let v = [
                        mat_apply(&nj, &map.psi[p][0]),
                        mat_apply(&nj, &map.psi[p][1]),
                    ];
                    let gi = m2_mul(&sc.gamma[k], &sc.i);
                    pair_axpy(&mut rhs, -s, &apply_m2(&gi, &v));
                }
                let dev = gvec_max_abs(&super::super::gvec_sub(&lhs, &rhs[0]))
                    .max(gvec_max_abs(&super::super::gvec_sub(&lhs1, &rhs[1])));
                assert!(dev < 1e-8, "s={s} p={p} dev={dev}");
            }
        }
    }

    #[test]
    fn kahler_collapse_kills_curvature_term() {
        let model = AlmostKahlerModel::fubini_study_cp1();
        let y = [0.3, -0.2];
        let geo = PointGeometry::at(&model, &y).unwrap();
        let n = 3;
        let c3: GVec = vec![&gen(n, 1) + &gen(n, 3), gen(n, 2).scale(&0.5)];
        let psi: Spinor = [c3.clone(), mat_apply(&geo.j, &c3)];
        assert!(pair_max_abs(&one_plus_ij(&psi, &geo.j, 1.0)) < 1e-15);
        let sr = sr_contraction(&psi, &geo.curvature, geo.ninv.as_ref());
        assert!(pair_max_abs(&sr) < 1e-12, "{}", pair_max_abs(&sr));
        assert!(j_endomorphism(&psi, &geo).iter().all(gmat_is_zero));
    }
}
