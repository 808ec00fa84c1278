//! Component fields of a map from a super Riemann surface and the component form of
//! `D̄_J Φ` on a periodic conformally flat patch.
//!
//! Index conventions: spinor indices `α ∈ {3, 4}` are stored as `0, 1`, form indices
//! `k ∈ {1, 2}` as `0, 1`. Lower-index spinor objects are acted on by matrices from the
//! left, `(Aψ)_β = A[β][α] ψ_α`; the gravitino `χ_k^κ` carries an upper spinor index and
//! is acted on from the right, `(χ_k A)^λ = χ_k^κ A[κ][λ]`.

mod checks;
mod curvature;
mod energy;
mod equations;
mod fields;
mod grid;
mod spin;

pub use checks::{
    linearization_fd_check, weyl_covariance_check, BlockComparison, Directions,
    LinearizationReport, WeylReport, FD_TOL, LINEARIZATION_TOL, SPECTRAL_TOL,
};
pub use curvature::{
    curvature_apply, fierz_check, nabla_sr_contraction, random_odd_spinor, sr_contraction,
    FierzReport,
};
pub use energy::energy_identity_residual;
pub use equations::{
    dbar_phi, j_endomorphism, prop_components, residual_components, twisted_dirac, Components,
    PointGeometry,
};
pub use fields::{
    read_component_file, write_component_file, ComponentFile, ComponentMap, Gravitino,
};
pub use grid::ReducedPatch;
pub use spin::{
    delta_gamma, lower_spinor, pair_q_psi, project_pq, q_norm_sq, vee_q, SpinConventions, M2,
};

use nalgebra::DMatrix;

use crate::grassmann::Grassmann;
use crate::scalar::Scalar;

/// Target-vector with Grassmann entries.
pub type GVec<T = f64> = Vec<Grassmann<T>>;
/// `ψ_α^b`, indexed `[α][b]`.
pub type Spinor<T = f64> = [GVec<T>; 2];
/// `V_k^b`, indexed `[k][b]`.
pub type Form<T = f64> = [GVec<T>; 2];
/// `χ_k^κ`, indexed `[k][κ]`.
pub type GravitinoPoint<T = f64> = [[Grassmann<T>; 2]; 2];
/// Odd endomorphism of the target, indexed `[b][c]`.
pub type GMat<T = f64> = Vec<Vec<Grassmann<T>>>;

pub(crate) fn gvec_zero<T: Scalar>(dim: usize, n_gen: usize) -> GVec<T> {
    vec![Grassmann::zero(n_gen); dim]
}

pub(crate) fn spinor_zero<T: Scalar>(dim: usize, n_gen: usize) -> Spinor<T> {
    [gvec_zero(dim, n_gen), gvec_zero(dim, n_gen)]
}

pub(crate) fn gvec_add<T: Scalar>(a: &GVec<T>, b: &GVec<T>) -> GVec<T> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn gvec_sub<T: Scalar>(a: &GVec<T>, b: &GVec<T>) -> GVec<T> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn gvec_scale<T: Scalar>(a: &GVec<T>, s: f64) -> GVec<T> {
    let c = T::from_f64(s);
    a.iter().map(|x| x.scale(&c)).collect()
}

pub(crate) fn gvec_axpy<T: Scalar>(acc: &mut GVec<T>, s: f64, v: &GVec<T>) {
    if s == 0.0 {
        return;
    }
    let c = T::from_f64(s);
    for (a, x) in acc.iter_mut().zip(v) {
        *a = &*a + &x.scale(&c);
    }
}

/// `(Mv)^b = Σ_c M[b][c] v^c` for a real matrix.
pub(crate) fn mat_apply<T: Scalar>(m: &DMatrix<f64>, v: &GVec<T>) -> GVec<T> {
    let n_gen = v.first().map_or(0, |g| g.n_gen());
    (0..m.nrows())
        .map(|b| {
            let mut acc = Grassmann::zero(n_gen);
            for (c, x) in v.iter().enumerate() {
                let e = m[(b, c)];
                if e != 0.0 {
                    acc = &acc + &x.scale(&T::from_f64(e));
                }
            }
            acc
        })
        .collect()
}

/// `(𝔧 v)^b = Σ_c 𝔧[b][c] v^c`, Grassmann order `𝔧` then `v`.
pub(crate) fn gmat_apply<T: Scalar>(m: &GMat<T>, v: &GVec<T>) -> GVec<T> {
    m.iter()
        .map(|row| {
            let mut acc = Grassmann::zero(v[0].n_gen());
            for (e, x) in row.iter().zip(v) {
                if !e.is_zero() && !x.is_zero() {
                    acc = &acc + &(e * x);
                }
            }
            acc
        })
        .collect()
}

pub(crate) fn gvec_from_f64<T: Scalar>(v: &[f64], n_gen: usize) -> GVec<T> {
    v.iter()
        .map(|x| Grassmann::scalar(n_gen, T::from_f64(*x)))
        .collect()
}

pub(crate) fn gvec_max_abs<T: Scalar>(v: &GVec<T>) -> f64 {
    v.iter().fold(0.0, |m, g| m.max(g.max_abs()))
}

/// `(A ⊗ 1)s` for a 2×2 integer matrix acting on the first index.
pub(crate) fn apply_m2<T: Scalar>(m: &M2, s: &[GVec<T>; 2]) -> [GVec<T>; 2] {
    let row = |i: usize| {
        let mut acc: GVec<T> = s[0].iter().map(|g| Grassmann::zero(g.n_gen())).collect();
        for j in 0..2 {
            gvec_axpy(&mut acc, m[i][j] as f64, &s[j]);
        }
        acc
    };
    [row(0), row(1)]
}

/// `(1 + s·I⊗J)v` on spinors or one-forms (both use `I = [[0,1],[-1,0]]`).
pub(crate) fn one_plus_ij<T: Scalar>(v: &[GVec<T>; 2], j: &DMatrix<f64>, s: f64) -> [GVec<T>; 2] {
    let i = SpinConventions::standard().i;
    let iv = apply_m2(&i, v);
    let mut out = v.clone();
    for a in 0..2 {
        gvec_axpy(&mut out[a], s, &mat_apply(j, &iv[a]));
    }
    out
}

pub(crate) fn pair_add<T: Scalar>(a: &[GVec<T>; 2], b: &[GVec<T>; 2]) -> [GVec<T>; 2] {
    [gvec_add(&a[0], &b[0]), gvec_add(&a[1], &b[1])]
}

pub(crate) fn pair_scale<T: Scalar>(a: &[GVec<T>; 2], s: f64) -> [GVec<T>; 2] {
    [gvec_scale(&a[0], s), gvec_scale(&a[1], s)]
}

pub(crate) fn pair_axpy<T: Scalar>(acc: &mut [GVec<T>; 2], s: f64, v: &[GVec<T>; 2]) {
    gvec_axpy(&mut acc[0], s, &v[0]);
    gvec_axpy(&mut acc[1], s, &v[1]);
}

pub(crate) fn pair_max_abs<T: Scalar>(a: &[GVec<T>; 2]) -> f64 {
    gvec_max_abs(&a[0]).max(gvec_max_abs(&a[1]))
}
