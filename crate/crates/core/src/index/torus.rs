//! Twisted Dirac operator on the flat square torus with a flat target, assembled from the grid operator.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::component::{twisted_dirac, ComponentMap, ReducedPatch, SpinConventions};
use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::target::{standard_j, AlmostKahlerModel};

use super::{
    build_dbar_sphere, dirac10_index, numeric_index, Linearity, OperatorMatrix, DEFAULT_THRESHOLD,
};

/// Generators used per batch of basis columns.
const BATCH: usize = 20;

#[derive(Clone, Debug)]
pub struct TorusDirac {
    /// Fourier cutoff; the grid has `2M + 1` points per side.
    pub cutoff: usize,
    pub n_target: usize,
    /// Full `𝐷̸` on real fields `ψ_α^b`.
    pub full: OperatorMatrix,
    pub dirac10: OperatorMatrix,
    pub dirac01: OperatorMatrix,
    /// `max |A + Aᵀ|` of the full operator.
    pub antisymmetry: f64,
}

/// Builds `𝐷̸` for the target `ℂⁿ` with Fourier modes `|k_i| ≤ M`.
pub fn build_dirac_torus(n_target: usize, cutoff: usize) -> Result<TorusDirac> {
    if cutoff < 4 {
        return Err(Error::Resolution(cutoff));
    }
    if n_target == 0 {
        return Err(Error::InvalidModel("target rank must be positive".into()));
    }
    let m = 2 * cutoff + 1;
    let patch = ReducedPatch::flat(m)?;
    let model = AlmostKahlerModel::flat(n_target);
    let dim = 2 * n_target;
    let fibre = 2 * dim;
    let size = m * m * fibre;
    let mut a = DMatrix::zeros(size, size);
    let cols: Vec<usize> = (0..size).collect();
    for chunk in cols.chunks(BATCH) {
        let mut map = ComponentMap::zero(m * m, dim, chunk.len());
        for (g, &col) in chunk.iter().enumerate() {
            let (p, r) = (col / fibre, col % fibre);
            map.psi[p][r / dim][r % dim] = Grassmann::generator(chunk.len(), g + 1)?;
        }
        let out = twisted_dirac(&patch, &model, &map)?;
        for (p, s) in out.iter().enumerate() {
            for (alpha, v) in s.iter().enumerate() {
                for (b, e) in v.iter().enumerate() {
                    for (mask, c) in e.terms() {
                        let g = mask.trailing_zeros() as usize;
                        a[(p * fibre + alpha * dim + b, chunk[g])] = *c;
                    }
                }
            }
        }
    }
    let antisymmetry = (&a + a.transpose()).amax();

    // pointwise I⊗J, eigenvalue −1 on S^{1,0} and +1 on S^{0,1}
    let i = SpinConventions::standard().i;
    let j = standard_j(n_target);
    let k = DMatrix::from_fn(fibre, fibre, |r, c| {
        i[r / dim][c / dim] as f64 * j[(r % dim, c % dim)]
    });
    let eig = SymmetricEigen::new(k);
    let pick = |sign: f64| -> DMatrix<f64> {
        let cols: Vec<_> = (0..fibre)
            .filter(|&c| (eig.eigenvalues[c] - sign).abs() < 1e-9)
            .map(|c| eig.eigenvectors.column(c).into_owned())
            .collect();
        DMatrix::from_columns(&cols)
    };
    let (e10, e01) = (pick(-1.0), pick(1.0));
    let global = |e: &DMatrix<f64>| -> DMatrix<f64> {
        let h = e.ncols();
        let mut b = DMatrix::zeros(size, m * m * h);
        for p in 0..m * m {
            b.view_mut((p * fibre, p * h), (fibre, h)).copy_from(e);
        }
        b
    };
    let (b10, b01) = (global(&e10), global(&e01));
    let d10 = b01.transpose() * &a * &b10;
    let d01 = b10.transpose() * &a * &b01;
    let op = |name: &str, matrix: DMatrix<f64>| OperatorMatrix {
        name: name.into(),
        matrix,
        linearity: Linearity::Real,
        formula_real_index: dirac10_index(0),
    };
    Ok(TorusDirac {
        cutoff,
        n_target,
        full: op("Dirac torus", a),
        dirac10: op("D10 torus", d10),
        dirac01: op("D01 torus", d01),
        antisymmetry,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointReport {
    pub torus_antisymmetry: f64,
    /// `max |(𝔻^{1,0})ᵀ + 𝔻^{0,1}|` on the torus.
    pub torus_adjoint_deviation: f64,
    pub torus_index_sum: i64,
    /// `ind 𝔻^{1,0} + ind 𝔻^{0,1}` on the sphere for `S* ⊗ O(k)`, `k = −2..=3`.
    pub sphere_index_sums: Vec<(i64, i64)>,
}

impl AdjointReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.torus_antisymmetry <= tol
            && self.torus_adjoint_deviation <= tol
            && self.torus_index_sum == 0
            && self.sphere_index_sums.iter().all(|(_, s)| *s == 0)
    }
}

/// Adjoint relation `𝔻^{0,1} = −(𝔻^{1,0})*` and vanishing index sums.
pub fn adjoint_relation_check(cutoff: usize) -> Result<AdjointReport> {
    let t = build_dirac_torus(1, cutoff)?;
    let dev = (t.dirac10.matrix.transpose() + &t.dirac01.matrix).amax();
    let i10 = numeric_index(&t.dirac10, DEFAULT_THRESHOLD)?;
    let i01 = numeric_index(&t.dirac01, DEFAULT_THRESHOLD)?;
    let mut sphere = Vec::new();
    for k in -2..=3 {
        let d10 = build_dbar_sphere(k - 1, cutoff.max((k - 1).unsigned_abs() as usize + 2))?;
        let d01 = OperatorMatrix {
            name: "D01".into(),
            matrix: -d10.matrix.transpose(),
            linearity: Linearity::Complex,
            formula_real_index: -d10.formula_real_index,
        };
        let s = numeric_index(&d10, DEFAULT_THRESHOLD)?.real_index
            + numeric_index(&d01, DEFAULT_THRESHOLD)?.real_index;
        sphere.push((k, s));
    }
    Ok(AdjointReport {
        torus_antisymmetry: t.antisymmetry,
        torus_adjoint_deviation: dev,
        torus_index_sum: i10.real_index + i01.real_index,
        sphere_index_sums: sphere,
    })
}
