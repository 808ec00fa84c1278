//! Discretized Cauchy–Riemann and Dirac operators and their numerical indices.

mod sphere;
mod torus;

pub use sphere::{
    build_dbar_sphere, cpn_splitting, sphere_operators, LineBundleBasis, SphereOperators,
};
pub use torus::{adjoint_relation_check, build_dirac_torus, AdjointReport, TorusDirac};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default relative singular-value threshold.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;
/// Minimum ratio between the smallest retained and the largest discarded singular value.
pub const MIN_GAP_RATIO: f64 = 1e3;

/// `(h⁰(O(k)), h¹(O(k)))` on `CP¹`.
pub fn h_oracle(k: i64) -> (usize, usize) {
    ((k + 1).max(0) as usize, (-k - 1).max(0) as usize)
}

/// Real index `2n(1 − p) + 2c₁A` of a Cauchy–Riemann operator on a rank-`n` bundle.
pub fn riemann_roch(n: i64, p: i64, c1a: i64) -> i64 {
    2 * n * (1 - p) + 2 * c1a
}

/// Real index `2c₁A` of `𝔻^{1,0}`.
pub fn dirac10_index(c1a: i64) -> i64 {
    2 * c1a
}

/// Whether the operator is complex linear (dimensions counted over `ℂ`) or only real linear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Linearity {
    Complex,
    Real,
}

/// Dense matrix of an operator in orthonormal bases of domain and codomain.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub name: String,
    pub matrix: DMatrix<f64>,
    pub linearity: Linearity,
    /// Index predicted by the relevant formula, real dimensions.
    pub formula_real_index: i64,
}

impl OperatorMatrix {
    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(name: &str, parts: &[OperatorMatrix]) -> Result<OperatorMatrix> {
        let lin = parts.first().map_or(Linearity::Complex, |p| p.linearity);
        if parts.iter().any(|p| p.linearity != lin) {
            return Err(Error::Shape(
                "direct sum of real and complex operators".into(),
            ));
        }
        let rows = parts.iter().map(|p| p.codomain_dim()).sum();
        let cols = parts.iter().map(|p| p.domain_dim()).sum();
        let mut m = DMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for p in parts {
            m.view_mut((r, c), (p.codomain_dim(), p.domain_dim()))
                .copy_from(&p.matrix);
            r += p.codomain_dim();
            c += p.domain_dim();
        }
        Ok(OperatorMatrix {
            name: name.to_string(),
            matrix: m,
            linearity: lin,
            formula_real_index: parts.iter().map(|p| p.formula_real_index).sum(),
        })
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.matrix.is_empty() {
            return Vec::new();
        }
        let mut s: Vec<f64> = self
            .matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IndexReport {
    pub operator: String,
    pub linearity: Linearity,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    /// Dimensions over the operator's field.
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
    pub real_kernel_dim: usize,
    pub real_cokernel_dim: usize,
    pub real_index: i64,
    pub formula_real_index: i64,
    pub threshold: f64,
    /// Smallest retained over largest discarded singular value; `None` if nothing was discarded.
    pub gap_ratio: Option<f64>,
    pub smallest_retained: Option<f64>,
    pub conclusive: bool,
    pub singular_values: Vec<f64>,
}

impl IndexReport {
    pub fn matches_formula(&self) -> bool {
        self.conclusive && self.real_index == self.formula_real_index
    }
}

/// Kernel, cokernel and index from singular values below `threshold · σ_max`.
pub fn numeric_index(op: &OperatorMatrix, threshold: f64) -> Result<IndexReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Precondition(format!(
            "threshold {threshold} outside (0, 1)"
        )));
    }
    if op.matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::IllConditioned(format!(
            "{}: non-finite matrix entries",
            op.name
        )));
    }
    let s = op.singular_values();
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|x| **x > threshold * smax).count();
    let smallest_retained = rank.checked_sub(1).map(|i| s[i]);
    let largest_dropped = s.get(rank).copied();
    let gap_ratio = match (smallest_retained, largest_dropped) {
        (Some(a), Some(b)) => Some(if b == 0.0 { f64::INFINITY } else { a / b }),
        _ => None,
    };
    let conclusive = gap_ratio.is_none_or(|g| g >= MIN_GAP_RATIO);
    let (cols, rows) = (op.domain_dim(), op.codomain_dim());
    let kernel = cols - rank;
    let cokernel = rows - rank;
    let f = if op.linearity == Linearity::Complex {
        2
    } else {
        1
    };
    Ok(IndexReport {
        operator: op.name.clone(),
        linearity: op.linearity,
        domain_dim: cols,
        codomain_dim: rows,
        kernel_dim: kernel,
        cokernel_dim: cokernel,
        index: kernel as i64 - cokernel as i64,
        real_kernel_dim: f * kernel,
        real_cokernel_dim: f * cokernel,
        real_index: f as i64 * (kernel as i64 - cokernel as i64),
        formula_real_index: op.formula_real_index,
        threshold,
        gap_ratio,
        smallest_retained,
        conclusive,
        singular_values: s,
    })
}

/// Singular values as CSV `i,sigma`.
pub fn singular_values_csv(reports: &[IndexReport]) -> String {
    let mut out = String::from("operator,i,sigma\n");
    for r in reports {
        for (i, s) in r.singular_values.iter().enumerate() {
            out.push_str(&format!("{},{i},{s:e}\n", r.operator));
        }
    }
    out
}
