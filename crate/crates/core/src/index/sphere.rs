//! `∂̄` on `O(k) → CP¹` in the affine chart, with exact rational Gram matrices.
//!
//! Sections at level `N` are `z^a z̄^b / (1+|z|²)^N` with `a ≤ k+N`, `b ≤ N`; `∂_z̄` maps them
//! exactly onto `z^c z̄^d / (1+|z|²)^{N+1}` with `c ≤ k+N+1`, `d ≤ N−1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

use super::{dirac10_index, riemann_roch, Linearity, OperatorMatrix};

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn factorial(n: i64) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * rat(i))
}

/// `(1/π) ∫_ℂ |z|^{2m} (1+|z|²)^{-s} dA = m!(s−m−2)!/(s−1)!`.
fn beta_moment(m: i64, s: i64) -> Result<Rational> {
    if s - m - 2 < 0 {
        return Err(Error::IllConditioned(format!(
            "divergent moment m={m}, s={s}"
        )));
    }
    Ok(factorial(m) * factorial(s - m - 2) / factorial(s - 1))
}

/// Weighted monomial basis `z^a z̄^b / (1+|z|²)^{den}` with inner-product weight `(1+|z|²)^{-s}` on the numerators.
#[derive(Clone, Debug, PartialEq)]
pub struct LineBundleBasis {
    pub degree: i64,
    pub den: i64,
    pub s: i64,
    pub monomials: Vec<(i64, i64)>,
}

impl LineBundleBasis {
    /// Sections of `O(k)` at level `n`.
    pub fn sections(k: i64, n: i64) -> Self {
        let monomials = (0..=k + n)
            .flat_map(|a| (0..=n).map(move |b| (a, b)))
            .collect();
        LineBundleBasis {
            degree: k,
            den: n,
            s: 2 * n + k + 2,
            monomials,
        }
    }

    /// `(0,1)`-forms with values in `O(k)` at level `n + 1`.
    pub fn forms(k: i64, n: i64) -> Self {
        let monomials = (0..=k + n + 1)
            .flat_map(|c| (0..n).map(move |d| (c, d)))
            .collect();
        LineBundleBasis {
            degree: k,
            den: n + 1,
            s: 2 * (n + 1) + k,
            monomials,
        }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Basis indices grouped by angular momentum `a − b`.
    fn blocks(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, (a, b)) in self.monomials.iter().enumerate() {
            out.entry(a - b).or_default().push(i);
        }
        out
    }

    fn gram_block(&self, idx: &[usize]) -> Result<Vec<Vec<Rational>>> {
        idx.iter()
            .map(|&i| {
                idx.iter()
                    .map(|&j| {
                        let (a, _) = self.monomials[i];
                        let (_, bj) = self.monomials[j];
                        beta_moment(a + bj, self.s)
                    })
                    .collect()
            })
            .collect()
    }

    /// Full Gram matrix as `f64` (block diagonal in angular momentum).
    pub fn gram(&self) -> Result<DMatrix<f64>> {
        let mut g = DMatrix::zeros(self.len(), self.len());
        for idx in self.blocks().values() {
            let b = self.gram_block(idx)?;
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    g[(i, j)] = b[r][c].to_f64().unwrap_or(f64::NAN);
                }
            }
        }
        Ok(g)
    }
}

/// Exact `G = L D Lᵀ` with unit lower-triangular `L`.
fn ldl(g: &[Vec<Rational>]) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let n = g.len();
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut d = vec![Rational::zero(); n];
    for j in 0..n {
        let mut dj = g[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::IllConditioned(format!(
                "Gram pivot {j} is not positive"
            )));
        }
        l[j][j] = Rational::one();
        for i in j + 1..n {
            let mut v = g[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &dj;
        }
        d[j] = dj;
    }
    Ok((l, d))
}

/// `L^{-1}` for unit lower-triangular `L`.
fn unit_lower_inverse(l: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = l.len();
    let mut inv = vec![vec![Rational::zero(); n]; n];
    for c in 0..n {
        inv[c][c] = Rational::one();
        for r in c + 1..n {
            let mut v = Rational::zero();
            for k in c..r {
                v -= &l[r][k] * &inv[k][c];
            }
            inv[r][c] = v;
        }
    }
    inv
}

fn sqrt_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN).sqrt()
}

/// `∂̄` on `O(k)` at cutoff level `m` in orthonormal coordinates.
pub fn build_dbar_sphere(k: i64, m: usize) -> Result<OperatorMatrix> {
    let needed = k.unsigned_abs() as usize + 2;
    if m < needed {
        return Err(Error::Cutoff {
            cutoff: m,
            degree: k,
            needed,
        });
    }
    let n = m as i64;
    let dom = LineBundleBasis::sections(k, n);
    let cod = LineBundleBasis::forms(k, n);
    let cod_pos: BTreeMap<(i64, i64), usize> = cod
        .monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i))
        .collect();
    let cod_blocks = cod.blocks();
    let mut out = DMatrix::zeros(cod.len(), dom.len());
    for (ell, didx) in dom.blocks() {
        let (ld, dd) = ldl(&dom.gram_block(&didx)?)?;
        let ld_inv_t = {
            let inv = unit_lower_inverse(&ld);
            let n = inv.len();
            (0..n)
                .map(|i| (0..n).map(|j| inv[j][i].clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        let Some(cidx) = cod_blocks.get(&(ell + 1)) else {
            continue;
        };
        let (lc, dc) = ldl(&cod.gram_block(cidx)?)?;
        let local: BTreeMap<usize, usize> = cidx.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        // A in the monomial coordinates of this block pair
        let mut a = vec![vec![Rational::zero(); didx.len()]; cidx.len()];
        for (col, &vi) in didx.iter().enumerate() {
            let (p, q) = dom.monomials[vi];
            if q > 0 {
                a[local[&cod_pos[&(p, q - 1)]]][col] += rat(q);
            }
            if q != n {
                a[local[&cod_pos[&(p + 1, q)]]][col] += rat(q - n);
            }
        }
        // Lcᵀ A Ld^{-T}
        let rows = cidx.len();
        let cols = didx.len();
        let mut la = vec![vec![Rational::zero(); cols]; rows];
        for i in 0..rows {
            for r in i..rows {
                if lc[r][i].is_zero() {
                    continue;
                }
                for c in 0..cols {
                    if !a[r][c].is_zero() {
                        la[i][c] += &lc[r][i] * &a[r][c];
                    }
                }
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let mut v = Rational::zero();
                for c in 0..=j {
                    if !la[i][c].is_zero() {
                        v += &la[i][c] * &ld_inv_t[c][j];
                    }
                }
                out[(cidx[i], didx[j])] =
                    v.to_f64().unwrap_or(f64::NAN) * sqrt_f64(&dc[i]) / sqrt_f64(&dd[j]);
            }
        }
    }
    Ok(OperatorMatrix {
        name: format!("dbar O({k})"),
        matrix: out,
        linearity: Linearity::Complex,
        formula_real_index: 2 * (k + 1),
    })
}

/// `D_φ`, `𝔻^{1,0}` and `𝔻^{0,1}` for a map `CP¹ → N` with `φ*TN ≅ ⊕ O(k_i)`.
#[derive(Clone, Debug)]
pub struct SphereOperators {
    pub splitting: Vec<i64>,
    pub d_phi: OperatorMatrix,
    pub dirac10: OperatorMatrix,
    pub dirac01: OperatorMatrix,
}

/// Splitting type `O(2d) ⊕ O(d)^{n−1}` of `φ*TCPⁿ` for a degree-`d` rational curve.
pub fn cpn_splitting(n: usize, d: i64) -> Vec<i64> {
    std::iter::once(2 * d)
        .chain(std::iter::repeat_n(d, n.saturating_sub(1)))
        .collect()
}

/// `D_φ = ⊕ ∂̄_{O(k_i)}`, `𝔻^{1,0} = ⊕ ∂̄_{O(k_i − 1)}` (since `S* ≅ O(−1)`) and
/// `𝔻^{0,1} = −(𝔻^{1,0})*`.
pub fn sphere_operators(splitting: &[i64], cutoff: usize) -> Result<SphereOperators> {
    if splitting.is_empty() {
        return Err(Error::Precondition("empty splitting type".into()));
    }
    let n = splitting.len() as i64;
    let c1: i64 = splitting.iter().sum();
    let d_parts = splitting
        .iter()
        .map(|&k| build_dbar_sphere(k, cutoff))
        .collect::<Result<Vec<_>>>()?;
    let t_parts = splitting
        .iter()
        .map(|&k| build_dbar_sphere(k - 1, cutoff))
        .collect::<Result<Vec<_>>>()?;
    let mut d_phi = OperatorMatrix::direct_sum("D_phi", &d_parts)?;
    d_phi.formula_real_index = riemann_roch(n, 0, c1);
    let mut dirac10 = OperatorMatrix::direct_sum("D10", &t_parts)?;
    dirac10.formula_real_index = dirac10_index(c1);
    let dirac01 = OperatorMatrix {
        name: "D01".into(),
        matrix: -dirac10.matrix.transpose(),
        linearity: Linearity::Complex,
        formula_real_index: -dirac10_index(c1),
    };
    Ok(SphereOperators {
        splitting: splitting.to_vec(),
        d_phi,
        dirac10,
        dirac01,
    })
}
