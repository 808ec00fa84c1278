//! Periodic conformally flat patch `[0,1)²` with metric `g = λ⁴δ`.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grassmann::Grassmann;

use super::spin::SpinConventions;

/// Grid of `M × M` points, row-major with `x¹ = i/M`, `x² = j/M` at index `i·M + j`.
#[derive(Clone)]
pub struct ReducedPatch {
    m: usize,
    lambda: Vec<f64>,
    spectral: bool,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for ReducedPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedPatch")
            .field("m", &self.m)
            .field("spectral", &self.spectral)
            .finish()
    }
}

impl ReducedPatch {
    pub fn new(m: usize, lambda: Vec<f64>) -> Result<Self> {
        if m < 4 {
            return Err(Error::Resolution(m));
        }
        if lambda.len() != m * m {
            return Err(Error::Shape(format!(
                "λ has {} values, expected {}",
                lambda.len(),
                m * m
            )));
        }
        if lambda.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Precondition("λ must be positive and finite".into()));
        }
        let spectral = lambda.iter().all(|l| *l == lambda[0]);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        let ifft = planner.plan_fft_inverse(m);
        Ok(ReducedPatch {
            m,
            lambda,
            spectral,
            fft,
            ifft,
        })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut lam = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                lam.push(f(i as f64 / m as f64, j as f64 / m as f64));
            }
        }
        Self::new(m, lam)
    }

    /// Flat patch `λ ≡ 1`.
    pub fn flat(m: usize) -> Result<Self> {
        Self::new(m, vec![1.0; m * m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn coords(&self, p: usize) -> (f64, f64) {
        (
            (p / self.m) as f64 / self.m as f64,
            (p % self.m) as f64 / self.m as f64,
        )
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// True when derivatives are spectral (constant `λ`).
    pub fn is_spectral(&self) -> bool {
        self.spectral
    }

    /// Conformal rescaling `λ ↦ μλ`.
    pub fn rescaled(&self, mu: &[f64]) -> Result<Self> {
        Self::new(
            self.m,
            self.lambda.iter().zip(mu).map(|(l, u)| l * u).collect(),
        )
    }

    /// Coordinate derivative `∂_{x^{dir+1}}` of a periodic grid function.
    pub fn deriv(&self, f: &[f64], dir: usize) -> Vec<f64> {
        if self.spectral {
            self.spectral_deriv(f, dir)
        } else {
            self.fd4_deriv(f, dir)
        }
    }

    fn line(&self, dir: usize, fixed: usize, t: usize) -> usize {
        if dir == 0 {
            t * self.m + fixed
        } else {
            fixed * self.m + t
        }
    }

    fn spectral_deriv(&self, f: &[f64], dir: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m * m];
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for fixed in 0..m {
            for (t, b) in buf.iter_mut().enumerate() {
                *b = Complex64::new(f[self.line(dir, fixed, t)], 0.0);
            }
            self.fft.process(&mut buf);
            for (q, b) in buf.iter_mut().enumerate() {
                let k = if 2 * q < m {
                    q as f64
                } else if 2 * q == m {
                    0.0
                } else {
                    q as f64 - m as f64
                };
                *b *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * k / m as f64);
            }
            self.ifft.process(&mut buf);
            for (t, b) in buf.iter().enumerate() {
                out[self.line(dir, fixed, t)] = b.re;
            }
        }
        out
    }

    fn fd4_deriv(&self, f: &[f64], dir: usize) -> Vec<f64> {
        let m = self.m;
        let h = 1.0 / m as f64;
        let mut out = vec![0.0; m * m];
        for fixed in 0..m {
            for t in 0..m {
                let at = |s: isize| {
                    f[self.line(dir, fixed, (t as isize + s).rem_euclid(m as isize) as usize)]
                };
                out[self.line(dir, fixed, t)] =
                    (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
            }
        }
        out
    }

    /// Derivative of a Grassmann-valued grid function, monomial by monomial.
    pub fn deriv_grassmann(&self, f: &[Grassmann<f64>], dir: usize) -> Vec<Grassmann<f64>> {
        let n_gen = f.first().map_or(0, |g| g.n_gen());
        let mut masks: Vec<u32> = f.iter().flat_map(|g| g.terms().map(|(m, _)| m)).collect();
        masks.sort_unstable();
        masks.dedup();
        let mut out = vec![Grassmann::zero(n_gen); f.len()];
        for mask in masks {
            let vals: Vec<f64> = f.iter().map(|g| g.coeff(mask)).collect();
            for (o, d) in out.iter_mut().zip(self.deriv(&vals, dir)) {
                if d != 0.0 {
                    o.add_term(mask, d);
                }
            }
        }
        out
    }

    /// Spin connection coefficients `ω_k = I_k^l ∂_l(λ^{-2})`.
    pub fn spin_connection(&self) -> [Vec<f64>; 2] {
        let i = SpinConventions::standard().i;
        let w: Vec<f64> = self.lambda.iter().map(|l| l.powi(-2)).collect();
        let d = [self.deriv(&w, 0), self.deriv(&w, 1)];
        let comb = |k: usize| -> Vec<f64> {
            (0..self.len())
                .map(|p| i[k][0] as f64 * d[0][p] + i[k][1] as f64 * d[1][p])
                .collect()
        };
        [comb(0), comb(1)]
    }
}
