//! Almost Kähler target models in a single chart.
//!
//! Conventions used everywhere downstream:
//!
//! * `j(y)` is the matrix of `J` acting on column vectors, `(JV)^b = J[b][c] V^c`;
//! * `christoffel(y)[a][b][c]` is `Γ^a_{bc}`;
//! * `nabla_j(y)[a]` is the matrix of `∇_{∂_a} J`;
//! * curvature entries are `r[a][b][c][d] = n(R(∂_a, ∂_b)∂_c, ∂_d)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Levi-Civita symbols `Γ^a_{bc}` indexed `[a][b][c]`.
pub type Christoffel = Vec<Vec<Vec<f64>>>;

/// Lowered curvature tensor at one point, with an optional covariant derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    data: Vec<f64>,
    /// `∇_{∂_e} R` stored as `[e][a][b][c][d]`.
    nabla: Option<Vec<f64>>,
}

impl CurvatureTensor {
    pub fn zero(dim: usize) -> Self {
        CurvatureTensor {
            dim,
            data: vec![0.0; dim.pow(4)],
            nabla: None,
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zero(dim);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let i = t.idx(a, b, c, d);
                        t.data[i] = f(a, b, c, d);
                    }
                }
            }
        }
        t
    }

    /// Kulkarni–Nomizu product `(h ⊙ k)_{abcd} = h_ad k_bc + h_bc k_ad − h_ac k_bd − h_bd k_ac`.
    pub fn kulkarni_nomizu(h: &DMatrix<f64>, k: &DMatrix<f64>) -> Self {
        let dim = h.nrows();
        Self::from_fn(dim, |a, b, c, d| {
            h[(a, d)] * k[(b, c)] + h[(b, c)] * k[(a, d)]
                - h[(a, c)] * k[(b, d)]
                - h[(b, d)] * k[(a, c)]
        })
    }

    /// Random tensor with all algebraic curvature symmetries and integer entries.
    pub fn random_admissible<R: Rng>(dim: usize, terms: usize, rng: &mut R) -> Self {
        let mut out = Self::zero(dim);
        for _ in 0..terms {
            let h = random_symmetric(dim, rng);
            let k = random_symmetric(dim, rng);
            out = out.add(&Self::kulkarni_nomizu(&h, &k));
        }
        out
    }

    pub fn with_nabla(mut self, nabla: Vec<CurvatureTensor>) -> Result<Self> {
        if nabla.len() != self.dim || nabla.iter().any(|t| t.dim != self.dim) {
            return Err(Error::Shape("∇R needs one tensor per direction".into()));
        }
        self.nabla = Some(nabla.into_iter().flat_map(|t| t.data).collect());
        Ok(self)
    }

    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    pub fn has_nabla(&self) -> bool {
        self.nabla.is_some()
    }

    /// Component `(∇_{∂_e} R)_{abcd}`; zero when no derivative is attached.
    pub fn nabla_get(&self, e: usize, a: usize, b: usize, c: usize, d: usize) -> f64 {
        match &self.nabla {
            Some(n) => n[e * self.dim.pow(4) + self.idx(a, b, c, d)],
            None => 0.0,
        }
    }

    /// The covariant derivative in direction `e` as a tensor of its own.
    pub fn nabla_slice(&self, e: usize) -> Option<CurvatureTensor> {
        let n = self.nabla.as_ref()?;
        let len = self.dim.pow(4);
        Some(CurvatureTensor {
            dim: self.dim,
            data: n[e * len..(e + 1) * len].to_vec(),
            nabla: None,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        CurvatureTensor {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + y)
                .collect(),
            nabla: None,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        CurvatureTensor {
            dim: self.dim,
            data: self.data.iter().map(|x| s * x).collect(),
            nabla: None,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest violation of antisymmetry, pair symmetry and the first Bianchi identity,
    /// returned in that order.
    pub fn symmetry_defects(&self) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        let n = self.dim;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.get(a, b, c, d);
                        let anti = (r + self.get(b, a, c, d))
                            .abs()
                            .max((r + self.get(a, b, d, c)).abs());
                        out[0] = out[0].max(anti);
                        out[1] = out[1].max((r - self.get(c, d, a, b)).abs());
                        let bianchi = r + self.get(b, c, a, d) + self.get(c, a, b, d);
                        out[2] = out[2].max(bianchi.abs());
                    }
                }
            }
        }
        out
    }

    /// Rejects tensors (and attached derivatives) that violate the curvature symmetries.
    pub fn check_symmetries(&self, tol: f64) -> Result<()> {
        let names = ["antisymmetry", "pair symmetry", "first Bianchi identity"];
        let mut tensors = vec![("R".to_string(), self.clone())];
        for e in 0..self.dim {
            if let Some(t) = self.nabla_slice(e) {
                tensors.push((format!("∇_{}R", e + 1), t));
            }
        }
        for (label, t) in tensors {
            for (name, dev) in names.iter().zip(t.symmetry_defects()) {
                if dev > tol {
                    return Err(Error::CurvatureSymmetry(format!(
                        "{label}: {name} violated by {dev:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn random_symmetric<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-3i32..=3) as f64;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Standard complex structure on `R^{2n}` with coordinates ordered `(u_1, v_1, u_2, v_2, …)`.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(2 * i + 1, 2 * i)] = 1.0;
        j[(2 * i, 2 * i + 1)] = -1.0;
    }
    j
}

/// Evaluators of an almost Kähler structure in one chart.
pub trait TargetGeometry: Send + Sync {
    /// Real dimension `2n`.
    fn dim(&self) -> usize;
    fn check_domain(&self, y: &[f64]) -> Result<()>;
    fn j(&self, y: &[f64]) -> DMatrix<f64>;
    fn metric(&self, y: &[f64]) -> DMatrix<f64>;
    fn christoffel(&self, y: &[f64]) -> Christoffel;
    fn nabla_j(&self, y: &[f64]) -> Vec<DMatrix<f64>>;
    /// Second covariant derivative `∇²_{∂_a, ∂_b} J`, indexed `[a][b]`.
    fn nabla2_j(&self, y: &[f64]) -> Vec<Vec<DMatrix<f64>>>;
    fn curvature(&self, y: &[f64]) -> CurvatureTensor;

    /// `ω(X, Y)` defined through `n(X, Y) = ω(JX, Y)`.
    fn omega(&self, y: &[f64]) -> DMatrix<f64> {
        let j = self.j(y);
        -(j.transpose() * self.metric(y))
    }

    fn is_kahler(&self) -> bool {
        false
    }

    /// Random chart point well inside the domain.
    fn sample_point(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        (0..self.dim()).map(|_| rng.gen_range(-0.5..0.5)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    Flat,
    ConstHsc { sigma: f64 },
    FubiniStudyCp1,
}

/// JSON model descriptor `{kind, n, sigma?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<AlmostKahlerModel> {
        if self.n == 0 {
            return Err(Error::InvalidModel("n must be positive".into()));
        }
        match self.kind.as_str() {
            "flat" => Ok(AlmostKahlerModel::flat(self.n)),
            "const-hsc" | "constant-hsc" => {
                let sigma = self
                    .sigma
                    .ok_or_else(|| Error::InvalidModel("const-hsc needs sigma".into()))?;
                Ok(make_const_hsc(sigma, self.n))
            }
            "fubini-study-cp1" => {
                if self.n != 1 {
                    return Err(Error::InvalidModel("fubini-study-cp1 has n = 1".into()));
                }
                Ok(AlmostKahlerModel::fubini_study_cp1())
            }
            other => Err(Error::InvalidModel(format!("unknown kind `{other}`"))),
        }
    }
}

/// Kähler model of one of the three supported kinds; complex dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostKahlerModel {
    pub kind: ModelKind,
    pub n: usize,
}

impl AlmostKahlerModel {
    pub fn flat(n: usize) -> Self {
        AlmostKahlerModel {
            kind: ModelKind::Flat,
            n,
        }
    }

    pub fn fubini_study_cp1() -> Self {
        AlmostKahlerModel {
            kind: ModelKind::FubiniStudyCp1,
            n: 1,
        }
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        let (kind, sigma) = match self.kind {
            ModelKind::Flat => ("flat", None),
            ModelKind::ConstHsc { sigma } => ("const-hsc", Some(sigma)),
            ModelKind::FubiniStudyCp1 => ("fubini-study-cp1", None),
        };
        ModelDescriptor {
            kind: kind.into(),
            n: self.n,
            sigma,
        }
    }

    /// Scale `c = σ/4` of the Kähler potential `log(1 + c|w|²)/c`.
    fn potential_scale(&self) -> f64 {
        match self.kind {
            ModelKind::Flat => 0.0,
            ModelKind::ConstHsc { sigma } => sigma / 4.0,
            ModelKind::FubiniStudyCp1 => 1.0,
        }
    }

    /// Metric and its first derivatives `∂_a n` for the const-hsc family.
    fn hsc_metric_jet(&self, y: &[f64]) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
        let c = self.potential_scale();
        let n = self.n;
        let dim = 2 * n;
        let w: Vec<(f64, f64)> = (0..n).map(|i| (y[2 * i], y[2 * i + 1])).collect();
        let r2: f64 = w.iter().map(|(u, v)| u * u + v * v).sum();
        let a = 1.0 + c * r2;
        // h_{ij̄} = δ_ij/A − c w̄_i w_j/A², stored as (re, im).
        let h = |i: usize, j: usize| -> (f64, f64) {
            let (ui, vi) = w[i];
            let (uj, vj) = w[j];
            // w̄_i w_j
            let pr = ui * uj + vi * vj;
            let pi = ui * vj - vi * uj;
            let d = if i == j { 1.0 / a } else { 0.0 };
            (d - c * pr / (a * a), -c * pi / (a * a))
        };
        let real_from = |hh: &dyn Fn(usize, usize) -> (f64, f64)| {
            let mut m = DMatrix::zeros(dim, dim);
            for i in 0..n {
                for j in 0..n {
                    let (re, im) = hh(i, j);
                    m[(2 * i, 2 * j)] = re;
                    m[(2 * i + 1, 2 * j + 1)] = re;
                    m[(2 * i, 2 * j + 1)] = im;
                    m[(2 * i + 1, 2 * j)] = -im;
                }
            }
            m
        };
        let metric = real_from(&h);
        let mut dn = Vec::with_capacity(dim);
        for k in 0..dim {
            let m = k / 2;
            // ∂w_m and ∂w̄_m along the real coordinate k.
            let (dw, dwb) = if k % 2 == 0 {
                ((1.0, 0.0), (1.0, 0.0))
            } else {
                ((0.0, 1.0), (0.0, -1.0))
            };
            let wb = |i: usize| (w[i].0, -w[i].1);
            let mul = |p: (f64, f64), q: (f64, f64)| (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0);
            // ∂A = c(∂w_m w̄_m + w_m ∂w̄_m)
            let t = mul(dw, wb(m));
            let s = mul(w[m], dwb);
            let da = c * (t.0 + s.0);
            let dh = |i: usize, j: usize| -> (f64, f64) {
                let d = if i == j { -da / (a * a) } else { 0.0 };
                let mut num = (0.0, 0.0);
                if i == m {
                    let p = mul(dwb, w[j]);
                    num = (num.0 + p.0, num.1 + p.1);
                }
                if j == m {
                    let p = mul(wb(i), dw);
                    num = (num.0 + p.0, num.1 + p.1);
                }
                let prod = mul(wb(i), w[j]);
                let a2 = a * a;
                let a3 = a2 * a;
                (
                    d - c * num.0 / a2 + 2.0 * c * prod.0 * da / a3,
                    -c * num.1 / a2 + 2.0 * c * prod.1 * da / a3,
                )
            };
            dn.push(real_from(&dh));
        }
        (metric, dn)
    }

    fn conformal_factor_cp1(y: &[f64]) -> (f64, [f64; 2]) {
        // n = e^{2u} δ with u = −log(1 + |w|²).
        let r2 = y[0] * y[0] + y[1] * y[1];
        let u = -(1.0 + r2).ln();
        let du = [-2.0 * y[0] / (1.0 + r2), -2.0 * y[1] / (1.0 + r2)];
        (u, du)
    }
}

/// Christoffel symbols from a metric jet.
pub fn christoffel_from_jet(metric: &DMatrix<f64>, dn: &[DMatrix<f64>]) -> Christoffel {
    let dim = metric.nrows();
    let inv = metric
        .clone()
        .try_inverse()
        .expect("metric must be invertible");
    let mut g = vec![vec![vec![0.0; dim]; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut s = 0.0;
                for d in 0..dim {
                    s += inv[(a, d)] * (dn[b][(d, c)] + dn[c][(d, b)] - dn[d][(b, c)]);
                }
                g[a][b][c] = 0.5 * s;
            }
        }
    }
    g
}

/// Curvature `n(R(X,Y)Z,W) = (σ/4)(n(X,W)n(Y,Z) − n(X,Z)n(Y,W) + n(Z,JX)n(Y,JW)
/// − n(X,JW)n(JY,Z) − 2n(X,JY)n(Z,JW))` on coordinate vectors.
pub fn const_hsc_curvature(sigma: f64, metric: &DMatrix<f64>, j: &DMatrix<f64>) -> CurvatureTensor {
    let nj = metric * j; // (nJ)_{ab} = n(∂_a, J∂_b)
    let dim = metric.nrows();
    CurvatureTensor::from_fn(dim, |x, y, z, w| {
        let n = |p: usize, q: usize| metric[(p, q)];
        let n_j = |p: usize, q: usize| nj[(p, q)];
        sigma / 4.0
            * (n(x, w) * n(y, z) - n(x, z) * n(y, w) + n_j(z, x) * n_j(y, w)
                - n_j(x, w) * n_j(z, y)
                - 2.0 * n_j(x, y) * n_j(z, w))
    })
}

impl TargetGeometry for AlmostKahlerModel {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn check_domain(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, expected {}",
                y.len(),
                self.dim()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideChart("non-finite coordinate".into()));
        }
        if let ModelKind::ConstHsc { sigma } = self.kind {
            if sigma < 0.0 {
                let r2: f64 = y.iter().map(|v| v * v).sum();
                if r2 >= 4.0 / sigma.abs() {
                    return Err(Error::OutsideChart(format!("|w|² = {r2} ≥ 4/|σ|")));
                }
            }
        }
        Ok(())
    }

    fn j(&self, _y: &[f64]) -> DMatrix<f64> {
        standard_j(self.n)
    }

    fn metric(&self, y: &[f64]) -> DMatrix<f64> {
        match self.kind {
            ModelKind::Flat => DMatrix::identity(2 * self.n, 2 * self.n),
            ModelKind::ConstHsc { .. } => self.hsc_metric_jet(y).0,
            ModelKind::FubiniStudyCp1 => {
                let (u, _) = Self::conformal_factor_cp1(y);
                DMatrix::identity(2, 2) * (2.0 * u).exp()
            }
        }
    }

    fn christoffel(&self, y: &[f64]) -> Christoffel {
        let dim = self.dim();
        match self.kind {
            ModelKind::Flat => vec![vec![vec![0.0; dim]; dim]; dim],
            ModelKind::ConstHsc { .. } => {
                let (m, dn) = self.hsc_metric_jet(y);
                christoffel_from_jet(&m, &dn)
            }
            ModelKind::FubiniStudyCp1 => {
                let (_, du) = Self::conformal_factor_cp1(y);
                let mut g = vec![vec![vec![0.0; 2]; 2]; 2];
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..2 {
                            let dab = if a == b { du[c] } else { 0.0 };
                            let dac = if a == c { du[b] } else { 0.0 };
                            let dbc = if b == c { du[a] } else { 0.0 };
                            g[a][b][c] = dab + dac - dbc;
                        }
                    }
                }
                g
            }
        }
    }

    fn nabla_j(&self, _y: &[f64]) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.dim(), self.dim()); self.dim()]
    }

    fn nabla2_j(&self, _y: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        vec![vec![DMatrix::zeros(self.dim(), self.dim()); self.dim()]; self.dim()]
    }

    fn curvature(&self, y: &[f64]) -> CurvatureTensor {
        match self.kind {
            ModelKind::Flat => CurvatureTensor::zero(self.dim()),
            ModelKind::ConstHsc { sigma } => {
                const_hsc_curvature(sigma, &self.metric(y), &self.j(y))
            }
            ModelKind::FubiniStudyCp1 => {
                // Gaussian curvature 4: R_{abcd} = 4(n_ad n_bc − n_ac n_bd).
                let m = self.metric(y);
                CurvatureTensor::from_fn(2, |a, b, c, d| {
                    4.0 * (m[(a, d)] * m[(b, c)] - m[(a, c)] * m[(b, d)])
                })
            }
        }
    }

    fn is_kahler(&self) -> bool {
        true
    }

    fn sample_point(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        let bound = match self.kind {
            ModelKind::ConstHsc { sigma } if sigma < 0.0 => {
                0.9 * (4.0 / sigma.abs() / self.dim() as f64).sqrt()
            }
            _ => 1.0,
        };
        (0..self.dim())
            .map(|_| rng.gen_range(-bound..bound))
            .collect()
    }
}

/// Model of constant holomorphic sectional curvature `σ` on a chart of `C^n`.
pub fn make_const_hsc(sigma: f64, n: usize) -> AlmostKahlerModel {
    AlmostKahlerModel {
        kind: ModelKind::ConstHsc { sigma },
        n,
    }
}

/// `n(R(X, JX)JX, X)` for a vector normalized to unit length.
pub fn holomorphic_sectional(model: &dyn TargetGeometry, y: &[f64], x: &[f64]) -> f64 {
    let m = model.metric(y);
    let j = model.j(y);
    let mut v = DVector::from_column_slice(x);
    let norm = (v.transpose() * &m * &v)[(0, 0)].sqrt();
    v /= norm;
    let jv = &j * &v;
    let r = model.curvature(y);
    let dim = model.dim();
    let mut s = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    s += r.get(a, b, c, d) * v[a] * jv[b] * jv[c] * v[d];
                }
            }
        }
    }
    s
}

/// Covariant derivative `∇_X Y` of a vector field given by its value and jet `dy[a][b] = ∂_a Y^b`.
pub fn nabla(
    model: &dyn TargetGeometry,
    y: &[f64],
    x: &[f64],
    val: &[f64],
    dy: &[Vec<f64>],
) -> Vec<f64> {
    let gam = model.christoffel(y);
    let dim = model.dim();
    (0..dim)
        .map(|b| {
            let mut s = 0.0;
            for a in 0..dim {
                s += x[a] * dy[a][b];
                for c in 0..dim {
                    s += x[a] * gam[b][a][c] * val[c];
                }
            }
            s
        })
        .collect()
}

/// `∇̄_X Y = ∇_X Y − ½ J(∇_X J)Y`.
pub fn nabla_bar(
    model: &dyn TargetGeometry,
    y: &[f64],
    x: &[f64],
    val: &[f64],
    dy: &[Vec<f64>],
) -> Result<Vec<f64>> {
    model.check_domain(y)?;
    let dim = model.dim();
    if x.len() != dim || val.len() != dim || dy.len() != dim {
        return Err(Error::Shape("vector or jet has wrong dimension".into()));
    }
    let base = nabla(model, y, x, val, dy);
    let nj = model.nabla_j(y);
    let mut nxj = DMatrix::zeros(dim, dim);
    for (a, m) in nj.iter().enumerate() {
        nxj += m * x[a];
    }
    let corr = model.j(y) * nxj * DVector::from_column_slice(val);
    Ok(base
        .iter()
        .zip(corr.iter())
        .map(|(b, c)| b - 0.5 * c)
        .collect())
}

/// One named invariant check with its worst deviation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            tol,
            pass: value.is_finite() && value <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelReport {
    pub checks: Vec<CheckResult>,
}

impl ModelReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluates every model invariant at the given points.
pub fn validate_model(model: &dyn TargetGeometry, points: &[Vec<f64>], tol: f64) -> ModelReport {
    let dim = model.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut worst = [0.0f64; 9];
    for y in points {
        if model.check_domain(y).is_err() {
            worst[0] = f64::INFINITY;
            continue;
        }
        let j = model.j(y);
        let m = model.metric(y);
        let om = model.omega(y);
        worst[1] = worst[1].max((&j * &j + &id).amax());
        worst[2] = worst[2].max((j.transpose() * &om * &j - &om).amax());
        // n(X, Y) − ω(JX, Y)
        worst[3] = worst[3].max(
            (&m - j.transpose() * &om)
                .amax()
                .max((&m - m.transpose()).amax()),
        );
        let min_eig = m.clone().symmetric_eigenvalues().min();
        if min_eig <= 0.0 {
            worst[4] = f64::INFINITY;
        }
        let [anti, pair, bianchi] = model.curvature(y).symmetry_defects();
        worst[5] = worst[5].max(anti);
        worst[6] = worst[6].max(pair);
        worst[7] = worst[7].max(bianchi);
        // ∇̄J = ∇J − ½[J∇J, J] must vanish.
        for nj in model.nabla_j(y) {
            let jn = &j * &nj;
            let bar = &nj - (&jn * &j - &j * &jn) * 0.5;
            worst[8] = worst[8].max(bar.amax());
        }
    }
    let names = [
        "domain",
        "j_squared",
        "omega_j_invariant",
        "metric_compatible",
        "metric_positive",
        "curvature_antisymmetry",
        "curvature_pair_symmetry",
        "bianchi",
        "nabla_bar_j",
    ];
    ModelReport {
        checks: names
            .iter()
            .zip(worst)
            .map(|(n, v)| CheckResult::new(*n, v, tol))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Riemann tensor from finite differences of the closed-form Christoffel symbols.
    fn fd_curvature(model: &dyn TargetGeometry, y: &[f64]) -> CurvatureTensor {
        let dim = model.dim();
        let h = 1e-5;
        let dgam: Vec<Christoffel> = (0..dim)
            .map(|e| {
                let mut p = y.to_vec();
                let mut q = y.to_vec();
                p[e] += h;
                q[e] -= h;
                let gp = model.christoffel(&p);
                let gq = model.christoffel(&q);
                (0..dim)
                    .map(|a| {
                        (0..dim)
                            .map(|b| {
                                (0..dim)
                                    .map(|c| (gp[a][b][c] - gq[a][b][c]) / (2.0 * h))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let g = model.christoffel(y);
        let m = model.metric(y);
        // R^a_{bcd} with R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a.
        let up = |a: usize, b: usize, c: usize, d: usize| {
            let mut s = dgam[c][a][d][b] - dgam[d][a][c][b];
            for e in 0..dim {
                s += g[a][c][e] * g[e][d][b] - g[a][d][e] * g[e][c][b];
            }
            s
        };
        CurvatureTensor::from_fn(dim, |x, yy, z, w| {
            (0..dim).map(|a| m[(a, w)] * up(a, z, x, yy)).sum()
        })
    }

    fn points(model: &dyn TargetGeometry, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| model.sample_point(&mut rng)).collect()
    }

    #[test]
    fn closed_form_curvature_matches_finite_differences() {
        for (model, seed) in [
            (make_const_hsc(4.0, 1), 1),
            (make_const_hsc(4.0, 2), 2),
            (make_const_hsc(-4.0, 2), 3),
            (make_const_hsc(1.5, 3), 4),
            (AlmostKahlerModel::fubini_study_cp1(), 5),
        ] {
            for y in points(&model, 5, seed) {
                let exact = model.curvature(&y);
                let fd = fd_curvature(&model, &y);
                let err = exact.add(&fd.scale(-1.0)).max_abs();
                assert!(err < 1e-6, "{:?} at {y:?}: {err}", model.kind);
            }
        }
    }

    #[test]
    fn christoffel_matches_metric_differences() {
        let model = make_const_hsc(-2.0, 2);
        let y = vec![0.3, -0.2, 0.1, 0.25];
        let h = 1e-6;
        let dn: Vec<DMatrix<f64>> = (0..4)
            .map(|e| {
                let mut p = y.clone();
                let mut q = y.clone();
                p[e] += h;
                q[e] -= h;
                (model.metric(&p) - model.metric(&q)) / (2.0 * h)
            })
            .collect();
        let fd = christoffel_from_jet(&model.metric(&y), &dn);
        let g = model.christoffel(&y);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert!((fd[a][b][c] - g[a][b][c]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn holomorphic_sectional_curvature_is_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for sigma in [4.0, -4.0, 0.0, 2.5] {
            let model = make_const_hsc(sigma, 2);
            for _ in 0..20 {
                let y = model.sample_point(&mut rng);
                let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s = holomorphic_sectional(&model, &y, &x);
                assert!((s - sigma).abs() < 1e-12, "σ = {sigma}: {s}");
            }
        }
        let fs = AlmostKahlerModel::fubini_study_cp1();
        assert!((holomorphic_sectional(&fs, &[0.3, 0.4], &[1.0, 2.0]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_zero_is_flat() {
        let model = make_const_hsc(0.0, 2);
        assert_eq!(model.curvature(&[0.1, 0.2, 0.3, 0.4]).max_abs(), 0.0);
    }

    #[test]
    fn all_kinds_pass_validation() {
        for (model, tol) in [
            (AlmostKahlerModel::flat(2), 1e-12),
            (make_const_hsc(4.0, 2), 1e-12),
            (make_const_hsc(-4.0, 1), 1e-12),
            (AlmostKahlerModel::fubini_study_cp1(), 1e-9),
        ] {
            let report = validate_model(&model, &points(&model, 100, 7), tol);
            assert!(report.passed(), "{:?}: {report:?}", model.kind);
        }
        let flat = validate_model(
            &AlmostKahlerModel::flat(1),
            &points(&AlmostKahlerModel::flat(1), 10, 1),
            1e-12,
        );
        assert!(flat.checks.iter().all(|c| c.value == 0.0));
    }

    struct CorruptedJ(AlmostKahlerModel);

    impl TargetGeometry for CorruptedJ {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn check_domain(&self, y: &[f64]) -> Result<()> {
            self.0.check_domain(y)
        }
        fn j(&self, y: &[f64]) -> DMatrix<f64> {
            self.0.j(y) * 1.1
        }
        fn metric(&self, y: &[f64]) -> DMatrix<f64> {
            self.0.metric(y)
        }
        fn christoffel(&self, y: &[f64]) -> Christoffel {
            self.0.christoffel(y)
        }
        fn nabla_j(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
            self.0.nabla_j(y)
        }
        fn nabla2_j(&self, y: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
            self.0.nabla2_j(y)
        }
        fn curvature(&self, y: &[f64]) -> CurvatureTensor {
            self.0.curvature(y)
        }
    }

    #[test]
    fn corrupted_j_fails_validation() {
        let model = CorruptedJ(AlmostKahlerModel::flat(1));
        let report = validate_model(&model, &[vec![0.0, 0.0]], 1e-12);
        assert!(!report.get("j_squared").unwrap().pass);
    }

    #[test]
    fn nabla_bar_examples() {
        let flat = AlmostKahlerModel::flat(1);
        let dy = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let out = nabla_bar(&flat, &[0.0, 0.0], &[1.0, 0.0], &[5.0, 6.0], &dy).unwrap();
        assert_eq!(out, vec![1.0, 2.0]);
        let zero = nabla_bar(&flat, &[0.0, 0.0], &[0.0, 0.0], &[5.0, 6.0], &dy).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);

        // J commutes with ∇̄ on a Kähler model; JY has jet J dY since J is constant.
        let model = make_const_hsc(4.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let y = model.sample_point(&mut rng);
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dy: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let j = model.j(&y);
            let jv: Vec<f64> = (&j * DVector::from_column_slice(&v))
                .iter()
                .copied()
                .collect();
            let jdy: Vec<Vec<f64>> = dy
                .iter()
                .map(|row| {
                    (&j * DVector::from_column_slice(row))
                        .iter()
                        .copied()
                        .collect()
                })
                .collect();
            let lhs = nabla_bar(&model, &y, &x, &jv, &jdy).unwrap();
            let rhs = &j * DVector::from_vec(nabla_bar(&model, &y, &x, &v, &dy).unwrap());
            for b in 0..4 {
                assert!((lhs[b] - rhs[b]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hyperbolic_chart_boundary_is_rejected() {
        let model = make_const_hsc(-4.0, 1);
        assert!(model.check_domain(&[0.5, 0.5]).is_ok());
        assert!(matches!(
            model.check_domain(&[1.0, 0.2]),
            Err(Error::OutsideChart(_))
        ));
        assert!(nabla_bar(
            &model,
            &[1.0, 0.2],
            &[1.0, 0.0],
            &[0.0, 0.0],
            &[vec![0.0; 2], vec![0.0; 2]]
        )
        .is_err());
    }

    #[test]
    fn random_admissible_tensors_have_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = CurvatureTensor::random_admissible(4, 3, &mut rng);
        assert!(r.check_symmetries(0.0).is_ok());
        assert!(r.max_abs() > 0.0);
        let bad = CurvatureTensor::from_fn(2, |a, b, c, d| (a + b + c + d) as f64);
        assert!(matches!(
            bad.check_symmetries(1e-12),
            Err(Error::CurvatureSymmetry(_))
        ));
    }

    #[test]
    fn descriptor_round_trip() {
        let d: ModelDescriptor =
            serde_json::from_str(r#"{"kind":"const-hsc","n":2,"sigma":4.0}"#).unwrap();
        let m = d.build().unwrap();
        assert_eq!(m, make_const_hsc(4.0, 2));
        assert_eq!(m.descriptor(), d);
        let bad: ModelDescriptor = serde_json::from_str(r#"{"kind":"const-hsc","n":2}"#).unwrap();
        assert!(bad.build().is_err());
    }
}
