//! Suite runners and the versioned JSON report.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::component::{
    energy_identity_residual, fierz_check, linearization_fd_check, read_component_file,
    residual_components, weyl_covariance_check, BlockComparison, ComponentMap, Gravitino,
    ReducedPatch, FD_TOL, LINEARIZATION_TOL, SPECTRAL_TOL,
};
use crate::error::{Error, Result};
use crate::grassmann::{Grassmann, Parity};
use crate::index::{
    build_dbar_sphere, build_dirac_torus, cpn_splitting, h_oracle, numeric_index,
    singular_values_csv, sphere_operators, IndexReport, OperatorMatrix,
};
use crate::scalar::Exact;
use crate::superfield::{
    flat_sjc_residual, holomorphy_equivalence_check, real_components, FlatTargetJ, HoloComponents,
    SuperField, DEFAULT_DEGREE_CAP,
};
use crate::target::{standard_j, AlmostKahlerModel, ModelDescriptor};

use super::bochner::{bochner_classify, BochnerInput, Verdict};
use super::moduli::{moduli_dimension, ModuliDimQuery};
use super::sample::{
    holomorphic_linear_map, random_curvature_with_nabla, random_directions, random_exact_spinor,
    random_flat_superfield, random_real_even_superfield, FlatCase,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Antisymmetry bound for the torus Dirac matrix.
pub const ANTISYMMETRY_TOL: f64 = 1e-10;
/// Lower bound on the smallest singular value of `𝔻^{0,1}` on the sphere for flat targets.
pub const SPECTRAL_GAP: f64 = 0.1;
/// Minimum grid size for the Weyl covariance part of the linearize suite.
pub const WEYL_RESOLUTION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Flat,
    Identities,
    Index,
    Bochner,
    Moduli,
    Linearize,
    VerifyFlat,
    VerifyComponents,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Flat,
        Suite::Identities,
        Suite::Index,
        Suite::Bochner,
        Suite::Moduli,
        Suite::Linearize,
        Suite::VerifyFlat,
        Suite::VerifyComponents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Flat => "flat",
            Suite::Identities => "identities",
            Suite::Index => "index",
            Suite::Bochner => "bochner",
            Suite::Moduli => "moduli",
            Suite::Linearize => "linearize",
            Suite::VerifyFlat => "verify-flat",
            Suite::VerifyComponents => "verify-components",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Sphere,
    Torus,
}

impl FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Surface::Sphere),
            "torus" => Ok(Surface::Torus),
            _ => Err(Error::Config(format!("unknown surface `{s}`"))),
        }
    }
}

/// Suite configuration; every field has a default and unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random samples; each suite has its own default.
    pub trials: Option<usize>,
    /// Grassmann generators; each suite has its own default.
    pub generators: Option<usize>,
    pub model: Option<ModelDescriptor>,
    pub surface: Surface,
    pub degree: i64,
    pub cutoff: Option<usize>,
    pub target_rank: usize,
    pub threshold: f64,
    pub genus: u32,
    pub sigma: f64,
    pub energy_min: f64,
    pub energy_max: f64,
    pub scalar_curvature: Option<f64>,
    pub n: u32,
    pub c1a: i64,
    pub dimx: u32,
    /// Grid points per side for component suites.
    pub resolution: usize,
    /// Finite-difference step.
    pub step: f64,
    pub input: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            trials: None,
            generators: None,
            model: None,
            surface: Surface::Sphere,
            degree: 1,
            cutoff: None,
            target_rank: 1,
            threshold: crate::index::DEFAULT_THRESHOLD,
            genus: 0,
            sigma: 4.0,
            energy_min: 0.0,
            energy_max: 0.125,
            scalar_curvature: None,
            n: 1,
            c1a: 0,
            dimx: 0,
            resolution: 32,
            step: 1e-2,
            input: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cmp {
    /// `|value − expected| ≤ tol`.
    Eq,
    /// `value ≤ expected + tol`.
    Le,
    /// `value > expected − tol`.
    Gt,
}

/// One numeric check in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub cmp: Cmp,
    pub tol: f64,
    pub pass: bool,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, value: f64, cmp: Cmp, expected: f64, tol: f64) -> Self {
        let pass = match cmp {
            Cmp::Eq => (value - expected).abs() <= tol,
            Cmp::Le => value <= expected + tol,
            Cmp::Gt => value > expected - tol,
        };
        CheckEntry {
            name: name.into(),
            value,
            expected,
            cmp,
            tol,
            pass,
        }
    }

    pub fn eq(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Self::new(name, value, Cmp::Eq, expected, tol)
    }

    /// `value ≤ tol`.
    pub fn small(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, value, Cmp::Le, 0.0, tol)
    }

    pub fn count(name: impl Into<String>, value: usize, expected: usize) -> Self {
        Self::eq(name, value as f64, expected as f64, 0.0)
    }

    pub fn int(name: impl Into<String>, value: i64, expected: i64) -> Self {
        Self::eq(name, value as f64, expected as f64, 0.0)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::eq(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    fn block(prefix: &str, b: &BlockComparison) -> Self {
        // relative criterion error ≤ tol · (1 + magnitude), reported as a ratio
        let ratio = b.error / (1.0 + b.magnitude);
        let mut e = Self::small(format!("{prefix}.{}", b.name), ratio, b.tol);
        e.pass = e.pass && b.pass;
        e
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: Suite,
    pub seed: u64,
    pub config: SuiteConfig,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
    /// Non-numeric results such as verdicts and dimension strings.
    pub facts: BTreeMap<String, String>,
}

impl Report {
    fn new(
        suite: Suite,
        config: &SuiteConfig,
        checks: Vec<CheckEntry>,
        facts: BTreeMap<String, String>,
    ) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            suite,
            seed: config.seed,
            config: config.clone(),
            passed: checks.iter().all(|c| c.pass),
            checks,
            facts,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    pub report: Report,
    pub singular_values_csv: Option<String>,
    pub residual_field_csv: Option<String>,
}

impl SuiteOutput {
    fn plain(report: Report) -> Self {
        SuiteOutput {
            report,
            singular_values_csv: None,
            residual_field_csv: None,
        }
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteOutput> {
    match suite {
        Suite::Flat => flat_suite(config),
        Suite::Identities => identities_suite(config),
        Suite::Index => index_suite(config),
        Suite::Bochner => bochner_suite(config),
        Suite::Moduli => moduli_suite(config),
        Suite::Linearize => linearize_suite(config),
        Suite::VerifyFlat => verify_flat_suite(config),
        Suite::VerifyComponents => verify_components_suite(config),
    }
}

fn superfield_max_abs(f: &SuperField<Exact>) -> f64 {
    f.parts()
        .flat_map(|(_, _, p)| {
            p.terms()
                .map(|(_, c)| crate::scalar::Scalar::magnitude(c))
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// Residual `≡ 0` against `h = k = 0 ∧ ∂_{z̄}f = ∂_{z̄}g = 0` on random superfields.
pub fn flat_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let trials = config.trials.unwrap_or(100);
    let n_gen = config.generators.unwrap_or(2);
    let mut rng = config.rng();
    let j = FlatTargetJ::standard(1);
    let (mut residual_mismatch, mut component_mismatch, mut route_mismatch) = (0, 0, 0);
    let mut holomorphic = 0;
    let mut hol_residual = 0.0f64;
    for t in 0..trials {
        let case = FlatCase::ALL[t % FlatCase::ALL.len()];
        let phi = random_flat_superfield(&mut rng, n_gen, case);
        let residual = flat_sjc_residual(&real_components(std::slice::from_ref(&phi)), &j)?;
        let zero = residual.iter().all(SuperField::is_zero);
        let c = HoloComponents::of(&phi);
        let pred =
            c.h.is_zero() && c.k.is_zero() && c.f.d_zbar().is_zero() && c.g.d_zbar().is_zero();
        let label = case.is_holomorphic();
        residual_mismatch += usize::from(zero != label);
        component_mismatch += usize::from(pred != label);
        route_mismatch +=
            usize::from(holomorphy_equivalence_check(std::slice::from_ref(&phi))? != label);
        if label {
            holomorphic += 1;
            hol_residual = residual
                .iter()
                .map(superfield_max_abs)
                .fold(hol_residual, f64::max);
        }
    }
    let checks = vec![
        CheckEntry::count(
            "flat.residual_vs_construction_mismatches",
            residual_mismatch,
            0,
        ),
        CheckEntry::count(
            "flat.components_vs_construction_mismatches",
            component_mismatch,
            0,
        ),
        CheckEntry::count("flat.dbar_route_mismatches", route_mismatch, 0),
        CheckEntry::small("flat.holomorphic_residual_max", hol_residual, 0.0),
    ];
    let facts = BTreeMap::from([
        ("trials".to_string(), trials.to_string()),
        ("holomorphic_samples".to_string(), holomorphic.to_string()),
        ("generators".to_string(), n_gen.to_string()),
    ]);
    Ok(SuiteOutput::plain(Report::new(
        Suite::Flat,
        config,
        checks,
        facts,
    )))
}

/// Fierz chains with `∇R` and the energy identity in exact arithmetic.
pub fn identities_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let trials = config.trials.unwrap_or(50);
    let n_gen = config.generators.unwrap_or(4);
    let dim = 2 * config.model.as_ref().map_or(2, |m| m.n);
    let mut rng = config.rng();
    let (mut c1, mut c2, mut n1, mut n2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let r = random_curvature_with_nabla(&mut rng, dim);
        let psi = random_exact_spinor(&mut rng, dim, n_gen);
        let rep = fierz_check(&r, &psi, true)?;
        c1 = c1.max(rep.chain1);
        c2 = c2.max(rep.chain2);
        n1 = n1.max(rep.nabla_chain1.unwrap_or(f64::NAN));
        n2 = n2.max(rep.nabla_chain2.unwrap_or(f64::NAN));
    }
    let maps = trials.max(20);
    let j = FlatTargetJ::standard(dim / 2);
    let mut energy_nonzero = 0;
    let mut energy_max = 0.0f64;
    for _ in 0..maps {
        let phi: Vec<SuperField<Exact>> = (0..dim)
            .map(|_| random_real_even_superfield(&mut rng, 2))
            .collect();
        let r = energy_identity_residual(&phi, &j)?;
        energy_nonzero += usize::from(!r.is_zero());
        energy_max = energy_max.max(superfield_max_abs(&r));
    }
    let checks = vec![
        CheckEntry::small("fierz.chain1", c1, 0.0),
        CheckEntry::small("fierz.chain2", c2, 0.0),
        CheckEntry::small("fierz.nabla_chain1", n1, 0.0),
        CheckEntry::small("fierz.nabla_chain2", n2, 0.0),
        CheckEntry::count("energy.nonzero_residuals", energy_nonzero, 0),
        CheckEntry::small("energy.residual_max", energy_max, 0.0),
    ];
    let facts = BTreeMap::from([
        ("curvature_samples".to_string(), trials.to_string()),
        ("energy_samples".to_string(), maps.to_string()),
        ("target_dim".to_string(), dim.to_string()),
        ("generators".to_string(), n_gen.to_string()),
    ]);
    Ok(SuiteOutput::plain(Report::new(
        Suite::Identities,
        config,
        checks,
        facts,
    )))
}

fn index_checks(r: &IndexReport, checks: &mut Vec<CheckEntry>) {
    checks.push(CheckEntry::flag(
        format!("{}.conclusive", r.operator),
        r.conclusive,
    ));
    checks.push(CheckEntry::int(
        format!("{}.real_index", r.operator),
        r.real_index,
        r.formula_real_index,
    ));
}

/// Numerical index of `∂̄` on `O(k)`, the operators of a degree-`k` curve in `CPⁿ`, or the torus Dirac operator.
pub fn index_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut facts = BTreeMap::new();
    match config.surface {
        Surface::Sphere => {
            let k = config.degree;
            let cutoff = config.cutoff.unwrap_or(k.unsigned_abs() as usize + 6);
            let r = numeric_index(&build_dbar_sphere(k, cutoff)?, config.threshold)?;
            let (h0, h1) = h_oracle(k);
            checks.push(CheckEntry::count(
                format!("{}.kernel", r.operator),
                r.kernel_dim,
                h0,
            ));
            checks.push(CheckEntry::count(
                format!("{}.cokernel", r.operator),
                r.cokernel_dim,
                h1,
            ));
            index_checks(&r, &mut checks);
            reports.push(r);
            if k >= 0 {
                let n = config.target_rank;
                let split = cpn_splitting(n, k);
                let ops = sphere_operators(&split, cutoff.max(2 * k as usize + 3))?;
                facts.insert("splitting".into(), format!("{split:?}"));
                for op in [&ops.d_phi, &ops.dirac10, &ops.dirac01] {
                    let r = numeric_index(op, config.threshold)?;
                    index_checks(&r, &mut checks);
                    reports.push(r);
                }
            }
        }
        Surface::Torus => {
            let cutoff = config.cutoff.unwrap_or(4);
            let t = build_dirac_torus(config.target_rank, cutoff)?;
            checks.push(CheckEntry::small(
                "torus.antisymmetry",
                t.antisymmetry,
                ANTISYMMETRY_TOL,
            ));
            let dev = (t.dirac10.matrix.transpose() + &t.dirac01.matrix).amax();
            checks.push(CheckEntry::small(
                "torus.adjoint_deviation",
                dev,
                ANTISYMMETRY_TOL,
            ));
            let full = numeric_index(&t.full, config.threshold)?;
            checks.push(CheckEntry::count(
                "torus.kernel_real",
                full.real_kernel_dim,
                4 * config.target_rank,
            ));
            for r in [
                full,
                numeric_index(&t.dirac10, config.threshold)?,
                numeric_index(&t.dirac01, config.threshold)?,
            ] {
                index_checks(&r, &mut checks);
                reports.push(r);
            }
            facts.insert("grid".into(), format!("{0}x{0}", 2 * cutoff + 1));
        }
    }
    let csv = singular_values_csv(&reports);
    Ok(SuiteOutput {
        report: Report::new(Suite::Index, config, checks, facts),
        singular_values_csv: Some(csv),
        residual_field_csv: None,
    })
}

/// Smallest singular value of `𝔻^{0,1}` on the sphere for a constant map into `ℂⁿ`.
pub fn flat_sphere_gap(n: usize, cutoff: usize) -> Result<f64> {
    let ops = sphere_operators(&vec![0; n], cutoff)?;
    Ok(ops.dirac01.singular_values().last().copied().unwrap_or(0.0))
}

fn is_bijective(op: &OperatorMatrix, threshold: f64) -> Result<bool> {
    let r = numeric_index(op, threshold)?;
    Ok(r.conclusive && r.kernel_dim == 0 && r.cokernel_dim == 0)
}

/// Bochner verdicts for the configured input, with spectral cross-checks on the sphere.
pub fn bochner_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let mut input = BochnerInput::new(
        config.genus,
        config.sigma,
        config.energy_min,
        config.energy_max,
    )?;
    if let Some(s) = config.scalar_curvature {
        input.scalar_curvature = s;
    }
    let v = bochner_classify(&input)?;
    let cutoff = config.cutoff.unwrap_or(10);
    let n = config.target_rank;
    let mut checks = vec![CheckEntry::new(
        "sphere_flat.D01.smallest_singular",
        flat_sphere_gap(n, cutoff)?,
        Cmp::Gt,
        SPECTRAL_GAP,
        0.0,
    )];
    if input.genus == 0 && input.sigma > 0.0 {
        // degree-k curves in CPⁿ: 𝔻^{1,0} bijective exactly for k = 0
        for k in 0..=2 {
            let ops = sphere_operators(&cpn_splitting(n, k), cutoff.max(2 * k as usize + 3))?;
            let bij = is_bijective(&ops.dirac10, config.threshold)?;
            checks.push(CheckEntry::flag(
                format!("cpn_degree_{k}.D10_bijective_iff_trivial"),
                bij == (k == 0),
            ));
        }
        if v.dirac10 == Verdict::Bijective {
            checks.push(CheckEntry::flag(
                "verdict.bijective_implies_trivial_class",
                v.implies_trivial_class(),
            ));
        }
    }
    let mut facts = BTreeMap::from([
        ("D10".to_string(), v.dirac10.as_str().to_string()),
        ("D01".to_string(), v.dirac01.as_str().to_string()),
        (
            "scalar_curvature".to_string(),
            input.scalar_curvature.to_string(),
        ),
    ]);
    if let Some(t) = input.threshold() {
        facts.insert("threshold".into(), t.to_string());
    }
    Ok(SuiteOutput::plain(Report::new(
        Suite::Bochner,
        config,
        checks,
        facts,
    )))
}

/// Moduli dimension with an index cross-check for genus-zero curves in `CPⁿ`.
pub fn moduli_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let q = ModuliDimQuery {
        n: config.n,
        genus: config.genus,
        c1a: config.c1a,
        dimx: config.dimx,
    };
    let d = moduli_dimension(&q);
    let n = i64::from(q.n);
    let mut checks = vec![CheckEntry::int(
        "moduli.even_minus_odd",
        d.relative.even - d.relative.odd,
        2 * n * (1 - i64::from(q.genus)),
    )];
    if q.genus == 0
        && q.n >= 1
        && q.n <= 3
        && q.c1a >= 0
        && q.c1a % (n + 1) == 0
        && q.c1a / (n + 1) <= 3
    {
        let k = q.c1a / (n + 1);
        let ops = sphere_operators(&cpn_splitting(q.n as usize, k), 2 * k as usize + 4)?;
        let dphi = numeric_index(&ops.d_phi, config.threshold)?;
        let d10 = numeric_index(&ops.dirac10, config.threshold)?;
        checks.push(CheckEntry::flag(
            "index.conclusive",
            dphi.conclusive && d10.conclusive,
        ));
        checks.push(CheckEntry::int(
            "index.D_phi_vs_even",
            dphi.real_index,
            d.relative.even,
        ));
        checks.push(CheckEntry::int(
            "index.D10_vs_odd",
            d10.real_index,
            d.relative.odd,
        ));
    }
    let facts = BTreeMap::from([
        ("relative".to_string(), d.relative.to_string()),
        ("total".to_string(), d.total.to_string()),
    ]);
    Ok(SuiteOutput::plain(Report::new(
        Suite::Moduli,
        config,
        checks,
        facts,
    )))
}

/// Residual max-norms for a holomorphic map with `ψ = F = χ = 0` into `ℂⁿ` and for a
/// holomorphic section along a holomorphic map into `CP¹`.
pub fn component_sanity(m: usize, seed: u64) -> Result<(Vec<CheckEntry>, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patch = ReducedPatch::flat(m)?;
    let tol = if patch.is_spectral() {
        SPECTRAL_TOL
    } else {
        FD_TOL
    };
    let flat = AlmostKahlerModel::flat(2);
    let map = holomorphic_linear_map(&mut rng, &patch, 2, 2);
    let r = residual_components(&patch, &flat, &map, &Gravitino::zero(patch.len(), 2))?;
    let csv = r.to_csv(&patch);
    let mut checks = vec![CheckEntry::small(
        "sanity.flat_holomorphic",
        r.max_abs().into_iter().fold(0.0, f64::max),
        tol,
    )];

    let fs = AlmostKahlerModel::fubini_study_cp1();
    let n_gen = 3;
    let mut map = holomorphic_linear_map(&mut rng, &patch, 1, n_gen);
    for v in map.drift.iter_mut().flatten() {
        *v *= 0.3;
    }
    let g = |i| Grassmann::<f64>::generator(n_gen, i).expect("generator");
    let c3 = vec![&g(1) + &g(3).scale(&0.5), g(2).scale(&-0.75)];
    let j = standard_j(1);
    let c4: Vec<Grassmann<f64>> = (0..2)
        .map(|b| {
            (0..2).fold(Grassmann::zero(n_gen), |acc, c| {
                &acc + &c3[c].scale(&j[(b, c)])
            })
        })
        .collect();
    for p in 0..patch.len() {
        map.psi[p] = [c3.clone(), c4.clone()];
    }
    map.validate(&patch, &fs)?;
    let r = residual_components(&patch, &fs, &map, &Gravitino::zero(patch.len(), n_gen))?;
    checks.push(CheckEntry::small(
        "sanity.kahler_holomorphic_section",
        r.max_abs().into_iter().fold(0.0, f64::max),
        tol,
    ));
    Ok((checks, csv))
}

/// Finite-difference linearization at a holomorphic map into a flat target, plus Weyl covariance.
pub fn linearize_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let m = config.resolution;
    let n_gen = config.generators.unwrap_or(2);
    let desc = config.model.clone().unwrap_or(ModelDescriptor {
        kind: "flat".into(),
        n: 1,
        sigma: None,
    });
    let model = desc.build()?;
    let mut rng = config.rng();
    let patch = ReducedPatch::flat(m)?;
    let map = holomorphic_linear_map(&mut rng, &patch, model.n, n_gen);
    let dirs = random_directions(&mut rng, &patch, 2 * model.n, n_gen, 2);
    let lin = linearization_fd_check(&patch, &model, &map, &dirs, config.step)?;
    let mut checks: Vec<CheckEntry> = lin
        .blocks
        .iter()
        .map(|b| CheckEntry::block("linearization", b))
        .collect();

    let (sanity, csv) = component_sanity(m, config.seed)?;
    checks.extend(sanity);

    // a varying rescaling forces fourth-order differences; this grid resolves |k| ≤ 1 below the FD tolerance
    let wpatch = ReducedPatch::flat(m.max(WEYL_RESOLUTION))?;
    let smooth = random_directions(&mut rng, &wpatch, 2 * model.n, n_gen, 1);
    let mut wmap = holomorphic_linear_map(&mut rng, &wpatch, model.n, n_gen);
    let mut chi = Gravitino::zero(wpatch.len(), n_gen);
    if let (Some(z), Some(s), Some(r)) = (smooth.zeta, smooth.sigma, smooth.rho) {
        wmap.psi = z;
        wmap.f = s;
        chi = r;
    }
    let mu: Vec<f64> = (0..wpatch.len())
        .map(|p| {
            let (x, y) = wpatch.coords(p);
            1.0 + 0.2
                * (2.0 * std::f64::consts::PI * x).sin()
                * (2.0 * std::f64::consts::PI * y).cos()
        })
        .collect();
    let weyl = weyl_covariance_check(&wpatch, &model, &wmap, &chi, &mu)?;
    checks.extend(weyl.blocks.iter().map(|b| CheckEntry::block("weyl", b)));

    let facts = BTreeMap::from([
        ("model".to_string(), desc.kind.clone()),
        ("resolution".to_string(), m.to_string()),
        (
            "linearization_tol".to_string(),
            LINEARIZATION_TOL.to_string(),
        ),
    ]);
    Ok(SuiteOutput {
        report: Report::new(Suite::Linearize, config, checks, facts),
        singular_values_csv: None,
        residual_field_csv: Some(csv),
    })
}

/// Input of `verify-flat`: real components of a map into `ℂⁿ` with the standard `J`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatInput {
    pub generators: usize,
    /// `Φ^1, …, Φ^{2n}` in the superfield literal format.
    pub phi: Vec<String>,
    #[serde(default)]
    pub degree_cap: Option<u32>,
}

fn read_input(config: &SuiteConfig) -> Result<String> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("this suite needs an input file".into()))?;
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Flat-model residual of a user-supplied map.
pub fn verify_flat_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let input: FlatInput =
        serde_json::from_str(&read_input(config)?).map_err(|e| Error::Config(e.to_string()))?;
    if input.phi.is_empty() || !input.phi.len().is_multiple_of(2) {
        return Err(Error::ComponentCount {
            expected: 2 * input.phi.len().div_ceil(2).max(1),
            got: input.phi.len(),
        });
    }
    let cap = input.degree_cap.unwrap_or(DEFAULT_DEGREE_CAP);
    let phi = input
        .phi
        .iter()
        .map(|s| SuperField::<Exact>::parse_literal(input.generators, Parity::Even, s, cap))
        .collect::<Result<Vec<_>>>()?;
    let n = phi.len() / 2;
    let residual = flat_sjc_residual(&phi, &FlatTargetJ::standard(n))?;
    let max = residual.iter().map(superfield_max_abs).fold(0.0, f64::max);
    let i = crate::scalar::exact(0, 1);
    let phi_z: Vec<_> = (0..n)
        .map(|c| phi[2 * c].add(&phi[2 * c + 1].scale(&i)))
        .collect();
    let holomorphic = holomorphy_equivalence_check(&phi_z)?;
    let zero = residual.iter().all(SuperField::is_zero);
    let checks = vec![CheckEntry::flag(
        "flat.residual_matches_holomorphy",
        zero == holomorphic,
    )];
    let mut facts = BTreeMap::from([
        ("holomorphic".to_string(), holomorphic.to_string()),
        ("residual_zero".to_string(), zero.to_string()),
        ("residual_max_coefficient".to_string(), max.to_string()),
    ]);
    for (b, r) in residual.iter().enumerate() {
        facts.insert(format!("residual_{b}"), r.to_literal());
    }
    Ok(SuiteOutput::plain(Report::new(
        Suite::VerifyFlat,
        config,
        checks,
        facts,
    )))
}

/// Component residuals of a map read from a component file.
pub fn verify_components_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let text = read_input(config)?;
    let file = read_component_file(text.as_bytes())?;
    let model = file.model.build()?;
    let patch = &file.patch;
    let tol = if patch.is_spectral() {
        SPECTRAL_TOL
    } else {
        FD_TOL
    };
    let r = residual_components(patch, &model, &file.map, &file.chi)?;
    let names = ["holomorphic_spinor", "auxiliary", "dbar_phi", "dirac"];
    let checks = names
        .iter()
        .zip(r.max_abs())
        .map(|(n, v)| CheckEntry::small(format!("residual.{n}"), v, tol))
        .collect();
    let facts = BTreeMap::from([
        ("model".to_string(), file.model.kind.clone()),
        ("resolution".to_string(), patch.m().to_string()),
        (
            "derivatives".to_string(),
            if patch.is_spectral() {
                "spectral"
            } else {
                "fd4"
            }
            .to_string(),
        ),
    ]);
    Ok(SuiteOutput {
        report: Report::new(Suite::VerifyComponents, config, checks, facts),
        singular_values_csv: None,
        residual_field_csv: Some(r.to_csv(patch)),
    })
}

/// A map with `ψ = F = χ = 0`; convenience for writing component files.
pub fn zero_fields(patch: &ReducedPatch, dim: usize, n_gen: usize) -> (ComponentMap, Gravitino) {
    (
        ComponentMap::zero(patch.len(), dim, n_gen),
        Gravitino::zero(patch.len(), n_gen),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SuiteConfig {
        SuiteConfig::default()
    }

    #[test]
    fn config_defaults_and_unknown_keys() {
        let c = SuiteConfig::from_json(r#"{"seed": 7, "surface": "torus"}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.surface, Surface::Torus);
        assert!(SuiteConfig::from_json(r#"{"sed": 7}"#).is_err());
        assert_eq!("verify-flat".parse::<Suite>().unwrap(), Suite::VerifyFlat);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn check_entry_comparisons() {
        assert!(CheckEntry::eq("a", 1.0, 1.0 + 1e-12, 1e-10).pass);
        assert!(!CheckEntry::small("b", 2e-8, 1e-8).pass);
        assert!(CheckEntry::new("c", 0.2, Cmp::Gt, 0.1, 0.0).pass);
        assert!(!CheckEntry::new("d", 0.1, Cmp::Gt, 0.1, 0.0).pass);
        assert!(!CheckEntry::small("e", f64::NAN, 1.0).pass);
    }

    #[test]
    fn flat_suite_small() {
        let mut c = cfg();
        c.trials = Some(12);
        let out = flat_suite(&c).unwrap();
        assert!(
            out.report.passed,
            "{:?}",
            out.report.failures().collect::<Vec<_>>()
        );
        assert_eq!(out.report.facts["holomorphic_samples"], "2");
    }

    #[test]
    fn moduli_suite_values() {
        let mut c = cfg();
        c.n = 2;
        c.c1a = 3;
        let out = moduli_suite(&c).unwrap();
        assert!(out.report.passed);
        assert_eq!(out.report.facts["relative"], "10|6");
        assert!(out.report.check("index.D_phi_vs_even").is_some());
    }

    #[test]
    fn index_suite_sphere_degree_one() {
        let mut c = cfg();
        c.cutoff = Some(8);
        let out = index_suite(&c).unwrap();
        assert!(
            out.report.passed,
            "{:?}",
            out.report.failures().collect::<Vec<_>>()
        );
        assert_eq!(out.report.check("D10.real_index").unwrap().value, 4.0);
        assert!(out
            .singular_values_csv
            .unwrap()
            .starts_with("operator,i,sigma\n"));
    }

    #[test]
    fn bochner_suite_default() {
        let out = bochner_suite(&cfg()).unwrap();
        assert!(
            out.report.passed,
            "{:?}",
            out.report.failures().collect::<Vec<_>>()
        );
        assert_eq!(out.report.facts["D10"], "bijective");
    }

    #[test]
    fn sanity_residuals() {
        let (checks, csv) = component_sanity(16, 1).unwrap();
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
        assert!(csv.starts_with("p,x1,x2"));
    }

    #[test]
    fn reports_are_deterministic() {
        let mut c = cfg();
        c.trials = Some(6);
        c.seed = 11;
        let a = flat_suite(&c).unwrap().report.to_json();
        let b = flat_suite(&c).unwrap().report.to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn missing_input_is_a_config_error() {
        assert!(matches!(verify_flat_suite(&cfg()), Err(Error::Config(_))));
        assert!(matches!(
            verify_components_suite(&cfg()),
            Err(Error::Config(_))
        ));
    }
}
