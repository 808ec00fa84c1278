//! Bochner classification, moduli dimensions and the suite runners behind the CLI.

mod bochner;
mod moduli;
pub mod sample;
mod suite;

pub use bochner::{
    bochner_classify, normalized_scalar_curvature, BochnerInput, BochnerVerdicts, Verdict,
};
pub use moduli::{cpn_c1a, moduli_dimension, ModuliDimQuery, ModuliDimension, SuperDimension};
pub use suite::{
    bochner_suite, component_sanity, flat_sphere_gap, flat_suite, identities_suite, index_suite,
    linearize_suite, moduli_suite, run_suite, verify_components_suite, verify_flat_suite,
    zero_fields, CheckEntry, Cmp, FlatInput, Report, Suite, SuiteConfig, SuiteOutput, Surface,
    ANTISYMMETRY_TOL, SCHEMA_VERSION, SPECTRAL_GAP,
};
