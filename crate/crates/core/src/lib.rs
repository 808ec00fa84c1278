//! Verification laboratory for super J-holomorphic curves.
//!
//! The crate is organised bottom-up:
//!
//! * [`grassmann`]: exact arithmetic in finitely generated Grassmann algebras;
//! * [`superfield`]: polynomial superfields on the flat super Riemann surface;
//! * [`target`]: almost Kähler target models and their curvature;
//! * [`component`]: component fields, the twisted Dirac operator and the
//!   component equations on a periodic patch;
//! * [`index`]: discretized Cauchy–Riemann and Dirac operators and their indices;
//! * [`report`]: Bochner classification, moduli dimensions and suite runners.

pub mod component;
pub mod error;
pub mod grassmann;
pub mod index;
pub mod report;
pub mod scalar;
pub mod superfield;
pub mod target;

pub use error::{Error, Result};
pub use grassmann::{Grassmann, Parity};
pub use scalar::{ComplexScalar, Exact, Scalar, C64};
pub use superfield::{FlatTargetJ, PolyFn, SuperField};
pub use target::{AlmostKahlerModel, CurvatureTensor, ModelDescriptor, TargetGeometry};
