//! Injectivity and surjectivity of `𝔻^{1,0}`, `𝔻^{0,1}` from the Bochner curvature term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Surjective,
    Injective,
    Bijective,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Surjective => "surjective",
            Verdict::Injective => "injective",
            Verdict::Bijective => "bijective",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Scalar curvature of a constant-curvature metric of genus `p`, normalized to `{2, 0, −2}`.
pub fn normalized_scalar_curvature(genus: u32) -> f64 {
    match genus {
        0 => 2.0,
        1 => 0.0,
        _ => -2.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochnerInput {
    pub genus: u32,
    /// Domain scalar curvature `𝔰`.
    pub scalar_curvature: f64,
    /// Constant holomorphic sectional curvature `σ` of the target.
    pub sigma: f64,
    /// Bounds of `‖dφ‖²` over the surface.
    pub energy_min: f64,
    pub energy_max: f64,
}

impl BochnerInput {
    /// Input with the normalized scalar curvature for `genus`.
    pub fn new(genus: u32, sigma: f64, energy_min: f64, energy_max: f64) -> Result<Self> {
        let b = BochnerInput {
            genus,
            scalar_curvature: normalized_scalar_curvature(genus),
            sigma,
            energy_min,
            energy_max,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.scalar_curvature,
            self.sigma,
            self.energy_min,
            self.energy_max,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite Bochner input".into()));
        }
        if self.energy_min < 0.0 || self.energy_min > self.energy_max {
            return Err(Error::Precondition(format!(
                "energy bounds [{}, {}] are not 0 ≤ min ≤ max",
                self.energy_min, self.energy_max
            )));
        }
        let sign = |x: f64| if x == 0.0 { 0.0 } else { x.signum() };
        let s = self.scalar_curvature;
        if sign(s) != sign(normalized_scalar_curvature(self.genus)) {
            return Err(Error::Precondition(format!(
                "scalar curvature {s} has the wrong sign for genus {}",
                self.genus
            )));
        }
        Ok(())
    }

    /// `|𝔰| / (2|σ|)`, or `None` for `σ = 0`.
    pub fn threshold(&self) -> Option<f64> {
        (self.sigma != 0.0).then(|| self.scalar_curvature.abs() / (2.0 * self.sigma.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BochnerVerdicts {
    pub dirac10: Verdict,
    pub dirac01: Verdict,
}

impl BochnerVerdicts {
    /// The verdicts with the roles of the two operators exchanged.
    pub fn swapped(self) -> Self {
        BochnerVerdicts {
            dirac10: self.dirac01,
            dirac01: self.dirac10,
        }
    }

    /// A bijective `𝔻^{1,0}` has index `2⟨c₁, A⟩ = 0`; for `CPⁿ` targets this forces degree `k = 0`.
    pub fn implies_trivial_class(self) -> bool {
        self.dirac10 == Verdict::Bijective
    }
}

/// Case table for constant curvature domains and targets of constant holomorphic sectional curvature.
///
/// Inputs outside the table give `Inconclusive`.
pub fn bochner_classify(input: &BochnerInput) -> Result<BochnerVerdicts> {
    input.validate()?;
    let inconclusive = BochnerVerdicts {
        dirac10: Verdict::Inconclusive,
        dirac01: Verdict::Inconclusive,
    };
    let Some(t) = input.threshold() else {
        return Ok(if input.genus == 0 {
            BochnerVerdicts {
                dirac10: Verdict::Bijective,
                dirac01: Verdict::Bijective,
            }
        } else {
            inconclusive
        });
    };
    let (lo, hi) = (input.energy_min, input.energy_max);
    // verdicts for σ > 0: 𝔻^{0,1} on the injective side, 𝔻^{1,0} on the surjective side
    let positive = match input.genus {
        0 => {
            let small = hi <= t && lo < t;
            BochnerVerdicts {
                dirac10: if small {
                    Verdict::Bijective
                } else {
                    Verdict::Surjective
                },
                dirac01: Verdict::Injective,
            }
        }
        1 if hi > 0.0 => BochnerVerdicts {
            dirac10: Verdict::Surjective,
            dirac01: Verdict::Injective,
        },
        p if p > 1 && lo >= t && hi > t => BochnerVerdicts {
            dirac10: Verdict::Surjective,
            dirac01: Verdict::Injective,
        },
        _ => inconclusive,
    };
    Ok(if input.sigma > 0.0 {
        positive
    } else {
        positive.swapped()
    })
}
