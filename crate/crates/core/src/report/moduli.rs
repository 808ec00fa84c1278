//! Dimension of the moduli space of super J-holomorphic curves.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliDimQuery {
    /// Complex dimension of the target.
    pub n: u32,
    pub genus: u32,
    /// `⟨c₁(TN), A⟩`.
    pub c1a: i64,
    /// Dimension of the gravitino parameter space.
    pub dimx: u32,
}

/// Super dimension `even|odd`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuperDimension {
    pub even: i64,
    pub odd: i64,
}

impl fmt::Display for SuperDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.even, self.odd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModuliDimension {
    /// Dimension over the space of gravitinos.
    pub relative: SuperDimension,
    pub total: SuperDimension,
}

/// `2n(1 − p) + 2⟨c₁,A⟩ | 2⟨c₁,A⟩`, plus `0|dim 𝒳` for the total space.
pub fn moduli_dimension(q: &ModuliDimQuery) -> ModuliDimension {
    let n = i64::from(q.n);
    let p = i64::from(q.genus);
    let relative = SuperDimension {
        even: 2 * n * (1 - p) + 2 * q.c1a,
        odd: 2 * q.c1a,
    };
    let total = SuperDimension {
        even: relative.even,
        odd: relative.odd + i64::from(q.dimx),
    };
    ModuliDimension { relative, total }
}

/// `⟨c₁(TCPⁿ), A⟩ = k(n + 1)` for `A` of degree `k`.
pub fn cpn_c1a(n: u32, k: i64) -> i64 {
    k * (i64::from(n) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32, genus: u32, c1a: i64, dimx: u32) -> ModuliDimension {
        moduli_dimension(&ModuliDimQuery {
            n,
            genus,
            c1a,
            dimx,
        })
    }

    #[test]
    fn flat_target_sphere() {
        for n in 1..5 {
            assert_eq!(
                dim(n, 0, 0, 0).relative,
                SuperDimension {
                    even: 2 * n as i64,
                    odd: 0
                }
            );
        }
    }

    #[test]
    fn projective_targets() {
        assert_eq!(dim(2, 0, cpn_c1a(2, 1), 0).relative.to_string(), "10|6");
        assert_eq!(dim(1, 0, cpn_c1a(1, 2), 0).relative.to_string(), "10|8");
    }

    #[test]
    fn gravitino_space_adds_odd_dimensions() {
        let d = dim(3, 2, 4, 5);
        assert_eq!(d.relative.to_string(), "2|8");
        assert_eq!(d.total.to_string(), "2|13");
    }
}
