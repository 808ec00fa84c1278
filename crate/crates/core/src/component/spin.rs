//! Clifford algebra of the surface, gravitino projectors and the gravitino pairings.

use crate::grassmann::Grassmann;
use crate::scalar::Scalar;

use super::{gvec_zero, Form, GVec, GravitinoPoint, Spinor};

/// Integer 2×2 matrix.
pub type M2 = [[i64; 2]; 2];

pub(crate) fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn m2_add(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn m2_max_abs(a: &M2) -> i64 {
    a.iter().flatten().fold(0, |m, x| m.max(x.abs()))
}

/// Gamma matrices, `I = γ_1γ_2` and the spinor pairing.
///
/// `γ_t = Γ^t ε` with `Γ^1 = diag(1,−1)`, `Γ^2 = offdiag(1,1)` and
/// `ε_{34} = ε^{34} = +1`, so `γ_1 = [[0,1],[1,0]]`, `γ_2 = [[−1,0],[0,1]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinConventions {
    pub gamma: [M2; 2],
    /// Symmetric matrices `Γ^t_{μν}`.
    pub big_gamma: [M2; 2],
    /// `ε_{αβ}`; numerically equal to `ε^{αβ}`.
    pub eps: M2,
    pub i: M2,
    /// Auxiliary positive pairing `ḡ_S = δ`.
    pub gbar: M2,
}

impl SpinConventions {
    pub fn standard() -> Self {
        let eps = [[0, 1], [-1, 0]];
        let big_gamma = [[[1, 0], [0, -1]], [[0, 1], [1, 0]]];
        let gamma = [m2_mul(&big_gamma[0], &eps), m2_mul(&big_gamma[1], &eps)];
        let i = m2_mul(&gamma[0], &gamma[1]);
        SpinConventions {
            gamma,
            big_gamma,
            eps,
            i,
            gbar: [[1, 0], [0, 1]],
        }
    }

    /// Largest integer defect of: Clifford relation, `I² = −1`, `ε^{αβ}ε_{βγ} = −δ`,
    /// `Σ_b γ_b γ_a γ_b = 0` and `γ_t = Γ^t ε`.
    pub fn defects(&self) -> [i64; 5] {
        let id = [[1, 0], [0, 1]];
        let mut cl = 0;
        for a in 0..2 {
            for b in 0..2 {
                let anti = m2_add(
                    &m2_mul(&self.gamma[a], &self.gamma[b]),
                    &m2_mul(&self.gamma[b], &self.gamma[a]),
                );
                let want = if a == b {
                    [[2, 0], [0, 2]]
                } else {
                    [[0; 2]; 2]
                };
                cl = cl.max(m2_max_abs(&m2_add(&anti, &scale(&want, -1))));
            }
        }
        let i2 = m2_max_abs(&m2_add(&m2_mul(&self.i, &self.i), &id));
        let ee = m2_max_abs(&m2_add(&m2_mul(&self.eps, &self.eps), &id));
        let mut sandwich = 0;
        for a in 0..2 {
            let mut s = [[0; 2]; 2];
            for b in 0..2 {
                s = m2_add(
                    &s,
                    &m2_mul(&m2_mul(&self.gamma[b], &self.gamma[a]), &self.gamma[b]),
                );
            }
            sandwich = sandwich.max(m2_max_abs(&s));
        }
        let mut fact = 0;
        for t in 0..2 {
            let d = m2_add(
                &self.gamma[t],
                &scale(&m2_mul(&self.big_gamma[t], &self.eps), -1),
            );
            fact = fact.max(m2_max_abs(&d));
        }
        [cl, i2, ee, sandwich, fact]
    }
}

fn scale(a: &M2, s: i64) -> M2 {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

/// `(row · A)^λ = Σ_κ row^κ A[κ][λ]`.
fn right_apply<T: Scalar>(row: &[Grassmann<T>; 2], a: &M2, coef: &T) -> [Grassmann<T>; 2] {
    let n_gen = row[0].n_gen();
    let mut out = [Grassmann::zero(n_gen), Grassmann::zero(n_gen)];
    for (l, o) in out.iter_mut().enumerate() {
        for k in 0..2 {
            if a[k][l] != 0 {
                *o = &*o + &row[k].scale(&(T::from_i64(a[k][l]) * coef.clone()));
            }
        }
    }
    out
}

fn row_add<T: Scalar>(a: &[Grassmann<T>; 2], b: &[Grassmann<T>; 2]) -> [Grassmann<T>; 2] {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

/// `(Pχ)_a = ½ Σ_b χ_b γ_b γ_a` and `(Qχ)_a = ½ Σ_b χ_b γ_a γ_b`.
pub fn project_pq<T: Scalar>(chi: &GravitinoPoint<T>) -> (GravitinoPoint<T>, GravitinoPoint<T>) {
    let sc = SpinConventions::standard();
    let half = T::from_ratio(1, 2);
    let n_gen = chi[0][0].n_gen();
    let zero = || [Grassmann::zero(n_gen), Grassmann::zero(n_gen)];
    let mut p = [zero(), zero()];
    let mut q = [zero(), zero()];
    for a in 0..2 {
        for b in 0..2 {
            let ba = m2_mul(&sc.gamma[b], &sc.gamma[a]);
            let ab = m2_mul(&sc.gamma[a], &sc.gamma[b]);
            p[a] = row_add(&p[a], &right_apply(&chi[b], &ba, &half));
            q[a] = row_add(&q[a], &right_apply(&chi[b], &ab, &half));
        }
    }
    (p, q)
}

/// `δ_γ χ = Σ_k χ_k γ_k`, an upper-index spinor.
pub fn delta_gamma<T: Scalar>(chi: &GravitinoPoint<T>) -> [Grassmann<T>; 2] {
    let sc = SpinConventions::standard();
    let one = T::one();
    row_add(
        &right_apply(&chi[0], &sc.gamma[0], &one),
        &right_apply(&chi[1], &sc.gamma[1], &one),
    )
}

/// Lowers an upper spinor index: `s_α = s^λ ε_{λα}`.
pub fn lower_spinor<T: Scalar>(s: &[Grassmann<T>; 2]) -> [Grassmann<T>; 2] {
    right_apply(s, &SpinConventions::standard().eps, &T::one())
}

/// `⟨Qχ, ψ⟩_k = Σ_κ (Qχ)_k^κ ψ_κ`.
pub fn pair_q_psi<T: Scalar>(qchi: &GravitinoPoint<T>, psi: &Spinor<T>) -> Form<T> {
    let dim = psi[0].len();
    let n_gen = qchi[0][0].n_gen();
    let mut out = [gvec_zero(dim, n_gen), gvec_zero(dim, n_gen)];
    for k in 0..2 {
        for kappa in 0..2 {
            if qchi[k][kappa].is_zero() {
                continue;
            }
            for b in 0..dim {
                out[k][b] = &out[k][b] + &(&qchi[k][kappa] * &psi[kappa][b]);
            }
        }
    }
    out
}

/// `⟨∨Qχ, V⟩_α = ½ Σ I_α^β (γ_t)_β^ν (Γ^s)_{ντ} (Qχ)_t^τ V_s`, Grassmann order `χ` then `V`.
pub fn vee_q<T: Scalar>(qchi: &GravitinoPoint<T>, v: &Form<T>) -> Spinor<T> {
    let sc = SpinConventions::standard();
    let dim = v[0].len();
    let n_gen = qchi[0][0].n_gen();
    let mut out: Spinor<T> = [gvec_zero(dim, n_gen), gvec_zero(dim, n_gen)];
    for t in 0..2 {
        for s in 0..2 {
            // C = I γ_t Γ^s; coefficient of (Qχ)_t^τ V_s in row α is C[α][τ].
            let c = m2_mul(&m2_mul(&sc.i, &sc.gamma[t]), &sc.big_gamma[s]);
            for tau in 0..2 {
                if qchi[t][tau].is_zero() {
                    continue;
                }
                let prod: GVec<T> = v[s].iter().map(|x| &qchi[t][tau] * x).collect();
                for alpha in 0..2 {
                    if c[alpha][tau] != 0 {
                        super::gvec_axpy(&mut out[alpha], 0.5 * c[alpha][tau] as f64, &prod);
                    }
                }
            }
        }
    }
    out
}

/// `‖Qχ‖²ψ := 2⟨∨Qχ, ⟨Qχ, ψ⟩⟩`.
pub fn q_norm_sq<T: Scalar>(qchi: &GravitinoPoint<T>, psi: &Spinor<T>) -> Spinor<T> {
    let inner = pair_q_psi(qchi, psi);
    let v = vee_q(qchi, &inner);
    [super::gvec_scale(&v[0], 2.0), super::gvec_scale(&v[1], 2.0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Rational};

    fn gen(n: usize, i: usize) -> Grassmann<Exact> {
        Grassmann::generator(n, i).unwrap()
    }

    fn random_chi(n: usize) -> GravitinoPoint<Exact> {
        let c = |a: i64, b: i64| Grassmann::scalar(n, Exact::from_i64(a)) * gen(n, b as usize);
        [[c(1, 1) + c(2, 2), c(-3, 3)], [c(5, 2), c(1, 1) + c(-1, 3)]]
    }

    #[test]
    fn conventions_satisfy_identities() {
        let sc = SpinConventions::standard();
        assert_eq!(sc.defects(), [0; 5]);
        assert_eq!(sc.gamma[0], [[0, 1], [1, 0]]);
        assert_eq!(sc.gamma[1], [[-1, 0], [0, 1]]);
        assert_eq!(sc.i, [[0, 1], [-1, 0]]);
    }

    #[test]
    fn projectors_split_and_are_idempotent() {
        let chi = random_chi(3);
        let (p, q) = project_pq(&chi);
        for k in 0..2 {
            for a in 0..2 {
                assert_eq!(&p[k][a] + &q[k][a], chi[k][a]);
            }
        }
        let (pp, pq) = project_pq(&p);
        let (qp, qq) = project_pq(&q);
        assert_eq!(pp, p);
        assert_eq!(qq, q);
        let zero = Grassmann::<Exact>::zero(3);
        assert!(pq
            .iter()
            .flatten()
            .chain(qp.iter().flatten())
            .all(|g| *g == zero));
        let dq = delta_gamma(&q);
        assert!(dq.iter().all(|g| g.is_zero()));
        assert_eq!(delta_gamma(&p), delta_gamma(&chi));
    }

    #[test]
    fn pure_gauge_gravitino_has_no_q_part() {
        let sc = SpinConventions::standard();
        let s = [
            gen(2, 1),
            gen(2, 2) * Grassmann::scalar(2, Exact::from_i64(3)),
        ];
        let one = Exact::one();
        let chi = [
            right_apply(&s, &sc.gamma[0], &one),
            right_apply(&s, &sc.gamma[1], &one),
        ];
        let (_, q) = project_pq(&chi);
        assert!(q.iter().flatten().all(|g| g.is_zero()));
        let zero = [
            [Grassmann::<Exact>::zero(2), Grassmann::zero(2)],
            [Grassmann::zero(2), Grassmann::zero(2)],
        ];
        let (p0, q0) = project_pq(&zero);
        assert_eq!((p0, q0), (zero.clone(), zero));
    }

    #[test]
    fn q_anticommutes_with_i() {
        // I_k^l (Qχ)_l = −(Qχ)_k I and I_k^l (Pχ)_l = (Pχ)_k I.
        let sc = SpinConventions::standard();
        let (p, q) = project_pq(&random_chi(3));
        let one = Exact::one();
        for (x, sign) in [(&q, -1i64), (&p, 1)] {
            for k in 0..2 {
                let mut lhs = [Grassmann::zero(3), Grassmann::zero(3)];
                for l in 0..2 {
                    let c = Exact::from_i64(sc.i[k][l]);
                    lhs = [&lhs[0] + &x[l][0].scale(&c), &lhs[1] + &x[l][1].scale(&c)];
                }
                let rhs = right_apply(
                    &x[k],
                    &sc.i,
                    &Exact::from_rational(&Rational::from_integer(sign.into())),
                );
                let _ = &one;
                assert_eq!(lhs, rhs);
            }
        }
    }
}
