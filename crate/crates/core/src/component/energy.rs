//! Pointwise energy identity for flat-model superfields.

use crate::error::{Error, Result};
use crate::grassmann::Parity;
use crate::scalar::{ComplexScalar, Scalar};
use crate::superfield::{apply_d3, apply_d4, FlatTargetJ, SuperField};

/// `(JV)^c = Σ_b V^b J_b^c`.
fn apply_j<T: ComplexScalar>(v: &[SuperField<T>], j: &FlatTargetJ) -> Vec<SuperField<T>> {
    let n_gen = v[0].n_gen();
    (0..v.len())
        .map(|c| {
            let mut acc = SuperField::zero(n_gen, Parity::Odd);
            for (b, vb) in v.iter().enumerate() {
                let e = j.entry(b, c);
                if !Scalar::is_zero(e) {
                    acc = acc.add(&vb.scale(&T::from_rational(e)));
                }
            }
            acc
        })
        .collect()
}

fn pairing<T: ComplexScalar>(x: &[SuperField<T>], y: &[SuperField<T>]) -> SuperField<T> {
    let n_gen = x[0].n_gen();
    x.iter()
        .zip(y)
        .fold(SuperField::zero(n_gen, Parity::Even), |acc, (a, b)| {
            acc.add(&a.mul(b))
        })
}

/// `ε^{αβ} δ(X_α, Y_β) = δ(X₃, Y₄) − δ(X₄, Y₃)`.
fn eps_pair<T: ComplexScalar>(
    x: &[Vec<SuperField<T>>; 2],
    y: &[Vec<SuperField<T>>; 2],
) -> SuperField<T> {
    pairing(&x[0], &y[1]).sub(&pairing(&x[1], &y[0]))
}

/// `LHS − RHS` of
/// `½ ε^{αβ} δ(A_α, A_β) = ε^{αβ} δ(D_αΦ, D_βΦ) + ε^{αβ} δ(J I_α^μ D_μΦ, D_βΦ)`,
/// where `A_α = D_αΦ + J(I_α^μ D_μΦ)` and `δ` is the flat metric.
pub fn energy_identity_residual<T: ComplexScalar>(
    phi: &[SuperField<T>],
    j: &FlatTargetJ,
) -> Result<SuperField<T>> {
    if phi.len() != j.dim() {
        return Err(Error::ComponentCount {
            expected: j.dim(),
            got: phi.len(),
        });
    }
    if let Some(b) = phi.iter().position(|f| f.parity() != Parity::Even) {
        return Err(Error::Parity(format!("component {b} is not even")));
    }
    let d: [Vec<SuperField<T>>; 2] = [
        phi.iter().map(apply_d3).collect(),
        phi.iter().map(apply_d4).collect(),
    ];
    // I_3^μ D_μ = D_4, I_4^μ D_μ = −D_3
    let id: [Vec<SuperField<T>>; 2] = [d[1].clone(), d[0].iter().map(SuperField::neg).collect()];
    let jid = [apply_j(&id[0], j), apply_j(&id[1], j)];
    let a: [Vec<SuperField<T>>; 2] =
        std::array::from_fn(|al| d[al].iter().zip(&jid[al]).map(|(x, y)| x.add(y)).collect());
    let lhs = eps_pair(&a, &a).scale(&T::from_ratio(1, 2));
    let rhs = eps_pair(&d, &d).add(&eps_pair(&jid, &d));
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Rational};
    use crate::superfield::PolyFn;

    fn ex(a: i64) -> Exact {
        Exact::from_i64(a)
    }

    #[test]
    fn zero_map() {
        let phi = vec![SuperField::<Exact>::zero(2, Parity::Even); 2];
        assert!(energy_identity_residual(&phi, &FlatTargetJ::standard(1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn coordinate_map() {
        let phi = vec![SuperField::<Exact>::x1(2), SuperField::x2(2)];
        let r = energy_identity_residual(&phi, &FlatTargetJ::standard(1)).unwrap();
        assert!(r.is_zero(), "{r:?}");
    }

    #[test]
    fn odd_generators_and_polynomials() {
        let l1 = SuperField::<Exact>::lambda(2, 1).unwrap();
        let l2 = SuperField::<Exact>::lambda(2, 2).unwrap();
        let e3 = SuperField::eta3(2);
        let e4 = SuperField::eta4(2);
        let p = SuperField::from_poly(2, PolyFn::monomial(ex(3), 2, 1));
        let phi = vec![
            p.add(&e3.mul(&l1))
                .add(&e3.mul(&e4).mul(&SuperField::x2(2))),
            SuperField::x1(2)
                .mul(&SuperField::x1(2))
                .add(&e4.mul(&l2).scale(&ex(-2))),
        ];
        assert!(energy_identity_residual(&phi, &FlatTargetJ::standard(1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn non_orthogonal_j_breaks_the_identity() {
        let a = Rational::from_integer(2.into());
        let inv = Rational::new(1.into(), 2.into());
        let j = FlatTargetJ::new(vec![
            vec![Rational::from_integer(0.into()), -a],
            vec![inv, Rational::from_integer(0.into())],
        ])
        .unwrap();
        let phi = vec![
            SuperField::<Exact>::x1(2),
            SuperField::x2(2).add(&SuperField::eta3(2).mul(&SuperField::lambda(2, 1).unwrap())),
        ];
        assert!(!energy_identity_residual(&phi, &j).unwrap().is_zero());
    }

    #[test]
    fn odd_input_is_rejected() {
        let phi = vec![
            SuperField::<Exact>::lambda(1, 1).unwrap(),
            SuperField::x1(1),
        ];
        assert!(matches!(
            energy_identity_residual(&phi, &FlatTargetJ::standard(1)),
            Err(Error::Parity(_))
        ));
    }
}
