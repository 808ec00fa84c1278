//! Polynomial superfields on the flat super Riemann surface R^{2|2} over a
//! base R^{0|L}, with the superconformal derivations D3, D4, D and D̄.
//!
//! A superfield is stored as a sum of `η^S λ^B p(x¹, x²)` with the odd
//! coordinates η³, η⁴ ordered before the base generators. Internally the
//! pair (S, B) is one mask over L+2 odd generators: bit 0 is η³, bit 1 is η⁴
//! and bit k+1 is λ^k.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::{blade_sign, mask_indices, parse_power, split_top_level, Parity};
use crate::scalar::{ComplexScalar, Rational, Scalar};

pub const DEFAULT_DEGREE_CAP: u32 = 8;

const ETA3: u32 = 1;
const ETA4: u32 = 2;
const ETA_MASK: u32 = 3;

/// Bivariate polynomial in (x¹, x²).
#[derive(Clone, PartialEq)]
pub struct PolyFn<T: Scalar> {
    terms: BTreeMap<(u32, u32), T>,
}

impl<T: Scalar> PolyFn<T> {
    pub fn zero() -> Self {
        PolyFn {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c · x1^a x2^b`.
    pub fn monomial(c: T, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn x1() -> Self {
        Self::monomial(T::one(), 1, 0)
    }

    pub fn x2() -> Self {
        Self::monomial(T::one(), 0, 1)
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(a, b)) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&(a, b));
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert((a, b), c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &T)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, a: u32, b: u32) -> T {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(T::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(*a, *b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero();
        for ((a, b), v) in &self.terms {
            out.add_term(*a, *b, v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.add_term(a + a2, b + b2, c.clone() * c2.clone());
            }
        }
        out
    }

    pub fn d_x1(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            if *a > 0 {
                out.add_term(a - 1, *b, c.clone() * T::from_i64(*a as i64));
            }
        }
        out
    }

    pub fn d_x2(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            if *b > 0 {
                out.add_term(*a, b - 1, c.clone() * T::from_i64(*b as i64));
            }
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PolyFn<U> {
        let mut out = PolyFn::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(*a, *b, f(c));
        }
        out
    }
}

impl<T: ComplexScalar> PolyFn<T> {
    /// z = x¹ + i x².
    pub fn z() -> Self {
        Self::x1().add(&Self::x2().scale(&T::i()))
    }

    pub fn zbar() -> Self {
        Self::x1().sub(&Self::x2().scale(&T::i()))
    }

    /// Σ c_j z^j.
    pub fn z_poly(coeffs: &[T]) -> Self {
        let z = Self::z();
        let mut pow = Self::constant(T::one());
        let mut out = Self::zero();
        for c in coeffs {
            out = out.add(&pow.scale(c));
            pow = pow.mul(&z);
        }
        out
    }

    /// ∂_z = ½(∂₁ − i∂₂).
    pub fn d_z(&self) -> Self {
        self.d_x1()
            .sub(&self.d_x2().scale(&T::i()))
            .scale(&T::from_ratio(1, 2))
    }

    /// ∂_z̄ = ½(∂₁ + i∂₂).
    pub fn d_zbar(&self) -> Self {
        self.d_x1()
            .add(&self.d_x2().scale(&T::i()))
            .scale(&T::from_ratio(1, 2))
    }
}

impl<T: Scalar> fmt::Debug for PolyFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("{} x1^{a} x2^{b}", c.fmt_coeff()))
            .collect();
        write!(f, "PolyFn[{}]", parts.join(" + "))
    }
}

/// Constant complex structure on the flat target R^{2n}, stored as `J_b^c`
/// with `J ∂_{Y^b} = J_b^c ∂_{Y^c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTargetJ {
    entries: Vec<Vec<Rational>>,
}

impl FlatTargetJ {
    /// Validates `J² = −Id`.
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let d = entries.len();
        if d == 0 || !d.is_multiple_of(2) || entries.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidModel(format!(
                "J must be square of even size, got {d} rows"
            )));
        }
        for b in 0..d {
            for e in 0..d {
                let mut s = <Rational as Scalar>::zero();
                for c in 0..d {
                    s += entries[b][c].clone() * entries[c][e].clone();
                }
                let want = if b == e {
                    <Rational as Scalar>::from_i64(-1)
                } else {
                    <Rational as Scalar>::zero()
                };
                if s != want {
                    return Err(Error::InvalidModel("J^2 != -Id".into()));
                }
            }
        }
        Ok(FlatTargetJ { entries })
    }

    /// `J ∂_{r_k} = ∂_{s_k}` on coordinates ordered (r₁, s₁, r₂, s₂, …).
    pub fn standard(n: usize) -> Self {
        let d = 2 * n;
        let mut e = vec![vec![<Rational as Scalar>::zero(); d]; d];
        for k in 0..n {
            e[2 * k][2 * k + 1] = <Rational as Scalar>::one();
            e[2 * k + 1][2 * k] = <Rational as Scalar>::from_i64(-1);
        }
        FlatTargetJ { entries: e }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `J_b^c`.
    pub fn entry(&self, b: usize, c: usize) -> &Rational {
        &self.entries[b][c]
    }

    pub fn as_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(<f64 as Scalar>::from_rational).collect())
            .collect()
    }
}

#[derive(Clone, PartialEq)]
pub struct SuperField<T: ComplexScalar> {
    n_gen: usize,
    parity: Parity,
    terms: BTreeMap<u32, PolyFn<T>>,
}

fn combined_mask(eta: u32, base: u32) -> u32 {
    eta | base << 2
}

impl<T: ComplexScalar> SuperField<T> {
    pub fn zero(n_gen: usize, parity: Parity) -> Self {
        SuperField {
            n_gen,
            parity,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from `(eta_mask, base_mask, poly)` triples, checking parity.
    ///
    /// `eta_mask` uses bit 0 for η³ and bit 1 for η⁴; `base_mask` uses bit
    /// k−1 for λ^k.
    pub fn from_parts<I>(n_gen: usize, parity: Parity, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, PolyFn<T>)>,
    {
        let mut f = Self::zero(n_gen, parity);
        for (eta, base, p) in parts {
            if eta > ETA_MASK || base >> n_gen != 0 {
                return Err(Error::GeneratorOutOfRange {
                    index: 32 - base.leading_zeros() as usize,
                    count: n_gen,
                });
            }
            f.add_poly(combined_mask(eta, base), p);
        }
        f.check_parity()?;
        Ok(f)
    }

    /// A body-only superfield `p(x)`.
    pub fn from_poly(n_gen: usize, p: PolyFn<T>) -> Self {
        let mut f = Self::zero(n_gen, Parity::Even);
        f.add_poly(0, p);
        f
    }

    pub fn constant(n_gen: usize, c: T) -> Self {
        Self::from_poly(n_gen, PolyFn::constant(c))
    }

    pub fn x1(n_gen: usize) -> Self {
        Self::from_poly(n_gen, PolyFn::x1())
    }

    pub fn x2(n_gen: usize) -> Self {
        Self::from_poly(n_gen, PolyFn::x2())
    }

    pub fn z(n_gen: usize) -> Self {
        Self::from_poly(n_gen, PolyFn::z())
    }

    pub fn zbar(n_gen: usize) -> Self {
        Self::from_poly(n_gen, PolyFn::zbar())
    }

    pub fn eta3(n_gen: usize) -> Self {
        let mut f = Self::zero(n_gen, Parity::Odd);
        f.add_poly(ETA3, PolyFn::constant(T::one()));
        f
    }

    pub fn eta4(n_gen: usize) -> Self {
        let mut f = Self::zero(n_gen, Parity::Odd);
        f.add_poly(ETA4, PolyFn::constant(T::one()));
        f
    }

    /// θ = η³ + iη⁴.
    pub fn theta(n_gen: usize) -> Self {
        Self::eta3(n_gen).add(&Self::eta4(n_gen).scale(&T::i()))
    }

    /// θ̄ = η³ − iη⁴.
    pub fn theta_bar(n_gen: usize) -> Self {
        Self::eta3(n_gen).sub(&Self::eta4(n_gen).scale(&T::i()))
    }

    /// The base generator λ^index.
    pub fn lambda(n_gen: usize, index: usize) -> Result<Self> {
        if index == 0 || index > n_gen {
            return Err(Error::GeneratorOutOfRange {
                index,
                count: n_gen,
            });
        }
        let mut f = Self::zero(n_gen, Parity::Odd);
        f.add_poly(
            combined_mask(0, 1 << (index - 1)),
            PolyFn::constant(T::one()),
        );
        Ok(f)
    }

    fn add_poly(&mut self, mask: u32, p: PolyFn<T>) {
        if p.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(PolyFn::zero);
        *entry = entry.add(&p);
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn n_gen(&self) -> usize {
        self.n_gen
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(eta_mask, base_mask, poly)`.
    pub fn parts(&self) -> impl Iterator<Item = (u32, u32, &PolyFn<T>)> + '_ {
        self.terms.iter().map(|(m, p)| (m & ETA_MASK, m >> 2, p))
    }

    fn check_parity(&self) -> Result<()> {
        if self.parity == Parity::Mixed {
            return Ok(());
        }
        for m in self.terms.keys() {
            if Parity::of_mask(*m) != self.parity {
                return Err(Error::Parity(format!(
                    "term with odd generators {:?} in a superfield declared {:?}",
                    mask_indices(*m),
                    self.parity
                )));
            }
        }
        Ok(())
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.values().map(PolyFn::degree).max().unwrap_or(0)
    }

    pub fn check_degree(&self, cap: u32) -> Result<()> {
        let degree = self.max_degree();
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        Ok(())
    }

    fn combine_parity(a: Parity, b: Parity) -> Parity {
        if a == b {
            a
        } else {
            Parity::Mixed
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_gen, other.n_gen, "superfield generator mismatch");
        let mut out = self.clone();
        out.parity = Self::combine_parity(self.parity, other.parity);
        for (m, p) in &other.terms {
            out.add_poly(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.n_gen, self.parity);
        for (m, p) in &self.terms {
            out.add_poly(*m, p.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_gen, other.n_gen, "superfield generator mismatch");
        let parity = match (self.parity, other.parity) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        };
        let mut out = Self::zero(self.n_gen, parity);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                let s = blade_sign(*ma, *mb);
                if s == 0 {
                    continue;
                }
                let p = pa.mul(pb);
                out.add_poly(ma | mb, if s < 0 { p.neg() } else { p });
            }
        }
        out
    }

    fn map_polys(&self, parity: Parity, f: impl Fn(&PolyFn<T>) -> PolyFn<T>) -> Self {
        let mut out = Self::zero(self.n_gen, parity);
        for (m, p) in &self.terms {
            out.add_poly(*m, f(p));
        }
        out
    }

    pub fn d_x1(&self) -> Self {
        self.map_polys(self.parity, PolyFn::d_x1)
    }

    pub fn d_x2(&self) -> Self {
        self.map_polys(self.parity, PolyFn::d_x2)
    }

    pub fn d_z(&self) -> Self {
        self.map_polys(self.parity, PolyFn::d_z)
    }

    pub fn d_zbar(&self) -> Self {
        self.map_polys(self.parity, PolyFn::d_zbar)
    }

    /// Left derivative along η³ (`which = 3`) or η⁴ (`which = 4`).
    pub fn d_eta(&self, which: u8) -> Self {
        let bit = if which == 3 { ETA3 } else { ETA4 };
        let mut out = Self::zero(self.n_gen, self.parity.flip());
        for (m, p) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & (bit - 1)).count_ones();
            out.add_poly(m & !bit, if before % 2 == 1 { p.neg() } else { p.clone() });
        }
        out
    }

    /// Left multiplication by η³ or η⁴.
    fn eta_times(&self, which: u8) -> Self {
        let bit = if which == 3 { ETA3 } else { ETA4 };
        let mut out = Self::zero(self.n_gen, self.parity.flip());
        for (m, p) in &self.terms {
            let s = blade_sign(bit, *m);
            if s == 0 {
                continue;
            }
            out.add_poly(m | bit, if s < 0 { p.neg() } else { p.clone() });
        }
        out
    }

    pub fn map_coeffs<U: ComplexScalar>(&self, f: impl Fn(&T) -> U) -> SuperField<U> {
        let mut out = SuperField::zero(self.n_gen, self.parity);
        for (m, p) in &self.terms {
            out.add_poly(*m, p.map(&f));
        }
        out
    }

    /// Real part of every coefficient (all coordinates are real).
    pub fn re(&self) -> Self {
        self.map_coeffs(|c| c.re())
    }

    pub fn im(&self) -> Self {
        self.map_coeffs(|c| c.im())
    }

    pub fn is_real(&self) -> bool {
        self.terms
            .values()
            .all(|p| p.terms().all(|(_, c)| c.is_real()))
    }

    /// Coefficient of `η^eta_mask` as a superfield without η.
    pub fn eta_coefficient(&self, eta_mask: u32) -> Self {
        let mut out = Self::zero(self.n_gen, Parity::Mixed);
        for (m, p) in &self.terms {
            if m & ETA_MASK == eta_mask {
                out.add_poly(m & !ETA_MASK, p.clone());
            }
        }
        out.parity = out.inferred_parity();
        out
    }

    fn inferred_parity(&self) -> Parity {
        let mut it = self.terms.keys().map(|m| Parity::of_mask(*m));
        match it.next() {
            None => Parity::Even,
            Some(first) => {
                if it.all(|p| p == first) {
                    first
                } else {
                    Parity::Mixed
                }
            }
        }
    }

    /// Deterministic literal: `coeff * x1^a x2^b * e3^s e4^t * l1^.. lL^..`.
    pub fn to_literal(&self) -> String {
        let mut keys: Vec<u32> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (m.count_ones(), mask_indices(*m)));
        let mut out = Vec::new();
        for m in keys {
            let odd = {
                let mut s = format!("e3^{} e4^{}", m & 1, m >> 1 & 1);
                for i in 1..=self.n_gen {
                    s.push_str(&format!(" l{i}^{}", m >> (i + 1) & 1));
                }
                s
            };
            for ((a, b), c) in self.terms[&m].terms() {
                out.push(format!("{} * x1^{a} x2^{b} * {odd}", c.fmt_coeff()));
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out.join(" + ")
        }
    }

    /// Parses the literal format; odd factors may appear in any order and
    /// are sorted with the corresponding sign.
    pub fn parse_literal(
        n_gen: usize,
        parity: Parity,
        text: &str,
        degree_cap: u32,
    ) -> Result<Self> {
        let mut f = Self::zero(n_gen, parity);
        let text = text.trim();
        if text != "0" {
            for term in split_top_level(text, '+') {
                let mut factors = term.split('*').map(str::trim);
                let c = T::parse_coeff(factors.next().unwrap_or(""))?;
                let (mut a, mut b) = (0u32, 0u32);
                let mut odd: Vec<usize> = Vec::new();
                for part in factors {
                    for tok in part.split_whitespace() {
                        let first = tok.chars().next().unwrap_or(' ');
                        let (idx, exp) = parse_power(tok, first)?;
                        match (first, idx) {
                            ('x', 1) => a += exp,
                            ('x', 2) => b += exp,
                            ('e', 3 | 4) | ('l', _) => {
                                let gen = if first == 'e' { idx - 2 } else { idx + 2 };
                                if first == 'l' && (idx == 0 || idx > n_gen) {
                                    return Err(Error::GeneratorOutOfRange {
                                        index: idx,
                                        count: n_gen,
                                    });
                                }
                                match exp {
                                    0 => {}
                                    1 => odd.push(gen),
                                    _ => return Err(Error::Parse(format!("odd power `{tok}`"))),
                                }
                            }
                            _ => return Err(Error::Parse(format!("unknown factor `{tok}`"))),
                        }
                    }
                }
                let mut sign = 1;
                for i in 1..odd.len() {
                    let mut j = i;
                    while j > 0 && odd[j - 1] > odd[j] {
                        odd.swap(j - 1, j);
                        sign = -sign;
                        j -= 1;
                    }
                }
                if odd.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let mask = odd.iter().fold(0u32, |m, g| m | 1 << (g - 1));
                let c = if sign < 0 { -c } else { c };
                f.add_poly(mask, PolyFn::monomial(c, a, b));
            }
        }
        f.check_parity()?;
        f.check_degree(degree_cap)?;
        Ok(f)
    }
}

impl<T: ComplexScalar> fmt::Debug for SuperField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SuperField[L={}, {:?}]({})",
            self.n_gen,
            self.parity,
            self.to_literal()
        )
    }
}

/// D₃ = ∂_{η³} + η³∂_{x¹} + η⁴∂_{x²}.
pub fn apply_d3<T: ComplexScalar>(f: &SuperField<T>) -> SuperField<T> {
    f.d_eta(3)
        .add(&f.d_x1().eta_times(3))
        .add(&f.d_x2().eta_times(4))
}

/// D₄ = ∂_{η⁴} + η³∂_{x²} − η⁴∂_{x¹}.
pub fn apply_d4<T: ComplexScalar>(f: &SuperField<T>) -> SuperField<T> {
    f.d_eta(4)
        .add(&f.d_x2().eta_times(3))
        .sub(&f.d_x1().eta_times(4))
}

/// D̄ = ½(D₃ + iD₄) = ∂_{θ̄} + θ̄∂_{z̄}.
pub fn apply_dbar<T: ComplexScalar>(f: &SuperField<T>) -> SuperField<T> {
    apply_d3(f)
        .add(&apply_d4(f).scale(&T::i()))
        .scale(&T::from_ratio(1, 2))
}

/// D = ½(D₃ − iD₄) = ∂_θ + θ∂_z.
pub fn apply_d<T: ComplexScalar>(f: &SuperField<T>) -> SuperField<T> {
    apply_d3(f)
        .sub(&apply_d4(f).scale(&T::i()))
        .scale(&T::from_ratio(1, 2))
}

/// The expansion `Φ = f + θg + θ̄h + θθ̄k`; each coefficient is free of η.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloComponents<T: ComplexScalar> {
    pub f: SuperField<T>,
    pub g: SuperField<T>,
    pub h: SuperField<T>,
    pub k: SuperField<T>,
}

impl<T: ComplexScalar> HoloComponents<T> {
    pub fn of(phi: &SuperField<T>) -> Self {
        let half = T::from_ratio(1, 2);
        let c0 = phi.eta_coefficient(0);
        let c3 = phi.eta_coefficient(ETA3);
        let c4 = phi.eta_coefficient(ETA4);
        let c34 = phi.eta_coefficient(ETA3 | ETA4);
        let ic4 = c4.scale(&T::i());
        HoloComponents {
            f: c0,
            g: c3.sub(&ic4).scale(&half),
            h: c3.add(&ic4).scale(&half),
            k: c34.scale(&(T::i() * half)),
        }
    }

    pub fn assemble(&self) -> SuperField<T> {
        let n = self.f.n_gen();
        let theta = SuperField::theta(n);
        let theta_bar = SuperField::theta_bar(n);
        let tt = theta.mul(&theta_bar);
        self.f
            .add(&theta.mul(&self.g))
            .add(&theta_bar.mul(&self.h))
            .add(&tt.mul(&self.k))
    }
}

/// Componentwise D̄: `h − θk + θ̄∂_{z̄}f − θθ̄∂_{z̄}g`.
pub fn dbar_from_components<T: ComplexScalar>(c: &HoloComponents<T>) -> SuperField<T> {
    let n = c.f.n_gen();
    let theta = SuperField::theta(n);
    let theta_bar = SuperField::theta_bar(n);
    let tt = theta.mul(&theta_bar);
    c.h.sub(&theta.mul(&c.k))
        .add(&theta_bar.mul(&c.f.d_zbar()))
        .sub(&tt.mul(&c.g.d_zbar()))
}

/// residual_b = D₃Φ^b + Σ_c D₄Φ^c J_c^b.
pub fn flat_sjc_residual<T: ComplexScalar>(
    phi: &[SuperField<T>],
    j: &FlatTargetJ,
) -> Result<Vec<SuperField<T>>> {
    let d = j.dim();
    if phi.len() != d {
        return Err(Error::ComponentCount {
            expected: d,
            got: phi.len(),
        });
    }
    for (b, f) in phi.iter().enumerate() {
        if f.parity() != Parity::Even {
            return Err(Error::Parity(format!("component {b} is not even")));
        }
    }
    let d4: Vec<SuperField<T>> = phi.iter().map(apply_d4).collect();
    Ok((0..d)
        .map(|b| {
            let mut r = apply_d3(&phi[b]);
            for (c, d4c) in d4.iter().enumerate() {
                let jcb = j.entry(c, b);
                if !Scalar::is_zero(jcb) {
                    r = r.add(&d4c.scale(&T::from_rational(jcb)));
                }
            }
            r
        })
        .collect())
}

/// True iff every Φ^#Z^b is super holomorphic; both characterizations are
/// evaluated and must agree.
pub fn holomorphy_equivalence_check<T: ComplexScalar>(phi_z: &[SuperField<T>]) -> Result<bool> {
    let mut via_dbar = true;
    let mut via_components = true;
    for (b, f) in phi_z.iter().enumerate() {
        if f.parity() != Parity::Even {
            return Err(Error::Parity(format!("component {b} is not even")));
        }
        via_dbar &= apply_dbar(f).is_zero();
        let c = HoloComponents::of(f);
        via_components &=
            c.h.is_zero() && c.k.is_zero() && c.f.d_zbar().is_zero() && c.g.d_zbar().is_zero();
    }
    if via_dbar != via_components {
        return Err(Error::CrossCheck(format!(
            "D̄-route says {via_dbar}, component route says {via_components}"
        )));
    }
    Ok(via_dbar)
}

/// The θθ̄ coefficient, keyed by base monomial mask.
pub fn berezin_top<T: ComplexScalar>(f: &SuperField<T>) -> BTreeMap<u32, PolyFn<T>> {
    HoloComponents::of(f)
        .k
        .parts()
        .map(|(_, base, p)| (base, p.clone()))
        .collect()
}

/// Real components (Re Φ^#Z^b, Im Φ^#Z^b) interleaved, for use with the
/// standard complex structure.
pub fn real_components<T: ComplexScalar>(phi_z: &[SuperField<T>]) -> Vec<SuperField<T>> {
    phi_z.iter().flat_map(|f| [f.re(), f.im()]).collect()
}
