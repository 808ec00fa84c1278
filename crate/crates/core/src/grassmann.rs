//! Finitely generated Grassmann algebras over a coefficient ring.
//!
//! Basis monomials are stored as bit masks (bit `i-1` for generator `l_i`),
//! which is the sorted-index-set encoding with the generators in increasing
//! order. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{ComplexScalar, Scalar, C64};

/// Largest supported generator count.
pub const MAX_GENERATORS: usize = 24;

/// Sign of the product of two sorted monomials, or `0` when they share a generator.
///
/// Counts the transpositions needed to merge `b` into `a`.
pub fn blade_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of the permutation sorting `indices`, or `None` on a repeated index.
fn sort_sign(indices: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Generator indices (1-based) present in a mask, increasing.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b as usize + 1)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_mask(mask: u32) -> Parity {
        if mask.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct Grassmann<T: Scalar = C64> {
    n_gen: usize,
    terms: BTreeMap<u32, T>,
}

impl<T: Scalar> Grassmann<T> {
    pub fn zero(n_gen: usize) -> Self {
        assert!(n_gen <= MAX_GENERATORS, "too many generators: {n_gen}");
        Grassmann {
            n_gen,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n_gen: usize, c: T) -> Self {
        let mut g = Self::zero(n_gen);
        g.add_term(0, c);
        g
    }

    pub fn one(n_gen: usize) -> Self {
        Self::scalar(n_gen, T::one())
    }

    /// The generator `l_index` (1-based).
    pub fn generator(n_gen: usize, index: usize) -> Result<Self> {
        if index == 0 || index > n_gen {
            return Err(Error::GeneratorOutOfRange {
                index,
                count: n_gen,
            });
        }
        let mut g = Self::zero(n_gen);
        g.add_term(1 << (index - 1), T::one());
        Ok(g)
    }

    /// Builds an element from `(indices, coefficient)` pairs.
    ///
    /// Indices may come in any order; the sign of the sorting permutation is
    /// applied and repeated indices make the term vanish.
    pub fn from_terms<I>(n_gen: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, T)>,
    {
        let mut g = Self::zero(n_gen);
        for (mut idx, c) in terms {
            for &i in &idx {
                if i == 0 || i > n_gen {
                    return Err(Error::GeneratorOutOfRange {
                        index: i,
                        count: n_gen,
                    });
                }
            }
            let Some(sign) = sort_sign(&mut idx) else {
                continue;
            };
            let mask = idx.iter().fold(0u32, |m, &i| m | 1 << (i - 1));
            g.add_term(mask, if sign < 0 { -c } else { c });
        }
        Ok(g)
    }

    /// Adds `c` to the coefficient of `mask`, pruning zeros.
    pub fn add_term(&mut self, mask: u32, c: T) {
        debug_assert!(
            mask >> self.n_gen == 0,
            "mask uses generators beyond {}",
            self.n_gen
        );
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&mask);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    pub fn n_gen(&self) -> usize {
        self.n_gen
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &T)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u32) -> T {
        self.terms.get(&mask).cloned().unwrap_or_else(T::zero)
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            match Parity::of_mask(*m) {
                Parity::Even => even = true,
                _ => odd = true,
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    /// Splits into the numeric body and the nilpotent soul.
    pub fn body_soul(&self) -> (T, Self) {
        let mut soul = self.clone();
        let body = soul.terms.remove(&0).unwrap_or_else(T::zero);
        (body, soul)
    }

    pub fn body(&self) -> T {
        self.coeff(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_gen != other.n_gen {
            return Err(Error::GeneratorMismatch {
                left: self.n_gen,
                right: other.n_gen,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    /// Product with anticommutation signs; errors on mismatched generator counts.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.n_gen);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let s = blade_sign(*ma, *mb);
                if s == 0 {
                    continue;
                }
                let p = ca.clone() * cb.clone();
                out.add_term(ma | mb, if s < 0 { -p } else { p });
            }
        }
        Ok(out)
    }

    /// `self += c · x` in place.
    pub fn axpy(&mut self, c: &T, x: &Self) {
        assert_eq!(self.n_gen, x.n_gen, "generator count mismatch");
        if c.is_zero() {
            return;
        }
        for (m, v) in &x.terms {
            self.add_term(*m, v.clone() * c.clone());
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.n_gen);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.add_term(*m, v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n_gen);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Left derivative along `l_index`: removes the generator after moving it to the front.
    pub fn left_derive(&self, index: usize) -> Result<Self> {
        if index == 0 || index > self.n_gen {
            return Err(Error::GeneratorOutOfRange {
                index,
                count: self.n_gen,
            });
        }
        let bit = 1u32 << (index - 1);
        let mut out = Self::zero(self.n_gen);
        for (m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & (bit - 1)).count_ones();
            let c = if before % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            out.add_term(m & !bit, c);
        }
        Ok(out)
    }

    /// Keeps only monomials of the given length.
    pub fn grade(&self, k: u32) -> Self {
        let mut out = Self::zero(self.n_gen);
        for (m, c) in &self.terms {
            if m.count_ones() == k {
                out.add_term(*m, c.clone());
            }
        }
        out
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Grassmann<U> {
        let mut out = Grassmann::<U>::zero(self.n_gen);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Largest coefficient magnitude (0 for the zero element).
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.magnitude())
            .fold(0.0, f64::max)
    }

    /// Deterministic text form: terms ordered by length, then by index list.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<u32> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (m.count_ones(), mask_indices(*m)));
        keys.iter()
            .map(|m| {
                let c = self.terms[m].fmt_coeff();
                if self.n_gen == 0 {
                    return c;
                }
                let mono: Vec<String> = (1..=self.n_gen)
                    .map(|i| format!("l{i}^{}", m >> (i - 1) & 1))
                    .collect();
                format!("{c} * {}", mono.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the format produced by [`Grassmann::to_text`].
    ///
    /// Generators with exponent 0 may be omitted and `l3` abbreviates `l3^1`.
    pub fn parse(n_gen: usize, text: &str) -> Result<Self> {
        let mut out = Self::zero(n_gen);
        let text = text.trim();
        if text == "0" {
            return Ok(out);
        }
        for term in split_top_level(text, '+') {
            let mut parts = term.split('*').map(str::trim);
            let coeff = T::parse_coeff(parts.next().unwrap_or(""))?;
            let mut idx = Vec::new();
            for part in parts {
                for tok in part.split_whitespace() {
                    let (gen, exp) = parse_power(tok, 'l')?;
                    match exp {
                        0 => {}
                        1 => idx.push(gen),
                        _ => return Err(Error::Parse(format!("odd generator power `{tok}`"))),
                    }
                }
            }
            let g = Self::from_terms(n_gen, [(idx, coeff)])?;
            out = &out + &g;
        }
        Ok(out)
    }
}

impl<T: ComplexScalar> Grassmann<T> {
    /// Complex conjugation of the coefficients (generators are real).
    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn re(&self) -> Self {
        self.map(|c| c.re())
    }

    pub fn im(&self) -> Self {
        self.map(|c| c.im())
    }
}

/// Splits on `sep` outside parentheses and braces.
pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let chars: Vec<char> = s.chars().collect();
    for (k, &ch) in chars.iter().enumerate() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            _ => {}
        }
        // Separators must be surrounded by whitespace so signs inside
        // numbers such as `1e+3` are kept.
        let spaced = k > 0
            && chars[k - 1].is_whitespace()
            && chars.get(k + 1).is_some_and(|c| c.is_whitespace());
        if ch == sep && depth == 0 && spaced {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses `x1^3`, `l2^{1}`, `e3` into (index, exponent).
pub(crate) fn parse_power(tok: &str, letter: char) -> Result<(usize, u32)> {
    let bad = || Error::Parse(format!("bad factor `{tok}`"));
    let rest = tok.strip_prefix(letter).ok_or_else(bad)?;
    let (idx, exp) = match rest.split_once('^') {
        Some((i, e)) => {
            let e = e.trim_start_matches('{').trim_end_matches('}');
            (i, e.parse::<u32>().map_err(|_| bad())?)
        }
        None => (rest, 1),
    };
    Ok((idx.parse::<usize>().map_err(|_| bad())?, exp))
}

impl<T: Scalar> fmt::Debug for Grassmann<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grassmann[L={}]({})", self.n_gen, self.to_text())
    }
}

impl<T: Scalar> fmt::Display for Grassmann<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

// Operator forms panic on mismatched generator counts; use the `checked_*`
// methods where the counts are not known to agree.
impl<T: Scalar> Add for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn add(self, rhs: Self) -> Grassmann<T> {
        self.checked_add(rhs).expect("Grassmann add")
    }
}

impl<T: Scalar> Sub for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn sub(self, rhs: Self) -> Grassmann<T> {
        self.checked_sub(rhs).expect("Grassmann sub")
    }
}

impl<T: Scalar> Mul for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn mul(self, rhs: Self) -> Grassmann<T> {
        self.checked_mul(rhs).expect("Grassmann mul")
    }
}

impl<T: Scalar> Neg for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn neg(self) -> Grassmann<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Scalar> Add for Grassmann<T> {
    type Output = Grassmann<T>;
    fn add(self, rhs: Self) -> Grassmann<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Grassmann<T> {
    type Output = Grassmann<T>;
    fn sub(self, rhs: Self) -> Grassmann<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for Grassmann<T> {
    type Output = Grassmann<T>;
    fn mul(self, rhs: Self) -> Grassmann<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Neg for Grassmann<T> {
    type Output = Grassmann<T>;
    fn neg(self) -> Grassmann<T> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact, Exact};

    fn l(n: usize, i: usize) -> Grassmann<Exact> {
        Grassmann::generator(n, i).unwrap()
    }

    fn c(n: usize, v: i64) -> Grassmann<Exact> {
        Grassmann::scalar(n, exact(v, 0))
    }

    #[test]
    fn anticommutation() {
        let (a, b) = (l(2, 1), l(2, 2));
        let ab = &a * &b;
        let ba = &b * &a;
        assert_eq!(ab.to_text(), "1 * l1^1 l2^1");
        assert_eq!(ba, -&ab);
    }

    #[test]
    fn square_of_even_nilpotent() {
        let x = &c(2, 1) + &(&l(2, 1) * &l(2, 2));
        let sq = &x * &x;
        let expected = &c(2, 1) + &(&(&l(2, 1) * &l(2, 2)) * &c(2, 2));
        assert_eq!(sq, expected);
    }

    #[test]
    fn difference_of_squares() {
        let p = &l(2, 1) + &l(2, 2);
        let m = &l(2, 1) - &l(2, 2);
        // (a+b)(a-b) = aa - ab + ba - bb = -2ab
        assert_eq!((&p * &m).to_text(), "-2 * l1^1 l2^1");
    }

    #[test]
    fn parity_classes() {
        assert_eq!((&c(2, 1) + &(&l(2, 1) * &l(2, 2))).parity(), Parity::Even);
        assert_eq!(l(2, 1).parity(), Parity::Odd);
        assert_eq!((&c(2, 1) + &l(2, 1)).parity(), Parity::Mixed);
    }

    #[test]
    fn body_soul_split() {
        let x = &c(2, 3) + &(&l(2, 1) * &l(2, 2));
        let (b, s) = x.body_soul();
        assert_eq!(b, exact(3, 0));
        assert_eq!(s, &l(2, 1) * &l(2, 2));
        let (b0, s0) = Grassmann::<Exact>::zero(2).body_soul();
        assert_eq!(b0, exact(0, 0));
        assert!(s0.is_zero());
        let (b1, s1) = l(2, 1).body_soul();
        assert_eq!(b1, exact(0, 0));
        assert_eq!(s1, l(2, 1));
    }

    #[test]
    fn left_derivative_examples() {
        let x = &l(2, 1) * &l(2, 2);
        assert_eq!(x.left_derive(1).unwrap(), l(2, 2));
        let y = &(&l(3, 1) * &l(3, 2)) * &l(3, 3);
        assert_eq!(y.left_derive(2).unwrap(), -&(&l(3, 1) * &l(3, 3)));
        assert!((&l(3, 1) * &l(3, 2)).left_derive(3).unwrap().is_zero());
        assert!(matches!(
            y.left_derive(4),
            Err(Error::GeneratorOutOfRange { .. })
        ));
        assert!(matches!(
            y.left_derive(0),
            Err(Error::GeneratorOutOfRange { .. })
        ));
    }

    #[test]
    fn mismatched_generator_counts_are_rejected() {
        let r = l(2, 1).checked_mul(&l(3, 1));
        assert_eq!(r, Err(Error::GeneratorMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn construction_normalizes_order() {
        let g = Grassmann::<Exact>::from_terms(3, [(vec![3, 1], exact(2, 0))]).unwrap();
        assert_eq!(g, &(&l(3, 3) * &l(3, 1)) * &c(3, 2));
        let z = Grassmann::<Exact>::from_terms(3, [(vec![2, 2], exact(1, 0))]).unwrap();
        assert!(z.is_zero());
        assert!(Grassmann::<Exact>::from_terms(2, [(vec![3], exact(1, 0))]).is_err());
    }

    #[test]
    fn golden_text() {
        let x = &(&c(3, 3) + &(&l(3, 2) * &Grassmann::scalar(3, exact(1, -2))))
            + &(&(&l(3, 1) * &l(3, 3)) * &c(3, -1));
        assert_eq!(
            x.to_text(),
            "3 * l1^0 l2^0 l3^0 + (1-2i) * l1^0 l2^1 l3^0 + -1 * l1^1 l2^0 l3^1"
        );
        assert_eq!(Grassmann::<Exact>::parse(3, &x.to_text()).unwrap(), x);
        assert_eq!(
            Grassmann::<Exact>::parse(3, "2 * l3 l1").unwrap().to_text(),
            "-2 * l1^1 l2^0 l3^1"
        );
        assert_eq!(Grassmann::<Exact>::zero(3).to_text(), "0");
    }
}
