//! Coefficient rings used by the symbolic and numeric layers.
//!
//! Exact checks run over [`Exact`] (complex numbers with arbitrary precision
//! rational parts); grid computations run over `f64` and [`C64`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = num::complex::Complex64;
/// Exact rational number.
pub type Rational = BigRational;
/// Exact complex rational number.
pub type Exact = Complex<BigRational>;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Exact conversion of a finite double.
    fn from_f64(v: f64) -> Self {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            return Self::from_i64(v as i64);
        }
        Self::from_rational(&BigRational::from_float(v).expect("finite value"))
    }
    fn to_c64(&self) -> C64;
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    /// True when the imaginary part vanishes.
    fn is_real(&self) -> bool;
    fn fmt_coeff(&self) -> String;
    fn parse_coeff(s: &str) -> Result<Self>;
}

/// Scalars with an imaginary unit.
pub trait ComplexScalar: Scalar {
    fn i() -> Self;
    fn conj(&self) -> Self;
    fn re(&self) -> Self;
    fn im(&self) -> Self;
}

fn parse_err(s: &str) -> Error {
    Error::Parse(format!("bad coefficient `{s}`"))
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(parse_err(s));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| parse_err(s))?;
        let d: BigInt = d.trim().parse().map_err(|_| parse_err(s))?;
        if d.is_zero() {
            return Err(parse_err(s));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // Decimal literals are accepted and converted exactly.
    let v: f64 = s.parse().map_err(|_| parse_err(s))?;
    BigRational::from_float(v).ok_or_else(|| parse_err(s))
}

/// Splits `(a+bi)` / `(a-bi)` / `a` into real and imaginary text parts.
fn split_complex(s: &str) -> Result<(String, Option<String>)> {
    let t = s.trim();
    let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) else {
        if let Some(im) = t.strip_suffix('i') {
            let im = if im.is_empty() || im == "+" {
                "1"
            } else if im == "-" {
                "-1"
            } else {
                im
            };
            return Ok(("0".into(), Some(im.to_string())));
        }
        return Ok((t.to_string(), None));
    };
    let inner = inner.trim();
    let body = inner.strip_suffix('i').ok_or_else(|| parse_err(s))?;
    // Split at the last sign that is not an exponent or leading sign.
    let bytes = body.as_bytes();
    let mut cut = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            cut = Some(k);
            break;
        }
    }
    let k = cut.ok_or_else(|| parse_err(s))?;
    let re = body[..k].trim().to_string();
    let mut im = body[k..].trim().to_string();
    if im == "+" || im == "-" {
        im.push('1');
    }
    let im = im.trim_start_matches('+').to_string();
    Ok((re, Some(im)))
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }
    fn is_real(&self) -> bool {
        true
    }
    fn fmt_coeff(&self) -> String {
        format!("{self:?}")
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        s.trim().parse().map_err(|_| parse_err(s))
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        C64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_f64(v: f64) -> Self {
        C64::new(v, 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn is_real(&self) -> bool {
        self.im == 0.0
    }
    fn fmt_coeff(&self) -> String {
        if self.im == 0.0 {
            format!("{:?}", self.re)
        } else if self.im < 0.0 {
            format!("({:?}-{:?}i)", self.re, -self.im)
        } else {
            format!("({:?}+{:?}i)", self.re, self.im)
        }
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let re: f64 = re.parse().map_err(|_| parse_err(s))?;
        let im: f64 = match im {
            Some(t) => t.parse().map_err(|_| parse_err(s))?,
            None => 0.0,
        };
        Ok(C64::new(re, im))
    }
}

impl ComplexScalar for C64 {
    fn i() -> Self {
        C64::new(0.0, 1.0)
    }
    fn conj(&self) -> Self {
        C64::conj(self)
    }
    fn re(&self) -> Self {
        C64::new(self.re, 0.0)
    }
    fn im(&self) -> Self {
        C64::new(self.im, 0.0)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn is_real(&self) -> bool {
        true
    }
    fn fmt_coeff(&self) -> String {
        fmt_rational(self)
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Complex::new(Scalar::zero(), Scalar::zero())
    }
    fn one() -> Self {
        Complex::new(Scalar::one(), Scalar::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(<BigRational as Scalar>::from_i64(v), Scalar::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            <BigRational as Scalar>::from_ratio(num, den),
            Scalar::zero(),
        )
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), Scalar::zero())
    }
    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }
    fn fmt_coeff(&self) -> String {
        if Zero::is_zero(&self.im) {
            fmt_rational(&self.re)
        } else if self.im.is_negative() {
            format!(
                "({}-{}i)",
                fmt_rational(&self.re),
                fmt_rational(&-self.im.clone())
            )
        } else {
            format!("({}+{}i)", fmt_rational(&self.re), fmt_rational(&self.im))
        }
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        let (re, im) = split_complex(s)?;
        let re = parse_rational(&re)?;
        let im = match im {
            Some(t) => parse_rational(&t)?,
            None => Scalar::zero(),
        };
        Ok(Complex::new(re, im))
    }
}

impl ComplexScalar for Exact {
    fn i() -> Self {
        Complex::new(Scalar::zero(), Scalar::one())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn re(&self) -> Self {
        Complex::new(self.re.clone(), Scalar::zero())
    }
    fn im(&self) -> Self {
        Complex::new(self.im.clone(), Scalar::zero())
    }
}

/// Convenience constructor for exact complex constants.
pub fn exact(re: i64, im: i64) -> Exact {
    Complex::new(
        <BigRational as Scalar>::from_i64(re),
        <BigRational as Scalar>::from_i64(im),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_text_round_trips() {
        for s in ["3", "-7/2", "(1/2-3i)", "(0+1i)"] {
            let v = Exact::parse_coeff(s).unwrap();
            assert_eq!(v.fmt_coeff(), s);
        }
        let c = C64::parse_coeff("(1.5-2.0i)").unwrap();
        assert_eq!(c, C64::new(1.5, -2.0));
        assert_eq!(C64::parse_coeff(&c.fmt_coeff()).unwrap(), c);
        assert_eq!(Exact::parse_coeff("2i").unwrap(), exact(0, 2));
        assert_eq!(Exact::parse_coeff("-i").unwrap(), exact(0, -1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Exact::parse_coeff("abc").is_err());
        assert!(Exact::parse_coeff("1/0").is_err());
        assert!(f64::parse_coeff("").is_err());
    }
}
