//! Scalar types shared by the exact and floating-point code paths.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FloatConst, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Gaussian rational: a complex number with arbitrary-precision rational parts.
pub type Gq = Complex<BigRational>;

/// Real floating-point type the numerical modules are generic over.
pub trait Real:
    num_traits::Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field operations needed by polynomials, matrices and determinants.
///
/// `magnitude` drives pivot selection: exact types only need zero/non-zero,
/// floating types use the modulus so elimination is partially pivoted.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_gq(q: &Gq) -> Self;
    fn from_i64(n: i64) -> Self;
    fn imag_unit() -> Self;
    fn magnitude(&self) -> f64;

    /// Relative size below which a value counts as zero (0 for exact types).
    fn tolerance() -> f64 {
        0.0
    }

    fn negligible(&self, scale: f64) -> bool {
        self.magnitude() <= Self::tolerance() * scale.max(1.0)
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Gq {
    fn from_gq(q: &Gq) -> Self {
        q.clone()
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl<F: Real> Scalar for Complex<F> {
    fn from_gq(q: &Gq) -> Self {
        Complex::new(F::lit(rat_to_f64(&q.re)), F::lit(rat_to_f64(&q.im)))
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(F::from_i64(n).unwrap(), F::zero())
    }
    fn imag_unit() -> Self {
        Complex::new(F::zero(), F::one())
    }
    fn magnitude(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::NAN)
    }
    fn tolerance() -> f64 {
        F::epsilon().to_f64().unwrap() * 256.0
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // huge numerators and denominators: divide in big-integer space first
        let scale = BigInt::from(10u64).pow(17);
        let q = (r.numer() * &scale) / r.denom();
        q.to_f64().unwrap_or(f64::NAN) / 1e17
    })
}

pub fn gq_to_complex<F: Real>(q: &Gq) -> Complex<F> {
    Complex::new(F::lit(rat_to_f64(&q.re)), F::lit(rat_to_f64(&q.im)))
}

pub fn gq(re: i64, im: i64) -> Gq {
    Complex::new(
        BigRational::from_integer(re.into()),
        BigRational::from_integer(im.into()),
    )
}

pub fn gq_ratio(p: i64, q: i64) -> Gq {
    Complex::new(BigRational::new(p.into(), q.into()), BigRational::zero())
}

/// Exact conversion of a finite double into a Gaussian rational (real part only).
pub fn gq_from_f64(x: f64) -> Option<Gq> {
    BigRational::from_float(x).map(|r| Complex::new(r, BigRational::zero()))
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else if s.contains('.') || s.contains('e') || s.contains('E') {
        let x: f64 = s.parse().ok()?;
        BigRational::from_float(x)
    } else {
        BigInt::from_str(s).ok().map(BigRational::from_integer)
    }
}

/// Parses "p/q", "p/q+r/s*i", "r/s*i", "i", "-i", "2-3*i" and plain decimals.
pub fn parse_gq(input: &str) -> Result<Gq> {
    let bad = || Error::Parse(input.to_string());
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    if !s.ends_with('i') {
        return parse_rational(&s).map(|r| Complex::new(r, BigRational::zero())).ok_or_else(bad);
    }
    // locate the sign that separates real and imaginary parts (skip a leading sign
    // and exponent signs)
    let bytes = s.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(k) => (&s[..k], &s[k..]),
        None => ("0", &s[..]),
    };
    let im_body = im_part.trim_end_matches('i').trim_end_matches('*');
    let im = match im_body {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        body => parse_rational(body).ok_or_else(bad)?,
    };
    let re = parse_rational(re_part).ok_or_else(bad)?;
    Ok(Complex::new(re, im))
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats in the same grammar `parse_gq` accepts.
pub fn format_gq(q: &Gq) -> String {
    if q.im.is_zero() {
        return fmt_rational(&q.re);
    }
    let im = if q.im.abs().is_one() {
        String::new()
    } else {
        format!("{}*", fmt_rational(&q.im.abs()))
    };
    let sign = if q.im.is_negative() { "-" } else { "+" };
    if q.re.is_zero() {
        let lead = if q.im.is_negative() { "-" } else { "" };
        format!("{lead}{im}i")
    } else {
        format!("{}{sign}{im}i", fmt_rational(&q.re))
    }
}
