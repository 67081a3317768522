//! Complex coefficients with an exact (rational) and a floating representation.
//!
//! Exact arithmetic is closed: sums, products, negation and conjugation of
//! exact scalars stay exact. Any operation that mixes an exact and a floating
//! operand produces a floating result, so a single irrational constant
//! degrades only the expressions it actually touches.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default comparison tolerance for floating coefficients.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficient representation selected for a whole algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Rational real and imaginary parts; irrational constants fall back to floats.
    #[default]
    Exact,
    /// Every coefficient is stored as a pair of `f64`.
    Float,
}

/// A complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRational { re, im }
    }

    pub fn zero() -> Self {
        ComplexRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexRational::new(self.re.clone(), -self.im.clone())
    }

    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a non-negative rational, if it is a perfect square.
fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Parses a decimal literal such as `12`, `0.25` or `3.` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(numer, denom))
}

/// A complex coefficient.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(ComplexRational),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(ComplexRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::Exact(ComplexRational::new(BigRational::zero(), BigRational::one()))
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(ComplexRational::new(BigRational::from_integer(v.into()), BigRational::zero()))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Scalar::Exact(ComplexRational::new(
            BigRational::new(numer.into(), denom.into()),
            BigRational::zero(),
        ))
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar::Exact(ComplexRational::new(re, BigRational::zero()))
    }

    pub fn complex_ratio(re: (i64, i64), im: (i64, i64)) -> Self {
        Scalar::Exact(ComplexRational::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        ))
    }

    pub fn from_f64(v: f64) -> Self {
        Scalar::Float(Complex64::new(v, 0.0))
    }

    pub fn from_c64(v: Complex64) -> Self {
        Scalar::Float(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_c64(),
            Scalar::Float(c) => *c,
        }
    }

    /// Converts to the representation required by `mode`.
    pub fn in_mode(self, mode: Mode) -> Self {
        match (mode, self) {
            (Mode::Float, Scalar::Exact(c)) => Scalar::Float(c.to_c64()),
            (_, s) => s,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    /// Zero test: syntactic for exact values, `|c| <= tol` for floats.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(c) => c.norm() <= tol,
        }
    }

    /// Equality under the same rules as [`Scalar::is_negligible`].
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_c64() - other.to_c64()).norm() <= tol,
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(c) => {
                let n2 = c.norm_sqr();
                match exact_sqrt(&n2) {
                    Some(r) => ratio_to_f64(&r),
                    None => ratio_to_f64(&n2).sqrt(),
                }
            }
            Scalar::Float(c) => c.norm(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    /// Real part if the value is (exactly, or within `tol`) real.
    pub fn as_real(&self, tol: f64) -> Option<f64> {
        match self {
            Scalar::Exact(c) if c.im.is_zero() => Some(ratio_to_f64(&c.re)),
            Scalar::Exact(_) => None,
            Scalar::Float(c) if c.im.abs() <= tol => Some(c.re),
            Scalar::Float(_) => None,
        }
    }

    /// Sign of the real part of a real value, used for positivity tests.
    pub fn real_sign(&self, tol: f64) -> Option<std::cmp::Ordering> {
        match self {
            Scalar::Exact(c) if c.im.is_zero() => Some(c.re.cmp(&BigRational::zero())),
            Scalar::Exact(_) => None,
            Scalar::Float(c) if c.im.abs() <= tol => Some(if c.re.abs() <= tol {
                std::cmp::Ordering::Equal
            } else if c.re > 0.0 {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            }),
            Scalar::Float(_) => None,
        }
    }

    pub fn re(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::from_rational(c.re.clone()),
            Scalar::Float(c) => Scalar::from_f64(c.re),
        }
    }

    pub fn im(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::from_rational(c.im.clone()),
            Scalar::Float(c) => Scalar::from_f64(c.im),
        }
    }

    /// Principal square root. Stays exact when the value is a non-negative or
    /// non-positive rational whose magnitude is a perfect square.
    pub fn sqrt(&self) -> Scalar {
        if let Scalar::Exact(c) = self {
            if c.im.is_zero() {
                let mag = c.re.abs();
                if let Some(root) = exact_sqrt(&mag) {
                    return if c.re.is_negative() {
                        Scalar::Exact(ComplexRational::new(BigRational::zero(), root))
                    } else {
                        Scalar::from_rational(root)
                    };
                }
            }
        }
        Scalar::Float(self.to_c64().sqrt())
    }

    pub fn powi(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; `None` for an exact zero.
    pub fn recip(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(c) => {
                if c.is_zero() {
                    return None;
                }
                let d = c.norm_sqr();
                Some(Scalar::Exact(ComplexRational::new(&c.re / &d, -(&c.im / &d))))
            }
            Scalar::Float(c) => {
                if c.norm() == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(c.inv()))
                }
            }
        }
    }
}

impl PartialEq for Scalar {
    /// Structural equality. Use [`Scalar::approx_eq`] for tolerance-aware comparison.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                Scalar::Exact(ComplexRational::new(&a.re + &b.re, &a.im + &b.im))
            }
            _ => Scalar::Float(self.to_c64() + rhs.to_c64()),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                Scalar::Exact(ComplexRational::new(&a.re - &b.re, &a.im - &b.im))
            }
            _ => Scalar::Float(self.to_c64() - rhs.to_c64()),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(ComplexRational::new(
                &a.re * &b.re - &a.im * &b.im,
                &a.re * &b.im + &a.im * &b.re,
            )),
            _ => Scalar::Float(self.to_c64() * rhs.to_c64()),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Option<Scalar>;
    fn div(self, rhs: &Scalar) -> Option<Scalar> {
        rhs.recip().map(|r| self * &r)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(ComplexRational::new(-c.re.clone(), -c.im.clone())),
            Scalar::Float(c) => Scalar::Float(-c),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_float(v: f64) -> String {
    // `{}` on f64 is the shortest round-tripping form and never uses exponents.
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Scalar {
    /// Renders as `(re+im i)`, e.g. `(0+1i)`, `(-2+0i)`, `(1/2-3/4i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im, im_neg) = match self {
            Scalar::Exact(c) => (fmt_rational(&c.re), fmt_rational(&c.im.abs()), c.im.is_negative()),
            Scalar::Float(c) => (fmt_float(c.re), fmt_float(c.im.abs()), c.im < 0.0),
        };
        write!(f, "({}{}{}i)", re, if im_neg { '-' } else { '+' }, im)
    }
}
