//! The scalar abstraction every exact routine is written against.
//!
//! All of the real-field machinery (elimination, simplex, the decision
//! procedures) only needs an ordered field with exact equality. The
//! certification path instantiates it with [`Rational`](crate::Rational);
//! `f64` also satisfies the bound and is handy for quick experiments, but
//! zero tests on floats are exact comparisons, so results are only as good as
//! the rounding allows.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Canonical text form. Rationals use `"p/q"` with `q` omitted when 1.
    fn to_exact_string(&self) -> String;

    fn parse_exact(s: &str) -> Result<Self, Error>;

    fn to_f64_lossy(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every scalar type represents small integers")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Positive rescaling of `x` into a canonical representative of its ray.
    /// Only rationals have one (coprime integers); other types return `x`.
    fn primitive_scale(x: &[Self]) -> Vec<Self> {
        x.to_vec()
    }
}

impl Scalar for BigRational {
    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_exact(s: &str) -> Result<Self, Error> {
        parse_rational(s)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn primitive_scale(x: &[Self]) -> Vec<Self> {
        primitive_direction(x)
    }
}

impl Scalar for f64 {
    fn to_exact_string(&self) -> String {
        // serde_json / ryu print the shortest round-tripping representation
        serde_json::Number::from_f64(*self)
            .map(|n| n.to_string())
            .unwrap_or_else(|| self.to_string())
    }

    fn parse_exact(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| Error::parse(s))?;
            let q: f64 = q.trim().parse().map_err(|_| Error::parse(s))?;
            if q == 0.0 {
                return Err(Error::parse(s));
            }
            return Ok(p / q);
        }
        s.parse().map_err(|_| Error::parse(s))
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

/// Parses `"p"`, `"p/q"` or a finite decimal literal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::parse(s));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::parse(s))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::parse(s))?;
        if q.is_zero() {
            return Err(Error::parse(s));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(s));
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| Error::parse(s))?
        };
        let frac_part = BigInt::from_str(frac).map_err(|_| Error::parse(s))?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let mut value =
            BigRational::from_integer(int_part.abs()) + BigRational::new(frac_part, scale);
        if negative || int_part.is_negative() {
            value = -value;
        }
        return Ok(value);
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|_| Error::parse(s))
}

pub fn l1_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, v| acc + v.abs())
}

/// Number of nonzero entries.
pub fn support_size<T: Scalar>(x: &[T]) -> usize {
    x.iter().filter(|v| !v.is_zero()).count()
}

pub fn support<T: Scalar>(x: &[T]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn is_zero_vec<T: Scalar>(x: &[T]) -> bool {
    x.iter().all(Zero::is_zero)
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

pub fn scale<T: Scalar>(c: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn neg<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| -x.clone()).collect()
}

/// Positive rescaling of a rational vector to a primitive integer vector
/// (coprime entries, same direction). The zero vector is returned unchanged.
pub fn primitive_direction(x: &[BigRational]) -> Vec<BigRational> {
    use num_integer::Integer;
    if x.iter().all(Zero::is_zero) {
        return x.to_vec();
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let gcd = ints
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::zero(), |acc, v| acc.gcd(v));
    ints.into_iter()
        .map(|v| BigRational::from_integer(v / &gcd))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(q(6, 4).to_exact_string(), "3/2");
        assert_eq!(q(-6, 3).to_exact_string(), "-2");
        assert_eq!(q(0, 5).to_exact_string(), "0");
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), q(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rational_parse_rejects_garbage() {
        for bad in ["", "1/0", "a", "1/2/3", "1.", "1.x", "--3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn primitive_direction_clears_denominators() {
        let v = vec![q(1, 2), q(-1, 3), q(0, 1)];
        assert_eq!(primitive_direction(&v), vec![q(3, 1), q(-2, 1), q(0, 1)]);
        let w = vec![q(4, 1), q(-6, 1)];
        assert_eq!(primitive_direction(&w), vec![q(2, 1), q(-3, 1)]);
    }

    #[test]
    fn float_scalar_round_trip() {
        let x = 0.1f64 + 0.2;
        assert_eq!(f64::parse_exact(&x.to_exact_string()).unwrap(), x);
        assert_eq!(f64::parse_exact("1/4").unwrap(), 0.25);
    }
}
