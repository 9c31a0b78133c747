use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::field::{Field, FieldMode, GaussianRational};
use crate::error::{Error, Result};

/// Run-time tagged scalar. Arithmetic never changes the mode; mixing modes
/// is an error.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    GaussianRational(GaussianRational),
    ComplexFloat(Complex64),
}

macro_rules! binop {
    ($name:ident, $op:tt) => {
        pub fn $name(&self, other: &Scalar) -> Result<Scalar> {
            match (self, other) {
                (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a $op b)),
                (Scalar::GaussianRational(a), Scalar::GaussianRational(b)) => {
                    Ok(Scalar::GaussianRational(a.clone() $op b.clone()))
                }
                (Scalar::ComplexFloat(a), Scalar::ComplexFloat(b)) => Ok(Scalar::ComplexFloat(a $op b)),
                _ => Err(Error::FieldMismatch { left: self.mode(), right: other.mode() }),
            }
        }
    };
}

impl Scalar {
    pub fn mode(&self) -> FieldMode {
        match self {
            Scalar::Rational(_) => FieldMode::Rational,
            Scalar::GaussianRational(_) => FieldMode::GaussianRational,
            Scalar::ComplexFloat(_) => FieldMode::ComplexFloat,
        }
    }

    binop!(try_add, +);
    binop!(try_sub, -);
    binop!(try_mul, *);

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::Precondition("division by zero".into()));
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a / b)),
            (Scalar::GaussianRational(a), Scalar::GaussianRational(b)) => {
                Ok(Scalar::GaussianRational(a.clone() / b.clone()))
            }
            (Scalar::ComplexFloat(a), Scalar::ComplexFloat(b)) => Ok(Scalar::ComplexFloat(a / b)),
            _ => Err(Error::FieldMismatch { left: self.mode(), right: other.mode() }),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(a) => a.is_zero(),
            Scalar::GaussianRational(a) => a.is_zero(),
            Scalar::ComplexFloat(a) => a.is_zero(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Rational(a) => a.to_complex(),
            Scalar::GaussianRational(a) => a.to_complex(),
            Scalar::ComplexFloat(a) => *a,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Rational(a) => format_rational(a),
            Scalar::GaussianRational(a) => format_gaussian(a),
            Scalar::ComplexFloat(a) => format_complex(a),
        }
    }
}

/// Conversion from a generic field element to the tagged scalar.
pub trait IntoScalar {
    fn into_scalar(self) -> Scalar;
}

impl IntoScalar for BigRational {
    fn into_scalar(self) -> Scalar {
        Scalar::Rational(self)
    }
}

impl IntoScalar for GaussianRational {
    fn into_scalar(self) -> Scalar {
        Scalar::GaussianRational(self)
    }
}

impl IntoScalar for Complex64 {
    fn into_scalar(self) -> Scalar {
        Scalar::ComplexFloat(self)
    }
}

pub fn parse_rational_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Accepts `"p/q"`, `"p"`, or a JSON integer.
pub fn parse_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational_str(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(BigRational::from_integer(BigInt::from(i))),
            None => Err(Error::Parse(format!("non-integer number {n} for a rational entry; use \"p/q\""))),
        },
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

/// Accepts `["p/q", "r/s"]` or a plain rational (imaginary part zero).
pub fn parse_gaussian(v: &Value) -> Result<GaussianRational> {
    match v {
        Value::Array(parts) if parts.len() == 2 => {
            Ok(GaussianRational::new(parse_rational(&parts[0])?, parse_rational(&parts[1])?))
        }
        Value::Array(_) => Err(Error::Parse("gaussian entry must have two parts".into())),
        other => Ok(GaussianRational::from_real(parse_rational(other)?)),
    }
}

/// Accepts `[re, im]` or a plain number.
pub fn parse_complex(v: &Value) -> Result<Complex64> {
    let num = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| Error::Parse(format!("expected a number, got {x}")))
    };
    match v {
        Value::Array(parts) if parts.len() == 2 => Ok(Complex64::new(num(&parts[0])?, num(&parts[1])?)),
        Value::Array(_) => Err(Error::Parse("complex entry must have two parts".into())),
        other => Ok(Complex64::new(num(other)?, 0.0)),
    }
}

pub fn format_rational(a: &BigRational) -> Value {
    Value::String(a.to_string())
}

pub fn format_gaussian(a: &GaussianRational) -> Value {
    json!([a.re.to_string(), a.im.to_string()])
}

pub fn format_complex(a: &Complex64) -> Value {
    json!([a.re, a.im])
}

/// JSON (de)serialization of field elements.
pub trait JsonEntry: Field {
    fn parse_entry(v: &Value) -> Result<Self>;
    fn format_entry(&self) -> Value;
}

impl JsonEntry for BigRational {
    fn parse_entry(v: &Value) -> Result<Self> {
        parse_rational(v)
    }
    fn format_entry(&self) -> Value {
        format_rational(self)
    }
}

impl JsonEntry for GaussianRational {
    fn parse_entry(v: &Value) -> Result<Self> {
        parse_gaussian(v)
    }
    fn format_entry(&self) -> Value {
        format_gaussian(self)
    }
}

impl JsonEntry for Complex64 {
    fn parse_entry(v: &Value) -> Result<Self> {
        parse_complex(v)
    }
    fn format_entry(&self) -> Value {
        format_complex(self)
    }
}

/// Float rendering of an exact or float real, for reports.
pub fn real_to_f64<R: ToPrimitive>(r: &R) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
