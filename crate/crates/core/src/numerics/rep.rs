use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::field::{FieldMode, GaussianRational};
use super::matrix::Matrix;
use super::scalar::JsonEntry;
use crate::error::{Error, Result};

/// A matrix tagged with its field mode, as read from or written to JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixRep {
    Rational(Matrix<BigRational>),
    GaussianRational(Matrix<GaussianRational>),
    ComplexFloat(Matrix<Complex64>),
}

/// Runs `$body` with `$m` bound to the inner typed matrix.
#[macro_export]
macro_rules! with_matrix {
    ($rep:expr, $m:ident => $body:expr) => {
        match $rep {
            $crate::numerics::MatrixRep::Rational($m) => $body,
            $crate::numerics::MatrixRep::GaussianRational($m) => $body,
            $crate::numerics::MatrixRep::ComplexFloat($m) => $body,
        }
    };
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    field: FieldMode,
    rows: usize,
    cols: usize,
    #[serde(default)]
    tol: f64,
    data: Vec<Vec<Value>>,
}

impl MatrixRep {
    pub fn mode(&self) -> FieldMode {
        match self {
            MatrixRep::Rational(_) => FieldMode::Rational,
            MatrixRep::GaussianRational(_) => FieldMode::GaussianRational,
            MatrixRep::ComplexFloat(_) => FieldMode::ComplexFloat,
        }
    }

    pub fn rows(&self) -> usize {
        with_matrix!(self, m => m.rows())
    }

    pub fn cols(&self) -> usize {
        with_matrix!(self, m => m.cols())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: MatrixJson = serde_json::from_value(v.clone())?;
        if raw.rows == 0 || raw.cols == 0 {
            return Err(Error::Parse("rows and cols must be positive".into()));
        }
        if raw.data.len() != raw.rows || raw.data.iter().any(|r| r.len() != raw.cols) {
            return Err(Error::Parse(format!(
                "data does not match declared shape {}x{}",
                raw.rows, raw.cols
            )));
        }
        fn typed<F: JsonEntry>(raw: &MatrixJson) -> Result<Matrix<F>> {
            let data = raw
                .data
                .iter()
                .flatten()
                .map(F::parse_entry)
                .collect::<Result<Vec<F>>>()?;
            let m = Matrix::new(raw.rows, raw.cols, data)?;
            if F::EXACT {
                m.with_tol(0.0)
            } else {
                let tol = if raw.tol > 0.0 { raw.tol } else { super::DEFAULT_FLOAT_TOL };
                m.with_tol(tol)
            }
        }
        Ok(match raw.field {
            FieldMode::Rational => MatrixRep::Rational(typed(&raw)?),
            FieldMode::GaussianRational => MatrixRep::GaussianRational(typed(&raw)?),
            FieldMode::ComplexFloat => MatrixRep::ComplexFloat(typed(&raw)?),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        fn typed<F: JsonEntry>(m: &Matrix<F>) -> Value {
            let data: Vec<Vec<Value>> = m
                .to_rows()
                .iter()
                .map(|r| r.iter().map(JsonEntry::format_entry).collect())
                .collect();
            serde_json::to_value(MatrixJson {
                field: F::MODE,
                rows: m.rows(),
                cols: m.cols(),
                tol: m.tol(),
                data,
            })
            .expect("matrix json is serializable")
        }
        with_matrix!(self, m => typed(m))
    }
}

impl From<Matrix<BigRational>> for MatrixRep {
    fn from(m: Matrix<BigRational>) -> Self {
        MatrixRep::Rational(m)
    }
}

impl From<Matrix<GaussianRational>> for MatrixRep {
    fn from(m: Matrix<GaussianRational>) -> Self {
        MatrixRep::GaussianRational(m)
    }
}

impl From<Matrix<Complex64>> for MatrixRep {
    fn from(m: Matrix<Complex64>) -> Self {
        MatrixRep::ComplexFloat(m)
    }
}
