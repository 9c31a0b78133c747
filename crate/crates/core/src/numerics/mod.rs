//! Scalar fields and dense matrix kernels: rank, kernel, determinants,
//! echelon forms and distances to spans.

pub mod field;
pub mod matrix;
pub mod rep;
pub mod scalar;

pub use field::{
    ceil_rational, int, rational, ComplexFloat, Field, FieldMode, GaussianRational, Rational,
    RealValue,
};
pub use matrix::{
    dist_sq_to_span, dot, inner, is_unit, max_modulus_sq, norm_sq, normalize_leading, KernelBasis, Matrix, Rref, SubDeterminant,
    DEFAULT_FLOAT_TOL,
};
pub use rep::MatrixRep;
pub use scalar::{IntoScalar, JsonEntry, Scalar};
