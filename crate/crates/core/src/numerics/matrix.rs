use itertools::Itertools;
use num_traits::Zero;

use super::field::{Field, RealValue};
use crate::error::{Error, Result};

pub const DEFAULT_FLOAT_TOL: f64 = 1e-10;

/// Dense row-major matrix over a [`Field`].
///
/// Exact fields always carry `tol == 0`; the float field carries a strictly
/// positive tolerance used by every rank decision.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
    tol: f64,
}

#[derive(Clone, Debug)]
pub struct Rref<F> {
    pub echelon: Matrix<F>,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

/// Reduced kernel basis: first nonzero entry of every vector is 1.
#[derive(Clone, Debug)]
pub struct KernelBasis<F> {
    pub vectors: Vec<Vec<F>>,
}

#[derive(Clone, Debug)]
pub struct SubDeterminant<F> {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: F,
}

fn default_tol<F: Field>() -> f64 {
    if F::EXACT {
        0.0
    } else {
        DEFAULT_FLOAT_TOL
    }
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data, tol: default_tol::<F>() })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds a `dim x columns.len()` matrix from column vectors.
    pub fn from_columns(dim: usize, columns: &[Vec<F>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Dimension("column length differs from dim".into()));
        }
        let n = columns.len();
        let mut data = Vec::with_capacity(dim * n);
        for i in 0..dim {
            for c in columns {
                data.push(c[i].clone());
            }
        }
        Self::new(dim, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols], tol: default_tol::<F>() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if F::EXACT && tol != 0.0 {
            return Err(Error::Precondition("exact field modes require tol = 0".into()));
        }
        if !F::EXACT && !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Precondition("complex_float mode requires tol > 0".into()));
        }
        self.tol = tol;
        Ok(self)
    }

    pub(crate) fn inherit_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.rows, cols: idx.len(), data, tol: self.tol }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.cols * idx.len());
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: idx.len(), cols: self.cols, data, tol: self.tol }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data, tol: self.tol }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        for x in &mut t.data {
            *x = x.conj();
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols).inherit_tol(self.tol);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = F::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn max_modulus_sq(&self) -> F::Real {
        max_modulus_sq(&self.data)
    }

    pub fn column_modulus_sq(&self, j: usize) -> F::Real {
        (0..self.rows).fold(F::Real::zero(), |acc, i| acc + self.get(i, j).modulus_sq())
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        if F::EXACT {
            (0..self.rows).all(|i| self.get(i, j).is_zero())
        } else {
            let scale = self.max_modulus_sq();
            (0..self.rows).all(|i| self.get(i, j).negligible(&scale, self.tol))
        }
    }

    /// Reduced row echelon form.
    ///
    /// Exact fields pivot on the first nonzero entry. The float field pivots
    /// on the largest remaining entry and accepts it only if its modulus is at
    /// least `tol` times the largest modulus in that column at that step.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let chosen = if F::EXACT {
                (row..self.rows).find(|&r| !m.get(r, col).is_zero())
            } else {
                let col_max = (0..self.rows)
                    .map(|r| m.get(r, col).modulus_sq())
                    .fold(F::Real::zero(), real_max);
                let best = (row..self.rows)
                    .map(|r| (r, m.get(r, col).modulus_sq()))
                    .fold(None::<(usize, F::Real)>, |acc, cur| match acc {
                        Some(a) if a.1 >= cur.1 => Some(a),
                        _ => Some(cur),
                    });
                match best {
                    Some((r, mag))
                        if mag > F::Real::zero()
                            && mag >= col_max * F::Real::from_f64_lossy(self.tol * self.tol) =>
                    {
                        Some(r)
                    }
                    _ => {
                        for r in row..self.rows {
                            m.set(r, col, F::zero());
                        }
                        None
                    }
                }
            };
            let Some(p) = chosen else { continue };
            m.swap_rows(p, row);
            let inv = F::one() / m.get(row, col).clone();
            for j in col..self.cols {
                let v = m.get(row, j).clone() * inv.clone();
                m.set(row, j, v);
            }
            m.set(row, col, F::one());
            for r in 0..self.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..self.cols {
                    let v = m.get(r, j).clone() - factor.clone() * m.get(row, j).clone();
                    m.set(r, j, v);
                }
                m.set(r, col, F::zero());
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        Rref { echelon: m, pivot_cols: pivots, rank }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Row-equivalent matrix with `rank` rows (the nonzero rows of the RREF).
    pub fn full_row_rank_form(&self) -> Self {
        let r = self.rref();
        let idx: Vec<usize> = (0..r.rank).collect();
        r.echelon.select_rows(&idx)
    }

    pub fn kernel_basis(&self) -> KernelBasis<F> {
        let Rref { echelon, pivot_cols, .. } = self.rref();
        let scale = self.max_modulus_sq();
        let mut vectors = Vec::new();
        for f in (0..self.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[f] = F::one();
            for (k, &p) in pivot_cols.iter().enumerate() {
                v[p] = -echelon.get(k, f).clone();
            }
            normalize_leading(&mut v, &scale, self.tol);
            vectors.push(v);
        }
        KernelBasis { vectors }
    }

    pub fn det(&self) -> Result<F> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(if F::EXACT { self.det_bareiss() } else { self.det_partial_pivot() })
    }

    /// Fraction-free (Bareiss) elimination; every division is exact.
    fn det_bareiss(&self) -> F {
        let n = self.rows;
        if n == 0 {
            return F::one();
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = F::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.get(r, k).is_zero()) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        negate = !negate;
                    }
                    None => return F::zero(),
                }
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j).clone() * pivot.clone()
                        - m.get(i, k).clone() * m.get(k, j).clone())
                        / prev.clone();
                    m.set(i, j, v);
                }
            }
            prev = pivot;
        }
        let d = m.get(n - 1, n - 1).clone();
        if negate {
            -d
        } else {
            d
        }
    }

    fn det_partial_pivot(&self) -> F {
        let n = self.rows;
        let mut m = self.clone();
        let mut acc = F::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| {
                    m.get(a, k)
                        .modulus_sq()
                        .partial_cmp(&m.get(b, k).modulus_sq())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            if m.get(p, k).is_zero() {
                return F::zero();
            }
            if p != k {
                m.swap_rows(p, k);
                acc = -acc;
            }
            let pivot = m.get(k, k).clone();
            acc = acc * pivot.clone();
            for i in k + 1..n {
                let f = m.get(i, k).clone() / pivot.clone();
                for j in k..n {
                    let v = m.get(i, j).clone() - f.clone() * m.get(k, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        acc
    }

    /// Every `r x r` minor, rows-major lexicographic order.
    pub fn all_subdets(&self, r: usize) -> Result<impl Iterator<Item = SubDeterminant<F>> + '_> {
        if r > self.rows.min(self.cols) {
            return Err(Error::Precondition(format!(
                "minor size {r} exceeds min({}, {})",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).combinations(r).flat_map(move |rows| {
            (0..self.cols).combinations(r).map(move |cols| {
                let value = self
                    .select_rows(&rows)
                    .select_columns(&cols)
                    .det()
                    .expect("square by construction");
                SubDeterminant { rows: rows.clone(), cols, value }
            })
        }))
    }

    /// Solves `self * x = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &[F]) -> Option<Vec<F>> {
        let n = self.rows;
        if n != self.cols || rhs.len() != n {
            return None;
        }
        let mut aug = Self::zeros(n, n + 1).inherit_tol(self.tol);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n, rhs[i].clone());
        }
        let r = aug.rref();
        if r.pivot_cols != (0..n).collect::<Vec<_>>() {
            return None;
        }
        Some((0..n).map(|i| r.echelon.get(i, n).clone()).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Hermitian inner product `sum conj(a_i) b_i`.
pub fn inner<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
}

pub fn norm_sq<F: Field>(v: &[F]) -> F::Real {
    v.iter().fold(F::Real::zero(), |acc, x| acc + x.modulus_sq())
}

pub fn max_modulus_sq<F: Field>(v: &[F]) -> F::Real {
    v.iter().map(Field::modulus_sq).fold(F::Real::zero(), real_max)
}

pub(crate) fn real_max<R: RealValue>(a: R, b: R) -> R {
    if b > a {
        b
    } else {
        a
    }
}

/// Divides `v` by its first non-negligible entry.
pub fn normalize_leading<F: Field>(v: &mut [F], scale_sq: &F::Real, tol: f64) {
    let lead = v.iter().find(|x| !x.negligible(scale_sq, tol)).cloned();
    if let Some(lead) = lead {
        for x in v.iter_mut() {
            *x = x.clone() / lead.clone();
        }
    }
}

/// Squared (Hermitian) distance from `v` to `span(basis)`.
///
/// Projects through the Gram matrix of an independent subset of `basis`, so
/// the value is exact in the exact fields.
pub fn dist_sq_to_span<F: Field>(v: &[F], basis: &[Vec<F>], tol: f64) -> Result<F::Real> {
    let dim = v.len();
    if basis.is_empty() {
        return Ok(norm_sq(v));
    }
    let b = Matrix::from_columns(dim, basis)?.inherit_tol(tol);
    let pivots = b.rref().pivot_cols;
    let indep: Vec<&Vec<F>> = pivots.iter().map(|&p| &basis[p]).collect();
    let k = indep.len();
    let mut gram = Matrix::<F>::zeros(k, k).inherit_tol(tol);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, inner(indep[i], indep[j]));
        }
    }
    let rhs: Vec<F> = indep.iter().map(|c| inner(c, v)).collect();
    let y = gram
        .solve(&rhs)
        .ok_or_else(|| Error::Inconsistent("singular Gram matrix of independent columns".into()))?;
    let proj = inner(&rhs, &y);
    let d = inner(v, v) - proj;
    let re = d.real_part();
    if !F::EXACT && re < F::Real::zero() {
        return Ok(F::Real::zero());
    }
    Ok(re)
}

impl<F: Field> Matrix<F> {
    /// Integer entries if every entry is an integer.
    pub fn integer_entries(&self) -> Result<Vec<Vec<num_bigint::BigInt>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).as_integer().ok_or(Error::NonInteger(i, j)))
                    .collect()
            })
            .collect()
    }
}

pub fn is_unit<F: Field>(x: &F) -> bool {
    *x == F::one()
}
