//! Lines of a finite point set: enumeration, per-point line counts, generic
//! projections to the plane and the maxlines lower bounds.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numerics::{
    int, normalize_leading, rational, Field, FieldMode, GaussianRational, JsonEntry, Matrix,
    DEFAULT_FLOAT_TOL,
};
use num_complex::Complex64;

pub const DEFAULT_COLLINEAR_TOL: f64 = 1e-9;
pub const PROJECTION_ATTEMPTS: usize = 10;
pub const PROJECTION_COEFF_BOUND: i64 = 1_000_000;

/// `n` pairwise distinct points in `F^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfig<F> {
    dim: usize,
    points: Vec<Vec<F>>,
    tol: f64,
}

impl<F: Field> PointConfig<F> {
    pub fn new(dim: usize, points: Vec<Vec<F>>) -> Result<Self> {
        let tol = if F::EXACT { 0.0 } else { DEFAULT_COLLINEAR_TOL };
        Self::with_tol(dim, points, tol)
    }

    pub fn with_tol(dim: usize, points: Vec<Vec<F>>, tol: f64) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Dimension(format!("point of length {} in dimension {dim}", p.len())));
        }
        let tol = if F::EXACT { 0.0 } else if tol > 0.0 { tol } else { DEFAULT_COLLINEAR_TOL };
        let cfg = Self { dim, points, tol };
        for i in 0..cfg.len() {
            for j in i + 1..cfg.len() {
                if cfg.coincide(i, j) {
                    return Err(Error::DuplicatePoint(i, j));
                }
            }
        }
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<F>] {
        &self.points
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn diff(&self, i: usize, j: usize) -> Vec<F> {
        self.points[j].iter().zip(&self.points[i]).map(|(a, b)| a.clone() - b.clone()).collect()
    }

    fn scale_sq(&self) -> F::Real {
        self.points
            .iter()
            .flatten()
            .map(Field::modulus_sq)
            .fold(F::Real::zero(), |a, b| if b > a { b } else { a })
    }

    fn coincide(&self, i: usize, j: usize) -> bool {
        let scale = self.scale_sq();
        self.diff(i, j).iter().all(|x| x.negligible(&scale, self.tol))
    }

    /// Whether `points[k]` lies on the line through `points[i]` and `points[j]`.
    pub fn collinear(&self, i: usize, j: usize, k: usize) -> bool {
        let u = self.diff(i, j);
        let v = self.diff(i, k);
        let inf = |w: &[F]| {
            w.iter().map(Field::modulus_sq).fold(F::Real::zero(), |a, b| if b > a { b } else { a })
        };
        let scale = inf(&u) * inf(&v);
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                let minor = u[a].clone() * v[b].clone() - u[b].clone() * v[a].clone();
                if !minor.negligible(&scale, self.tol) {
                    return false;
                }
            }
        }
        true
    }

    /// Difference vectors `p_i - p_0` as columns of a `dim x (n-1)` matrix.
    fn difference_matrix(&self) -> Matrix<F> {
        let cols: Vec<Vec<F>> = (1..self.len()).map(|i| self.diff(0, i)).collect();
        let m = Matrix::from_columns(self.dim, &cols).expect("consistent dimension");
        if F::EXACT {
            m
        } else {
            m.with_tol(DEFAULT_FLOAT_TOL.max(self.tol)).expect("positive tol")
        }
    }

    pub fn affine_dim(&self) -> usize {
        if self.len() < 2 {
            return 0;
        }
        self.difference_matrix().rank()
    }

    /// Same configuration in `F^k`, `k` the affine dimension, with all affine
    /// dependencies preserved: translate `p_0` to the origin and keep a set
    /// of coordinates that are independent on the differences.
    pub fn reduce_to_affine_hull(&self) -> Self {
        if self.len() < 2 {
            return Self { dim: 0, points: vec![vec![]; self.len()], tol: self.tol };
        }
        let keep = self.difference_matrix().transpose().rref().pivot_cols;
        let points = (0..self.len())
            .map(|i| {
                let d = self.diff(0, i);
                keep.iter().map(|&c| d[c].clone()).collect()
            })
            .collect();
        Self { dim: keep.len(), points, tol: self.tol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Line {
    pub members: Vec<usize>,
}

impl Line {
    pub fn is_ordinary(&self) -> bool {
        self.members.len() == 2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LineSet {
    pub lines: Vec<Line>,
    pub point_to_lines: Vec<Vec<usize>>,
}

impl LineSet {
    pub fn special_count(&self) -> usize {
        self.lines.iter().filter(|l| !l.is_ordinary()).count()
    }

    pub fn ordinary_count(&self) -> usize {
        self.lines.len() - self.special_count()
    }

    pub fn member_sets(&self) -> Vec<Vec<usize>> {
        self.lines.iter().map(|l| l.members.clone()).collect()
    }
}

/// Every line, grouped from the smallest uncovered pair. Lines are ordered by
/// that pair, so the enumeration is deterministic.
pub fn lines<F: Field>(s: &PointConfig<F>) -> Result<LineSet> {
    let n = s.len();
    if n < 2 {
        return Err(Error::Precondition("at least two points are needed".into()));
    }
    let mut covered = vec![vec![false; n]; n];
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if covered[i][j] {
                continue;
            }
            let mut members = vec![i, j];
            members.extend((0..n).filter(|&k| k != i && k != j && s.collinear(i, j, k)));
            members.sort_unstable();
            for (x, &a) in members.iter().enumerate() {
                for &b in &members[x + 1..] {
                    if covered[a][b] {
                        return Err(Error::Inconsistent(format!(
                            "pair ({a}, {b}) lies on two lines; collinearity tolerance too loose"
                        )));
                    }
                    covered[a][b] = true;
                }
            }
            out.push(Line { members });
        }
    }
    let mut point_to_lines = vec![Vec::new(); n];
    for (id, l) in out.iter().enumerate() {
        for &m in &l.members {
            point_to_lines[m].push(id);
        }
    }
    Ok(LineSet { lines: out, point_to_lines })
}

/// Reduced direction of a line: difference of its two smallest members with
/// leading entry 1.
pub fn line_direction<F: Field>(s: &PointConfig<F>, line: &Line) -> Vec<F> {
    let mut d = s.diff(line.members[0], line.members[1]);
    let scale = d.iter().map(Field::modulus_sq).fold(F::Real::zero(), |a, b| if b > a { b } else { a });
    normalize_leading(&mut d, &scale, s.tol);
    d
}

/// Per-point counts: `lines` through the point, `special` lines (three or
/// more points) through it, and `k` other points on those special lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointLines {
    pub lines: usize,
    pub special: usize,
    pub k: usize,
}

pub fn classify(ls: &LineSet) -> Result<Vec<PointLines>> {
    let n = ls.point_to_lines.len();
    ls.point_to_lines
        .par_iter()
        .enumerate()
        .map(|(i, ids)| {
            let special: Vec<&Line> =
                ids.iter().map(|&id| &ls.lines[id]).filter(|l| !l.is_ordinary()).collect();
            let c = PointLines {
                lines: ids.len(),
                special: special.len(),
                k: special.iter().map(|l| l.members.len() - 1).sum(),
            };
            if n - 1 + c.special != c.k + c.lines {
                return Err(Error::Inconsistent(format!("line count identity fails at point {i}")));
            }
            Ok(c)
        })
        .collect()
}

/// `(point, count)` maximizing the number of lines through a point; ties go
/// to the smallest index.
pub fn maxlines(ls: &LineSet) -> (usize, usize) {
    ls.point_to_lines
        .iter()
        .enumerate()
        .fold((0, 0), |best, (i, ids)| if ids.len() > best.1 { (i, ids.len()) } else { best })
}

/// `max(1/3, 1 - 4/(d+1))`.
pub fn f_lower_bound(d: usize) -> Result<BigRational> {
    if d < 2 {
        return Err(Error::Precondition(format!("dimension {d} < 2")));
    }
    let a = rational(1, 3);
    let b = BigRational::one() - rational(4, d as i64 + 1);
    Ok(if b > a { b } else { a })
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxlinesReport {
    pub n: usize,
    pub ambient_dim: usize,
    pub affine_dim: usize,
    pub applicable: bool,
    pub lines: usize,
    pub maxlines: usize,
    pub argmax: usize,
    /// `(1 - 4/(d+1)) n`.
    pub high_dim_bound: Option<String>,
    pub high_dim_pass: Option<bool>,
    /// `floor(n/3) + 1`.
    pub low_dim_bound: Option<usize>,
    pub low_dim_pass: Option<bool>,
    /// `f_lower_bound(d) n`.
    pub f_bound: Option<String>,
    pub f_pass: Option<bool>,
}

impl MaxlinesReport {
    pub fn pass(&self) -> bool {
        !self.applicable
            || (self.high_dim_pass == Some(true)
                && self.low_dim_pass == Some(true)
                && self.f_pass == Some(true))
    }
}

/// Checks both maxlines lower bounds in the affine dimension of `s`. Point
/// sets of affine dimension below 2 are reported as not applicable.
pub fn check_maxlines_bounds<F: Field>(s: &PointConfig<F>) -> Result<MaxlinesReport> {
    let ls = lines(s)?;
    let (argmax, ml) = maxlines(&ls);
    let n = s.len();
    let d = s.affine_dim();
    let mut report = MaxlinesReport {
        n,
        ambient_dim: s.dim(),
        affine_dim: d,
        applicable: d >= 2,
        lines: ls.lines.len(),
        maxlines: ml,
        argmax,
        high_dim_bound: None,
        high_dim_pass: None,
        low_dim_bound: None,
        low_dim_pass: None,
        f_bound: None,
        f_pass: None,
    };
    if d < 2 {
        return Ok(report);
    }
    let n_q = int(n as i64);
    let ml_q = int(ml as i64);
    let high = (BigRational::one() - rational(4, d as i64 + 1)) * n_q.clone();
    let low = n / 3 + 1;
    let f = f_lower_bound(d)? * n_q;
    report.high_dim_pass = Some(ml_q >= high);
    report.high_dim_bound = Some(high.to_string());
    report.low_dim_pass = Some(ml >= low);
    report.low_dim_bound = Some(low);
    report.f_pass = Some(ml_q >= f);
    report.f_bound = Some(f.to_string());
    Ok(report)
}

/// Image of `s` under a random integer linear map to the plane whose line
/// structure is verified to match. Planar input is returned unchanged.
pub fn generic_project_to_plane<F: Field>(s: &PointConfig<F>, seed: u64) -> Result<PointConfig<F>> {
    let d = s.affine_dim();
    if d < 2 {
        return Err(Error::Precondition(format!("affine dimension {d} < 2")));
    }
    if s.dim() == 2 {
        return Ok(s.clone());
    }
    let original = lines(s)?.member_sets();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PROJECTION_ATTEMPTS {
        let coeffs: Vec<Vec<F>> = (0..2)
            .map(|_| {
                (0..s.dim())
                    .map(|_| F::from_i64(rng.gen_range(-PROJECTION_COEFF_BOUND..=PROJECTION_COEFF_BOUND)))
                    .collect()
            })
            .collect();
        let points: Vec<Vec<F>> = s
            .points()
            .iter()
            .map(|p| {
                coeffs
                    .iter()
                    .map(|row| {
                        row.iter().zip(p).fold(F::zero(), |acc, (c, x)| acc + c.clone() * x.clone())
                    })
                    .collect()
            })
            .collect();
        let Ok(image) = PointConfig::with_tol(2, points, s.tol()) else { continue };
        if matches!(lines(&image), Ok(ls) if ls.member_sets() == original) {
            return Ok(image);
        }
    }
    Err(Error::ProjectionNotGeneric(PROJECTION_ATTEMPTS))
}

/// A point configuration tagged with its field, as read from JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum PointsRep {
    Rational(PointConfig<BigRational>),
    GaussianRational(PointConfig<GaussianRational>),
    ComplexFloat(PointConfig<Complex64>),
}

#[macro_export]
macro_rules! with_points {
    ($rep:expr, $s:ident => $body:expr) => {
        match $rep {
            $crate::incidence::PointsRep::Rational($s) => $body,
            $crate::incidence::PointsRep::GaussianRational($s) => $body,
            $crate::incidence::PointsRep::ComplexFloat($s) => $body,
        }
    };
}

#[derive(Serialize, Deserialize)]
struct PointsJson {
    field: FieldMode,
    dim: usize,
    points: Vec<Vec<Value>>,
    #[serde(default)]
    tol: f64,
}

impl PointsRep {
    pub fn mode(&self) -> FieldMode {
        match self {
            PointsRep::Rational(_) => FieldMode::Rational,
            PointsRep::GaussianRational(_) => FieldMode::GaussianRational,
            PointsRep::ComplexFloat(_) => FieldMode::ComplexFloat,
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: PointsJson = serde_json::from_value(v.clone())?;
        fn typed<F: JsonEntry>(raw: &PointsJson) -> Result<PointConfig<F>> {
            let points = raw
                .points
                .iter()
                .map(|p| p.iter().map(F::parse_entry).collect::<Result<Vec<F>>>())
                .collect::<Result<Vec<_>>>()?;
            PointConfig::with_tol(raw.dim, points, raw.tol)
        }
        Ok(match raw.field {
            FieldMode::Rational => PointsRep::Rational(typed(&raw)?),
            FieldMode::GaussianRational => PointsRep::GaussianRational(typed(&raw)?),
            FieldMode::ComplexFloat => PointsRep::ComplexFloat(typed(&raw)?),
        })
    }

    pub fn to_json(&self) -> Value {
        fn typed<F: JsonEntry>(s: &PointConfig<F>) -> Value {
            serde_json::to_value(PointsJson {
                field: F::MODE,
                dim: s.dim(),
                points: s.points().iter().map(|p| p.iter().map(JsonEntry::format_entry).collect()).collect(),
                tol: s.tol(),
            })
            .expect("points serialize")
        }
        with_points!(self, s => typed(s))
    }
}

impl From<PointConfig<BigRational>> for PointsRep {
    fn from(s: PointConfig<BigRational>) -> Self {
        PointsRep::Rational(s)
    }
}

impl From<PointConfig<GaussianRational>> for PointsRep {
    fn from(s: PointConfig<GaussianRational>) -> Self {
        PointsRep::GaussianRational(s)
    }
}

impl From<PointConfig<Complex64>> for PointsRep {
    fn from(s: PointConfig<Complex64>) -> Self {
        PointsRep::ComplexFloat(s)
    }
}

/// Histogram of line sizes, for reports.
pub fn line_size_histogram(ls: &LineSet) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for l in &ls.lines {
        *h.entry(l.members.len()).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests;
