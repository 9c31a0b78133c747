//! `(q,k,t)`-design matrices: certificates, the special-line construction,
//! asymptotic row/column scaling, transportation feasibility and the rank
//! lower bound.

mod scaling;
mod transport;

pub use scaling::{scaling_violation, sinkhorn_scale, ScalingResult};
pub use transport::{transportation_feasible, RowSums, TransportationSolution};

use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::incidence::{classify, lines, PointConfig};
use crate::numerics::{ceil_rational, int, Field, Matrix, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignCertificate {
    pub m: usize,
    pub n: usize,
    /// Largest row support.
    pub q: usize,
    /// Smallest column support.
    pub k: usize,
    /// Largest support intersection of two distinct columns.
    pub t: usize,
    pub zero_columns: Vec<usize>,
    /// `n / (1 + t(q-1)/k)`; absent when `k = 0`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub bound: Option<BigRational>,
    /// `n - n t (q-1) / k`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub linear_bound: Option<BigRational>,
    /// `n - n t q (q-1) / k`, the earlier bound.
    #[serde(serialize_with = "ser_opt_rational")]
    pub old_bound: Option<BigRational>,
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl DesignCertificate {
    pub fn is_valid(&self) -> bool {
        self.zero_columns.is_empty() && self.n > 0
    }

    /// `ceil(bound)`.
    pub fn required_rank(&self) -> Option<BigInt> {
        self.bound.as_ref().map(ceil_rational)
    }

    /// `t(q-1)/k`.
    pub fn loss(&self) -> Option<BigRational> {
        (self.k > 0).then(|| BigRational::new(BigInt::from(self.t * self.q.saturating_sub(1)), BigInt::from(self.k)))
    }
}

fn supports<F: Field>(a: &Matrix<F>) -> Vec<Vec<usize>> {
    let scale = a.max_modulus_sq();
    (0..a.cols())
        .map(|j| (0..a.rows()).filter(|&i| !a.get(i, j).negligible(&scale, a.tol())).collect())
        .collect()
}

pub fn check_design<F: Field>(a: &Matrix<F>) -> DesignCertificate {
    let (m, n) = (a.rows(), a.cols());
    let cols = supports(a);
    let mut row_support = vec![0usize; m];
    for c in &cols {
        for &i in c {
            row_support[i] += 1;
        }
    }
    let q = row_support.iter().copied().max().unwrap_or(0);
    let k = cols.iter().map(Vec::len).min().unwrap_or(0);
    let t = cols
        .iter()
        .tuple_combinations()
        .map(|(x, y)| x.iter().filter(|i| y.binary_search(i).is_ok()).count())
        .max()
        .unwrap_or(0);
    let zero_columns: Vec<usize> = (0..n).filter(|&j| cols[j].is_empty()).collect();
    let mut cert = DesignCertificate {
        m,
        n,
        q,
        k,
        t,
        zero_columns,
        bound: None,
        linear_bound: None,
        old_bound: None,
    };
    if let Some(loss) = cert.loss() {
        let nq = int(n as i64);
        cert.bound = Some(nq.clone() / (BigRational::one() + loss.clone()));
        cert.linear_bound = Some(nq.clone() - nq.clone() * loss.clone());
        cert.old_bound = Some(nq.clone() - nq * loss * int(q as i64));
    }
    cert
}

/// Rows `1, 1, -2` placed on every 3-subset of `[v]`, once for each choice
/// of the `-2` slot.
pub fn all_triples_matrix(v: usize) -> Matrix<Rational> {
    let mut rows = Vec::new();
    for triple in (0..v).combinations(3) {
        for &slot in &triple {
            let mut r = vec![BigRational::zero(); v];
            for &c in &triple {
                r[c] = if c == slot { int(-2) } else { int(1) };
            }
            rows.push(r);
        }
    }
    Matrix::from_rows(rows).expect("uniform row length")
}

#[derive(Clone, Debug)]
pub struct SpecialLineDesign<F> {
    pub matrix: Matrix<F>,
    /// Global point ids of each row's triple, ascending.
    pub triples: Vec<[usize; 3]>,
    /// Points on special lines through each point, `k_i`.
    pub k_per_point: Vec<usize>,
}

impl<F: Field> SpecialLineDesign<F> {
    /// Whether the measured column support reaches `3 min_i k_i`.
    pub fn meets_three_k(&self) -> bool {
        let cert = check_design(&self.matrix);
        self.k_per_point.iter().min().is_some_and(|&kmin| cert.k >= 3 * kmin)
    }
}

/// Affine dependencies of collinear triples along every special line. On a
/// line with points `0..s` (ascending id) each ordered pair `(i, j)` with
/// `c = (i + j) mod s` distinct from both contributes the triple `{i, j, c}`.
pub fn build_special_line_design<F: Field>(s: &PointConfig<F>) -> Result<SpecialLineDesign<F>> {
    let ls = lines(s)?;
    let counts = classify(&ls)?;
    if let Some(i) = counts.iter().position(|c| c.k == 0) {
        return Err(Error::NoSpecialStructure(i));
    }
    let n = s.len();
    let mut rows = Vec::new();
    let mut triples = Vec::new();
    for line in ls.lines.iter().filter(|l| !l.is_ordinary()) {
        let pts = &line.members;
        let len = pts.len();
        for (i, j) in (0..len).cartesian_product(0..len) {
            let c = (i + j) % len;
            if i == j || c == i || c == j {
                continue;
            }
            let mut tri = [pts[i], pts[j], pts[c]];
            tri.sort_unstable();
            let coeffs = affine_dependency(s, &tri)?;
            let mut row = vec![F::zero(); n];
            for (&g, v) in tri.iter().zip(coeffs) {
                row[g] = v;
            }
            rows.push(row);
            triples.push(tri);
        }
    }
    let matrix = Matrix::from_rows(rows)?;
    let matrix = if F::EXACT { matrix } else { matrix.with_tol(s.tol().max(crate::numerics::DEFAULT_FLOAT_TOL))? };
    Ok(SpecialLineDesign { matrix, triples, k_per_point: counts.iter().map(|c| c.k).collect() })
}

/// Coefficients `a` with `sum a = 0` and `sum a p = 0` over three collinear
/// points, scaled so the first is 1.
fn affine_dependency<F: Field>(s: &PointConfig<F>, tri: &[usize; 3]) -> Result<Vec<F>> {
    let cols: Vec<Vec<F>> = tri
        .iter()
        .map(|&g| std::iter::once(F::one()).chain(s.points()[g].iter().cloned()).collect())
        .collect();
    let m = Matrix::from_columns(s.dim() + 1, &cols)?;
    let m = if F::EXACT { m } else { m.with_tol(s.tol().max(crate::numerics::DEFAULT_FLOAT_TOL))? };
    let mut k = m.kernel_basis().vectors;
    let scale = m.max_modulus_sq();
    match (k.len(), k.pop()) {
        (1, Some(v)) if v.iter().all(|x| !x.negligible(&scale, m.tol())) => Ok(v),
        _ => Err(Error::Inconsistent(format!("points {tri:?} have no full-support affine dependency"))),
    }
}

/// Largest `|(A [1 V])_{ij}|^2`; zero exactly in the exact fields for a
/// built design.
pub fn affine_residual_sq<F: Field>(a: &Matrix<F>, s: &PointConfig<F>) -> Result<F::Real> {
    let cols: Vec<Vec<F>> = s
        .points()
        .iter()
        .map(|p| std::iter::once(F::one()).chain(p.iter().cloned()).collect())
        .collect();
    let one_v = Matrix::from_columns(s.dim() + 1, &cols)?.transpose();
    Ok(a.mul(&one_v)?.max_modulus_sq())
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignRankReport {
    pub certificate: DesignCertificate,
    pub rank: usize,
    pub required_rank: String,
    pub pass: bool,
    pub new_at_least_old: bool,
    pub scaling_converged: bool,
    pub scaling_eps: f64,
    pub scaling_iterations: usize,
    /// `ceil(Tr[M]^2 / |M|_F^2)` for `M = B* B`.
    pub trace_bound: Option<usize>,
    pub trace_bound_holds: Option<bool>,
    /// `sum_{j1 != j2} |M_{j1 j2}|^2`.
    pub offdiag_lhs: Option<f64>,
    /// `t (1 - 1/q) alpha |B|_F^2`, `alpha` the largest squared row norm of `B`.
    pub offdiag_rhs: Option<f64>,
    pub offdiag_holds: Option<bool>,
}

pub const RANK_CHECK_EPS: f64 = 1e-9;
pub const RANK_CHECK_MAX_ITER: usize = 100_000;

/// Asserts `rank(A) >= ceil(n / (1 + t(q-1)/k))` and reports the trace and
/// off-diagonal quantities of the scaled matrix.
pub fn design_rank_check<F: Field>(a: &Matrix<F>) -> Result<DesignRankReport> {
    let cert = check_design(a);
    if !cert.is_valid() {
        return Err(Error::Precondition(format!("zero columns {:?}", cert.zero_columns)));
    }
    let rank = a.rank();
    let required = cert.required_rank().expect("valid certificate");
    let new_at_least_old = match (&cert.bound, &cert.old_bound) {
        (Some(b), Some(o)) => b >= o,
        _ => false,
    };
    let cap = BigRational::new(BigInt::from(cert.q), BigInt::from(cert.k));
    let sc = sinkhorn_scale(a, &cap, RANK_CHECK_EPS, RANK_CHECK_MAX_ITER)?;
    let b = &sc.b;
    let (m, n) = (b.rows(), b.cols());
    let mut gram = vec![Complex64::zero(); n * n];
    for j1 in 0..n {
        for j2 in 0..n {
            gram[j1 * n + j2] = (0..m).map(|i| b.get(i, j1).conj() * b.get(i, j2)).sum();
        }
    }
    let trace: f64 = (0..n).map(|j| gram[j * n + j].re).sum();
    let frob_sq: f64 = gram.iter().map(|z| z.norm_sqr()).sum();
    let offdiag: f64 = (0..n)
        .flat_map(|j1| (0..n).filter(move |&j2| j2 != j1).map(move |j2| (j1, j2)))
        .map(|(j1, j2)| gram[j1 * n + j2].norm_sqr())
        .sum();
    let alpha = (0..m)
        .map(|i| (0..n).map(|j| b.get(i, j).norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    let rhs = cert.t as f64 * (1.0 - 1.0 / cert.q as f64) * alpha * trace;
    let trace_bound = (frob_sq > 0.0).then(|| (trace * trace / frob_sq - 1e-9).ceil().max(0.0) as usize);
    Ok(DesignRankReport {
        rank,
        required_rank: required.to_string(),
        pass: BigInt::from(rank) >= required,
        new_at_least_old,
        scaling_converged: sc.converged,
        scaling_eps: sc.eps_achieved,
        scaling_iterations: sc.iterations,
        trace_bound,
        trace_bound_holds: trace_bound.map(|tb| tb <= rank),
        offdiag_lhs: Some(offdiag),
        offdiag_rhs: Some(rhs),
        offdiag_holds: Some(offdiag <= rhs * (1.0 + 1e-9) + 1e-12),
        certificate: cert,
    })
}

/// `ceil(x - 1e-9)` of `Tr[M]^2 / |M|_F^2` for a Gram matrix given by its
/// factor `B` (`M = B* B`).
pub fn trace_frobenius_bound(b: &Matrix<Complex64>) -> usize {
    let (m, n) = (b.rows(), b.cols());
    let mut trace = 0.0;
    let mut frob = 0.0;
    for j1 in 0..n {
        for j2 in 0..n {
            let z: Complex64 = (0..m).map(|i| b.get(i, j1).conj() * b.get(i, j2)).sum();
            frob += z.norm_sqr();
            if j1 == j2 {
                trace += z.re;
            }
        }
    }
    if frob == 0.0 {
        return 0;
    }
    (trace * trace / frob - 1e-9).ceil().max(0.0).to_usize().unwrap_or(0)
}
