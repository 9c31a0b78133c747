//! Condition measures of a column configuration: circuit imbalance κ (from
//! circuits and from determinant ratios), the δ-distance measure, the
//! Δ-modularity and a sampled lower bound on χ̄.
//!
//! κ and δ are returned squared in `F::Real`, so all comparisons in exact
//! fields stay exact.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dist_sq_to_span, norm_sq, Field, Matrix, RealValue};

pub const MAX_ENUM_COLS: usize = 20;
pub const MAX_ENUM_RANK: usize = 8;
pub const DEFAULT_CHIBAR_TRIALS: usize = 1000;

/// Subsets of size `rank + 1` bound the enumeration work. Anything within
/// the budget of the largest admitted square case (n = 20, rank = 8) runs,
/// so rank-2 inputs may have many more columns.
fn guard(n: usize, rank: usize) -> Result<()> {
    let budget = binomial(MAX_ENUM_COLS, MAX_ENUM_RANK + 1);
    let work = binomial(n, (rank + 1).min(n));
    if rank > MAX_ENUM_RANK || (n > MAX_ENUM_COLS && work > budget) {
        return Err(Error::Guard(format!(
            "n = {n}, rank = {rank} (limits rank <= {MAX_ENUM_RANK} and C(n, rank+1) <= {budget} once n > {MAX_ENUM_COLS})"
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// A minimal linear dependence. `coeffs` has length `n`, vanishes off
/// `support` and its first nonzero entry is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<F> {
    pub support: Vec<usize>,
    pub coeffs: Vec<F>,
}

pub fn circuits<F: Field>(a: &Matrix<F>) -> Result<Vec<Circuit<F>>> {
    let n = a.cols();
    let r = a.rank();
    guard(n, r)?;
    let scale = a.max_modulus_sq();
    let subsets: Vec<Vec<usize>> = (1..=(r + 1).min(n))
        .flat_map(|s| (0..n).combinations(s))
        .collect();
    Ok(subsets
        .into_par_iter()
        .filter_map(|subset| {
            let sub = a.select_columns(&subset);
            let mut kernel = sub.kernel_basis().vectors;
            if kernel.len() != 1 {
                return None;
            }
            let x = kernel.pop().expect("one kernel vector");
            if x.iter().any(|v| v.negligible(&scale, a.tol())) {
                return None;
            }
            let mut coeffs = vec![F::zero(); n];
            for (&c, v) in subset.iter().zip(x) {
                coeffs[c] = v;
            }
            Some(Circuit { support: subset, coeffs })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KappaWitness {
    /// `|x_numerator / x_denominator|` attains κ on this circuit.
    Circuit { support: Vec<usize>, numerator: usize, denominator: usize },
    /// `|det(A_{B-i+j}) / det(A_B)|` attains κ.
    BasisSwap { basis: Vec<usize>, leaving: usize, entering: usize },
    /// Only loops are circuits; κ = 1.
    Loop { index: usize },
    /// Full column rank; κ reported as 1.
    NoCircuit,
}

#[derive(Clone, Debug)]
pub struct Kappa<R> {
    pub value_sq: R,
    pub witness: KappaWitness,
}

impl<R: RealValue> Kappa<R> {
    pub fn has_circuit(&self) -> bool {
        self.witness != KappaWitness::NoCircuit
    }

    pub fn value(&self) -> f64 {
        self.value_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    fn unit(witness: KappaWitness) -> Self {
        Self { value_sq: R::one(), witness }
    }
}

/// Keeps the larger value; ties go to the earlier candidate.
fn better<R: RealValue>(a: Option<(usize, R)>, b: Option<(usize, R)>) -> Option<(usize, R)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

pub fn kappa_circuit<F: Field>(a: &Matrix<F>) -> Result<Kappa<F::Real>> {
    let cs = circuits(a)?;
    if cs.is_empty() {
        return Ok(Kappa::unit(KappaWitness::NoCircuit));
    }
    let per_circuit: Vec<(F::Real, usize, usize)> = cs
        .iter()
        .map(|c| {
            let mods: Vec<(usize, F::Real)> =
                c.support.iter().map(|&i| (i, c.coeffs[i].modulus_sq())).collect();
            let (hi, hi_v) = mods
                .iter()
                .fold(None::<&(usize, F::Real)>, |acc, m| match acc {
                    Some(x) if x.1 >= m.1 => Some(x),
                    _ => Some(m),
                })
                .cloned()
                .expect("nonempty support");
            let (lo, lo_v) = mods
                .iter()
                .fold(None::<&(usize, F::Real)>, |acc, m| match acc {
                    Some(x) if x.1 <= m.1 => Some(x),
                    _ => Some(m),
                })
                .cloned()
                .expect("nonempty support");
            (hi_v / lo_v, hi, lo)
        })
        .collect();
    let best = per_circuit
        .iter()
        .enumerate()
        .fold(None, |acc, (k, (v, _, _))| better(acc, Some((k, v.clone()))))
        .expect("nonempty");
    let (value, hi, lo) = per_circuit[best.0].clone();
    Ok(Kappa {
        value_sq: value,
        witness: KappaWitness::Circuit {
            support: cs[best.0].support.clone(),
            numerator: hi,
            denominator: lo,
        },
    })
}

/// Whether the square matrix is numerically nonsingular; for the float field
/// the determinant is compared against the Hadamard bound.
fn nonsingular<F: Field>(m: &Matrix<F>) -> Result<bool> {
    let d = m.det()?;
    if F::EXACT {
        return Ok(!d.is_zero());
    }
    let hadamard = (0..m.cols())
        .map(|j| norm_sq(&m.column(j)))
        .fold(F::Real::one(), |acc, x| acc * x);
    Ok(!d.negligible(&hadamard, m.tol()))
}

/// Tableau `A_B^{-1} A_N` for a basis `B` of a full-row-rank matrix, or
/// `None` if `A_B` is singular. Entry `(i, j)` equals
/// `det(A_{B-i+j}) / det(A_B)` by Cramer's rule.
fn tableau<F: Field>(red: &Matrix<F>, basis: &[usize], rest: &[usize]) -> Option<Matrix<F>> {
    let r = basis.len();
    let order: Vec<usize> = basis.iter().chain(rest).copied().collect();
    let rr = red.select_columns(&order).rref();
    if rr.pivot_cols != (0..r).collect::<Vec<_>>() {
        return None;
    }
    let cols: Vec<usize> = (r..order.len()).collect();
    Some(rr.echelon.select_columns(&cols))
}

pub fn kappa_detratio<F: Field>(a: &Matrix<F>) -> Result<Kappa<F::Real>> {
    let n = a.cols();
    let red = a.full_row_rank_form();
    let r = red.rows();
    guard(n, r)?;
    if r == n {
        return Ok(Kappa::unit(KappaWitness::NoCircuit));
    }
    let bases: Vec<Vec<usize>> = (0..n).combinations(r).collect();
    let found = bases
        .par_iter()
        .enumerate()
        .filter_map(|(k, basis)| {
            if !F::EXACT && !nonsingular(&red.select_columns(basis)).ok()? {
                return None;
            }
            let rest: Vec<usize> = (0..n).filter(|c| !basis.contains(c)).collect();
            let t = tableau(&red, basis, &rest)?;
            let mut best: Option<((usize, usize), F::Real)> = None;
            for (jj, _) in rest.iter().enumerate() {
                for ii in 0..r {
                    let v = t.get(ii, jj).modulus_sq();
                    if best.as_ref().is_none_or(|b| v > b.1) {
                        best = Some(((ii, jj), v));
                    }
                }
            }
            let ((ii, jj), v) = best?;
            Some((k, v, basis[ii], rest[jj]))
        })
        .reduce_with(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let loop_witness = || {
        (0..n)
            .find(|&j| a.is_zero_column(j))
            .map(|index| KappaWitness::Loop { index })
            .unwrap_or(KappaWitness::NoCircuit)
    };
    Ok(match found {
        Some((k, v, i, j)) if v >= F::Real::one() => Kappa {
            value_sq: v,
            witness: KappaWitness::BasisSwap { basis: bases[k].clone(), leaving: i, entering: j },
        },
        _ => Kappa::unit(loop_witness()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMethod {
    Circuit,
    Detratio,
    Both,
}

/// κ by the requested method. `Both` computes the two definitions and fails
/// with [`Error::Inconsistent`] if they disagree. The float field only
/// supports determinant ratios; `Both` there falls back to them.
pub fn kappa<F: Field>(a: &Matrix<F>, method: KappaMethod) -> Result<Kappa<F::Real>> {
    match method {
        KappaMethod::Circuit if !F::EXACT => Err(Error::Precondition(
            "the circuit form of kappa is only computed in exact fields".into(),
        )),
        KappaMethod::Circuit => kappa_circuit(a),
        KappaMethod::Detratio => kappa_detratio(a),
        KappaMethod::Both if !F::EXACT => kappa_detratio(a),
        KappaMethod::Both => {
            let c = kappa_circuit(a)?;
            let d = kappa_detratio(a)?;
            if c.value_sq != d.value_sq {
                return Err(Error::Inconsistent(format!(
                    "circuit kappa^2 = {} but determinant-ratio kappa^2 = {}",
                    c.value_sq, d.value_sq
                )));
            }
            Ok(c)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Delta<R> {
    pub delta_sq: R,
    pub basis: Vec<usize>,
    pub index: usize,
}

pub fn delta_measure<F: Field>(a: &Matrix<F>) -> Result<Delta<F::Real>> {
    let (d, n) = (a.rows(), a.cols());
    guard(n, d)?;
    let rank = a.rank();
    if rank != d {
        return Err(Error::Precondition(format!("rank {rank} differs from row count {d}")));
    }
    let cols = a.columns();
    let bases: Vec<Vec<usize>> = (0..n).combinations(d).collect();
    let found = bases
        .par_iter()
        .enumerate()
        .map(|(k, basis)| -> Result<Option<(usize, usize, F::Real)>> {
            let sub = a.select_columns(basis);
            if sub.rank() < d || (!F::EXACT && !nonsingular(&sub)?) {
                return Ok(None);
            }
            let mut best: Option<(usize, F::Real)> = None;
            for &i in basis {
                let others: Vec<Vec<F>> =
                    basis.iter().filter(|&&c| c != i).map(|&c| cols[c].clone()).collect();
                let v = dist_sq_to_span(&cols[i], &others, a.tol())? / norm_sq(&cols[i]);
                if best.as_ref().is_none_or(|b| v < b.1) {
                    best = Some((i, v));
                }
            }
            Ok(best.map(|(i, v)| (k, i, v)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (k, i, v) = found
        .into_iter()
        .flatten()
        .fold(None::<(usize, usize, F::Real)>, |acc, cur| match acc {
            Some(a) if a.2 <= cur.2 => Some(a),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::Inconsistent("full-rank matrix without a basis".into()))?;
    Ok(Delta { delta_sq: v, basis: bases[k].clone(), index: i })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaModularity {
    pub value: BigInt,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Largest absolute `r x r` minor of an integer matrix of rank `r`.
pub fn delta_modularity<F: Field>(a: &Matrix<F>) -> Result<DeltaModularity> {
    a.integer_entries()?;
    let r = a.rank();
    guard(a.cols(), r)?;
    if a.rows() > MAX_ENUM_COLS {
        return Err(Error::Guard(format!("{} rows (limit {MAX_ENUM_COLS})", a.rows())));
    }
    let mut best = DeltaModularity { value: BigInt::zero(), rows: vec![], cols: vec![] };
    for sd in a.all_subdets(r)? {
        let v = sd
            .value
            .as_integer()
            .ok_or_else(|| Error::Inconsistent("non-integer minor of an integer matrix".into()))?
            .abs();
        if v > best.value || best.rows.len() != r {
            best = DeltaModularity { value: v, rows: sd.rows, cols: sd.cols };
        }
    }
    Ok(best)
}

/// Lower bound on χ̄: the largest operator norm of `A*(ADA*)^{-1}AD` over
/// `trials` diagonals with log-uniform entries in `[1e-6, 1e6]`.
pub fn chibar_sample<F: Field>(a: &Matrix<F>, trials: usize, seed: u64) -> Result<f64> {
    let (d, n) = (a.rows(), a.cols());
    if a.rank() != d {
        return Err(Error::Precondition(format!("rank differs from row count {d}")));
    }
    // With M = D^{1/2} A*, the matrix D^{1/2} A*(ADA*)^{-1} A D^{1/2} is the
    // orthogonal projector Q Q* onto range(M); the target operator is
    // D^{-1/2} Q Q* D^{1/2}. This avoids inverting the badly scaled ADA*.
    let adj = DMatrix::from_fn(n, d, |i, j| a.get(j, i).to_complex().conj());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (1e-6f64.ln(), 1e6f64.ln());
    let mut best: Option<f64> = None;
    for _ in 0..trials {
        let root: Vec<f64> = (0..n).map(|_| (rng.gen_range(lo..hi) / 2.0).exp()).collect();
        let mut m = adj.clone();
        for (i, &s) in root.iter().enumerate() {
            m.row_mut(i).scale_mut(s);
        }
        let qr = m.qr();
        let r = qr.r();
        let r_max = r.diagonal().iter().map(|x| x.norm()).fold(0.0, f64::max);
        if r.diagonal().iter().any(|x| x.norm() <= 1e-13 * r_max) {
            continue;
        }
        let q = qr.q();
        let mut p = &q * q.adjoint();
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] *= Complex64::from(root[j] / root[i]);
            }
        }
        let norm = p.singular_values().max();
        if norm.is_finite() {
            best = Some(best.map_or(norm, |b: f64| b.max(norm)));
        }
    }
    best.ok_or_else(|| Error::Precondition("every sampled A D A* was singular".into()))
}

/// A matrix whose kernel is the projection of `ker A` onto the coordinates
/// `coords` (in that order).
pub fn project_kernel<F: Field>(a: &Matrix<F>, coords: &[usize]) -> Result<Matrix<F>> {
    let n = a.cols();
    if let Some(&bad) = coords.iter().find(|&&c| c >= n) {
        return Err(Error::UnknownElement(bad));
    }
    if coords.iter().duplicates().next().is_some() {
        return Err(Error::Dimension("repeated coordinate".into()));
    }
    let m = coords.len();
    let tol = a.tol();
    let rebuild = |mat: Matrix<F>| if F::EXACT { mat } else { mat.with_tol(tol).expect("positive tol") };
    if m == 0 {
        return Ok(rebuild(Matrix::zeros(0, 0)));
    }
    let projected: Vec<Vec<F>> = a
        .kernel_basis()
        .vectors
        .iter()
        .map(|v| coords.iter().map(|&c| v[c].clone()).collect())
        .collect();
    if projected.is_empty() {
        return Ok(rebuild(Matrix::identity(m)));
    }
    let spanning = rebuild(Matrix::from_rows(projected)?);
    let annihilator = spanning.kernel_basis().vectors;
    if annihilator.is_empty() {
        return Ok(rebuild(Matrix::zeros(1, m)));
    }
    Ok(rebuild(Matrix::from_rows(annihilator)?))
}

/// Rational lower bound for π used by the `4πκ >= l` style checks.
pub fn pi_lower<R: RealValue>() -> R {
    R::from_f64_lossy(3.141592653)
}

/// Serializable summary of whichever measures were computed.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ConditionReport {
    pub field: Option<crate::numerics::FieldMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_sq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_witness: Option<KappaWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub no_circuit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_methods_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_sq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_float: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_witness: Option<DeltaWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_mod: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_mod_witness: Option<DeltaWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chibar_sample: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chibar_trials: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaWitness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<usize>>,
    pub cols: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

impl ConditionReport {
    pub fn new<F: Field>() -> Self {
        Self { field: Some(F::MODE), ..Self::default() }
    }

    pub fn with_kappa<R: RealValue>(mut self, k: &Kappa<R>) -> Self {
        self.kappa = Some(k.value());
        self.kappa_sq = Some(k.value_sq.to_string());
        self.kappa_witness = Some(k.witness.clone());
        self.no_circuit = Some(!k.has_circuit());
        self
    }

    pub fn with_delta<R: RealValue>(mut self, d: &Delta<R>) -> Self {
        self.delta_float = Some(d.delta_sq.to_f64().unwrap_or(f64::NAN).sqrt());
        self.delta_sq = Some(d.delta_sq.to_string());
        self.delta_witness = Some(DeltaWitness { rows: None, cols: d.basis.clone(), index: Some(d.index) });
        self
    }

    pub fn with_delta_mod(mut self, d: &DeltaModularity) -> Self {
        self.delta_mod = Some(d.value.to_string());
        self.delta_mod_witness =
            Some(DeltaWitness { rows: Some(d.rows.clone()), cols: d.cols.clone(), index: None });
        self
    }

    pub fn with_chibar(mut self, value: f64, trials: usize) -> Self {
        self.chibar_sample = Some(value);
        self.chibar_trials = Some(trials);
        self
    }
}

#[cfg(test)]
mod tests;
