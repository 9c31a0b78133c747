//! Graver bases of small integer matrices, the `κ ≤ g∞` comparison, the
//! collinear-block bound, and the separable reduction with brute-force
//! proximity experiments.

mod ip;

pub use ip::{
    g_map, proximity_experiment, separable_reduce, solve_ip_bruteforce, solve_lp_exact, GMapCase,
    IpInstance, LpSolution, ProximityReport, SeparableReduction, MAX_IP_BOX, MAX_IP_VARS,
};

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::condition::{kappa, KappaMethod};
use crate::error::{Error, Result};
use crate::numerics::{int, Matrix, Rational};

pub const MAX_GRAVER_ROWS: usize = 3;
pub const MAX_GRAVER_COLS: usize = 6;
pub const MAX_GRAVER_ENTRY: i64 = 50;
/// Completion gives up once the working set grows past this many vectors.
pub const GRAVER_CUTOFF: usize = 20_000;

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraverBasis {
    /// Sorted lexicographically; closed under negation.
    pub elements: Vec<Vec<i64>>,
    pub g_inf: i64,
}

impl GraverBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `u ⊑ v`: same orthant and `|u_i| ≤ |v_i|` everywhere.
pub fn conformal_le(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(&a, &b)| a == 0 || (a.signum() == b.signum() && a.abs() <= b.abs()))
}

pub fn sign_compatible(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(&a, &b)| a * b >= 0)
}

pub fn apply(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn inf_norm(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

fn shape(a: &[Vec<i64>]) -> Result<(usize, usize)> {
    let d = a.len();
    let n = a.first().map_or(0, Vec::len);
    if d == 0 || n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("integer matrix must be non-empty and rectangular".into()));
    }
    Ok((d, n))
}

pub fn check_graver_guard(a: &[Vec<i64>]) -> Result<()> {
    let (d, n) = shape(a)?;
    let big = a.iter().flatten().map(|x| x.abs()).max().unwrap_or(0);
    if d > MAX_GRAVER_ROWS || n > MAX_GRAVER_COLS || big > MAX_GRAVER_ENTRY {
        return Err(Error::Guard(format!(
            "graver needs d <= {MAX_GRAVER_ROWS}, n <= {MAX_GRAVER_COLS}, |a_ij| <= {MAX_GRAVER_ENTRY}; \
             got {d}x{n} with max entry {big}"
        )));
    }
    Ok(())
}

pub fn to_rational(a: &[Vec<i64>]) -> Result<Matrix<Rational>> {
    Matrix::from_rows(a.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
}

pub fn from_rational(m: &Matrix<Rational>) -> Result<IntMatrix> {
    m.integer_entries()?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, x)| x.to_i64().ok_or(Error::NonInteger(i, j)))
                .collect()
        })
        .collect()
}

/// Basis of the integer lattice `{x ∈ Z^n : Ax = 0}`, from unimodular
/// column operations that bring `A` to echelon form.
pub fn lattice_kernel_basis(a: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let (d, n) = shape(a)?;
    let overflow = || Error::Guard("integer overflow in lattice kernel computation".into());
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();

    // col_p -= q * col_j on both m and u.
    let axpy = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, p: usize, j: usize, q: i128| -> Result<()> {
        for row in m.iter_mut().chain(u.iter_mut()) {
            row[p] = row[j].checked_mul(q).and_then(|t| row[p].checked_sub(t)).ok_or_else(overflow)?;
        }
        Ok(())
    };
    let swap = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, p: usize, j: usize| {
        for row in m.iter_mut().chain(u.iter_mut()) {
            row.swap(p, j);
        }
    };

    let mut p = 0;
    for i in 0..d {
        if p == n {
            break;
        }
        for j in p + 1..n {
            while m[i][j] != 0 {
                let q = m[i][p] / m[i][j];
                axpy(&mut m, &mut u, p, j, q)?;
                swap(&mut m, &mut u, p, j);
            }
        }
        if m[i][p] != 0 {
            p += 1;
        }
    }
    (p..n)
        .map(|k| (0..n).map(|i| i64::try_from(u[i][k]).map_err(|_| overflow())).collect())
        .collect()
}

fn normal_form(mut s: Vec<i64>, g: &[Vec<i64>]) -> Vec<i64> {
    'outer: loop {
        if s.iter().all(|&x| x == 0) {
            return s;
        }
        for h in g {
            if conformal_le(h, &s) {
                for (x, y) in s.iter_mut().zip(h) {
                    *x -= y;
                }
                continue 'outer;
            }
        }
        return s;
    }
}

/// Keeps the `⊑`-minimal vectors, sorted and deduplicated.
pub fn minimal_elements(vs: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vs
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .filter(|v| !vs.iter().any(|w| w != *v && w.iter().any(|&x| x != 0) && conformal_le(w, v)))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Graver basis by completion: start from a lattice basis and its
/// negatives, add the normal form of every non-sign-compatible pair sum,
/// and stop once every pair reduces to zero.
pub fn graver_basis(a: &[Vec<i64>]) -> Result<GraverBasis> {
    check_graver_guard(a)?;
    let gens = lattice_kernel_basis(a)?;
    if gens.is_empty() {
        return Ok(GraverBasis { elements: vec![], g_inf: 0 });
    }

    let mut g: Vec<Vec<i64>> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: BinaryHeap<Reverse<(i64, usize, usize)>> = BinaryHeap::new();
    let one_norm = |v: &[i64]| v.iter().map(|x| x.abs()).sum::<i64>();

    let push = |v: Vec<i64>,
                g: &mut Vec<Vec<i64>>,
                seen: &mut HashSet<Vec<i64>>,
                queue: &mut BinaryHeap<Reverse<(i64, usize, usize)>>| {
        if !seen.insert(v.clone()) {
            return;
        }
        let k = g.len();
        for (i, h) in g.iter().enumerate() {
            if !sign_compatible(h, &v) {
                let s: Vec<i64> = h.iter().zip(&v).map(|(x, y)| x + y).collect();
                queue.push(Reverse((one_norm(&s), i, k)));
            }
        }
        g.push(v);
    };

    for v in gens {
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        push(v, &mut g, &mut seen, &mut queue);
        push(neg, &mut g, &mut seen, &mut queue);
    }

    while let Some(Reverse((_, i, j))) = queue.pop() {
        let s: Vec<i64> = g[i].iter().zip(&g[j]).map(|(x, y)| x + y).collect();
        let r = normal_form(s, &g);
        if r.iter().all(|&x| x == 0) {
            continue;
        }
        let neg: Vec<i64> = r.iter().map(|x| -x).collect();
        push(r, &mut g, &mut seen, &mut queue);
        push(neg, &mut g, &mut seen, &mut queue);
        if g.len() > GRAVER_CUTOFF {
            return Err(Error::GraverCutoff(g.len()));
        }
    }

    let elements = minimal_elements(&g);
    let g_inf = elements.iter().map(|v| inf_norm(v)).max().unwrap_or(0);
    Ok(GraverBasis { elements, g_inf })
}

pub fn g_inf(a: &[Vec<i64>]) -> Result<i64> {
    Ok(graver_basis(a)?.g_inf)
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaGraverReport {
    pub kappa: f64,
    #[serde(serialize_with = "ser_rational")]
    pub kappa_sq: Rational,
    pub g_inf: i64,
    pub graver_size: usize,
    /// False when the kernel is trivial and the comparison is vacuous.
    pub has_circuit: bool,
    pub holds: bool,
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Exact comparison `κ_A² ≤ g∞(A)²`.
pub fn kappa_vs_graver_check(a: &[Vec<i64>]) -> Result<KappaGraverReport> {
    let gb = graver_basis(a)?;
    let k = kappa(&to_rational(a)?, KappaMethod::Detratio)?;
    let has_circuit = k.has_circuit();
    let holds = !has_circuit || k.value_sq <= int(gb.g_inf * gb.g_inf);
    Ok(KappaGraverReport {
        kappa: k.value(),
        kappa_sq: k.value_sq,
        g_inf: gb.g_inf,
        graver_size: gb.len(),
        has_circuit,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CollinearBlockReport {
    pub z: Vec<i64>,
    pub k: usize,
    /// Entries left after dropping `-z_j` whenever `z_i = -z_j`.
    pub distinct_abs: Vec<i64>,
    pub g_inf: i64,
    /// Largest `‖v^(i)‖∞` over the two-element kernel vectors built from
    /// the first entry and each later one.
    pub pair_max: i64,
    /// `pair_max² ≥ |distinct_abs| - 1`.
    pub pair_bound_holds: bool,
    /// `k ≤ 2 g∞² + 2`.
    pub holds: bool,
}

/// Graver bound for a collinear block `z_1 â, ..., z_k â`, represented by
/// the single row `z`.
pub fn collinear_block_check(z: &[i64]) -> Result<CollinearBlockReport> {
    let k = z.len();
    if k < 2 {
        return Err(Error::Precondition("collinear block needs at least two entries".into()));
    }
    if z.contains(&0) || z.iter().collect::<HashSet<_>>().len() != k {
        return Err(Error::Precondition("block entries must be nonzero and distinct".into()));
    }
    let mut sorted = z.to_vec();
    sorted.sort();
    let mut distinct_abs: Vec<i64> = Vec::new();
    for &x in &sorted {
        if !distinct_abs.iter().any(|y| y.abs() == x.abs()) {
            distinct_abs.push(x);
        }
    }
    let z1 = distinct_abs[0];
    let pair_max = distinct_abs[1..]
        .iter()
        .map(|&zi| {
            let g = z1.gcd(&zi);
            (z1 / g).abs().max((zi / g).abs())
        })
        .max()
        .unwrap_or(0);
    let gb = graver_basis(&[z.to_vec()])?;
    let kk = distinct_abs.len() as i64;
    Ok(CollinearBlockReport {
        z: z.to_vec(),
        k,
        pair_bound_holds: pair_max * pair_max >= kk - 1,
        holds: (k as i64) <= 2 * gb.g_inf * gb.g_inf + 2,
        distinct_abs,
        g_inf: gb.g_inf,
        pair_max,
    })
}

/// `d⁴ g∞⁴` as an exact integer.
pub fn proximity_envelope(d: usize, g_inf: i64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(d).pow(4) * num_bigint::BigInt::from(g_inf).pow(4)
}

#[cfg(test)]
mod tests;
