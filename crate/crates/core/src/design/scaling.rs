//! Asymptotic `(<= cap, 1)` scaling of squared moduli.
//!
//! A few capped alternating sweeps give a warm start; then damped Newton
//! steps minimize the convex potential
//! `sum_ij w_ij e^{u_i + v_j} - sum_i r_i u_i - sum_j c_j v_j`
//! whose stationary points are exact scalings. Rows below the cap are
//! handled by a slack column of ones carrying the surplus `m cap - n`.
//! Plain alternating normalization converges only like `O(1/iterations)` on
//! matrices that are not exactly scalable, such as `[[1,1],[0,1]]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Field, Matrix};

const WARM_SWEEPS: usize = 20;
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct ScalingResult {
    #[serde(skip)]
    pub b: Matrix<Complex64>,
    pub rho: Vec<f64>,
    pub gamma: Vec<f64>,
    pub eps_achieved: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `max(|colsum_j - 1|, max(0, rowsum_i - cap))` over squared moduli.
pub fn scaling_violation(w: &[Vec<f64>], u: &[f64], v: &[f64], cap: f64) -> f64 {
    let (m, n) = (u.len(), v.len());
    let mut col = vec![0.0; n];
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..n {
            let x = w[i][j] * (u[i] + v[j]).exp();
            row += x;
            col[j] += x;
        }
        worst = worst.max(row - cap);
    }
    col.iter().fold(worst, |acc, c| acc.max((c - 1.0).abs()))
}

struct Problem {
    /// Weights including the slack column, if any.
    w: Vec<Vec<f64>>,
    r: Vec<f64>,
    c: Vec<f64>,
}

impl Problem {
    fn potential(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut phi = 0.0;
        for (i, row) in self.w.iter().enumerate() {
            for (j, &wij) in row.iter().enumerate() {
                if wij > 0.0 {
                    phi += wij * (u[i] + v[j]).exp();
                }
            }
        }
        phi - self.r.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
            - self.c.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// One damped Newton step; returns false if no descent was possible.
    fn newton_step(&self, u: &mut [f64], v: &mut [f64]) -> bool {
        let (m, n) = (u.len(), v.len());
        let mut p = DMatrix::<f64>::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                if self.w[i][j] > 0.0 {
                    p[(i, j)] = self.w[i][j] * (u[i] + v[j]).exp();
                }
            }
        }
        let rs: DVector<f64> = DVector::from_iterator(m, (0..m).map(|i| p.row(i).sum()));
        let cs: DVector<f64> = DVector::from_iterator(n, (0..n).map(|j| p.column(j).sum()));
        let gu = &rs - DVector::from_column_slice(&self.r);
        let gv = &cs - DVector::from_column_slice(&self.c);
        let scale = rs.max().max(cs.max()).max(1.0);
        let mu = 1e-12 * scale;
        let rinv = rs.map(|x| 1.0 / (x + mu));
        // Schur complement on v: (C + mu - P^T R^{-1} P) dv = -gv + P^T R^{-1} gu.
        let pr = DMatrix::from_fn(m, n, |i, j| p[(i, j)] * rinv[i]);
        let mut s = -(p.transpose() * &pr);
        for j in 0..n {
            s[(j, j)] += cs[j] + mu;
        }
        let rhs = -&gv + pr.transpose() * &gu;
        let dv = match s.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => match s.lu().solve(&rhs) {
                Some(x) => x,
                None => return false,
            },
        };
        let du = DVector::from_fn(m, |i, _| -rinv[i] * (gu[i] + (p.row(i) * &dv)[0]));
        let slope = gu.dot(&du) + gv.dot(&dv);
        if !(slope < 0.0) {
            return false;
        }
        let phi0 = self.potential(u, v);
        let mut t = 1.0;
        while t > 1e-14 {
            let nu: Vec<f64> = (0..m).map(|i| u[i] + t * du[i]).collect();
            let nv: Vec<f64> = (0..n).map(|j| v[j] + t * dv[j]).collect();
            let phi = self.potential(&nu, &nv);
            if phi.is_finite() && phi <= phi0 + ARMIJO * t * slope {
                u.copy_from_slice(&nu);
                v.copy_from_slice(&nv);
                return true;
            }
            t *= 0.5;
        }
        false
    }
}

/// Finds `rho, gamma > 0` with `B = diag(rho) A diag(gamma)` having squared
/// column norms within `eps` of 1 and squared row norms at most
/// `row_cap + eps`.
pub fn sinkhorn_scale<F: Field>(
    a: &Matrix<F>,
    row_cap: &BigRational,
    eps: f64,
    max_iter: usize,
) -> Result<ScalingResult> {
    let (m, n) = (a.rows(), a.cols());
    if let Some(j) = (0..n).find(|&j| a.is_zero_column(j)) {
        return Err(Error::Precondition(format!("column {j} is zero")));
    }
    let cap = row_cap.to_f64().unwrap_or(f64::NAN);
    if !(cap > 0.0) {
        return Err(Error::Precondition(format!("row cap {row_cap} must be positive")));
    }
    let surplus = row_cap * BigRational::from_integer(m.into()) - BigRational::from_integer(n.into());
    if surplus < BigRational::from_integer(0.into()) {
        return Err(Error::Infeasible(format!("total row capacity {} below column mass {n}", m as f64 * cap)));
    }
    let scale = a.max_modulus_sq().to_f64().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let w: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = a.get(i, j);
                    if x.negligible(&a.max_modulus_sq(), a.tol()) { 0.0 } else { x.modulus_sq().to_f64().unwrap_or(0.0) / scale }
                })
                .collect()
        })
        .collect();
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut iterations = 0;
    let mut viol = scaling_violation(&w, &u, &v, cap);

    let sweep = |u: &mut [f64], v: &mut [f64]| {
        for j in 0..n {
            let s: f64 = (0..m).map(|i| w[i][j] * u[i].exp()).sum();
            v[j] = -s.ln();
        }
        for i in 0..m {
            let s: f64 = (0..n).map(|j| w[i][j] * (u[i] + v[j]).exp()).sum();
            if s > cap {
                u[i] -= (s / cap).ln();
            }
        }
    };
    while iterations < max_iter && iterations < WARM_SWEEPS && (iterations == 0 || viol > eps) {
        sweep(&mut u, &mut v);
        iterations += 1;
        viol = scaling_violation(&w, &u, &v, cap);
    }

    if viol > eps && iterations < max_iter {
        let surplus = surplus.to_f64().unwrap_or(0.0);
        let slack = surplus > 1e-12;
        let mut pw = w.clone();
        let mut c = vec![1.0; n];
        let mut vv = v.clone();
        if slack {
            for row in pw.iter_mut() {
                row.push(1.0);
            }
            c.push(surplus);
            let mass: f64 = u.iter().map(|x| x.exp()).sum();
            vv.push(surplus.ln() - mass.ln());
        }
        let problem = Problem { w: pw, r: vec![cap; m], c };
        while iterations < max_iter && viol > eps {
            let moved = problem.newton_step(&mut u, &mut vv);
            iterations += 1;
            viol = scaling_violation(&w, &u, &vv[..n], cap);
            if !moved {
                // Fall back to sweeps when Newton stalls.
                let mut plain = vv[..n].to_vec();
                sweep(&mut u, &mut plain);
                vv[..n].copy_from_slice(&plain);
                viol = scaling_violation(&w, &u, &vv[..n], cap);
            }
        }
        v.copy_from_slice(&vv[..n]);
    }

    // Undo the weight normalization: w = |a|^2 / scale.
    let rho: Vec<f64> = u.iter().map(|x| (x / 2.0).exp() / scale.sqrt()).collect();
    let gamma: Vec<f64> = v.iter().map(|x| (x / 2.0).exp()).collect();
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let x = a.get(i, j).to_complex();
            data.push(if w[i][j] == 0.0 { Complex64::new(0.0, 0.0) } else { x * rho[i] * gamma[j] });
        }
    }
    let b = Matrix::new(m, n, data)?;
    Ok(ScalingResult { b, rho, gamma, eps_achieved: viol, iterations, converged: viol <= eps })
}
