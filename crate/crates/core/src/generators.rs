//! Instance generators shared by tests, the CLI and the verification suites.

use itertools::Itertools;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graver::IpInstance;
use crate::incidence::PointConfig;
use crate::numerics::{int, Field, GaussianRational, Matrix, MatrixRep, Rational};

/// Standard basis `e_1..e_d` followed by `e_i - ζ^k e_j` for `i < j` and
/// `k = 0..t`, with `ζ` a primitive `t`-th root of unity.
fn dowling_columns<F: Field>(d: usize, roots: &[F]) -> Vec<Vec<F>> {
    let mut cols: Vec<Vec<F>> = (0..d)
        .map(|i| (0..d).map(|r| if r == i { F::one() } else { F::zero() }).collect())
        .collect();
    for (i, j) in (0..d).tuple_combinations() {
        for z in roots {
            let mut c = vec![F::zero(); d];
            c[i] = F::one();
            c[j] = -z.clone();
            cols.push(c);
        }
    }
    cols
}

/// Cyclic Dowling geometry of rank `d` and order `t`. Exact for
/// `t in {1, 2, 4}`, complex float otherwise.
pub fn dowling(d: usize, t: usize) -> Result<MatrixRep> {
    if d < 2 || t == 0 {
        return Err(Error::Precondition(format!("dowling needs d >= 2 and t >= 1, got d={d}, t={t}")));
    }
    Ok(match t {
        1 | 2 => {
            let roots: Vec<Rational> = [1, -1].iter().take(t).map(|&v| int(v)).collect();
            Matrix::from_columns(d, &dowling_columns(d, &roots))?.into()
        }
        4 => {
            let i = GaussianRational::i();
            let roots = vec![GaussianRational::one(), i.clone(), -GaussianRational::one(), -i];
            Matrix::from_columns(d, &dowling_columns(d, &roots))?.into()
        }
        _ => {
            let roots: Vec<Complex64> = (0..t)
                .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / t as f64))
                .collect();
            Matrix::from_columns(d, &dowling_columns(d, &roots))?.into()
        }
    })
}

/// Columns `(cos(iπ/n), sin(iπ/n))`, `i = 0..n`.
pub fn half_circle(n: usize) -> Matrix<Complex64> {
    let cols: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let t = i as f64 * std::f64::consts::PI / n as f64;
            vec![Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)]
        })
        .collect();
    Matrix::from_columns(2, &cols).expect("two coordinates per column")
}

/// Unsigned node-edge incidence matrix of the complete graph on `v` nodes,
/// edges in lexicographic order.
pub fn unsigned_incidence_complete(v: usize) -> Matrix<Rational> {
    let edges: Vec<(usize, usize)> = (0..v).tuple_combinations().collect();
    let mut m = Matrix::zeros(v, edges.len());
    for (e, &(a, b)) in edges.iter().enumerate() {
        m.set(a, e, int(1));
        m.set(b, e, int(1));
    }
    m
}

/// The `side x side` integer grid in the plane, row-major.
pub fn grid(side: usize) -> PointConfig<Rational> {
    let points = (0..side)
        .cartesian_product(0..side)
        .map(|(y, x)| vec![int(x as i64), int(y as i64)])
        .collect();
    PointConfig::new(2, points).expect("grid points are distinct")
}

/// `n` distinct integer points of `{0..s}^d` spanning `d` affine dimensions,
/// where `s >= 3` is the least side with `s^d >= 2n`. The small side makes
/// collinear triples common.
pub fn random_config(d: usize, n: usize, seed: u64) -> Result<PointConfig<Rational>> {
    if d < 2 || n < d + 1 {
        return Err(Error::Precondition(format!("random_config needs d >= 2 and n >= d + 1, got d={d}, n={n}")));
    }
    let mut side = 3i64;
    while (side as f64).powi(d as i32) < 2.0 * n as f64 {
        side += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut pts: Vec<Vec<i64>> = Vec::with_capacity(n);
        while pts.len() < n {
            let p: Vec<i64> = (0..d).map(|_| rng.gen_range(0..side)).collect();
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let cfg = PointConfig::new(d, pts.into_iter().map(|p| p.into_iter().map(int).collect()).collect())?;
        if cfg.affine_dim() == d {
            return Ok(cfg);
        }
    }
}

/// Uniform integer entries in `[-bound, bound]`.
pub fn random_integer_matrix(d: usize, n: usize, bound: i64, seed: u64) -> Matrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..d * n).map(|_| int(rng.gen_range(-bound..=bound))).collect();
    Matrix::new(d, n, data).expect("shape matches")
}

/// Unit vector in `Q^{len+1}` by inverse stereographic projection of `t`.
pub fn unit_column(t: &[BigRational]) -> Vec<BigRational> {
    let s: BigRational = t.iter().map(|x| x * x).sum();
    let den = s.clone() + BigRational::one();
    let mut v: Vec<BigRational> = t.iter().map(|x| int(2) * x / den.clone()).collect();
    v.push((s - BigRational::one()) / den);
    v
}

/// `n` random unit-norm rational columns in dimension `d`.
pub fn random_unit_matrix(d: usize, n: usize, seed: u64) -> Matrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<Vec<Rational>> = (0..n)
        .map(|_| {
            let t: Vec<Rational> = (0..d - 1)
                .map(|_| BigRational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=4).into()))
                .collect();
            unit_column(&t)
        })
        .collect();
    Matrix::from_columns(d, &cols).expect("shape matches")
}

/// Embeds points into a higher dimension by appending zero coordinates.
pub fn pad_points(s: &PointConfig<Rational>, dim: usize) -> PointConfig<Rational> {
    let points = s
        .points()
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.resize(dim, BigRational::zero());
            q
        })
        .collect();
    PointConfig::new(dim, points).expect("padding keeps points distinct")
}

/// Entries `p/q` with `p in [-3, 3]` and `q in [1, 3]`.
pub fn random_rational_matrix(d: usize, n: usize, seed: u64) -> Matrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..d * n)
        .map(|_| BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into()))
        .collect();
    Matrix::new(d, n, data).expect("shape matches")
}

/// `l` pairwise non-collinear nonzero columns in `Q^2`: distinct slopes
/// `(1, t)` (one may be vertical), each scaled by a nonzero integer.
pub fn random_plane_directions(l: usize, seed: u64) -> Matrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slopes: Vec<Option<BigRational>> = Vec::with_capacity(l);
    while slopes.len() < l {
        let t = if rng.gen_bool(0.05) {
            None
        } else {
            Some(BigRational::new(rng.gen_range(-12i64..=12).into(), rng.gen_range(1i64..=4).into()))
        };
        if !slopes.contains(&t) {
            slopes.push(t);
        }
    }
    let cols: Vec<Vec<Rational>> = slopes
        .into_iter()
        .map(|t| {
            let mut scale = 0;
            while scale == 0 {
                scale = rng.gen_range(-3i64..=3);
            }
            let c = match t {
                Some(t) => vec![int(1), t],
                None => vec![int(0), int(1)],
            };
            c.into_iter().map(|x| x * int(scale)).collect()
        })
        .collect();
    Matrix::from_columns(2, &cols).expect("shape matches")
}

/// Entries `a + bi` with integer `a, b in [-bound, bound]`.
pub fn random_gaussian_matrix(d: usize, n: usize, bound: i64, seed: u64) -> Matrix<GaussianRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..d * n)
        .map(|_| GaussianRational::new(int(rng.gen_range(-bound..=bound)), int(rng.gen_range(-bound..=bound))))
        .collect();
    Matrix::new(d, n, data).expect("shape matches")
}

/// Columns `(1, ζ^k)` for `k = 0..l`, `ζ = e^{2πi/l}`.
pub fn roots_of_unity_pairs(l: usize) -> Matrix<Complex64> {
    let cols: Vec<Vec<Complex64>> = (0..l)
        .map(|k| {
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / l as f64),
            ]
        })
        .collect();
    Matrix::from_columns(2, &cols).expect("shape matches")
}

/// Small bounded integer program whose right-hand side comes from a random
/// box point, so the integer program is feasible. Roughly a third of the
/// columns repeat an earlier one to exercise the separable reduction.
pub fn random_ip_instance(d: usize, n: usize, seed: u64) -> Result<IpInstance> {
    if d == 0 || n == 0 || n > crate::graver::MAX_IP_VARS {
        return Err(Error::Precondition(format!("ip instance needs d >= 1 and 1 <= n <= 6, got d={d}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
    for j in 0..n {
        if j > 0 && rng.gen_bool(1.0 / 3.0) {
            let k = rng.gen_range(0..j);
            cols.push(cols[k].clone());
        } else {
            cols.push((0..d).map(|_| rng.gen_range(-3..=3)).collect());
        }
    }
    let a: Vec<Vec<i64>> = (0..d).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let u: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
    let x0: Vec<i64> = u.iter().map(|&ub| rng.gen_range(0..=ub)).collect();
    let b = crate::graver::apply(&a, &x0);
    let c = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
    IpInstance::new(a, b, u, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm_sq;

    #[test]
    fn dowling_sizes() {
        assert_eq!(dowling(3, 1).unwrap().cols(), 6);
        assert_eq!(dowling(3, 4).unwrap().cols(), 15);
        assert_eq!(dowling(3, 4).unwrap().mode(), crate::numerics::FieldMode::GaussianRational);
        assert_eq!(dowling(4, 3).unwrap().mode(), crate::numerics::FieldMode::ComplexFloat);
        assert_eq!(dowling(4, 3).unwrap().cols(), 4 + 3 * 6);
    }

    #[test]
    fn incidence_shape() {
        let m = unsigned_incidence_complete(5);
        assert_eq!((m.rows(), m.cols()), (5, 10));
        for j in 0..10 {
            assert_eq!(m.column(j).iter().filter(|x| !x.is_zero()).count(), 2);
        }
    }

    #[test]
    fn random_config_is_full_dimensional() {
        for seed in 0..5 {
            let s = random_config(3, 10, seed).unwrap();
            assert_eq!(s.affine_dim(), 3);
            assert_eq!(s.len(), 10);
        }
        assert!(random_config(3, 3, 0).is_err());
    }

    #[test]
    fn unit_columns() {
        let m = random_unit_matrix(3, 5, 1);
        for c in m.columns() {
            assert!(norm_sq(&c).is_one());
        }
    }
}
