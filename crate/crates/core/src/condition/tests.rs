use itertools::Itertools;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use super::*;
use crate::generators::{half_circle, unsigned_incidence_complete};
use crate::numerics::{int, rational, GaussianRational, Rational};

fn q(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
}

/// κ² from literal determinants `det(A_{B-i+j}) / det(A_B)`, full row rank only.
fn literal_detratio_sq(a: &Matrix<Rational>) -> Rational {
    let (r, n) = (a.rows(), a.cols());
    let mut best = Rational::one();
    for basis in (0..n).combinations(r) {
        let db = a.select_columns(&basis).det().unwrap();
        if db.is_zero() {
            continue;
        }
        for (pos, _) in basis.iter().enumerate() {
            for j in (0..n).filter(|j| !basis.contains(j)) {
                let mut swapped = basis.clone();
                swapped[pos] = j;
                let ratio = a.select_columns(&swapped).det().unwrap() / db.clone();
                best = best.max(ratio.clone() * ratio);
            }
        }
    }
    best
}

#[test]
fn circuit_examples() {
    let cs = circuits(&q(&[&[1, 0, 2], &[0, 1, 1]])).unwrap();
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].support, vec![0, 1, 2]);
    assert_eq!(cs[0].coeffs, vec![int(1), rational(1, 2), rational(-1, 2)]);

    assert!(circuits(&q(&[&[1, 0], &[0, 1]])).unwrap().is_empty());

    let cs = circuits(&q(&[&[1, 1, 1]])).unwrap();
    assert_eq!(cs.len(), 3);
    for c in &cs {
        assert_eq!(c.support.len(), 2);
        assert_eq!(c.coeffs.iter().filter(|x| **x == int(-1)).count(), 1);
    }
}

#[test]
fn circuits_are_minimal_dependences() {
    let a = q(&[&[1, 2, 0, 1, 3], &[0, 1, 1, 1, 1], &[2, 4, 0, 2, 0]]);
    for c in circuits(&a).unwrap() {
        assert!(a.apply(&c.coeffs).iter().all(Zero::is_zero));
        let sub = a.select_columns(&c.support);
        assert_eq!(sub.rank(), c.support.len() - 1);
        for drop in 0..c.support.len() {
            let mut s = c.support.clone();
            s.remove(drop);
            assert_eq!(a.select_columns(&s).rank(), s.len());
        }
        assert!(c.coeffs[c.support[0]].is_one());
    }
}

#[test]
fn kappa_examples() {
    let a = q(&[&[1, 0, 2], &[0, 1, 1]]);
    let kc = kappa_circuit(&a).unwrap();
    assert_eq!(kc.value_sq, int(4));
    assert!(matches!(kc.witness, KappaWitness::Circuit { numerator: 0, denominator: 1, .. }
        | KappaWitness::Circuit { numerator: 0, denominator: 2, .. }));
    assert_eq!(kappa_detratio(&a).unwrap().value_sq, int(4));

    let tu = q(&[&[1, 0, 1], &[0, 1, 1]]);
    assert_eq!(kappa(&tu, KappaMethod::Both).unwrap().value_sq, int(1));

    let identity = q(&[&[1, 0], &[0, 1]]);
    let k = kappa(&identity, KappaMethod::Both).unwrap();
    assert!(!k.has_circuit());
    assert_eq!(k.value_sq, int(1));
}

#[test]
fn complete_graph_incidence_k6() {
    let a = unsigned_incidence_complete(6);
    assert_eq!(a.cols(), 15);
    let k = kappa(&a, KappaMethod::Both).unwrap();
    assert_eq!(k.value_sq, int(4));
    assert_eq!(delta_modularity(&a).unwrap().value, 4.into());
}

#[test]
fn half_circle_four_points() {
    let k = kappa(&half_circle(4), KappaMethod::Detratio).unwrap();
    assert!((k.value() - 2f64.sqrt()).abs() < 1e-9, "{}", k.value());
    assert!(k.value() >= 4.0 / std::f64::consts::PI);
    assert!(kappa(&half_circle(4), KappaMethod::Circuit).is_err());
}

#[test]
fn half_circle_matches_sine_ratios() {
    for n in 3..=9 {
        let k = kappa(&half_circle(n), KappaMethod::Detratio).unwrap().value();
        let unit = (std::f64::consts::PI / n as f64).sin();
        let expected = (1..n)
            .map(|k| (k as f64 * std::f64::consts::PI / n as f64).sin() / unit)
            .fold(0.0, f64::max);
        assert!((k - expected).abs() < 1e-8, "n={n}: {k} vs {expected}");
    }
}

#[test]
fn detratio_matches_literal_determinants() {
    for a in [
        q(&[&[1, 0, 2], &[0, 1, 1]]),
        q(&[&[3, 1, 0, -2], &[1, 1, 5, 0]]),
        unsigned_incidence_complete(4),
    ] {
        let red = a.full_row_rank_form();
        assert_eq!(kappa_detratio(&a).unwrap().value_sq, literal_detratio_sq(&red));
    }
}

#[test]
fn zero_column_is_a_loop() {
    let a = q(&[&[1, 0], &[0, 0]]);
    let k = kappa(&a, KappaMethod::Both).unwrap();
    assert_eq!(k.value_sq, int(1));
    assert!(k.has_circuit());
    assert_eq!(kappa_detratio(&a).unwrap().witness, KappaWitness::Loop { index: 1 });
}

#[test]
fn delta_examples() {
    assert_eq!(delta_measure(&q(&[&[1, 0], &[0, 1]])).unwrap().delta_sq, int(1));
    assert_eq!(delta_measure(&q(&[&[1, 0, 1], &[0, 1, 1]])).unwrap().delta_sq, rational(1, 2));
    assert!(matches!(delta_measure(&q(&[&[1, 2], &[2, 4]])), Err(Error::Precondition(_))));
}

#[test]
fn delta_modularity_examples() {
    let d = delta_modularity(&q(&[&[1, 0, 2], &[0, 1, 1]])).unwrap();
    assert_eq!(d.value, 2.into());
    assert_eq!(d.cols, vec![1, 2]);
    assert_eq!(delta_modularity(&q(&[&[1, 0, 1], &[0, 1, 1]])).unwrap().value, 1.into());
    let half = Matrix::from_rows(vec![vec![rational(1, 2)]]).unwrap();
    assert!(matches!(delta_modularity(&half), Err(Error::NonInteger(0, 0))));
}

fn vandermonde(d: usize, n: usize) -> Matrix<Rational> {
    Matrix::from_rows((0..d).map(|i| (0..n).map(|j| int((j as i64 + 1).pow(i as u32))).collect()).collect()).unwrap()
}

#[test]
fn guard_refuses_large_inputs() {
    let wide = vandermonde(3, 60);
    assert!(matches!(circuits(&wide), Err(Error::Guard(_))));
    let deep = Matrix::<Rational>::identity(9);
    assert!(matches!(circuits(&deep), Err(Error::Guard(_))));
    let plane = vandermonde(2, 32);
    assert_eq!(circuits(&plane).unwrap().len(), 32 * 31 * 30 / 6);
}

#[test]
fn chibar_examples() {
    let id = chibar_sample(&q(&[&[1, 0], &[0, 1]]), 50, 1).unwrap();
    assert!((id - 1.0).abs() < 1e-9);
    let v = chibar_sample(&q(&[&[1, 0, 1], &[0, 1, 1]]), 1000, 42).unwrap();
    assert!((1.0 - 1e-9..=3f64.sqrt() + 1e-9).contains(&v), "{v}");
    let orth = q(&[&[2, 0, 0], &[0, 0, -3]]);
    assert!((chibar_sample(&orth, 100, 7).unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(
        chibar_sample(&q(&[&[1, 0, 1], &[0, 1, 1]]), 20, 9).unwrap(),
        chibar_sample(&q(&[&[1, 0, 1], &[0, 1, 1]]), 20, 9).unwrap()
    );
}

#[test]
fn project_kernel_examples() {
    let a = q(&[&[1, 0, 2], &[0, 1, 1]]);
    let full = project_kernel(&a, &[0, 1, 2]).unwrap();
    assert_eq!(kappa(&full, KappaMethod::Both).unwrap().value_sq, int(4));

    let p = project_kernel(&a, &[0, 2]).unwrap();
    let kp = kappa(&p, KappaMethod::Both).unwrap();
    assert!(kp.value_sq <= int(4));
    // ker A = span(2, 1, -1); projected onto {0, 2} it is span(2, -1).
    assert!(p.apply(&[int(2), int(-1)]).iter().all(Zero::is_zero));
    assert_eq!(p.rank(), 1);

    let empty = project_kernel(&a, &[]).unwrap();
    assert!(!kappa(&empty, KappaMethod::Both).unwrap().has_circuit());

    let id = q(&[&[1, 0], &[0, 1]]);
    assert_eq!(project_kernel(&id, &[1]).unwrap(), Matrix::identity(1));
}

#[test]
fn gaussian_kappa() {
    let i = GaussianRational::i();
    let one = GaussianRational::one();
    let a = Matrix::from_rows(vec![
        vec![one.clone(), GaussianRational::zero(), one.clone()],
        vec![GaussianRational::zero(), one.clone(), i.clone() + i],
    ])
    .unwrap();
    let k = kappa(&a, KappaMethod::Both).unwrap();
    assert_eq!(k.value_sq, int(4));
}

#[test]
fn report_serializes_witnesses() {
    let a = q(&[&[1, 0, 2], &[0, 1, 1]]);
    let r = ConditionReport::new::<Rational>()
        .with_kappa(&kappa(&a, KappaMethod::Detratio).unwrap())
        .with_delta_mod(&delta_modularity(&a).unwrap());
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["kappa"], 2.0);
    assert_eq!(v["kappa_witness"]["kind"], "basis_swap");
    assert_eq!(v["delta_mod"], "2");
    assert_eq!(v["field"], "rational");
}

fn small_int_matrix(max_d: usize, max_n: usize, bound: i64) -> impl Strategy<Value = Matrix<Rational>> {
    (1..=max_d, 1..=max_n).prop_flat_map(move |(d, n)| {
        prop::collection::vec(-bound..=bound, d * n)
            .prop_map(move |v| Matrix::new(d, n, v.into_iter().map(int).collect()).unwrap())
    })
}

fn rational_matrix(max_d: usize, max_n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    (1..=max_d, 1..=max_n).prop_flat_map(|(d, n)| {
        prop::collection::vec((-4i64..=4, 1i64..=3), d * n).prop_map(move |v| {
            Matrix::new(d, n, v.into_iter().map(|(a, b)| rational(a, b)).collect()).unwrap()
        })
    })
}

/// Unit vector from inverse stereographic projection of `t`.
fn unit_column(t: &[Rational]) -> Vec<Rational> {
    let s: Rational = t.iter().map(|x| x * x).sum();
    let den = s.clone() + Rational::one();
    let mut v: Vec<Rational> = t.iter().map(|x| int(2) * x / den.clone()).collect();
    v.push((s - Rational::one()) / den);
    v
}

fn unit_norm_matrix() -> impl Strategy<Value = Matrix<Rational>> {
    (2usize..=3, 2usize..=6).prop_flat_map(|(d, extra)| {
        prop::collection::vec(prop::collection::vec((-5i64..=5, 1i64..=3), d - 1), d + extra - 2)
            .prop_map(move |ts| {
                let cols: Vec<Vec<Rational>> = ts
                    .iter()
                    .map(|t| unit_column(&t.iter().map(|&(a, b)| rational(a, b)).collect::<Vec<_>>()))
                    .collect();
                Matrix::from_columns(d, &cols).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn circuit_and_detratio_agree(a in rational_matrix(4, 8)) {
        let c = kappa_circuit(&a).unwrap();
        let d = kappa_detratio(&a).unwrap();
        prop_assert_eq!(&c.value_sq, &d.value_sq);
        prop_assert_eq!(c.has_circuit(), d.has_circuit());
        if c.has_circuit() {
            prop_assert!(c.value_sq >= Rational::one());
        }
    }

    #[test]
    fn kappa_bounded_by_delta_modularity(a in small_int_matrix(4, 7, 3)) {
        prop_assume!(a.rank() > 0);
        let k = kappa(&a, KappaMethod::Detratio).unwrap();
        let big_delta = Rational::from_integer(delta_modularity(&a).unwrap().value);
        prop_assert!(k.value_sq <= big_delta.clone() * big_delta);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_times_delta_at_most_one(a in unit_norm_matrix()) {
        prop_assume!(a.rank() == a.rows());
        let k = kappa(&a, KappaMethod::Both).unwrap();
        let d = delta_measure(&a).unwrap();
        prop_assert!(d.delta_sq > Rational::zero() && d.delta_sq <= Rational::one());
        prop_assert!(k.value_sq * d.delta_sq <= Rational::one());
    }

    #[test]
    fn projection_does_not_increase_kappa(
        a in rational_matrix(3, 7),
        mask in prop::collection::vec(any::<bool>(), 7),
    ) {
        let coords: Vec<usize> = (0..a.cols()).filter(|&i| mask[i]).collect();
        let p = project_kernel(&a, &coords).unwrap();
        let kp = kappa(&p, KappaMethod::Both).unwrap();
        let ka = kappa(&a, KappaMethod::Both).unwrap();
        prop_assert!(kp.value_sq <= ka.value_sq);
    }

    #[test]
    fn projected_kernel_is_the_projection(
        a in rational_matrix(3, 6),
        mask in prop::collection::vec(any::<bool>(), 6),
    ) {
        let coords: Vec<usize> = (0..a.cols()).filter(|&i| mask[i]).collect();
        prop_assume!(!coords.is_empty());
        let p = project_kernel(&a, &coords).unwrap();
        let kernel = a.kernel_basis().vectors;
        for v in &kernel {
            let pv: Vec<Rational> = coords.iter().map(|&c| v[c].clone()).collect();
            prop_assert!(p.apply(&pv).iter().all(Zero::is_zero));
        }
        let projected: Vec<Vec<Rational>> =
            kernel.iter().map(|v| coords.iter().map(|&c| v[c].clone()).collect()).collect();
        let dim = if projected.is_empty() { 0 } else { Matrix::from_rows(projected).unwrap().rank() };
        prop_assert_eq!(coords.len() - p.rank(), dim);
    }

    #[test]
    fn kappa_is_self_dual(a in rational_matrix(3, 6)) {
        let kernel = a.kernel_basis().vectors;
        prop_assume!(!kernel.is_empty() && a.rank() > 0);
        let dual = Matrix::from_rows(kernel).unwrap();
        prop_assert_eq!(
            kappa(&a, KappaMethod::Detratio).unwrap().value_sq,
            kappa(&dual, KappaMethod::Detratio).unwrap().value_sq
        );
    }

    #[test]
    fn chibar_below_sqrt_n_kappa(a in small_int_matrix(3, 6, 4), seed in 0u64..1000) {
        prop_assume!(a.rank() == a.rows());
        let k = kappa(&a, KappaMethod::Detratio).unwrap().value();
        let c = chibar_sample(&a, 50, seed).unwrap();
        prop_assert!(c <= (a.cols() as f64).sqrt() * k + 1e-6, "chibar {} kappa {}", c, k);
    }

    #[test]
    fn two_row_kappa_lower_bound(ts in prop::collection::btree_set(-40i64..=40, 2..12)) {
        // Distinct slopes give pairwise non-collinear columns (1, t).
        let cols: Vec<Vec<Rational>> = ts.iter().map(|&t| vec![int(1), rational(t, 7)]).collect();
        let l = cols.len();
        let a = Matrix::from_columns(2, &cols).unwrap();
        let k = kappa(&a, KappaMethod::Detratio).unwrap();
        let pi: Rational = pi_lower();
        let lhs = int(16) * pi.clone() * pi * k.value_sq;
        prop_assert!(lhs >= int((l * l) as i64));
    }
}

#[test]
fn float_and_exact_agree_on_integer_input() {
    let a = q(&[&[3, 1, 0, -2], &[1, 1, 5, 0]]);
    let f = Matrix::new(
        2,
        4,
        a.entries().iter().map(|x| Complex64::new(x.to_f64().unwrap(), 0.0)).collect(),
    )
    .unwrap();
    let ke = kappa(&a, KappaMethod::Detratio).unwrap().value();
    let kf = kappa(&f, KappaMethod::Detratio).unwrap().value();
    assert!((ke - kf).abs() < 1e-9);
    let de = delta_measure(&a).unwrap().delta_sq.to_f64().unwrap();
    let df = delta_measure(&f).unwrap().delta_sq;
    assert!((de - df).abs() < 1e-9);
    let _ = BigRational::zero().abs();
}
