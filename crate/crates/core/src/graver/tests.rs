use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::numerics::rational;

/// ⊑-minimal nonzero kernel vectors inside `[-b, b]^n`, by enumeration.
fn box_oracle(a: &[Vec<i64>], b: i64) -> Vec<Vec<i64>> {
    let n = a[0].len();
    let side = (2 * b + 1) as usize;
    let mut kernel = Vec::new();
    for code in 0..side.pow(n as u32) {
        let x: Vec<i64> = (0..n).map(|j| ((code / side.pow(j as u32)) % side) as i64 - b).collect();
        if x.iter().any(|&v| v != 0) && apply(a, &x).iter().all(|&v| v == 0) {
            kernel.push(x);
        }
    }
    minimal_elements(&kernel)
}

fn oracle_matches(a: &[Vec<i64>]) {
    let gb = graver_basis(a).unwrap();
    let oracle = box_oracle(a, gb.g_inf + 1);
    assert_eq!(gb.elements, oracle, "A = {a:?}");
}

fn ip(a: IntMatrix, b: Vec<i64>, u: Vec<i64>, c: Vec<i64>) -> IpInstance {
    IpInstance::new(a, b, u, c.into_iter().map(int).collect()).unwrap()
}

#[test]
fn all_ones_row() {
    let gb = graver_basis(&[vec![1, 1, 1]]).unwrap();
    let mut expect = vec![
        vec![1, -1, 0],
        vec![-1, 1, 0],
        vec![1, 0, -1],
        vec![-1, 0, 1],
        vec![0, 1, -1],
        vec![0, -1, 1],
    ];
    expect.sort();
    assert_eq!(gb.elements, expect);
    assert_eq!(gb.g_inf, 1);
    assert_eq!(box_oracle(&[vec![1, 1, 1]], 2), expect);
}

#[test]
fn one_line_kernels() {
    let gb = graver_basis(&[vec![1, 2]]).unwrap();
    assert_eq!(gb.elements, vec![vec![-2, 1], vec![2, -1]]);
    assert_eq!(gb.g_inf, 2);
    let gb = graver_basis(&[vec![2, 3]]).unwrap();
    assert_eq!(gb.elements, vec![vec![-3, 2], vec![3, -2]]);
    assert_eq!(gb.g_inf, 3);
}

#[test]
fn trivial_kernel() {
    let gb = graver_basis(&[vec![1, 0], vec![0, 1]]).unwrap();
    assert!(gb.is_empty());
    assert_eq!(gb.g_inf, 0);
}

#[test]
fn guard_rejects_large_instances() {
    assert!(matches!(graver_basis(&[vec![1; 7]]), Err(Error::Guard(_))));
    assert!(matches!(graver_basis(&[vec![51, 1]]), Err(Error::Guard(_))));
    assert!(matches!(graver_basis(&vec![vec![1, 1]; 4]), Err(Error::Guard(_))));
}

#[test]
fn lattice_basis_spans_nonprimitive_kernels() {
    // The rational kernel of [2 4] is spanned by (2,-1), and (-2,1) too;
    // the lattice basis must be primitive.
    let b = lattice_kernel_basis(&[vec![2, 4]]).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(inf_norm(&b[0]), 2);
    assert_eq!(apply(&[vec![2, 4]], &b[0]), vec![0]);
    let b = lattice_kernel_basis(&[vec![6, 10, 15]]).unwrap();
    assert_eq!(b.len(), 2);
    for v in &b {
        assert_eq!(apply(&[vec![6, 10, 15]], v), vec![0]);
    }
}

#[test]
fn known_instances_match_oracle() {
    for a in [
        vec![vec![1, 1, 1]],
        vec![vec![1, 2, 3]],
        vec![vec![1, 2, 3, 4]],
        vec![vec![2, 3, 5]],
        vec![vec![1, 0, 1], vec![0, 1, 1]],
        vec![vec![1, 0, 2], vec![0, 1, 1]],
        vec![vec![1, 1, 1, 1], vec![0, 1, 2, 3]],
    ] {
        oracle_matches(&a);
    }
}

#[test]
fn kappa_graver_examples() {
    let r = kappa_vs_graver_check(&[vec![1, 2]]).unwrap();
    assert_eq!(r.kappa_sq, int(4));
    assert_eq!(r.g_inf, 2);
    assert!(r.holds);
    let r = kappa_vs_graver_check(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
    assert_eq!(r.kappa_sq, int(1));
    assert_eq!(r.g_inf, 1);
    assert!(r.holds);
    let r = kappa_vs_graver_check(&[vec![1, 0, 2], vec![0, 1, 1]]).unwrap();
    assert_eq!(r.kappa_sq, int(4));
    assert!(r.g_inf >= 2 && r.holds);
}

#[test]
fn collinear_blocks() {
    let r = collinear_block_check(&[1, 2]).unwrap();
    assert!(r.g_inf >= 2 && r.holds && r.pair_bound_holds);
    let r = collinear_block_check(&[1, 2, 3, 4]).unwrap();
    assert_eq!(r.g_inf, box_oracle(&[vec![1, 2, 3, 4]], r.g_inf + 1).iter().map(|v| inf_norm(v)).max().unwrap());
    assert!(r.holds);
    let r = collinear_block_check(&[1, -1]).unwrap();
    assert_eq!(r.distinct_abs, vec![-1]);
    assert!(r.holds);
    assert!(collinear_block_check(&[1]).is_err());
    assert!(collinear_block_check(&[2, 2]).is_err());
    assert!(collinear_block_check(&[0, 2]).is_err());
}

#[test]
fn reduction_without_duplicates_is_identity() {
    let inst = ip(vec![vec![2, 3]], vec![4], vec![2, 2], vec![1, 0]);
    let red = separable_reduce(&inst);
    assert_eq!(red.groups, vec![vec![0], vec![1]]);
    let x = vec![rational(1, 2), rational(4, 3)];
    assert_eq!(g_map(&x, &red).unwrap(), x);
}

#[test]
fn reduction_groups_and_breakpoints() {
    let inst = ip(vec![vec![1, 1]], vec![4], vec![2, 3], vec![5, 1]);
    let red = separable_reduce(&inst);
    assert_eq!(red.groups, vec![vec![1, 0]]);
    assert_eq!(red.breakpoints, vec![vec![0, 3, 5]]);
    assert_eq!(red.u_reduced, vec![5]);
    assert_eq!(g_map(&[int(4)], &red).unwrap(), vec![int(1), int(3)]);
    assert_eq!(g_map(&[int(0)], &red).unwrap(), vec![int(0), int(0)]);
    assert!(g_map(&[int(6)], &red).is_err());
    assert!(g_map(&[int(-1)], &red).is_err());
    // f is the greedy cost: 3 units at cost 1, then 1 unit at cost 5.
    assert_eq!(red.f(0, &int(4)), int(8));
}

#[test]
fn lp_and_ip_witness() {
    let inst = ip(vec![vec![2, 3]], vec![4], vec![2, 2], vec![1, 0]);
    let lp = solve_lp_exact(&inst).unwrap();
    assert_eq!(lp.x, vec![int(0), rational(4, 3)]);
    let x = solve_ip_bruteforce(&inst, &lp.x).unwrap();
    assert_eq!(x, vec![2, 0]);
    let rep = proximity_experiment(&inst).unwrap();
    assert_eq!(rep.proximity, int(2));
    assert_eq!(rep.separable_bound, 6);
    assert!(rep.holds());
}

#[test]
fn infeasible_instances() {
    let inst = ip(vec![vec![2, 2]], vec![3], vec![1, 1], vec![0, 0]);
    // LP is feasible at (1/2, 1) etc., but no integer point hits 3.
    assert!(solve_lp_exact(&inst).is_ok());
    assert!(matches!(solve_ip_bruteforce(&inst, &[int(0), int(0)]), Err(Error::Infeasible(_))));
    let inst = ip(vec![vec![1, 1]], vec![9], vec![2, 2], vec![0, 0]);
    assert!(matches!(solve_lp_exact(&inst), Err(Error::Infeasible(_))));
}

#[test]
fn totally_unimodular_instance_has_zero_proximity() {
    let inst = ip(vec![vec![1, 0, 1], vec![0, 1, 1]], vec![2, 3], vec![3, 3, 3], vec![1, 2, -1]);
    let rep = proximity_experiment(&inst).unwrap();
    assert_eq!(rep.proximity, int(0));
    assert!(rep.holds());
}

#[test]
fn duplicated_columns_exercise_cases() {
    let inst = ip(vec![vec![2, 3, 3, 3]], vec![7], vec![3, 1, 2, 1], vec![1, 3, -1, 0]);
    let rep = proximity_experiment(&inst).unwrap();
    assert_eq!(rep.r, 2);
    assert!(rep.holds(), "{rep:?}");
    assert!(rep.cases.iter().all(|c| c.holds));
}

#[test]
fn ip_json_roundtrip() {
    let inst = IpInstance::new(vec![vec![2, 3]], vec![4], vec![2, 2], vec![rational(1, 2), int(0)]).unwrap();
    let back = IpInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(back, inst);
    let v = serde_json::json!({"A": [["1", 2]], "b": ["3"], "u": [1, 1], "c": ["1/3", 0]});
    assert!(IpInstance::from_json(&v).is_ok());
    let bad = serde_json::json!({"A": [[1]], "b": [1], "u": [-1], "c": [0]});
    assert!(IpInstance::from_json(&bad).is_err());
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, n: usize, bound: i64) -> IntMatrix {
    (0..d).map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

#[test]
fn random_small_matrices_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=4);
        let a = random_matrix(&mut rng, d, n, 2);
        oracle_matches(&a);
    }
}

#[test]
fn random_proximity_chain() {
    for seed in 0..30 {
        let d = 1 + (seed as usize % 2);
        let inst = crate::generators::random_ip_instance(d, 5, seed).unwrap();
        let rep = proximity_experiment(&inst).unwrap();
        assert!(rep.holds(), "seed {seed}: {rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn graver_elements_are_minimal_kernel_vectors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=5);
        let a = random_matrix(&mut rng, d, n, 3);
        let gb = graver_basis(&a).unwrap();
        for v in &gb.elements {
            prop_assert!(apply(&a, v).iter().all(|&x| x == 0));
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            prop_assert!(gb.elements.contains(&neg));
            prop_assert!(!gb.elements.iter().any(|w| w != v && conformal_le(w, v)));
        }
    }

    #[test]
    fn kappa_at_most_g_inf(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(d + 1..=5);
        let a = random_matrix(&mut rng, d, n, 3);
        prop_assert!(kappa_vs_graver_check(&a).unwrap().holds);
    }

    #[test]
    fn g_map_is_feasible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let cols: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let u: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let inst = ip(vec![cols], vec![0], u, c);
        let red = separable_reduce(&inst);
        let x: Vec<Rational> = red
            .u_reduced
            .iter()
            .map(|&ub| rational(rng.gen_range(0..=4 * ub), 4))
            .collect();
        let y = g_map(&x, &red).unwrap();
        let lhs: Rational = (0..n).map(|j| int(inst.a[0][j]) * &y[j]).sum();
        let rhs: Rational = (0..red.r()).map(|i| int(red.a_reduced[0][i]) * &x[i]).sum();
        prop_assert_eq!(lhs, rhs);
        for j in 0..n {
            prop_assert!(y[j] >= int(0) && y[j] <= int(inst.u[j]));
        }
        prop_assert_eq!(red.aggregate(&y), x);
    }

    #[test]
    fn collinear_block_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(2..=5);
        let mut z: Vec<i64> = Vec::new();
        while z.len() < k {
            let v = rng.gen_range(-9..=9);
            if v != 0 && !z.contains(&v) {
                z.push(v);
            }
        }
        let r = collinear_block_check(&z).unwrap();
        prop_assert!(r.holds && r.pair_bound_holds);
    }
}
