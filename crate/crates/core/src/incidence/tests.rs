use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::generators::{grid, pad_points, random_config};
use crate::numerics::Rational;

/// Lines of a planar integer point set from the equations `a x + b y = c`.
fn planar_lines_oracle(pts: &[(i64, i64)]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (pts[j].1 - pts[i].1, pts[i].0 - pts[j].0);
            let c = a * pts[i].0 + b * pts[i].1;
            let members: Vec<usize> =
                (0..pts.len()).filter(|&k| a * pts[k].0 + b * pts[k].1 == c).collect();
            out.insert(members);
        }
    }
    out
}

fn to_config(pts: &[(i64, i64)]) -> PointConfig<Rational> {
    PointConfig::new(2, pts.iter().map(|&(x, y)| vec![int(x), int(y)]).collect()).unwrap()
}

#[test]
fn grid_lines() {
    let g = grid(3);
    let ls = lines(&g).unwrap();
    assert_eq!(ls.lines.len(), 20);
    assert_eq!(ls.special_count(), 8);
    assert_eq!(ls.ordinary_count(), 12);
    let pts: Vec<(i64, i64)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).collect();
    let ours: BTreeSet<Vec<usize>> = ls.member_sets().into_iter().collect();
    assert_eq!(ours, planar_lines_oracle(&pts));
}

#[test]
fn grid_maxlines_at_edge_midpoint() {
    let ls = lines(&grid(3)).unwrap();
    let (p, count) = maxlines(&ls);
    assert_eq!(count, 6);
    assert_eq!(p, 1);
    let c = classify(&ls).unwrap();
    assert_eq!(c[1], PointLines { lines: 6, special: 2, k: 4 });
    assert_eq!(c[4], PointLines { lines: 4, special: 4, k: 8 });
    assert_eq!(c[0], PointLines { lines: 5, special: 3, k: 6 });
}

#[test]
fn collinear_and_general_position() {
    let col = to_config(&[(0, 0), (1, 1), (2, 2)]);
    let ls = lines(&col).unwrap();
    assert_eq!(ls.lines.len(), 1);
    assert_eq!(ls.lines[0].members, vec![0, 1, 2]);
    assert_eq!(maxlines(&ls).1, 1);

    let general = to_config(&[(0, 0), (1, 0), (0, 1), (1, 2), (3, 1), (2, 5), (5, 3)]);
    let ls = lines(&general).unwrap();
    assert_eq!(ls.lines.len(), 21);
    assert_eq!(maxlines(&ls).1, 6);
}

#[test]
fn duplicates_are_rejected() {
    let dup = PointConfig::new(2, vec![vec![int(1), int(2)], vec![int(0), int(0)], vec![int(1), int(2)]]);
    assert!(matches!(dup, Err(Error::DuplicatePoint(0, 2))));
}

#[test]
fn f_lower_bound_values() {
    assert_eq!(f_lower_bound(2).unwrap(), rational(1, 3));
    assert_eq!(f_lower_bound(4).unwrap(), rational(1, 3));
    assert_eq!(f_lower_bound(7).unwrap(), rational(1, 2));
    assert!(f_lower_bound(1).is_err());
}

#[test]
fn grid_bounds_report() {
    let r = check_maxlines_bounds(&grid(3)).unwrap();
    assert!(r.applicable && r.pass());
    assert_eq!(r.low_dim_bound, Some(4));
    assert_eq!(r.maxlines, 6);

    let col = PointConfig::new(1, vec![vec![int(0)], vec![int(1)], vec![int(5)]]).unwrap();
    let r = check_maxlines_bounds(&col).unwrap();
    assert!(!r.applicable && r.pass());
}

#[test]
fn projection_of_embedded_grid() {
    let g3 = pad_points(&grid(3), 3);
    assert_eq!(g3.affine_dim(), 2);
    let p = generic_project_to_plane(&g3, 5).unwrap();
    assert_eq!(p.dim(), 2);
    assert_eq!(lines(&p).unwrap().lines.len(), 20);
    assert_eq!(generic_project_to_plane(&grid(3), 5).unwrap(), grid(3));
}

#[test]
fn projection_of_random_four_dimensional_set() {
    let s = random_config(4, 12, 3).unwrap();
    let p = generic_project_to_plane(&s, 11).unwrap();
    assert_eq!(lines(&p).unwrap().member_sets(), lines(&s).unwrap().member_sets());
}

#[test]
fn affine_hull_reduction_keeps_lines() {
    let g3 = pad_points(&grid(3), 4);
    let r = g3.reduce_to_affine_hull();
    assert_eq!(r.dim(), 2);
    assert_eq!(lines(&r).unwrap().member_sets(), lines(&g3).unwrap().member_sets());
}

#[test]
fn float_collinearity() {
    let pts: Vec<Vec<Complex64>> = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0 + 1e-13), (0.0, 1.0)]
        .iter()
        .map(|&(x, y)| vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0)])
        .collect();
    let s = PointConfig::new(2, pts).unwrap();
    let ls = lines(&s).unwrap();
    assert_eq!(ls.special_count(), 1);
    assert_eq!(ls.lines.len(), 4);
}

#[test]
fn json_round_trip() {
    let rep = PointsRep::from(grid(2));
    let back = PointsRep::from_json(&rep.to_json()).unwrap();
    assert_eq!(back, rep);
    let v = serde_json::json!({"field": "rational", "dim": 2, "points": [["1/2", 0], [1, 1]]});
    assert_eq!(PointsRep::from_json(&v).unwrap().mode(), FieldMode::Rational);
}

fn planar_points() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::btree_set((0i64..5, 0i64..5), 3..14).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_lines_match_oracle(pts in planar_points()) {
        let ls = lines(&to_config(&pts)).unwrap();
        let ours: BTreeSet<Vec<usize>> = ls.member_sets().into_iter().collect();
        prop_assert_eq!(ours.len(), ls.lines.len());
        prop_assert_eq!(ours, planar_lines_oracle(&pts));
    }

    #[test]
    fn pairs_are_covered_once(d in 2usize..5, extra in 1usize..10, seed in 0u64..10_000) {
        let s = random_config(d, d + extra, seed).unwrap();
        let n = s.len();
        let ls = lines(&s).unwrap();
        let pairs: usize = ls.lines.iter().map(|l| l.members.len() * (l.members.len() - 1) / 2).sum();
        prop_assert_eq!(pairs, n * (n - 1) / 2);
        let counts = classify(&ls).unwrap();
        let (_, ml) = maxlines(&ls);
        let some_only_ordinary = counts.iter().any(|c| c.special == 0);
        prop_assert_eq!(ml == n - 1, some_only_ordinary);
        for c in &counts {
            prop_assert_eq!(n - 1 + c.special, c.k + c.lines);
        }
    }

    #[test]
    fn projection_preserves_lines(d in 3usize..5, extra in 1usize..9, seed in 0u64..10_000) {
        let s = random_config(d, d + extra, seed).unwrap();
        let p = generic_project_to_plane(&s, seed).unwrap();
        prop_assert_eq!(lines(&p).unwrap().member_sets(), lines(&s).unwrap().member_sets());
    }

    #[test]
    fn maxlines_bounds_hold(d in 2usize..7, extra in 1usize..20, seed in 0u64..10_000) {
        let s = random_config(d, (d + extra).min(30), seed).unwrap();
        let r = check_maxlines_bounds(&s).unwrap();
        prop_assert!(r.applicable);
        prop_assert!(r.pass(), "{:?}", r);
    }
}
