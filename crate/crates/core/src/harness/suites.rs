use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{evaluate, CheckResult, Outcome, CheckDef};
use crate::condition::{
    chibar_sample, delta_measure, delta_modularity, kappa, kappa_circuit, kappa_detratio, pi_lower, project_kernel,
    KappaMethod,
};
use crate::design::{
    affine_residual_sq, all_triples_matrix, build_special_line_design, check_design, design_rank_check,
    sinkhorn_scale, transportation_feasible, RowSums, SpecialLineDesign,
};
use crate::error::Result;
use crate::generators::{
    dowling as dowling_matrix, grid, half_circle as half_circle_matrix, random_config, random_gaussian_matrix,
    random_integer_matrix, random_ip_instance, random_plane_directions, random_rational_matrix, random_unit_matrix,
    roots_of_unity_pairs, unsigned_incidence_complete,
};
use crate::graver::{
    apply, collinear_block_check, conformal_le, from_rational, graver_basis, kappa_vs_graver_check,
    proximity_experiment, IntMatrix, IpInstance,
};
use crate::incidence::{check_maxlines_bounds, lines, maxlines, PointConfig};
use crate::matroid::{
    chain_bound, find_flat_with_ordinary, longest_line_minor, minor_chain as greedy_chain, ordinary_flat_epsilon,
    LinearMatroid,
};
use crate::numerics::{int, Field, Matrix, Rational};
use crate::with_matrix;

const KAPPA_EQUIV: &str =
    "kappa via minimal kernel supports equals the largest |det(A_{B-i+j}) / det(A_B)| over bases B";
const HALF_CIRCLE: &str = "n evenly spaced unit vectors on the upper half circle have kappa = max_k sin(k pi/n) / sin(pi/n) >= n/pi";
const COMPLETE_INCIDENCE: &str = "the unsigned incidence matrix of K_6 has kappa = 2 and maximal subdeterminant 4";
const KAPPA_2D: &str = "a 2 x l matrix with nonzero pairwise non-collinear columns has kappa >= l/(4 pi)";
const KAPPA_DELTA: &str = "kappa <= Delta for integer matrices, Delta the largest rank-sized subdeterminant";
const KAPPA_SMALL_DELTA: &str = "kappa * delta <= 1 for matrices with unit-norm columns";
const CHIBAR_UPPER: &str = "chi-bar <= sqrt(n) kappa, so every sampled lower bound of chi-bar obeys it too";
const CHIBAR_RATIO: &str = "kappa <= chi-bar; the sampled value is only a lower bound on chi-bar";
const PROJECTION: &str = "projecting a subspace onto a coordinate subset does not increase kappa";
const SG_BOUNDS: &str = "a full-dimensional point set in dimension d has a point on at least max(floor(n/3) + 1, (1 - 4/(d+1)) n) lines";
const GRID_MAXLINES: &str = "the 3 x 3 grid has 9 points and a point on 6 distinct lines";
const FIND_MINOR: &str =
    "a simple rank d matroid on n elements has a rank k minor with at least n prod_{r=k}^{d-1} f(r) non-parallel elements";
const MAIN_KAPPA: &str = "a real matrix of rank d >= 4 with pairwise non-collinear columns has n <= pi d^4 kappa";
const KAPPA_CHAIN: &str = "kappa >= |rank-2 minor| / (4 pi), since contraction and simplification do not increase kappa";
const COMPLEX_REP: &str = "a simple rank d >= 3 complex-representable matroid without a U_{2,l} minor has at most d^4 l / 4 elements";
const LINE_MINOR: &str = "the longest line minor has at least n prod_{r=2}^{d-1} f(r) elements";
const COMPLEX_KAPPA: &str = "complex matrices with pairwise non-collinear columns satisfy n = O(d^4 kappa^2); constant unspecified";
const COMPLEX_2D: &str = "rank-2 complex matrices can have Theta(kappa^2) pairwise non-collinear columns";
const DOWLING_SIZE: &str = "the rank 3 cyclic Dowling geometry of order t has (l - 3) C(3,2) + 3 = 3 + 3t elements, l = t + 3";
const DOWLING_LINE: &str = "the rank 3 cyclic Dowling geometry of order t has longest line minor t + 2";
const DOWLING_RANK2: &str = "the rank 2 cyclic Dowling geometry of order t has exactly t + 2 non-parallel elements";
const ORDINARY_FLATS: &str =
    "when 2 prod_{i=1}^{k-1} f(d-i) - 1 >= eps, some (k-1)-flat lies on at least eps n ordinary k-flats";
const DESIGN_CONTRACT: &str = "the special-line construction gives a (3, k, 6)-design matrix A with A [1 V] = 0";
const DESIGN_THREE_K: &str = "column supports of the special-line design reach 3 min_i k_i";
const DESIGN_RANK: &str = "a (q,k,t)-design matrix has rank >= n / (1 + t(q-1)/k)";
const TRACE_BOUND: &str = "rank(M) >= Tr[M]^2 / |M|_F^2 for Hermitian M = B* B";
const OFFDIAG: &str = "off-diagonal mass of B* B is at most t (1 - 1/q) alpha |B|_F^2 after scaling";
const SCALING: &str = "a design matrix is asymptotically (<= q/k, 1)-scalable";
const TRANSPORT: &str = "the transportation problem on the support with row sums <= q/k and column sums 1 is feasible";
const GRAVER_DEF: &str = "the Graver basis is the set of conformally minimal nonzero integer kernel vectors";
const KAPPA_GRAVER: &str = "kappa_A <= g_inf(A) for integer A";
const COLLINEAR_BLOCK: &str = "a block of k distinct collinear integer columns has k <= 2 g_inf^2 + 2";
const PROXIMITY_CHAIN: &str =
    "|x_LP - x_IP|_inf <= |x_LP' - x_IP'|_inf <= r g_inf(A') for the separable reduction with r distinct columns";
const PROXIMITY_ENVELOPE: &str = "|x_LP - x_IP|_inf = O(d^4 g_inf(A)^4); constant unspecified";
const DISTINCT_COLUMNS: &str = "r distinct columns satisfy r = O(d^4 kappa g_inf^2); reported with constant pi (2 g^2 + 2)";

fn rng_for(seed: u64, suite: &str) -> ChaCha8Rng {
    // FNV-1a over the suite name keeps suites independent for one seed.
    let salt = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

fn rat(x: &Rational) -> Value {
    Value::String(x.to_string())
}

/// The simple (loopless, non-parallel) restriction of `a`.
fn simple_rep<F: Field>(a: &Matrix<F>) -> Matrix<F> {
    LinearMatroid::new(a.clone()).simplify().0.rep().clone()
}

/// `x²` as an exact rational, for squared comparisons.
fn square(x: usize) -> Rational {
    int(x as i64) * int(x as i64)
}

pub fn kappa_equivalence(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "kappa-equivalence");
    let defs = (0..200)
        .map(|_| {
            let (d, n, s) = (rng.gen_range(1..=4), rng.gen_range(1..=8), rng.gen());
            let a = random_rational_matrix(d, n, s);
            CheckDef::theorem("circuit-equals-detratio", KAPPA_EQUIV, format!("random rational {d}x{n}, seed {s}"), move || {
                let c = kappa_circuit(&a)?;
                let r = kappa_detratio(&a)?;
                Ok(Outcome::new(rat(&c.value_sq), rat(&r.value_sq), c.value_sq == r.value_sq))
            })
        })
        .collect();
    evaluate("kappa-equivalence", defs)
}

fn sine_ratio(n: usize) -> f64 {
    let t = std::f64::consts::PI / n as f64;
    (1..n).map(|k| (k as f64 * t).sin()).fold(0.0, f64::max) / t.sin()
}

pub fn half_circle(_seed: u64) -> Vec<CheckResult> {
    let mut defs = Vec::new();
    for n in [4usize, 8, 16, 32] {
        defs.push(CheckDef::theorem("kappa-at-least-n-over-pi", HALF_CIRCLE, format!("half circle n={n}"), move || {
            let k = kappa(&half_circle_matrix(n), KappaMethod::Detratio)?.value();
            let bound = n as f64 / std::f64::consts::PI;
            Ok(Outcome::new(bound, k, k >= bound))
        }));
    }
    defs.push(CheckDef::theorem("kappa-four-points", HALF_CIRCLE, "half circle n=4", || {
        let k = kappa(&half_circle_matrix(4), KappaMethod::Detratio)?.value();
        Ok(Outcome::new(std::f64::consts::SQRT_2, k, (k - std::f64::consts::SQRT_2).abs() <= 1e-9))
    }));
    for n in 3usize..=12 {
        defs.push(CheckDef::theorem("sine-ratio", HALF_CIRCLE, format!("half circle n={n}"), move || {
            let k = kappa(&half_circle_matrix(n), KappaMethod::Detratio)?.value();
            let expect = sine_ratio(n);
            Ok(Outcome::new(expect, k, (k - expect).abs() <= 1e-9 * expect))
        }));
    }
    evaluate("half-circle", defs)
}

pub fn incidence_complete(_seed: u64) -> Vec<CheckResult> {
    let mut defs = vec![
        CheckDef::theorem("kappa", COMPLETE_INCIDENCE, "unsigned incidence of K_6", || {
            let k = kappa(&unsigned_incidence_complete(6), KappaMethod::Both)?;
            Ok(Outcome::new("4", rat(&k.value_sq), k.value_sq == int(4)))
        }),
        CheckDef::theorem("delta-modularity", COMPLETE_INCIDENCE, "unsigned incidence of K_6", || {
            let d = delta_modularity(&unsigned_incidence_complete(6))?;
            Ok(Outcome::new("4", d.value.to_string(), d.value == BigInt::from(4)))
        }),
    ];
    for v in [4usize, 5] {
        defs.push(CheckDef::reported("kappa-smaller-graphs", COMPLETE_INCIDENCE, format!("unsigned incidence of K_{v}"), move || {
            let k = kappa(&unsigned_incidence_complete(v), KappaMethod::Detratio)?;
            let d = delta_modularity(&unsigned_incidence_complete(v))?;
            Ok(Outcome::new(format!("Delta = {}", d.value), format!("kappa^2 = {}", k.value_sq), true))
        }));
    }
    evaluate("incidence-complete", defs)
}

pub fn kappa_2d(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "kappa-2d");
    let defs = (0..200)
        .map(|_| {
            let (l, s) = (rng.gen_range(2..=15), rng.gen());
            let a = random_plane_directions(l, s);
            CheckDef::theorem("kappa-at-least-l-over-4pi", KAPPA_2D, format!("2x{l} non-collinear, seed {s}"), move || {
                let k = kappa(&a, KappaMethod::Detratio)?;
                let pi: Rational = pi_lower();
                // 4 pi kappa >= l with pi rounded down, squared.
                let lhs = int(16) * pi.clone() * pi * k.value_sq.clone();
                Ok(Outcome::new(l as f64 / (4.0 * std::f64::consts::PI), k.value(), lhs >= square(l)))
            })
        })
        .collect();
    evaluate("kappa-2d", defs)
}

pub fn condition_chain(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "condition-chain");
    let mut defs = Vec::new();
    for _ in 0..200 {
        let (d, n, s) = (rng.gen_range(1..=4), rng.gen_range(1..=7), rng.gen());
        let a = random_integer_matrix(d, n, 3, s);
        defs.push(CheckDef::theorem("kappa-at-most-delta", KAPPA_DELTA, format!("integer {d}x{n}, seed {s}"), move || {
            let k = kappa(&a, KappaMethod::Detratio)?;
            let dm = delta_modularity(&a)?;
            let delta = Rational::from_integer(dm.value.clone());
            Ok(Outcome::new(dm.value.to_string(), k.value(), k.value_sq <= delta.clone() * delta))
        }));
    }
    let mut found = 0;
    while found < 200 {
        let (d, s) = (rng.gen_range(2..=3), rng.gen());
        let n = rng.gen_range(d..=6);
        let a = random_unit_matrix(d, n, s);
        if a.rank() != d {
            continue;
        }
        found += 1;
        defs.push(CheckDef::theorem("kappa-times-delta", KAPPA_SMALL_DELTA, format!("unit columns {d}x{n}, seed {s}"), move || {
            let k = kappa(&a, KappaMethod::Detratio)?;
            let dl = delta_measure(&a)?;
            let prod = k.value_sq * dl.delta_sq;
            Ok(Outcome::new("1", rat(&prod), prod <= Rational::one()))
        }));
    }
    for _ in 0..20 {
        let (d, s) = (rng.gen_range(2..=3), rng.gen::<u64>());
        let n = rng.gen_range(d + 1..=6);
        let a = random_integer_matrix(d, n, 4, s);
        if a.rank() != d {
            continue;
        }
        let a2 = a.clone();
        defs.push(CheckDef::theorem("chibar-sample-below-sqrt-n-kappa", CHIBAR_UPPER, format!("integer {d}x{n}, seed {s}"), move || {
            let k = kappa(&a, KappaMethod::Detratio)?.value();
            let c = chibar_sample(&a, 200, s)?;
            let bound = (n as f64).sqrt() * k;
            Ok(Outcome::new(bound, c, c <= bound * (1.0 + 1e-9)))
        }));
        defs.push(CheckDef::reported("chibar-sample-over-kappa", CHIBAR_RATIO, format!("integer {d}x{n}, seed {s}"), move || {
            let k = kappa(&a2, KappaMethod::Detratio)?.value();
            let c = chibar_sample(&a2, 200, s)?;
            Ok(Outcome::new(k, c, true))
        }));
    }
    evaluate("condition-chain", defs)
}

pub fn projection(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "projection");
    let defs = (0..100)
        .map(|_| {
            let (d, n, s) = (rng.gen_range(1..=3), rng.gen_range(2..=7), rng.gen());
            let a = random_rational_matrix(d, n, s);
            let mut coords: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            if coords.is_empty() {
                coords.push(rng.gen_range(0..n));
            }
            let desc = format!("random rational {d}x{n}, seed {s}, J = {coords:?}");
            CheckDef::theorem("projection-monotone", PROJECTION, desc, move || {
                let ka = kappa(&a, KappaMethod::Detratio)?;
                let kp = kappa(&project_kernel(&a, &coords)?, KappaMethod::Detratio)?;
                Ok(Outcome::new(rat(&ka.value_sq), rat(&kp.value_sq), kp.value_sq <= ka.value_sq))
            })
        })
        .collect();
    evaluate("projection", defs)
}

pub fn sylvester_gallai(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "sylvester-gallai");
    let mut defs = vec![CheckDef::theorem("grid-maxlines", GRID_MAXLINES, "3x3 grid", || {
        let g = grid(3);
        let (_, ml) = maxlines(&lines(&g)?);
        let rep = check_maxlines_bounds(&g)?;
        Ok(Outcome::new("n = 9, maxlines = 6", format!("n = {}, maxlines = {ml}", g.len()), g.len() == 9 && ml == 6 && rep.pass()))
    })];
    for i in 0..300 {
        let d = 2 + i % 5;
        let (n, s) = (rng.gen_range(d + 2..=d + 12), rng.gen());
        defs.push(CheckDef::theorem("maxlines-lower-bounds", SG_BOUNDS, format!("random config d={d}, n={n}, seed {s}"), move || {
            let cfg = random_config(d, n, s)?;
            let rep = check_maxlines_bounds(&cfg)?;
            let claimed = format!(
                "floor(n/3)+1 = {}, (1-4/(d+1))n = {}",
                rep.low_dim_bound.unwrap_or(0),
                rep.high_dim_bound.clone().unwrap_or_default()
            );
            Ok(Outcome::new(claimed, rep.maxlines, rep.pass()))
        }));
    }
    evaluate("sylvester-gallai", defs)
}

/// Checks every intermediate size of the greedy chain against the product
/// bound for that rank.
fn chain_outcome<F: Field>(m: &LinearMatroid<F>) -> Result<Outcome> {
    let chain = greedy_chain(m, 2)?;
    let mut ok = true;
    for (s, step) in chain.steps.iter().enumerate() {
        let rank_after = chain.start_rank - s - 1;
        ok &= BigInt::from(step.size_after) >= chain_bound(rank_after, chain.start_rank, chain.start_size)?;
    }
    ok &= chain.holds();
    Ok(Outcome::new(chain.size_bound.to_string(), chain.final_matroid.len(), ok))
}

pub fn minor_chain(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "minor-chain");
    let mut defs = vec![CheckDef::theorem("greedy-chain", FIND_MINOR, "affine matroid of the 3x3 grid", || {
        chain_outcome(&LinearMatroid::from_affine(&grid(3)))
    })];
    for _ in 0..60 {
        let d = rng.gen_range(2..=5);
        let (n, s) = (rng.gen_range(d + 2..=14), rng.gen());
        defs.push(CheckDef::theorem("greedy-chain", FIND_MINOR, format!("affine matroid of random config d={d}, n={n}, seed {s}"), move || {
            chain_outcome(&LinearMatroid::from_affine(&random_config(d, n, s)?))
        }));
    }
    evaluate("minor-chain", defs)
}

fn main_kappa_defs(label: String, a: Matrix<Rational>) -> Vec<CheckDef<'static>> {
    let a = simple_rep(&a);
    let b = a.clone();
    let label2 = label.clone();
    vec![
        CheckDef::theorem("column-bound", MAIN_KAPPA, label, move || {
            let r = a.rank();
            let n = a.cols();
            if r < 4 {
                return Ok(Outcome::new("rank >= 4 required", format!("rank {r}"), true));
            }
            let k = kappa(&a, KappaMethod::Detratio)?;
            let pi: Rational = pi_lower();
            let r4 = int((r as i64).pow(4));
            let rhs = pi.clone() * pi * r4.clone() * r4 * k.value_sq.clone();
            let bound = std::f64::consts::PI * (r as f64).powi(4) * k.value();
            Ok(Outcome::new(bound, n, square(n) <= rhs))
        }),
        CheckDef::theorem("kappa-vs-rank2-minor", KAPPA_CHAIN, label2, move || {
            if b.rank() < 2 {
                return Ok(Outcome::new("rank >= 2 required", "rank < 2", true));
            }
            let chain = greedy_chain(&LinearMatroid::new(b.clone()), 2)?;
            let l = chain.final_matroid.len();
            let k = kappa(&b, KappaMethod::Detratio)?;
            let pi: Rational = pi_lower();
            let lhs = int(16) * pi.clone() * pi * k.value_sq.clone();
            Ok(Outcome::new(l as f64 / (4.0 * std::f64::consts::PI), k.value(), lhs >= square(l)))
        }),
    ]
}

pub fn main_kappa(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "main-kappa");
    let mut defs = Vec::new();
    for _ in 0..30 {
        let d = rng.gen_range(4..=5);
        let (n, s) = (rng.gen_range(d + 1..=10), rng.gen());
        defs.extend(main_kappa_defs(format!("integer {d}x{n}, seed {s}"), random_integer_matrix(d, n, 3, s)));
    }
    for _ in 0..20 {
        let d = rng.gen_range(3..=5);
        let (n, s) = (rng.gen_range(d + 2..=12), rng.gen());
        if let Ok(cfg) = random_config(d, n, s) {
            let m = LinearMatroid::from_affine(&cfg);
            defs.extend(main_kappa_defs(format!("affine matroid of random config d={d}, n={n}, seed {s}"), m.rep().clone()));
        }
    }
    for t in [1usize, 2] {
        if let Ok(crate::numerics::MatrixRep::Rational(a)) = dowling_matrix(4, t) {
            defs.extend(main_kappa_defs(format!("dowling d=4, t={t}"), a));
        }
    }
    defs.extend(main_kappa_defs("unsigned incidence of K_5".into(), unsigned_incidence_complete(5)));
    evaluate("main-kappa", defs)
}

fn complex_rep_defs<F: Field>(label: String, a: Matrix<F>) -> Vec<CheckDef<'static>> {
    let m = LinearMatroid::new(a).simplify().0;
    let m2 = m.clone();
    vec![
        CheckDef::theorem("size-bound", COMPLEX_REP, label.clone(), move || {
            let (r, n) = (m.rank(), m.len());
            let line = longest_line_minor(&m)?.length;
            // The matroid excludes U_{2, line + 1}.
            let bound = BigInt::from(r).pow(4) * BigInt::from(line + 1);
            let claimed = format!("d^4 l / 4 = {}/4 with d={r}, l={}", bound, line + 1);
            Ok(Outcome::new(claimed, n, r < 3 || BigInt::from(4 * n) <= bound))
        }),
        CheckDef::theorem("longest-line", LINE_MINOR, label, move || {
            let (r, n) = (m2.rank(), m2.len());
            let line = longest_line_minor(&m2)?.length;
            let bound = chain_bound(2, r, n)?;
            Ok(Outcome::new(bound.to_string(), line, BigInt::from(line) >= bound))
        }),
    ]
}

pub fn complex_rep(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "complex-rep");
    let mut defs = Vec::new();
    for (d, t) in [(3usize, 1usize), (3, 2), (3, 3), (3, 4), (3, 5), (4, 1), (4, 2)] {
        match dowling_matrix(d, t) {
            Ok(rep) => with_matrix!(rep, a => defs.extend(complex_rep_defs(format!("dowling d={d}, t={t}"), a))),
            Err(e) => defs.push(CheckDef::theorem("size-bound", COMPLEX_REP, format!("dowling d={d}, t={t}"), move || {
                Err(crate::error::Error::Inconsistent(e.to_string()))
            })),
        }
    }
    defs.extend(complex_rep_defs("affine matroid of the 3x3 grid".into(), LinearMatroid::from_affine(&grid(3)).rep().clone()));
    defs.extend(complex_rep_defs("unsigned incidence of K_5".into(), unsigned_incidence_complete(5)));
    for _ in 0..20 {
        let d = rng.gen_range(2..=3);
        let (n, s) = (rng.gen_range(d + 2..=12), rng.gen());
        if let Ok(cfg) = random_config(d, n, s) {
            let rep = LinearMatroid::from_affine(&cfg).rep().clone();
            defs.extend(complex_rep_defs(format!("affine matroid of random config d={d}, n={n}, seed {s}"), rep));
        }
    }
    evaluate("complex-rep", defs)
}

fn complex_kappa_spec<F: Field>(label: String, a: Matrix<F>) -> CheckDef<'static> {
    CheckDef::reported("column-ratio", COMPLEX_KAPPA, label, move || {
        let a = simple_rep(&a);
        let (r, n) = (a.rank(), a.cols());
        let k = kappa(&a, KappaMethod::Detratio)?.value();
        let envelope = (r as f64).powi(4) * k * k;
        Ok(Outcome::new(envelope, n, n as f64 <= envelope))
    })
}

pub fn complex_kappa(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "complex-kappa");
    let mut defs = Vec::new();
    for _ in 0..10 {
        let (n, s) = (rng.gen_range(5..=9), rng.gen());
        defs.push(complex_kappa_spec(format!("gaussian 4x{n}, seed {s}"), random_gaussian_matrix(4, n, 2, s)));
    }
    for t in [1usize, 2] {
        if let Ok(rep) = dowling_matrix(4, t) {
            with_matrix!(rep, a => defs.push(complex_kappa_spec(format!("dowling d=4, t={t}"), a)));
        }
    }
    for l in 3usize..=12 {
        defs.push(CheckDef::reported("rank2-roots-of-unity", COMPLEX_2D, format!("columns (1, zeta^k), l={l}"), move || {
            let k = kappa(&roots_of_unity_pairs(l), KappaMethod::Detratio)?.value();
            Ok(Outcome::new(json!({"kappa^2": k * k}), json!({"l": l, "l/kappa^2": l as f64 / (k * k)}), true))
        }));
    }
    evaluate("complex-kappa", defs)
}

pub fn dowling(_seed: u64) -> Vec<CheckResult> {
    let mut defs = Vec::new();
    for t in 1usize..=5 {
        defs.push(CheckDef::theorem("element-count", DOWLING_SIZE, format!("dowling d=3, t={t}"), move || {
            let n = dowling_matrix(3, t)?.cols();
            let l = t + 3;
            let formula = (l - 3) * 3 + 3;
            Ok(Outcome::new(formula, n, n == formula && n == 3 + 3 * t))
        }));
        defs.push(CheckDef::theorem("longest-line", DOWLING_LINE, format!("dowling d=3, t={t}"), move || {
            let rep = dowling_matrix(3, t)?;
            let line = with_matrix!(rep, a => longest_line_minor(&LinearMatroid::new(a))?.length);
            Ok(Outcome::new(t + 2, line, line == t + 2))
        }));
        defs.push(CheckDef::theorem("rank2-size", DOWLING_RANK2, format!("dowling d=2, t={t}"), move || {
            let rep = dowling_matrix(2, t)?;
            let size = with_matrix!(rep, a => LinearMatroid::new(a).simple_size());
            Ok(Outcome::new(t + 2, size, size == t + 2))
        }));
    }
    evaluate("dowling", defs)
}

pub fn ordinary_flats(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "ordinary-flats");
    let defs = (0..12)
        .map(|_| {
            let d = rng.gen_range(8..=10);
            let (n, s) = (rng.gen_range(d + 4..=20), rng.gen());
            CheckDef::theorem("greedy-flat", ORDINARY_FLATS, format!("affine matroid of random config d={d}, n={n}, seed {s}"), move || {
                let m = LinearMatroid::from_affine(&random_config(d, n, s)?);
                let rank = m.simplify().0.rank();
                let eps = ordinary_flat_epsilon(rank, 2)?;
                let need = crate::numerics::ceil_rational(&(eps.clone() * int(n as i64)));
                match find_flat_with_ordinary(&m, 2, &eps) {
                    Ok(f) => Ok(Outcome::new(format!("ceil({eps} n) = {need}"), f.ordinary, true)),
                    Err(crate::error::Error::BoundViolation(msg)) => Ok(Outcome::new(format!("ceil({eps} n) = {need}"), msg, false)),
                    Err(e) => Err(e),
                }
            })
        })
        .collect();
    evaluate("ordinary-flats", defs)
}

/// The 3x3 grid and ten random planar configurations whose points all lie
/// on special lines, with their designs. Deterministic in `seed`.
pub fn special_designs(seed: u64) -> Vec<(String, PointConfig<Rational>, SpecialLineDesign<Rational>)> {
    let mut rng = rng_for(seed, "special-designs");
    let g = grid(3);
    let mut out = vec![("3x3 grid".to_string(), g.clone(), build_special_line_design(&g).expect("grid has special lines"))];
    while out.len() < 11 {
        let (n, s) = (rng.gen_range(8..=12), rng.gen());
        let Ok(cfg) = random_config(2, n, s) else { continue };
        if let Ok(design) = build_special_line_design(&cfg) {
            out.push((format!("random planar config n={n}, seed {s}"), cfg, design));
        }
    }
    out
}

pub fn design_rank(seed: u64) -> Vec<CheckResult> {
    let mut defs = Vec::new();
    for (label, cfg, design) in special_designs(seed) {
        let a = design.matrix.clone();
        let a2 = a.clone();
        defs.push(CheckDef::theorem("design-contract", DESIGN_CONTRACT, label.clone(), move || {
            let c = check_design(&a);
            let residual = affine_residual_sq(&a, &cfg)?;
            Ok(Outcome::new(
                "q <= 3, t <= 6, A [1 V] = 0",
                format!("q = {}, k = {}, t = {}, residual = {residual}", c.q, c.k, c.t),
                c.is_valid() && c.q <= 3 && c.t <= 6 && residual.is_zero(),
            ))
        }));
        let d2 = design.clone();
        defs.push(CheckDef::reported("three-k", DESIGN_THREE_K, label.clone(), move || {
            let c = check_design(&d2.matrix);
            let kmin = d2.k_per_point.iter().min().copied().unwrap_or(0);
            Ok(Outcome::new(3 * kmin, c.k, d2.meets_three_k()))
        }));
        defs.extend(rank_defs(label, a2));
    }
    defs.extend(rank_defs("all triples on [5]".into(), all_triples_matrix(5)));
    defs.extend(rank_defs("identity 6x6".into(), Matrix::<Rational>::identity(6)));
    evaluate("design-rank", defs)
}

fn rank_defs(label: String, a: Matrix<Rational>) -> Vec<CheckDef<'static>> {
    let report = std::sync::Arc::new(std::sync::OnceLock::new());
    let get = {
        let a = a.clone();
        move |cell: &std::sync::OnceLock<std::result::Result<crate::design::DesignRankReport, String>>| {
            cell.get_or_init(|| design_rank_check(&a).map_err(|e| e.to_string())).clone()
        }
    };
    let (r1, r2, r3) = (report.clone(), report.clone(), report);
    let (g1, g2, g3) = (get.clone(), get.clone(), get);
    let err = |e: String| crate::error::Error::Inconsistent(e);
    vec![
        CheckDef::theorem("rank-bound", DESIGN_RANK, label.clone(), move || {
            let r = g1(&r1).map_err(err)?;
            Ok(Outcome::new(r.required_rank.clone(), r.rank, r.pass))
        }),
        CheckDef::theorem("trace-bound", TRACE_BOUND, label.clone(), move || {
            let r = g2(&r2).map_err(err)?;
            Ok(Outcome::new(r.rank, r.trace_bound.unwrap_or(0), r.trace_bound_holds.unwrap_or(false)))
        }),
        CheckDef::theorem("offdiagonal-mass", OFFDIAG, label, move || {
            let r = g3(&r3).map_err(err)?;
            Ok(Outcome::new(r.offdiag_rhs.unwrap_or(f64::NAN), r.offdiag_lhs.unwrap_or(f64::NAN), r.offdiag_holds.unwrap_or(false)))
        }),
    ]
}

/// Row and column squared norms of a scaled matrix.
fn margins(b: &Matrix<Complex64>) -> (Vec<f64>, Vec<f64>) {
    let rows = (0..b.rows()).map(|i| (0..b.cols()).map(|j| b.get(i, j).norm_sqr()).sum()).collect();
    let cols = (0..b.cols()).map(|j| (0..b.rows()).map(|i| b.get(i, j).norm_sqr()).sum()).collect();
    (rows, cols)
}

fn scaling_spec(label: String, a: Matrix<Rational>, cap: BigRational) -> CheckDef<'static> {
    CheckDef::theorem("asymptotic-scaling", SCALING, label, move || {
        let c = check_design(&a);
        let qk = c.q as f64 / c.k as f64;
        let sc = sinkhorn_scale(&a, &cap, 1e-6, 100_000)?;
        let (rows, cols) = margins(&sc.b);
        let ok = sc.eps_achieved <= 1e-6
            && sc.iterations <= 100_000
            && rows.iter().all(|&r| r <= qk + 1e-6)
            && cols.iter().all(|&x| (x - 1.0).abs() <= 1e-6);
        Ok(Outcome::new(
            format!("eps <= 1e-6, rows <= {qk}, columns = 1"),
            json!({"eps": sc.eps_achieved, "iterations": sc.iterations}),
            ok,
        ))
    })
}

fn transport_spec(label: String, a: Matrix<Rational>) -> CheckDef<'static> {
    CheckDef::theorem("transportation", TRANSPORT, label, move || {
        let c = check_design(&a);
        let support: Vec<Vec<bool>> = a.to_rows().iter().map(|r| r.iter().map(|x| !x.is_zero()).collect()).collect();
        let r = vec![BigRational::new(BigInt::from(c.q), BigInt::from(c.k)); c.m];
        let cs = vec![int(1); c.n];
        let sol = transportation_feasible(&support, &r, &cs, RowSums::AtMost)?;
        Ok(Outcome::new("feasible", sol.feasible, sol.feasible))
    })
}

pub fn scaling(seed: u64) -> Vec<CheckResult> {
    let tri = Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(0), int(1)]]).expect("2x2");
    let mut defs = vec![scaling_spec("[[1,1],[0,1]] with row cap 1".into(), tri, int(1))];
    for (label, _, design) in special_designs(seed) {
        let c = check_design(&design.matrix);
        let cap = BigRational::new(BigInt::from(c.q), BigInt::from(c.k));
        defs.push(scaling_spec(label.clone(), design.matrix.clone(), cap));
        defs.push(transport_spec(label, design.matrix));
    }
    evaluate("scaling", defs)
}

fn graver_invariants(a: &IntMatrix) -> Result<Outcome> {
    let gb = graver_basis(a)?;
    let mut ok = true;
    for v in &gb.elements {
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        ok &= apply(a, v).iter().all(|&x| x == 0);
        ok &= gb.elements.contains(&neg);
        ok &= !gb.elements.iter().any(|w| w != v && conformal_le(w, v));
    }
    Ok(Outcome::new("kernel, minimal, symmetric", format!("{} elements, g_inf = {}", gb.len(), gb.g_inf), ok))
}

pub fn graver(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "graver");
    let mut defs = vec![
        CheckDef::theorem("known-basis", GRAVER_DEF, "A = [1 1 1]", || {
            let gb = graver_basis(&[vec![1, 1, 1]])?;
            let ok = gb.len() == 6 && gb.g_inf == 1 && gb.elements.iter().all(|v| v.iter().filter(|&&x| x != 0).count() == 2);
            Ok(Outcome::new("6 elements, g_inf = 1", format!("{} elements, g_inf = {}", gb.len(), gb.g_inf), ok))
        }),
        CheckDef::theorem("known-basis", GRAVER_DEF, "A = [1 2]", || {
            let gb = graver_basis(&[vec![1, 2]])?;
            Ok(Outcome::new("{+-(2,-1)}", format!("{:?}", gb.elements), gb.elements == vec![vec![-2, 1], vec![2, -1]]))
        }),
        CheckDef::theorem("known-basis", GRAVER_DEF, "A = [2 3]", || {
            let gb = graver_basis(&[vec![2, 3]])?;
            Ok(Outcome::new("{+-(3,-2)}", format!("{:?}", gb.elements), gb.elements == vec![vec![-3, 2], vec![3, -2]]))
        }),
    ];
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let (n, s) = (rng.gen_range(d + 1..=5), rng.gen());
        let a = from_rational(&random_integer_matrix(d, n, 3, s)).expect("integer entries");
        let a2 = a.clone();
        let desc = format!("integer {d}x{n}, seed {s}");
        defs.push(CheckDef::theorem("kappa-at-most-g-inf", KAPPA_GRAVER, desc.clone(), move || {
            let r = kappa_vs_graver_check(&a)?;
            Ok(Outcome::new(r.g_inf, r.kappa, r.holds))
        }));
        defs.push(CheckDef::theorem("basis-invariants", GRAVER_DEF, desc, move || graver_invariants(&a2)));
    }
    for _ in 0..50 {
        let k = rng.gen_range(2..=5);
        let mut z: Vec<i64> = Vec::new();
        while z.len() < k {
            let v = rng.gen_range(-9..=9);
            if v != 0 && !z.contains(&v) {
                z.push(v);
            }
        }
        defs.push(CheckDef::theorem("collinear-block", COLLINEAR_BLOCK, format!("z = {z:?}"), move || {
            let r = collinear_block_check(&z)?;
            Ok(Outcome::new(2 * r.g_inf * r.g_inf + 2, r.k, r.holds && r.pair_bound_holds))
        }));
    }
    evaluate("graver", defs)
}

fn proximity_defs(label: String, ip: IpInstance) -> Vec<CheckDef<'static>> {
    let ip2 = ip.clone();
    let ip3 = ip.clone();
    vec![
        CheckDef::theorem("proximity-chain", PROXIMITY_CHAIN, label.clone(), move || {
            let r = proximity_experiment(&ip)?;
            Ok(Outcome::new(
                json!({"prox_reduced": r.proximity_reduced.to_string(), "r_g_inf": r.separable_bound}),
                rat(&r.proximity),
                r.holds(),
            ))
        }),
        CheckDef::reported("proximity-envelope", PROXIMITY_ENVELOPE, label.clone(), move || {
            let r = proximity_experiment(&ip2)?;
            let env: f64 = r.envelope.parse().unwrap_or(f64::INFINITY);
            let prox = r.proximity.to_f64().unwrap_or(f64::NAN);
            Ok(Outcome::new(r.envelope.clone(), json!({"proximity": prox, "ratio": prox / env}), prox <= env))
        }),
        CheckDef::reported("distinct-columns", DISTINCT_COLUMNS, label, move || {
            let r = proximity_experiment(&ip3)?;
            Ok(Outcome::new(r.distinct_column_bound, r.r, r.r as f64 <= r.distinct_column_bound))
        }),
    ]
}

pub fn proximity(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, "proximity");
    let witness = IpInstance::new(vec![vec![2, 3]], vec![4], vec![2, 2], vec![int(1), int(0)]).expect("valid");
    let mut defs = proximity_defs("A = [2 3], b = 4, u = (2,2), c = (1,0)".into(), witness);
    for _ in 0..49 {
        let d = rng.gen_range(1..=2);
        let (n, s) = (rng.gen_range(3..=6), rng.gen());
        match random_ip_instance(d, n, s) {
            Ok(ip) => defs.extend(proximity_defs(format!("random ip {d}x{n}, seed {s}"), ip)),
            Err(e) => defs.push(CheckDef::theorem("proximity-chain", PROXIMITY_CHAIN, format!("random ip {d}x{n}, seed {s}"), move || {
                Err(crate::error::Error::Inconsistent(e.to_string()))
            })),
        }
    }
    evaluate("proximity", defs)
}
