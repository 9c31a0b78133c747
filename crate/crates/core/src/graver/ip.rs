use std::cmp::Ordering;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{apply, g_inf, ser_rational, to_rational, IntMatrix};
use crate::condition::{kappa, pi_lower, KappaMethod};
use crate::error::{Error, Result};
use crate::numerics::scalar::parse_rational;
use crate::numerics::{int, Matrix, Rational};

pub const MAX_IP_VARS: usize = 6;
/// Largest box `Π(u_i + 1)` the brute-force solvers will enumerate.
pub const MAX_IP_BOX: u64 = 1_000_000;

/// `min { cᵀx : Ax = b, 0 ≤ x ≤ u, x integer }`.
#[derive(Clone, Debug, PartialEq)]
pub struct IpInstance {
    pub a: IntMatrix,
    pub b: Vec<i64>,
    pub u: Vec<i64>,
    pub c: Vec<Rational>,
}

fn parse_int(v: &Value) -> Result<i64> {
    let r = parse_rational(v)?;
    if !r.is_integer() {
        return Err(Error::Parse(format!("expected an integer, got {r}")));
    }
    r.to_integer().to_i64().ok_or_else(|| Error::Parse(format!("integer {r} out of range")))
}

fn parse_vec<T>(v: &Value, key: &str, f: impl Fn(&Value) -> Result<T>) -> Result<Vec<T>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing array {key:?}")))?
        .iter()
        .map(f)
        .collect()
}

impl IpInstance {
    pub fn new(a: IntMatrix, b: Vec<i64>, u: Vec<i64>, c: Vec<Rational>) -> Result<Self> {
        let d = a.len();
        let n = a.first().map_or(0, Vec::len);
        if d == 0 || n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("constraint matrix must be non-empty and rectangular".into()));
        }
        if b.len() != d || u.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "A is {d}x{n} but |b| = {}, |u| = {}, |c| = {}",
                b.len(),
                u.len(),
                c.len()
            )));
        }
        if u.iter().any(|&x| x < 0) {
            return Err(Error::Precondition("upper bounds must be nonnegative".into()));
        }
        Ok(Self { a, b, u, c })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.len(), self.u.len())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let a = v
            .get("A")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array \"A\"".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("rows of A must be arrays".into()))?
                    .iter()
                    .map(parse_int)
                    .collect()
            })
            .collect::<Result<IntMatrix>>()?;
        Self::new(a, parse_vec(v, "b", parse_int)?, parse_vec(v, "u", parse_int)?, parse_vec(v, "c", parse_rational)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "A": self.a,
            "b": self.b,
            "u": self.u,
            "c": self.c.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn cost(&self, x: &[Rational]) -> Rational {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn check_box(&self) -> Result<()> {
        let n = self.u.len();
        let size = self.u.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x as u64 + 1));
        if n > MAX_IP_VARS || size.is_none_or(|s| s > MAX_IP_BOX) {
            return Err(Error::Guard(format!(
                "brute-force solvers need n <= {MAX_IP_VARS} and box size <= {MAX_IP_BOX}"
            )));
        }
        Ok(())
    }
}

/// Identical columns grouped, each group ordered by ascending cost.
#[derive(Clone, Debug, Serialize)]
pub struct SeparableReduction {
    /// Original column indices per group, in ascending cost order.
    pub groups: Vec<Vec<usize>>,
    pub a_reduced: IntMatrix,
    pub u_reduced: Vec<i64>,
    /// `breakpoints[i][k] = S_i(k)` for `k = 0..=q_i`, starting at 0.
    pub breakpoints: Vec<Vec<i64>>,
    #[serde(skip)]
    pub costs: Vec<Vec<Rational>>,
    pub n: usize,
}

impl SeparableReduction {
    pub fn r(&self) -> usize {
        self.groups.len()
    }

    /// The piecewise-linear convex cost `f_i` at `x`.
    pub fn f(&self, i: usize, x: &Rational) -> Rational {
        let s = &self.breakpoints[i];
        let mut total = Rational::zero();
        for (j, c) in self.costs[i].iter().enumerate() {
            let lo = int(s[j]);
            let hi = int(s[j + 1]);
            if *x > lo {
                total += c * (x.clone().min(hi) - lo);
            }
        }
        total
    }

    /// Sums of `x` over each group.
    pub fn aggregate(&self, x: &[Rational]) -> Vec<Rational> {
        self.groups.iter().map(|g| g.iter().map(|&j| x[j].clone()).sum()).collect()
    }
}

pub fn separable_reduce(ip: &IpInstance) -> SeparableReduction {
    let (d, n) = ip.dims();
    let column = |j: usize| -> Vec<i64> { (0..d).map(|i| ip.a[i][j]).collect() };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Vec<i64>> = Vec::new();
    for j in 0..n {
        let col = column(j);
        match reps.iter().position(|r| *r == col) {
            Some(g) => groups[g].push(j),
            None => {
                reps.push(col);
                groups.push(vec![j]);
            }
        }
    }
    for g in &mut groups {
        // Stable sort keeps index order among equal costs.
        g.sort_by(|&p, &q| ip.c[p].cmp(&ip.c[q]));
    }
    let breakpoints: Vec<Vec<i64>> = groups
        .iter()
        .map(|g| {
            std::iter::once(0)
                .chain(g.iter().scan(0, |acc, &j| {
                    *acc += ip.u[j];
                    Some(*acc)
                }))
                .collect()
        })
        .collect();
    SeparableReduction {
        a_reduced: (0..d).map(|i| reps.iter().map(|r| r[i]).collect()).collect(),
        u_reduced: breakpoints.iter().map(|s| *s.last().expect("nonempty group")).collect(),
        costs: groups.iter().map(|g| g.iter().map(|&j| ip.c[j].clone()).collect()).collect(),
        breakpoints,
        groups,
        n,
    }
}

/// Fills each group in ascending-cost order: entry `i_j` is 0 below
/// `S_i(j-1)`, `x_i - S_i(j-1)` inside `(S_i(j-1), S_i(j)]`, and `u_{i_j}`
/// above.
pub fn g_map(x: &[Rational], red: &SeparableReduction) -> Result<Vec<Rational>> {
    if x.len() != red.r() {
        return Err(Error::Dimension(format!("g_map expects {} entries, got {}", red.r(), x.len())));
    }
    let mut out = vec![Rational::zero(); red.n];
    for (i, g) in red.groups.iter().enumerate() {
        if x[i].is_negative() || x[i] > int(red.u_reduced[i]) {
            return Err(Error::Precondition(format!(
                "x'_{i} = {} lies outside [0, {}]",
                x[i], red.u_reduced[i]
            )));
        }
        let s = &red.breakpoints[i];
        for (j, &col) in g.iter().enumerate() {
            let (lo, hi) = (int(s[j]), int(s[j + 1]));
            out[col] = if x[i] <= lo {
                Rational::zero()
            } else if x[i] <= hi {
                &x[i] - lo
            } else {
                hi - lo
            };
        }
    }
    Ok(out)
}

/// Which interval `(S(j-1), S(j)]` a value falls into, with 0 counted in
/// the first one.
fn interval_of(x: &Rational, s: &[i64]) -> usize {
    (1..s.len()).find(|&j| *x <= int(s[j])).unwrap_or(s.len() - 1).max(1)
}

/// One entry of the comparison between `g(x^{LP'})` and `g(x^{IP'})`.
#[derive(Clone, Debug, Serialize)]
pub struct GMapCase {
    pub group: usize,
    pub column: usize,
    /// 1: same interval; 2: the lower point is in an earlier interval;
    /// 3: the upper point is in a later interval; 4: both; 0: neither
    /// point's interval reaches this entry's interval.
    pub case: u8,
    #[serde(serialize_with = "ser_rational")]
    pub entry_gap: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub group_gap: Rational,
    pub holds: bool,
}

fn classify_cases(red: &SeparableReduction, hi_pt: &[Rational], lo_pt: &[Rational]) -> Result<Vec<GMapCase>> {
    let g_hi = g_map(hi_pt, red)?;
    let g_lo = g_map(lo_pt, red)?;
    let mut out = Vec::new();
    for (i, g) in red.groups.iter().enumerate() {
        let s = &red.breakpoints[i];
        let (a, b) = if hi_pt[i] >= lo_pt[i] { (&hi_pt[i], &lo_pt[i]) } else { (&lo_pt[i], &hi_pt[i]) };
        let (ja, jb) = (interval_of(a, s), interval_of(b, s));
        for (j0, &col) in g.iter().enumerate() {
            let j = j0 + 1;
            let case = match (ja.cmp(&j), jb.cmp(&j)) {
                (Ordering::Equal, Ordering::Equal) => 1,
                (Ordering::Equal, Ordering::Less) => 2,
                (Ordering::Greater, Ordering::Equal) => 3,
                (Ordering::Greater, Ordering::Less) => 4,
                _ => 0,
            };
            let entry_gap = (&g_hi[col] - &g_lo[col]).abs();
            let group_gap = a - b;
            out.push(GMapCase { group: i, column: col, case, holds: entry_gap <= group_gap, entry_gap, group_gap });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LpSolution {
    #[serde(serialize_with = "ser_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub vertices_checked: usize,
}

fn ser_rational_vec<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Basic solution for a given status assignment (0 = at lower bound,
/// 1 = at upper bound, 2 = free); `None` unless the free columns are
/// independent and the point is feasible.
fn basic_point(a: &Matrix<Rational>, ip: &IpInstance, status: &[u8]) -> Option<Vec<Rational>> {
    let (d, n) = ip.dims();
    let free: Vec<usize> = (0..n).filter(|&j| status[j] == 2).collect();
    let mut rhs: Vec<Rational> = ip.b.iter().map(|&x| int(x)).collect();
    for j in (0..n).filter(|&j| status[j] == 1) {
        for (i, r) in rhs.iter_mut().enumerate() {
            *r -= int(ip.a[i][j] * ip.u[j]);
        }
    }
    let f = free.len();
    let mut aug = Matrix::<Rational>::zeros(d, f + 1);
    for i in 0..d {
        for (k, &j) in free.iter().enumerate() {
            aug.set(i, k, a.get(i, j).clone());
        }
        aug.set(i, f, rhs[i].clone());
    }
    let r = aug.rref();
    if r.pivot_cols != (0..f).collect::<Vec<_>>() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for j in 0..n {
        if status[j] == 1 {
            x[j] = int(ip.u[j]);
        }
    }
    for (k, &j) in free.iter().enumerate() {
        let v = r.echelon.get(k, f).clone();
        if v.is_negative() || v > int(ip.u[j]) {
            return None;
        }
        x[j] = v;
    }
    Some(x)
}

/// Exact LP optimum by enumerating every basic point of
/// `{Ax = b, 0 ≤ x ≤ u}`; ties go to the lexicographically least vertex.
pub fn solve_lp_exact(ip: &IpInstance) -> Result<LpSolution> {
    ip.check_box()?;
    let n = ip.u.len();
    let a = to_rational(&ip.a)?;
    let states = 3usize.pow(n as u32);
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut checked = 0;
    for code in 0..states {
        let status: Vec<u8> = (0..n).map(|j| ((code / 3usize.pow(j as u32)) % 3) as u8).collect();
        if let Some(x) = basic_point(&a, ip, &status) {
            checked += 1;
            let v = ip.cost(&x);
            let better = match &best {
                None => true,
                Some((bv, bx)) => v < *bv || (v == *bv && x < *bx),
            };
            if better {
                best = Some((v, x));
            }
        }
    }
    let (value, x) = best.ok_or_else(|| Error::Infeasible("LP relaxation has no feasible point".into()))?;
    Ok(LpSolution { x, value, vertices_checked: checked })
}

fn inf_dist(x: &[i64], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(&p, q)| (int(p) - q).abs()).max().unwrap_or_else(Rational::zero)
}

/// Feasible integer point nearest to `anchor` in `ℓ∞`, lexicographically
/// least among ties.
pub fn solve_ip_bruteforce(ip: &IpInstance, anchor: &[Rational]) -> Result<Vec<i64>> {
    ip.check_box()?;
    if anchor.len() != ip.u.len() {
        return Err(Error::Dimension("anchor length differs from the number of variables".into()));
    }
    let radix: Vec<u64> = ip.u.iter().map(|&x| x as u64 + 1).collect();
    let total: u64 = radix.iter().product();
    let decode = |mut code: u64| -> Vec<i64> {
        // Most significant digit first, so code order is lexicographic.
        let mut x = vec![0i64; radix.len()];
        for j in (0..radix.len()).rev() {
            x[j] = (code % radix[j]) as i64;
            code /= radix[j];
        }
        x
    };
    let best = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let x = decode(code);
            (apply(&ip.a, &x) == ip.b).then(|| (inf_dist(&x, anchor), code))
        })
        .min_by(|p, q| p.cmp(q));
    best.map(|(_, code)| decode(code))
        .ok_or_else(|| Error::Infeasible("no feasible integer point in the box".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProximityReport {
    pub d: usize,
    pub n: usize,
    pub r: usize,
    pub groups: Vec<Vec<usize>>,
    #[serde(serialize_with = "ser_rational_vec")]
    pub x_lp: Vec<Rational>,
    pub x_ip: Vec<i64>,
    #[serde(serialize_with = "ser_rational_vec")]
    pub x_lp_reduced: Vec<Rational>,
    pub x_ip_reduced: Vec<i64>,
    /// `‖x^{LP} - x^{IP}‖∞`.
    #[serde(serialize_with = "ser_rational")]
    pub proximity: Rational,
    /// `‖x^{LP'} - x^{IP'}‖∞`.
    #[serde(serialize_with = "ser_rational")]
    pub proximity_reduced: Rational,
    pub g_inf: i64,
    pub g_inf_reduced: i64,
    /// `r · g∞(A')`.
    pub separable_bound: i64,
    /// `d⁴ g∞(A)⁴`, reported only.
    pub envelope: String,
    /// `π d⁴ κ_{A'} (2 g∞(A')² + 2)`, reported only.
    pub distinct_column_bound: f64,
    pub cases: Vec<GMapCase>,
    pub first_leg: bool,
    pub second_leg: bool,
}

impl ProximityReport {
    pub fn holds(&self) -> bool {
        self.first_leg && self.second_leg && self.cases.iter().all(|c| c.holds)
    }
}

/// Solves the LP exactly, aggregates it onto the reduced program, maps it
/// back through `g`, and compares nearest feasible integer points on both
/// sides.
pub fn proximity_experiment(ip: &IpInstance) -> Result<ProximityReport> {
    let (d, n) = ip.dims();
    let red = separable_reduce(ip);
    let lp = solve_lp_exact(ip)?;
    let x_lp_reduced = red.aggregate(&lp.x);
    let x_lp = g_map(&x_lp_reduced, &red)?;

    let reduced = IpInstance::new(red.a_reduced.clone(), ip.b.clone(), red.u_reduced.clone(), vec![Rational::zero(); red.r()])?;
    let x_ip_reduced = solve_ip_bruteforce(&reduced, &x_lp_reduced)?;
    let x_ip = solve_ip_bruteforce(ip, &x_lp)?;

    let proximity = inf_dist(&x_ip, &x_lp);
    let proximity_reduced = inf_dist(&x_ip_reduced, &x_lp_reduced);
    let g_full = g_inf(&ip.a)?;
    let g_red = g_inf(&red.a_reduced)?;
    let separable_bound = red.r() as i64 * g_red;

    let k = kappa(&to_rational(&red.a_reduced)?, KappaMethod::Detratio)?;
    let d4 = (d as f64).powi(4);
    let distinct_column_bound =
        pi_lower::<f64>() * d4 * k.value() * (2.0 * (g_red * g_red) as f64 + 2.0);

    let ip_red_rat: Vec<Rational> = x_ip_reduced.iter().map(|&x| int(x)).collect();
    let cases = classify_cases(&red, &x_lp_reduced, &ip_red_rat)?;

    Ok(ProximityReport {
        d,
        n,
        r: red.r(),
        groups: red.groups.clone(),
        first_leg: proximity <= proximity_reduced,
        second_leg: proximity_reduced <= int(separable_bound),
        x_lp,
        x_ip,
        x_lp_reduced,
        x_ip_reduced,
        proximity,
        proximity_reduced,
        g_inf: g_full,
        g_inf_reduced: g_red,
        separable_bound,
        envelope: super::proximity_envelope(d, g_full).to_string(),
        distinct_column_bound,
        cases,
    })
}
