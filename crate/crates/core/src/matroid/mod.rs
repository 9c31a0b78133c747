//! Linear matroids represented by matrices: contraction, simplification, the
//! greedy minor chain, longest-line minors and ordinary flats.
//!
//! Element ids are stable across minors, so witnesses always refer to
//! columns of the original matrix.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::incidence::{f_lower_bound, PointConfig};
use crate::numerics::{ceil_rational, int, Field, JsonEntry, Matrix, MatrixRep};

pub const MAX_LINE_RANK: usize = 6;
pub const MAX_LINE_ELEMENTS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearMatroid<F> {
    rep: Matrix<F>,
    ground: Vec<usize>,
}

/// Outcome of simplification: the representative kept for each parallel
/// class (its least id) with all members, and the dropped loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassMap {
    pub classes: Vec<(usize, Vec<usize>)>,
    pub loops: Vec<usize>,
}

impl<F: Field> LinearMatroid<F> {
    pub fn new(rep: Matrix<F>) -> Self {
        let ground = (0..rep.cols()).collect();
        Self { rep, ground }
    }

    pub fn with_ground(rep: Matrix<F>, ground: Vec<usize>) -> Result<Self> {
        if ground.len() != rep.cols() {
            return Err(Error::Dimension(format!("{} ids for {} columns", ground.len(), rep.cols())));
        }
        if ground.iter().duplicates().next().is_some() {
            return Err(Error::Dimension("repeated element id".into()));
        }
        Ok(Self { rep, ground })
    }

    /// Affine matroid of a point set: the matrix `[1; V]`.
    pub fn from_affine(s: &PointConfig<F>) -> Self {
        let d = s.dim();
        let cols: Vec<Vec<F>> = s
            .points()
            .iter()
            .map(|p| std::iter::once(F::one()).chain(p.iter().cloned()).collect())
            .collect();
        let m = Matrix::from_columns(d + 1, &cols).expect("consistent dimension");
        let m = if F::EXACT { m } else { m.with_tol(s.tol()).expect("positive tol") };
        Self::new(m)
    }

    pub fn rep(&self) -> &Matrix<F> {
        &self.rep
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rep.rank()
    }

    fn position(&self, e: usize) -> Result<usize> {
        self.ground.iter().position(|&g| g == e).ok_or(Error::UnknownElement(e))
    }

    fn is_loop_at(&self, p: usize) -> bool {
        self.rep.is_zero_column(p)
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.is_loop_at(p)).map(|p| self.ground[p]).collect()
    }

    pub fn is_independent(&self, ids: &[usize]) -> Result<bool> {
        let pos = ids.iter().map(|&e| self.position(e)).collect::<Result<Vec<_>>>()?;
        Ok(self.rep.select_columns(&pos).rank() == pos.len())
    }

    /// Whether the non-loop columns at positions `p` and `q` span a line.
    fn parallel_at(&self, p: usize, q: usize) -> bool {
        let (u, v) = (self.rep.column(p), self.rep.column(q));
        let inf = |w: &[F]| {
            w.iter().map(Field::modulus_sq).fold(F::Real::zero(), |a, b| if b > a { b } else { a })
        };
        let scale = inf(&u) * inf(&v);
        for a in 0..u.len() {
            for b in a + 1..u.len() {
                let minor = u[a].clone() * v[b].clone() - u[b].clone() * v[a].clone();
                if !minor.negligible(&scale, self.rep.tol()) {
                    return false;
                }
            }
        }
        true
    }

    /// Parallel classes of non-loops (as positions), each led by its first
    /// member, plus loop positions.
    fn classes_at(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut loops = Vec::new();
        for p in 0..self.len() {
            if self.is_loop_at(p) {
                loops.push(p);
                continue;
            }
            match classes.iter_mut().find(|c| self.parallel_at(c[0], p)) {
                Some(c) => c.push(p),
                None => classes.push(vec![p]),
            }
        }
        (classes, loops)
    }

    pub fn parallel_classes(&self) -> Vec<Vec<usize>> {
        self.classes_at().0.into_iter().map(|c| c.into_iter().map(|p| self.ground[p]).collect()).collect()
    }

    /// `|si(M)|`, the number of parallel classes.
    pub fn simple_size(&self) -> usize {
        self.classes_at().0.len()
    }

    pub fn is_simple(&self) -> bool {
        let (classes, loops) = self.classes_at();
        loops.is_empty() && classes.len() == self.len()
    }

    /// Drops loops and keeps the least-id member of each parallel class.
    pub fn simplify(&self) -> (Self, ClassMap) {
        let (classes, loops) = self.classes_at();
        let mut map: Vec<(usize, Vec<usize>)> = classes
            .iter()
            .map(|c| {
                let mut ids: Vec<usize> = c.iter().map(|&p| self.ground[p]).collect();
                ids.sort_unstable();
                (ids[0], ids)
            })
            .collect();
        map.sort_by_key(|c| c.0);
        let keep: Vec<usize> = map.iter().map(|(rep, _)| self.position(*rep).expect("own id")).sorted().collect();
        let simple = Self {
            rep: self.rep.select_columns(&keep),
            ground: keep.iter().map(|&p| self.ground[p]).collect(),
        };
        let loops = loops.into_iter().map(|p| self.ground[p]).collect();
        (simple, ClassMap { classes: map, loops })
    }

    /// `M / e`: a row operation turns column `e` into a unit vector, then
    /// that row and column are dropped. Requires rank at least 2.
    pub fn contract(&self, e: usize) -> Result<Self> {
        let p = self.position(e)?;
        if self.is_loop_at(p) {
            return Err(Error::ContractLoop(e));
        }
        let rank = self.rank();
        if rank < 2 {
            return Err(Error::Precondition(format!("cannot contract in a rank {rank} matroid")));
        }
        let a = &self.rep;
        let pivot = if F::EXACT {
            (0..a.rows()).find(|&r| !a.get(r, p).is_zero())
        } else {
            (0..a.rows()).max_by(|&x, &y| {
                a.get(x, p)
                    .modulus_sq()
                    .partial_cmp(&a.get(y, p).modulus_sq())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(y.cmp(&x))
            })
        }
        .expect("non-loop column has a nonzero entry");
        let piv = a.get(pivot, p).clone();
        let rows: Vec<usize> = (0..a.rows()).filter(|&r| r != pivot).collect();
        let cols: Vec<usize> = (0..a.cols()).filter(|&c| c != p).collect();
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in &rows {
            let f = a.get(r, p).clone() / piv.clone();
            for &c in &cols {
                data.push(a.get(r, c).clone() - f.clone() * a.get(pivot, c).clone());
            }
        }
        let m = Matrix::new(rows.len(), cols.len(), data)?;
        let m = if F::EXACT { m } else { m.with_tol(a.tol())? };
        Ok(Self { rep: m, ground: cols.iter().map(|&c| self.ground[c]).collect() })
    }

    /// Contracts every element of `set` in order.
    pub fn contract_all(&self, set: &[usize]) -> Result<Self> {
        set.iter().try_fold(self.clone(), |m, &e| m.contract(e))
    }
}

impl<F: JsonEntry> LinearMatroid<F>
where
    MatrixRep: From<Matrix<F>>,
{
    pub fn to_json(&self) -> Value {
        json!({ "matrix": MatrixRep::from(self.rep.clone()).to_json(), "ground": self.ground })
    }
}

/// `ceil(prod_{i=lo}^{hi-1} f(i) * n)`.
pub fn chain_bound(lo: usize, hi: usize, n: usize) -> Result<BigInt> {
    let mut p = BigRational::one();
    for i in lo..hi {
        p *= f_lower_bound(i)?;
    }
    Ok(ceil_rational(&(p * int(n as i64))))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    pub element: usize,
    pub size_after: usize,
}

#[derive(Clone, Debug)]
pub struct MinorChain<F> {
    pub start_rank: usize,
    pub start_size: usize,
    pub steps: Vec<ChainStep>,
    pub final_matroid: LinearMatroid<F>,
    pub size_bound: BigInt,
}

impl<F: Field> MinorChain<F> {
    pub fn holds(&self) -> bool {
        BigInt::from(self.final_matroid.len()) >= self.size_bound
    }

    pub fn summary(&self) -> Value {
        json!({
            "start_rank": self.start_rank,
            "start_size": self.start_size,
            "steps": self.steps,
            "final_rank": self.start_rank - self.steps.len(),
            "final_size": self.final_matroid.len(),
            "final_ground": self.final_matroid.ground(),
            "size_bound": self.size_bound.to_string(),
            "holds": self.holds(),
        })
    }
}

/// The element whose contraction keeps the most parallel classes, least id
/// on ties, with that class count.
pub fn greedy_step<F: Field>(m: &LinearMatroid<F>) -> Result<(usize, usize)> {
    let loops = m.loops();
    let candidates: Vec<usize> = m.ground().iter().copied().filter(|e| !loops.contains(e)).collect();
    let scored = candidates
        .par_iter()
        .map(|&e| Ok((e, m.contract(e)?.simple_size())))
        .collect::<Result<Vec<_>>>()?;
    scored
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
        .ok_or_else(|| Error::Precondition("no non-loop element".into()))
}

/// Greedy contractions of `si(M)` down to `target_rank`, simplifying after
/// each step. Returns the chain even if the size bound fails; see
/// [`minor_chain_to_rank2`] for the checked form.
pub fn minor_chain<F: Field>(m: &LinearMatroid<F>, target_rank: usize) -> Result<MinorChain<F>> {
    if target_rank < 2 {
        return Err(Error::Precondition(format!("target rank {target_rank} < 2")));
    }
    let (mut current, _) = m.simplify();
    let start_rank = current.rank();
    if start_rank < target_rank {
        return Err(Error::Precondition(format!("rank {start_rank} below target {target_rank}")));
    }
    let start_size = current.len();
    let mut steps = Vec::new();
    for _ in target_rank..start_rank {
        let (e, size) = greedy_step(&current)?;
        current = current.contract(e)?.simplify().0;
        debug_assert_eq!(current.len(), size);
        steps.push(ChainStep { element: e, size_after: size });
    }
    Ok(MinorChain {
        start_rank,
        start_size,
        steps,
        final_matroid: current,
        size_bound: chain_bound(target_rank, start_rank, start_size)?,
    })
}

pub fn minor_chain_to_rank2<F: Field>(m: &LinearMatroid<F>) -> Result<MinorChain<F>> {
    let chain = minor_chain(m, 2)?;
    if !chain.holds() {
        return Err(Error::BoundViolation(format!(
            "rank-2 minor has {} elements, bound is {}",
            chain.final_matroid.len(),
            chain.size_bound
        )));
    }
    Ok(chain)
}

#[derive(Clone, Debug, Serialize)]
pub struct LineMinor {
    pub length: usize,
    /// Independent set whose contraction attains the length.
    pub contracted: Vec<usize>,
}

/// Largest `l` with a `U_{2,l}` minor: the maximum of `|si(M/C)|` over
/// independent `C` of size `rank - 2`.
pub fn longest_line_minor<F: Field>(m: &LinearMatroid<F>) -> Result<LineMinor> {
    let (s, _) = m.simplify();
    let r = s.rank();
    if r < 2 {
        return Err(Error::Precondition(format!("rank {r} < 2")));
    }
    if r > MAX_LINE_RANK || s.len() > MAX_LINE_ELEMENTS {
        return Err(Error::Guard(format!(
            "rank {r}, {} elements (limits {MAX_LINE_RANK}, {MAX_LINE_ELEMENTS})",
            s.len()
        )));
    }
    let sets: Vec<Vec<usize>> = s.ground().iter().copied().combinations(r - 2).collect();
    let best = sets
        .par_iter()
        .enumerate()
        .map(|(k, c)| -> Result<Option<(usize, usize)>> {
            if !s.is_independent(c)? {
                return Ok(None);
            }
            Ok(Some((k, s.contract_all(c)?.simple_size())))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("a basis contains an independent set of size rank - 2");
    Ok(LineMinor { length: best.1, contracted: sets[best.0].clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrdinaryFlats {
    pub k: usize,
    pub n: usize,
    pub rank: usize,
    /// Greedy contraction sequence `e_1..e_{k-1}`.
    pub contracted: Vec<usize>,
    /// The `(k-1)`-flat spanned by the contracted elements.
    pub flat: Vec<usize>,
    pub ordinary: usize,
    /// `2 prod_{i=1}^{k-1} f(rank - i) - 1`.
    pub epsilon_max: String,
}

/// `2 prod_{i=1}^{k-1} f(d - i) - 1`.
pub fn ordinary_flat_epsilon(d: usize, k: usize) -> Result<BigRational> {
    let mut p = BigRational::one();
    for i in 1..k {
        p *= f_lower_bound(d - i)?;
    }
    Ok(int(2) * p - BigRational::one())
}

/// Counts the ordinary `k`-flats through the flat spanned by `k-1` greedy
/// contractions of `si(M)`, without checking any precondition.
pub fn ordinary_flats_through_greedy<F: Field>(m: &LinearMatroid<F>, k: usize) -> Result<OrdinaryFlats> {
    let (s, _) = m.simplify();
    let d = s.rank();
    if k < 2 || k + 1 > d {
        return Err(Error::Precondition(format!("need 2 <= k <= rank - 1, got k={k}, rank={d}")));
    }
    let mut current = s.clone();
    let mut contracted = Vec::new();
    for _ in 1..k {
        let (e, _) = greedy_step(&current)?;
        current = current.contract(e)?.simplify().0;
        contracted.push(e);
    }
    // Contract the original simple matroid so that parallel pairs survive.
    let minor = s.contract_all(&contracted)?;
    let (classes, loops) = minor.classes_at();
    let ordinary = classes.iter().filter(|c| c.len() == 1).count();
    let mut flat: Vec<usize> = contracted.iter().copied().chain(loops.iter().map(|&p| minor.ground[p])).collect();
    flat.sort_unstable();
    let eps = if d > k { ordinary_flat_epsilon(d, k).map(|e| e.to_string()).unwrap_or_default() } else { String::new() };
    Ok(OrdinaryFlats { k, n: s.len(), rank: d, contracted, flat, ordinary, epsilon_max: eps })
}

/// Checked form: requires `eps in [0, 1]`, `2 <= k <= rank - 1` and
/// `2 prod_{i=1}^{k-1} f(rank - i) - 1 >= eps`, then asserts at least
/// `ceil(eps n)` ordinary `k`-flats.
pub fn find_flat_with_ordinary<F: Field>(
    m: &LinearMatroid<F>,
    k: usize,
    eps: &BigRational,
) -> Result<OrdinaryFlats> {
    if *eps < BigRational::zero() || *eps > BigRational::one() {
        return Err(Error::Precondition(format!("epsilon {eps} outside [0, 1]")));
    }
    let d = m.simplify().0.rank();
    if k < 2 || k + 1 > d {
        return Err(Error::Precondition(format!("need 2 <= k <= rank - 1, got k={k}, rank={d}")));
    }
    let limit = ordinary_flat_epsilon(d, k)?;
    if limit < *eps {
        return Err(Error::Precondition(format!("2 prod f(d - i) - 1 = {limit} < epsilon = {eps}")));
    }
    let out = ordinary_flats_through_greedy(m, k)?;
    let need = ceil_rational(&(eps.clone() * int(out.n as i64)));
    if BigInt::from(out.ordinary) < need {
        return Err(Error::BoundViolation(format!(
            "{} ordinary {k}-flats through the greedy flat, need {need}",
            out.ordinary
        )));
    }
    Ok(out)
}
