//! Exact transportation feasibility by augmenting paths on the bipartite
//! support graph.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSums {
    /// Row sums must equal `r`.
    Exact,
    /// Row sums may stay below `r`.
    AtMost,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportationSolution {
    pub feasible: bool,
    /// `z[i][j]`, zero off the support.
    #[serde(serialize_with = "ser_flow")]
    pub z: Vec<Vec<BigRational>>,
    #[serde(serialize_with = "ser_rational")]
    pub flow: BigRational,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_flow<S: serde::Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        seq.serialize_element(&row.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    }
    seq.end()
}

/// Decides whether some `z >= 0` supported on `support` has row sums `r`
/// (or at most `r`) and column sums `c`.
pub fn transportation_feasible(
    support: &[Vec<bool>],
    r: &[BigRational],
    c: &[BigRational],
    mode: RowSums,
) -> Result<TransportationSolution> {
    let m = support.len();
    let n = c.len();
    if r.len() != m || support.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension("support, r and c disagree in shape".into()));
    }
    if r.iter().chain(c).any(Signed::is_negative) {
        return Err(Error::Precondition("negative marginal".into()));
    }
    let total_r: BigRational = r.iter().sum();
    let total_c: BigRational = c.iter().sum();
    if mode == RowSums::Exact && total_r != total_c {
        return Err(Error::Precondition(format!("sum r = {total_r} differs from sum c = {total_c}")));
    }
    // Nodes: 0 source, 1..=m rows, m+1..=m+n columns, m+n+1 sink.
    let (src, sink) = (0, m + n + 1);
    let nodes = m + n + 2;
    let big = total_r.clone() + total_c.clone() + BigRational::from_integer(1.into());
    let mut cap = vec![vec![BigRational::zero(); nodes]; nodes];
    for i in 0..m {
        cap[src][1 + i] = r[i].clone();
        for j in 0..n {
            if support[i][j] {
                cap[1 + i][1 + m + j] = big.clone();
            }
        }
    }
    for j in 0..n {
        cap[1 + m + j][sink] = c[j].clone();
    }
    let mut flow = BigRational::zero();
    loop {
        let mut prev = vec![usize::MAX; nodes];
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            for y in 0..nodes {
                if prev[y] == usize::MAX && cap[x][y].is_positive() {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut bottleneck = big.clone();
        let mut y = sink;
        while y != src {
            let x = prev[y];
            if cap[x][y] < bottleneck {
                bottleneck = cap[x][y].clone();
            }
            y = x;
        }
        let mut y = sink;
        while y != src {
            let x = prev[y];
            cap[x][y] -= bottleneck.clone();
            cap[y][x] += bottleneck.clone();
            y = x;
        }
        flow += bottleneck;
    }
    // Flow on a row-column edge is the residual capacity of its reverse edge.
    let z: Vec<Vec<BigRational>> = (0..m)
        .map(|i| (0..n).map(|j| if support[i][j] { cap[1 + m + j][1 + i].clone() } else { BigRational::zero() }).collect())
        .collect();
    let feasible = flow == total_c && (mode == RowSums::AtMost || flow == total_r);
    Ok(TransportationSolution { feasible, z, flow })
}
