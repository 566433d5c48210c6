//! The recursive construction: an `r`-partite skeleton from a strongly
//! 3-perfect hashing matrix over GF(q), with a smaller construction planted
//! inside each of the `r` parts.
//!
//! With `q` the largest prime at most `n / r`, the skeleton has `q^k` edges on
//! `r q` vertices and meets each part in exactly one vertex per edge. Every edge
//! of a child lives inside one part, so the level has `q^k + r · |child|` edges.

use num::{BigInt, BigRational, One};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::is_prime;
use crate::hypergraph::{binomial, Hypergraph, HypergraphError, Vertex};
use crate::oracle::{greedy_extend, OracleError, SearchConfig, GREEDY_ENUMERATION_LIMIT};
use crate::phm::{find_good_vector, PhmError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraicError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Phm(#[from] PhmError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Largest prime not exceeding `x`.
pub fn largest_prime_leq(x: u64) -> Option<u64> {
    (2..=x).rev().find(|&p| is_prime(p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionBudget {
    /// Prime-gap exponent: each level reports whether `q >= n/r - (n/r)^delta`.
    pub delta: f64,
    /// Below this many vertices the greedy base is used directly.
    pub min_direct_n: usize,
    pub max_vector_tries: usize,
    pub seed: u64,
}

impl RecursionBudget {
    pub fn new(r: usize, seed: u64) -> Self {
        RecursionBudget {
            delta: 0.525,
            min_direct_n: r,
            max_vector_tries: 500,
            seed,
        }
    }

    fn validate(&self, r: usize) -> Result<(), AlgebraicError> {
        if !(self.delta > 0.0 && self.delta <= 0.525) {
            return Err(AlgebraicError::InvalidParameters(format!(
                "delta must lie in (0, 0.525], got {}",
                self.delta
            )));
        }
        if self.min_direct_n < r {
            return Err(AlgebraicError::InvalidParameters(format!(
                "min_direct_n = {} is below r = {r}",
                self.min_direct_n
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Skeleton,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub depth: usize,
    pub n: usize,
    pub strategy: Strategy,
    pub q: Option<u64>,
    pub vector: Option<Vec<u64>>,
    pub vector_tries: usize,
    pub skeleton_edges: u64,
    pub child_edges: u64,
    pub isolated_vertices: usize,
    pub prime_gap_ok: Option<bool>,
    pub edge_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    /// Outermost level first.
    pub levels: Vec<LevelReport>,
    pub edge_count: u64,
    pub verified: bool,
    /// `n^k / (r^k - r)` in lowest terms.
    pub target_count: String,
}

impl ConstructionReport {
    /// Every skeleton level has exactly `q^k + r · child` edges.
    pub fn level_identity_holds(&self) -> bool {
        self.levels.iter().all(|l| match l.strategy {
            Strategy::Skeleton => {
                l.edge_count == l.skeleton_edges + self.r as u64 * l.child_edges
                    && l.skeleton_edges == l.q.unwrap().pow(self.k as u32)
            }
            Strategy::Greedy => true,
        })
    }
}

pub fn target_count(n: usize, r: usize, k: usize) -> BigRational {
    let nk = BigInt::from(n).pow(k as u32);
    let denom = BigInt::from(r).pow(k as u32) - BigInt::from(r);
    BigRational::new(nk, denom)
}

/// The greedy base: the best greedy family on `n` vertices that avoids three
/// edges on `3r - 2k` vertices and pairs sharing `k` vertices. When cheap
/// enough, each size extends the family built on one fewer vertex, which makes
/// base counts non-decreasing in `n`.
pub fn greedy_base(r: usize, k: usize, n: usize, seed: u64) -> Result<Hypergraph, AlgebraicError> {
    let cfg = |m: usize| {
        SearchConfig::new(m, r, 3 * r - 2 * k, 3)
            .with_max_pairwise_intersection(k - 1)
            .with_seed(seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    };
    if n < r {
        return Ok(Hypergraph::empty(r, n)?);
    }
    let chain_cost: u128 = (r..=n).map(|m| binomial(m, r)).sum();
    if chain_cost > GREEDY_ENUMERATION_LIMIT {
        return Ok(greedy_extend(&cfg(n), &[])?);
    }
    let mut edges: Vec<Vec<Vertex>> = Vec::new();
    let mut graph = Hypergraph::empty(r, r)?;
    for m in r..=n {
        graph = greedy_extend(&cfg(m), &edges)?;
        edges = graph.edges().map(<[Vertex]>::to_vec).collect();
    }
    Ok(graph)
}

/// Builds a `G_r(3r - 2k, 3)`-free `r`-graph on `n` vertices with all pairwise
/// intersections below `k`.
pub fn construct_recursive(
    r: usize,
    k: usize,
    n: usize,
    budget: &RecursionBudget,
) -> Result<(Hypergraph, ConstructionReport), AlgebraicError> {
    if k < 2 || r <= k {
        return Err(AlgebraicError::InvalidParameters(format!(
            "need r > k >= 2 (r={r}, k={k})"
        )));
    }
    budget.validate(r)?;
    let mut levels = Vec::new();
    let graph = build_level(r, k, n, budget, 0, &mut levels)?;
    levels.sort_by_key(|l| l.depth);
    let verified = verify_construction(&graph, r, k);
    let report = ConstructionReport {
        n,
        r,
        k,
        levels,
        edge_count: graph.len() as u64,
        verified,
        target_count: target_count(n, r, k).to_string(),
    };
    Ok((graph, report))
}

fn build_level(
    r: usize,
    k: usize,
    n: usize,
    budget: &RecursionBudget,
    depth: usize,
    levels: &mut Vec<LevelReport>,
) -> Result<Hypergraph, AlgebraicError> {
    let level_seed = budget.seed.wrapping_add(depth as u64);
    let q = largest_prime_leq((n / r) as u64);
    let skeleton = match q {
        Some(q) if q as usize >= r && n >= budget.min_direct_n => {
            match find_good_vector(q, k, r, level_seed, budget.max_vector_tries) {
                Ok(found) => Some((q, found)),
                Err(PhmError::SearchExhausted { .. }) => None,
                Err(e) => return Err(e.into()),
            }
        }
        _ => None,
    };

    let Some((q, found)) = skeleton else {
        let graph = greedy_base(r, k, n, level_seed)?;
        levels.push(LevelReport {
            depth,
            n,
            strategy: Strategy::Greedy,
            q: None,
            vector: None,
            vector_tries: 0,
            skeleton_edges: 0,
            child_edges: 0,
            isolated_vertices: 0,
            prime_gap_ok: None,
            edge_count: graph.len() as u64,
        });
        return Ok(graph);
    };

    let qs = q as usize;
    let skeleton = found.matrix.to_hypergraph()?;
    let child = build_level(r, k, qs, budget, depth + 1, levels)?;
    let mut parts = vec![Hypergraph::new(r, n, skeleton.edges())?];
    for i in 0..r {
        parts.push(child.shifted(i * qs, n)?);
    }
    let graph = Hypergraph::union_of(r, n, &parts)?;
    let m = (n / r) as f64;
    levels.push(LevelReport {
        depth,
        n,
        strategy: Strategy::Skeleton,
        q: Some(q),
        vector: Some(found.vector.entries()),
        vector_tries: found.tries,
        skeleton_edges: skeleton.len() as u64,
        child_edges: child.len() as u64,
        isolated_vertices: n - r * qs,
        prime_gap_ok: Some(q as f64 >= m - m.powf(budget.delta)),
        edge_count: graph.len() as u64,
    });
    Ok(graph)
}

/// `G_r(3r - 2k, 3)`-free with every pairwise intersection at most `k - 1`.
pub fn verify_construction(h: &Hypergraph, r: usize, k: usize) -> bool {
    if h.r() != r || 3 * r < 2 * k + r {
        return false;
    }
    if h.max_pairwise_intersection() > k - 1 {
        return false;
    }
    h.is_free(3 * r - 2 * k, 3).map(|f| f.is_free()).unwrap_or(false)
}

/// `1 / (r^k - r)` as used by [`target_count`]; exposed for reports.
pub fn density_target(r: usize, k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(r).pow(k as u32) - BigInt::from(r))
}
