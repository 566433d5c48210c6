//! Ground truth for small parameters: the exact maximum of `f_r(n, v, e)` by
//! branch and bound, and a seeded greedy that builds maximal free families.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{binomial, FamilyBuilder, Hypergraph, HypergraphError, Vertex};

/// Largest candidate space [`exact_max_edges`] accepts.
pub const EXACT_CANDIDATE_LIMIT: u128 = 300;

/// Above this many candidate `r`-sets the greedy samples instead of enumerating.
pub const GREEDY_ENUMERATION_LIMIT: u128 = 4_000_000;

/// Consecutive rejected samples after which the sampling greedy stops.
pub const GREEDY_SAMPLING_PATIENCE: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("C({n},{r}) = {candidates} candidate edges exceeds the exact-search limit")]
    TooLarge { n: usize, r: usize, candidates: u128 },
    #[error("time budget of {budget:?} exhausted; best family found has {best} edges")]
    BudgetExceeded { budget: Duration, best: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub r: usize,
    pub v: usize,
    pub e: usize,
    /// Any two edges share at most two vertices.
    pub almost_linear: bool,
    pub max_pairwise_intersection: Option<usize>,
    pub time_budget: Duration,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(n: usize, r: usize, v: usize, e: usize) -> Self {
        SearchConfig {
            n,
            r,
            v,
            e,
            almost_linear: false,
            max_pairwise_intersection: None,
            time_budget: Duration::from_secs(60),
            seed: 0,
        }
    }

    pub fn with_max_pairwise_intersection(mut self, cap: usize) -> Self {
        self.max_pairwise_intersection = Some(cap);
        self
    }

    pub fn with_almost_linear(mut self) -> Self {
        self.almost_linear = true;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = budget;
        self
    }

    /// The tightest pairwise intersection cap implied by the constraints.
    pub fn pair_cap(&self) -> Option<usize> {
        let linear = self.almost_linear.then_some(2);
        match (linear, self.max_pairwise_intersection) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn builder(&self) -> Result<FamilyBuilder, OracleError> {
        Ok(FamilyBuilder::new(
            self.r,
            self.n,
            self.v,
            self.e,
            self.pair_cap(),
        )?)
    }

    /// A bound on the family size from codegrees: when `e r - (e-1) s <= v`, any
    /// `s`-set lies in at most `e - 1` edges; a pairwise cap `p` puts every
    /// `(p+1)`-set in at most one edge.
    pub fn counting_bound(&self) -> u128 {
        let (n, r, v, e) = (self.n, self.r, self.v as i64, self.e as i64);
        let mut bound = binomial(n, r);
        let excess = e * r as i64 - v;
        if excess <= 0 {
            bound = bound.min(e as u128 - 1);
        } else {
            let s = (excess + e - 2) / (e - 1);
            if s as usize <= r {
                let s = s as usize;
                bound = bound.min((e as u128 - 1) * binomial(n, s) / binomial(r, s));
            }
        }
        if let Some(p) = self.pair_cap() {
            if p < r {
                bound = bound.min(binomial(n, p + 1) / binomial(r, p + 1));
            }
        }
        bound
    }
}

/// An optimal family and how long the search took.
#[derive(Clone, Debug)]
pub struct ExactResult {
    pub value: usize,
    /// The lexicographically least optimal family.
    pub witness: Hypergraph,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn all_r_sets(n: usize, r: usize) -> Vec<Vec<Vertex>> {
    let items: Vec<Vertex> = (0..n as Vertex).collect();
    let mut out = Vec::new();
    crate::hypergraph::for_each_subset(&items, r, |s| out.push(s.to_vec()));
    out
}

/// Exact `f_r(n, v, e)` under the configured constraints.
///
/// Include-first depth-first search over candidates in lexicographic order,
/// with the first edge fixed to `{0, …, r-1}` (every nonempty family can be
/// relabeled to contain it). A node is cut when no completion can beat the
/// incumbent, so the first optimum found is the lexicographically least.
///
/// Bounds: the counting bound; `n f(n-1) / (n-r)` from deleting each vertex
/// in turn; and, per node, the sum over vertices of the smaller of the link
/// optimum and the degree still reachable, divided by `r`. The two recursive
/// bounds come from smaller exact searches sharing the time budget.
pub fn exact_max_edges(cfg: &SearchConfig) -> Result<ExactResult, OracleError> {
    if cfg.n < cfg.r {
        return Err(OracleError::InvalidParameters(format!(
            "exact search needs n >= r (n={}, r={})",
            cfg.n, cfg.r
        )));
    }
    let candidates = binomial(cfg.n, cfg.r);
    if candidates > EXACT_CANDIDATE_LIMIT {
        return Err(OracleError::TooLarge {
            n: cfg.n,
            r: cfg.r,
            candidates,
        });
    }
    cfg.builder()?;
    let start = Instant::now();
    let deadline = start + cfg.time_budget;
    let (value, best, nodes) = exact_inner(cfg, deadline).map_err(|best| OracleError::BudgetExceeded {
        budget: cfg.time_budget,
        best,
    })?;
    debug_assert_eq!(value, best.len());
    let witness = Hypergraph::new(cfg.r, cfg.n, &best)?;
    Ok(ExactResult {
        value: witness.len(),
        witness,
        nodes,
        elapsed: start.elapsed(),
    })
}

/// Optimum of the link problem at one vertex, or a trivial bound when that
/// problem is degenerate or too large.
fn degree_cap(cfg: &SearchConfig, deadline: Instant) -> Result<usize, usize> {
    let (n, r, v) = (cfg.n, cfg.r, cfg.v);
    let trivial = binomial(n - 1, r - 1).min(usize::MAX as u128) as usize;
    if cfg.e != 3 || r < 3 || n <= r || binomial(n - 1, r - 1) > EXACT_CANDIDATE_LIMIT {
        return Ok(trivial);
    }
    if cfg.pair_cap() == Some(0) {
        return Ok(1);
    }
    if v > 3 * (r - 1) {
        return Ok(2);
    }
    let mut link = SearchConfig::new(n - 1, r - 1, v - 1, 3);
    link.max_pairwise_intersection = cfg.pair_cap().map(|p| p - 1);
    Ok(exact_inner(&link, deadline)?.0)
}

/// `(value, family, nodes)`, or the best size found when the deadline passes.
fn exact_inner(cfg: &SearchConfig, deadline: Instant) -> Result<(usize, Vec<Vec<Vertex>>, u64), usize> {
    let (n, r) = (cfg.n, cfg.r);
    if n < r {
        return Ok((0, Vec::new(), 0));
    }
    let cand = all_r_sets(n, r);
    let mut cap = cfg.counting_bound().min(usize::MAX as u128) as usize;
    // a family on n-1 vertices is also one on n, so partial results carry over
    let mut floor = 0;
    if n > r {
        let smaller = SearchConfig { n: n - 1, ..cfg.clone() };
        let (f, _, _) = exact_inner(&smaller, deadline)?;
        cap = cap.min(n * f / (n - r));
        floor = f;
    }
    let degree = degree_cap(cfg, deadline).map_err(|_| floor)?;

    struct Search<'a> {
        cand: &'a [Vec<Vertex>],
        builder: FamilyBuilder,
        best: Vec<Vec<Vertex>>,
        cap: usize,
        r: usize,
        degree: usize,
        deg: Vec<usize>,
        reach: Vec<usize>,
        nodes: u64,
        deadline: Instant,
        out_of_time: bool,
    }
    impl Search<'_> {
        fn push(&mut self, j: usize) {
            self.builder.push(&self.cand[j]);
            for &x in &self.cand[j] {
                self.deg[x as usize] += 1;
            }
        }

        fn pop(&mut self) {
            if let Some(e) = self.builder.pop() {
                for &x in &e {
                    self.deg[x as usize] -= 1;
                }
            }
        }

        fn degree_bound(&mut self, addable: &[usize]) -> usize {
            self.reach.copy_from_slice(&self.deg);
            for &j in addable {
                for &x in &self.cand[j] {
                    self.reach[x as usize] += 1;
                }
            }
            self.reach.iter().map(|&d| d.min(self.degree)).sum::<usize>() / self.r
        }

        fn dfs(&mut self, idx: usize) {
            self.nodes += 1;
            if self.nodes.is_multiple_of(256) && Instant::now() > self.deadline {
                self.out_of_time = true;
            }
            if self.out_of_time {
                return;
            }
            let len = self.builder.len();
            if len > self.best.len() {
                self.best = self.builder.edges().to_vec();
            }
            if idx == self.cand.len() || self.best.len() >= self.cap {
                return;
            }
            let addable: Vec<usize> = (idx..self.cand.len())
                .filter(|&j| self.builder.can_add(&self.cand[j]))
                .collect();
            if (len + addable.len()).min(self.cap) <= self.best.len() {
                return;
            }
            if self.degree_bound(&addable) <= self.best.len() {
                return;
            }
            for (pos, &j) in addable.iter().enumerate() {
                // families that skip every candidate before j, then take j
                if len + addable.len() - pos <= self.best.len() {
                    return;
                }
                self.push(j);
                self.dfs(j + 1);
                self.pop();
                if self.out_of_time {
                    return;
                }
            }
        }
    }

    let builder = cfg.builder().expect("parameters checked by the caller");
    let mut s = Search {
        cand: &cand,
        builder,
        best: Vec::new(),
        cap,
        r,
        degree,
        deg: vec![0; n],
        reach: vec![0; n],
        nodes: 0,
        deadline,
        out_of_time: false,
    };
    s.push(0);
    s.dfs(1);
    if s.out_of_time {
        return Err(s.best.len().max(floor));
    }
    Ok((s.best.len(), s.best, s.nodes))
}

/// The `rank`-th `r`-subset of `0..n` in colexicographic order.
fn unrank_colex(mut rank: u128, n: usize, r: usize) -> Vec<Vertex> {
    let mut out = vec![0; r];
    let mut top = n;
    for slot in (0..r).rev() {
        // largest c < top with C(c, slot + 1) <= rank
        let mut c = top - 1;
        while binomial(c, slot + 1) > rank {
            c -= 1;
        }
        out[slot] = c as Vertex;
        rank -= binomial(c, slot + 1);
        top = c;
    }
    out
}

/// [`greedy_extend`] from the empty family.
pub fn greedy_free_graph(cfg: &SearchConfig) -> Result<Hypergraph, OracleError> {
    greedy_extend(cfg, &[])
}

/// Starting from `initial` (which must itself satisfy the constraints), visits
/// candidate `r`-sets in seeded random order and keeps each one that preserves
/// freeness and the intersection cap.
///
/// When `C(n, r)` exceeds [`GREEDY_ENUMERATION_LIMIT`] the candidates are random
/// samples instead, stopping after [`GREEDY_SAMPLING_PATIENCE`] consecutive
/// rejections; the result is then not guaranteed maximal.
pub fn greedy_extend(cfg: &SearchConfig, initial: &[Vec<Vertex>]) -> Result<Hypergraph, OracleError> {
    if cfg.n < cfg.r {
        return Ok(Hypergraph::empty(cfg.r, cfg.n)?);
    }
    let mut builder = cfg.builder()?;
    let mut present = std::collections::HashSet::new();
    for edge in initial {
        let mut e = edge.clone();
        e.sort_unstable();
        if !builder.can_add(&e) || !present.insert(e.clone()) {
            return Err(OracleError::InvalidParameters(format!(
                "initial edge {e:?} breaks the constraints"
            )));
        }
        builder.push(&e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total = binomial(cfg.n, cfg.r);
    if total <= GREEDY_ENUMERATION_LIMIT {
        let mut order: Vec<u32> = (0..total as u32).collect();
        order.shuffle(&mut rng);
        for rank in order {
            let e = unrank_colex(rank as u128, cfg.n, cfg.r);
            if !present.contains(&e) && builder.can_add(&e) {
                builder.push(&e);
            }
        }
    } else {
        let mut stall = 0;
        while stall < GREEDY_SAMPLING_PATIENCE {
            let e = unrank_colex(rng.gen_range(0..total), cfg.n, cfg.r);
            if !present.contains(&e) && builder.can_add(&e) {
                builder.push(&e);
                present.insert(e);
                stall = 0;
            } else {
                stall += 1;
            }
        }
    }
    Ok(builder.to_hypergraph())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_small_values() {
        for (n, expected) in [(3, 1), (4, 2), (5, 2)] {
            let res = exact_max_edges(&SearchConfig::new(n, 3, 5, 3)).unwrap();
            assert_eq!(res.value, expected, "n={n}");
            assert!(res.witness.is_free_naive(5, 3).unwrap().is_free());
        }
    }

    #[test]
    fn six_vertices() {
        let res = exact_max_edges(&SearchConfig::new(6, 3, 5, 3)).unwrap();
        assert_eq!(res.value, 4);
        let expected = Hypergraph::new(3, 6, [[0, 1, 2], [0, 1, 3], [2, 4, 5], [3, 4, 5]]).unwrap();
        assert_eq!(res.witness, expected);
    }

    #[test]
    fn counting_bound_values() {
        // s = ceil((9 - 5) / 2) = 2: every pair in at most two triples
        assert_eq!(SearchConfig::new(10, 3, 5, 3).counting_bound(), 30);
        assert_eq!(SearchConfig::new(10, 3, 9, 3).counting_bound(), 2);
        let linear = SearchConfig::new(9, 3, 5, 3).with_max_pairwise_intersection(1);
        assert_eq!(linear.counting_bound(), 12);
    }

    #[test]
    fn exact_guards() {
        assert!(matches!(
            exact_max_edges(&SearchConfig::new(16, 3, 5, 3)),
            Err(OracleError::TooLarge { candidates: 560, .. })
        ));
        assert!(exact_max_edges(&SearchConfig::new(2, 3, 5, 3)).is_err());
        let tight = SearchConfig::new(9, 3, 6, 3).with_time_budget(Duration::ZERO);
        assert!(matches!(
            exact_max_edges(&tight),
            Err(OracleError::BudgetExceeded { .. }) | Ok(_)
        ));
    }

    #[test]
    fn greedy_examples() {
        let cfg = SearchConfig::new(5, 3, 5, 3)
            .with_max_pairwise_intersection(1)
            .with_seed(7);
        assert_eq!(greedy_free_graph(&cfg).unwrap().len(), 2);
        assert_eq!(greedy_free_graph(&SearchConfig::new(3, 3, 5, 3)).unwrap().len(), 1);
        assert!(greedy_free_graph(&SearchConfig::new(2, 3, 5, 3)).unwrap().is_empty());
    }

    #[test]
    fn greedy_is_maximal_and_free() {
        let cfg = SearchConfig::new(9, 3, 6, 3).with_seed(3);
        let h = greedy_free_graph(&cfg).unwrap();
        assert!(h.is_free_naive(6, 3).unwrap().is_free());
        for e in all_r_sets(9, 3) {
            if h.contains_edge(&e) {
                continue;
            }
            let mut edges: Vec<Vec<Vertex>> = h.edges().map(<[Vertex]>::to_vec).collect();
            edges.push(e);
            let bigger = Hypergraph::new(3, 9, edges).unwrap();
            assert!(!bigger.is_free_naive(6, 3).unwrap().is_free());
        }
    }

    #[test]
    fn greedy_extends_initial_family() {
        let cfg = SearchConfig::new(7, 3, 5, 3).with_max_pairwise_intersection(1);
        let start = vec![vec![0, 1, 2], vec![2, 3, 4]];
        let h = greedy_extend(&cfg, &start).unwrap();
        assert!(h.contains_edge(&[0, 1, 2]) && h.contains_edge(&[2, 3, 4]));
        assert!(greedy_extend(&cfg, &[vec![0, 1, 2], vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn colex_unranking_is_a_bijection() {
        let mut seen: Vec<Vec<Vertex>> = (0..binomial(7, 3)).map(|i| unrank_colex(i, 7, 3)).collect();
        assert_eq!(seen[0], vec![0, 1, 2]);
        seen.sort();
        seen.dedup();
        assert_eq!(seen, all_r_sets(7, 3));
    }
}
