//! Uniform hypergraphs in canonical form, plus the freeness and codegree machinery.
//!
//! A [`Hypergraph`] stores its edges as strictly ascending `r`-tuples, sorted
//! lexicographically and pairwise distinct. Every constructor canonicalizes, so two
//! hypergraphs with the same edge set compare equal and serialize identically.

mod codegree;
mod freeness;
mod incremental;

pub use codegree::CodegreeCensus;
pub use freeness::{Freeness, FreenessWitness, PairIndex, DEFAULT_NAIVE_BUDGET};
pub use incremental::FamilyBuilder;

use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("uniformity must be at least 1")]
    ZeroUniformity,
    #[error("edge {edge:?} has {got} vertices, expected {r}")]
    WrongEdgeSize { edge: Vec<Vertex>, got: usize, r: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("edge {0:?} repeats a vertex")]
    RepeatedVertex(Vec<Vertex>),
    #[error("edge {0:?} occurs more than once")]
    DuplicateEdge(Vec<Vertex>),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("enumeration of {count} subsets exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An `r`-uniform hypergraph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    r: usize,
    n: usize,
    /// Edges back to back, `r` vertices each.
    flat: Vec<Vertex>,
}

impl Hypergraph {
    pub fn empty(r: usize, n: usize) -> Result<Self, HypergraphError> {
        Self::new(r, n, std::iter::empty::<Vec<Vertex>>())
    }

    /// Validates and canonicalizes. Vertices within an edge may come in any order.
    pub fn new<I, E>(r: usize, n: usize, edges: I) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        if r == 0 {
            return Err(HypergraphError::ZeroUniformity);
        }
        let mut sorted: Vec<Vec<Vertex>> = Vec::new();
        for edge in edges {
            let mut e = edge.as_ref().to_vec();
            if e.len() != r {
                return Err(HypergraphError::WrongEdgeSize {
                    got: e.len(),
                    edge: e,
                    r,
                });
            }
            e.sort_unstable();
            if let Some(&vertex) = e.iter().find(|&&v| v as usize >= n) {
                return Err(HypergraphError::VertexOutOfRange { vertex, n });
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedVertex(e));
            }
            sorted.push(e);
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(HypergraphError::DuplicateEdge(w[0].clone()));
        }
        Ok(Hypergraph {
            r,
            n,
            flat: sorted.concat(),
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.flat.len() / self.r
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.flat[i * self.r..(i + 1) * self.r]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[Vertex]> + '_ {
        self.flat.chunks_exact(self.r)
    }

    pub fn edge_index(&self, edge: &[Vertex]) -> Option<usize> {
        let mut e = edge.to_vec();
        e.sort_unstable();
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).cmp(&e[..]) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains_edge(&self, edge: &[Vertex]) -> bool {
        self.edge_index(edge).is_some()
    }

    /// For each vertex, the indices of the edges containing it (ascending).
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges().enumerate() {
            for &v in e {
                inc[v as usize].push(i as u32);
            }
        }
        inc
    }

    /// The same edges with every vertex shifted by `offset`, living on `n` vertices.
    pub fn shifted(&self, offset: usize, n: usize) -> Result<Hypergraph, HypergraphError> {
        let edges = self
            .edges()
            .map(|e| e.iter().map(|&v| v + offset as Vertex).collect::<Vec<_>>());
        Hypergraph::new(self.r, n, edges)
    }

    /// Edge-disjoint union of several hypergraphs on a common vertex set of size `n`.
    pub fn union_of<'a>(
        r: usize,
        n: usize,
        parts: impl IntoIterator<Item = &'a Hypergraph>,
    ) -> Result<Hypergraph, HypergraphError> {
        let mut edges: Vec<Vec<Vertex>> = Vec::new();
        for part in parts {
            if part.r != r {
                return Err(HypergraphError::InvalidParameters(format!(
                    "cannot union a {}-graph into a {r}-graph",
                    part.r
                )));
            }
            edges.extend(part.edges().map(<[Vertex]>::to_vec));
        }
        Hypergraph::new(r, n, edges)
    }

    /// Number of edges containing every vertex of `t`.
    pub fn codegree(&self, t: &[Vertex]) -> Result<usize, HypergraphError> {
        if let Some(&vertex) = t.iter().find(|&&v| v as usize >= self.n) {
            return Err(HypergraphError::VertexOutOfRange { vertex, n: self.n });
        }
        Ok(self
            .edges()
            .filter(|e| t.iter().all(|v| e.binary_search(v).is_ok()))
            .count())
    }

    /// Largest `|A ∩ B|` over distinct edges; 0 for fewer than two edges.
    pub fn max_pairwise_intersection(&self) -> usize {
        let inc = self.incidence();
        let mut count = vec![0usize; self.len()];
        let mut best = 0;
        for (i, e) in self.edges().enumerate() {
            for &v in e {
                for &j in &inc[v as usize] {
                    if (j as usize) > i {
                        count[j as usize] += 1;
                    }
                }
            }
            for &v in e {
                for &j in &inc[v as usize] {
                    let j = j as usize;
                    if j > i {
                        best = best.max(count[j]);
                        count[j] = 0;
                    }
                }
            }
        }
        best
    }

    /// Any two distinct edges share at most two vertices.
    pub fn is_almost_linear(&self) -> bool {
        self.max_pairwise_intersection() <= 2
    }

    /// Simultaneously `G_r(i r - (i-1) k, i)`-free for every `2 <= i <= e`.
    pub fn is_locally_sparse(&self, e: usize, k: usize) -> Result<bool, HypergraphError> {
        if e < 2 || k < 2 || self.r <= k {
            return Err(HypergraphError::InvalidParameters(format!(
                "local sparseness needs e >= 2 and r > k >= 2 (r={}, e={e}, k={k})",
                self.r
            )));
        }
        for i in 2..=e {
            let v = i * self.r - (i - 1) * k;
            if !self.is_free(v, i)?.is_free() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Serializes in the `.hg` text format: a header `r n m`, then one edge per line.
    pub fn to_hg_string(&self) -> String {
        let mut out = String::with_capacity(16 + self.flat.len() * 4);
        writeln!(out, "{} {} {}", self.r, self.n, self.len()).unwrap();
        for e in self.edges() {
            let mut first = true;
            for v in e {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `.hg` format. Edges are canonicalized, so a canonical file
    /// round-trips byte for byte through [`Hypergraph::to_hg_string`].
    pub fn parse_hg(text: &str) -> Result<Hypergraph, HypergraphError> {
        let parse_err = |line: usize, msg: &str| HypergraphError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let nums: Vec<usize> = header
            .split_ascii_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(1, "header must be three integers"))?;
        let [r, n, m] = nums[..] else {
            return Err(parse_err(1, "header must be `r n m`"));
        };
        let mut edges = Vec::with_capacity(m);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let edge: Vec<Vertex> = line
                .split_ascii_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| parse_err(idx + 1, "non-integer vertex id"))?;
            edges.push(edge);
        }
        if edges.len() != m {
            return Err(parse_err(
                1,
                &format!("header announces {m} edges, found {}", edges.len()),
            ));
        }
        Hypergraph::new(r, n, edges)
    }
}

/// `C(n, k)` in 128-bit arithmetic (saturating).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `f` on every `k`-subset of `items` in lexicographic order of positions.
pub(crate) fn for_each_subset<T: Copy>(items: &[T], k: usize, mut f: impl FnMut(&[T])) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        // rightmost position that can still advance; idx[p] tops out at len - k + p
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == items.len() - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
        pos -= 1;
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in pos..k {
            buf[j] = items[idx[j]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(r: usize, n: usize, edges: &[&[Vertex]]) -> Hypergraph {
        Hypergraph::new(r, n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn canonicalizes_edges() {
        let h = hg(3, 5, &[&[4, 2, 3], &[2, 1, 0]]);
        assert_eq!(h.edge(0), &[0, 1, 2]);
        assert_eq!(h.edge(1), &[2, 3, 4]);
        assert_eq!(h.edge_index(&[3, 4, 2]), Some(1));
        assert!(!h.contains_edge(&[0, 1, 3]));
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(matches!(
            Hypergraph::new(3, 4, [[0u32, 1, 4]]),
            Err(HypergraphError::VertexOutOfRange { vertex: 4, .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, 4, [[0u32, 1, 1]]),
            Err(HypergraphError::RepeatedVertex(_))
        ));
        assert!(matches!(
            Hypergraph::new(3, 4, [[0u32, 1, 2], [2, 1, 0]]),
            Err(HypergraphError::DuplicateEdge(_))
        ));
        assert!(matches!(
            Hypergraph::new(3, 4, [vec![0u32, 1]]),
            Err(HypergraphError::WrongEdgeSize { got: 2, .. })
        ));
    }

    #[test]
    fn codegree_examples() {
        let h = hg(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        assert_eq!(h.codegree(&[0, 1]).unwrap(), 2);
        assert_eq!(h.codegree(&[]).unwrap(), 2);
        let single = hg(3, 4, &[&[0, 1, 2]]);
        assert_eq!(single.codegree(&[3]).unwrap(), 0);
        assert!(single.codegree(&[9]).is_err());
    }

    #[test]
    fn almost_linear_examples() {
        assert!(hg(4, 6, &[&[0, 1, 2, 3], &[2, 3, 4, 5]]).is_almost_linear());
        assert!(!hg(4, 5, &[&[0, 1, 2, 3], &[0, 1, 2, 4]]).is_almost_linear());
        assert!(hg(4, 4, &[&[0, 1, 2, 3]]).is_almost_linear());
    }

    #[test]
    fn locally_sparse_examples() {
        let disjoint = hg(3, 6, &[&[0, 1, 2], &[3, 4, 5]]);
        assert!(disjoint.is_locally_sparse(3, 2).unwrap());
        let close = hg(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        assert!(!close.is_locally_sparse(2, 2).unwrap());
        assert!(close.is_locally_sparse(2, 3).is_err());
    }

    #[test]
    fn hg_format_round_trip() {
        let text = "3 6 2\n0 1 2\n2 3 5\n";
        let h = Hypergraph::parse_hg(text).unwrap();
        assert_eq!(h.to_hg_string(), text);
        let empty = "3 0 0\n";
        assert_eq!(Hypergraph::parse_hg(empty).unwrap().to_hg_string(), empty);
        assert!(Hypergraph::parse_hg("3 6 2\n0 1 2\n").is_err());
        assert!(Hypergraph::parse_hg("3 6\n").is_err());
        assert!(Hypergraph::parse_hg("3 6 1\n0 1 x\n").is_err());
    }

    #[test]
    fn subsets_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_subset(&[1, 2, 3, 4], 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        let mut count = 0;
        for_each_subset(&[0u8; 3], 0, |_| count += 1);
        assert_eq!(count, 1);
        for_each_subset(&[0u8; 3], 4, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(25, 3), 2300);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
